"""Fixed-point machinery for the integral operator.

The map under iteration is

    T(v)(x) = (1/8 pi) int kernel(x, y) (P(y) + |v(y)|)^(-q) dy,

with kernel |x - y| (unshifted) or |x - y| - |y| (shifted).  The shifted
variant pins T(v)(0) = 0 and produces fields with at most linear growth; the
unshifted variant requires an integrable first moment and keeps the constant.

On radial grids the angular integral is the closed-form spherical mean.  On
axisymmetric grids the density is expanded in even Legendre modes of cos theta
(exact Gauss-Legendre transform), each mode is convolved with its closed-form
radial kernel, and the field is resynthesized; no pointwise kernel singularity
is ever evaluated.  One application costs O(n_modes * n_r^2).

Iteration is damped Picard: v <- (1 - theta) v + theta T(v), with theta from
the config and automatic halving when the step norm keeps rising.  Divergence
is a flag on the report, never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (AxisymmetricGrid, ConfigError, NonFiniteError, Profile,
                    RadialGrid, SolutionReport, SolveConfig, validate_config,
                    x_norm)
from .kernels import mode_kernel_table


class SphericalReduction:
    """Even-mode Legendre transform pair for an axisymmetric grid.

    analyze() projects node values onto even Legendre modes of t = cos theta
    (exact for the grid's angular band); synthesize() evaluates the mode sum
    back at the nodes, computing the t > 0 half and mirroring it so evenness
    in x1 holds bit-for-bit.
    """

    def __init__(self, grid: AxisymmetricGrid):
        L = grid.n_angle
        self.grid = grid
        self.l_values = list(range(0, L, 2))
        vander = np.polynomial.legendre.legvander(grid.t, L - 1)
        self.pl = vander[:, self.l_values]  # (L, n_modes)
        scale = np.array([(2 * l + 1) / 2.0 for l in self.l_values])
        self.forward = (self.pl * grid.wt[:, None]).T * scale[:, None]  # (n_modes, L)

    def analyze(self, values: np.ndarray) -> np.ndarray:
        return values @ self.forward.T  # (n_r, n_modes)

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        half = self.grid.n_angle // 2
        upper = coeffs @ self.pl[half:, :].T  # t > 0 half
        return np.concatenate([upper[:, ::-1], upper], axis=1)

    def synthesize_at(self, coeffs: np.ndarray, t: float) -> np.ndarray:
        """Mode sum along the ray with polar cosine t (any t in [-1, 1])."""
        l_max = self.l_values[-1]
        row = np.polynomial.legendre.legvander(np.array([t]), l_max)[0, self.l_values]
        return coeffs @ row


def convolve(grid, density, shifted: bool, reduction: SphericalReduction | None = None,
             tables: np.ndarray | None = None):
    """(1/8 pi) int kernel(x, y) density(y) dy on the grid nodes.

    density is node values ((n,) radial, (n_r, n_angle) axisymmetric).
    Returns field values of the same shape.  Pass a reduction/tables pair to
    reuse precomputed transforms across calls.
    """
    if isinstance(grid, RadialGrid):
        if tables is None:
            tables = mode_kernel_table(grid, [0], shifted)
        return tables[0] @ density
    if reduction is None:
        reduction = SphericalReduction(grid)
    if tables is None:
        tables = mode_kernel_table(grid, reduction.l_values, shifted)
    ghat = reduction.analyze(density)
    vhat = np.einsum("lrs,sl->rl", tables, ghat)
    return reduction.synthesize(vhat)


@dataclass
class IterationState:
    """Mutable record of one fixed-point run."""

    iters: int = 0
    theta: float = 1.0
    diff_history: list = field(default_factory=list)
    alpha_history: list = field(default_factory=list)
    bound_violation: float = 0.0  # worst excess of ||v||_X over the analytic bound
    diverged_reason: str | None = None


class OperatorContext:
    """Grid, polynomial values, kernel tables, and transforms for one config."""

    def __init__(self, cfg: SolveConfig, grid=None, _share=None):
        self.cfg = cfg
        self.grid = grid if grid is not None else cfg.build_grid()
        self.shifted = cfg.kernel_variant == "shifted"
        if _share is not None:
            # same grid and kernel variant, new polynomial: reuse the tables
            self.reduction = _share.reduction
            self.tables = _share.tables
            self._s2w = _share._s2w
            self._s3w = _share._s3w
            if self.reduction is None:
                self.p_values = cfg.poly.value_radial(self.grid.r)
            else:
                self.p_values = cfg.poly.value_rt(self.grid.r[:, None],
                                                  self.grid.t[None, :])
            return
        if isinstance(self.grid, RadialGrid):
            self.reduction = None
            self.p_values = cfg.poly.value_radial(self.grid.r)
            self.tables = mode_kernel_table(self.grid, [0], self.shifted)
            self._s2w = 0.5 * self.grid.r**2 * self.grid.line_w
            self._s3w = 0.5 * self.grid.r**3 * self.grid.line_w
        else:
            self.reduction = SphericalReduction(self.grid)
            self.p_values = cfg.poly.value_rt(self.grid.r[:, None], self.grid.t[None, :])
            n_modes = len(self.reduction.l_values)
            if n_modes * self.grid.n_r**2 > 6e8:
                raise ConfigError("kernel tables would exceed the memory budget; "
                                  "reduce n_r or n_angle")
            self.tables = mode_kernel_table(self.grid, self.reduction.l_values, self.shifted)
            self._s2w = 0.5 * self.grid.r**2 * self.grid.line_w
            self._s3w = 0.5 * self.grid.r**3 * self.grid.line_w

    # -- pieces ------------------------------------------------------------

    def density(self, v: np.ndarray) -> np.ndarray:
        """(P + |v|)^(-q); raises NonFiniteError on overflow or invalid input."""
        base = self.p_values + np.abs(v)
        with np.errstate(over="raise", divide="raise", invalid="raise"):
            try:
                dens = base ** (-self.cfg.q)
            except FloatingPointError as exc:
                raise NonFiniteError(
                    f"density (P + |v|)^-q not finite: min denominator "
                    f"{float(np.min(base)):g}") from exc
        if not np.all(np.isfinite(dens)):
            raise NonFiniteError("density (P + |v|)^-q not finite")
        return dens

    def mode0(self, dens: np.ndarray) -> np.ndarray:
        if self.reduction is None:
            return dens
        return self.reduction.analyze(dens)[:, 0]

    def alpha_quadrature(self, dens: np.ndarray) -> float:
        """(1/8 pi) int density dy truncated at r_max (the far-field slope)."""
        return float(self._s2w @ self.mode0(dens))

    def origin_value(self, dens: np.ndarray) -> float:
        """Field value at the origin: 0 shifted, (1/2) int s^3 g_0 ds unshifted."""
        if self.shifted:
            return 0.0
        return float(self._s3w @ self.mode0(dens))

    def tail_bound_alpha(self) -> float:
        """Analytic bound on the slope mass beyond r_max, from P's leading power."""
        q, p = self.cfg.q, self.cfg.poly
        m = p.growth_order()
        lead = p.tail_leading_coeff()
        if m == 0 or lead <= 0.0 or m * q <= 3.0:
            return math.inf
        R = self.grid.r_max
        return lead ** (-q) * R ** (3.0 - m * q) / (2.0 * (m * q - 3.0))

    def iterate_bound(self) -> float:
        """Bound (1/8 pi) int P^-q dy on the weighted sup norm of every iterate."""
        dens0 = self.density(np.zeros_like(self.p_values))
        tb = self.tail_bound_alpha()
        return self.alpha_quadrature(dens0) + (tb if math.isfinite(tb) else 0.0)

    def apply(self, v: np.ndarray) -> np.ndarray:
        dens = self.density(v)
        if self.reduction is None:
            out = self.tables[0] @ dens
        else:
            ghat = self.reduction.analyze(dens)
            vhat = np.einsum("lrs,sl->rl", self.tables, ghat)
            out = self.reduction.synthesize(vhat)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError("operator output not finite")
        return out


def apply_T(profile: Profile, cfg: SolveConfig, context: OperatorContext | None = None) -> Profile:
    """One application of the integral operator to a profile."""
    ctx = context if context is not None else OperatorContext(cfg)
    out = ctx.apply(profile.values)
    tb = ctx.tail_bound_alpha()
    return Profile(grid=ctx.grid, values=out,
                   symmetry=profile.symmetry,
                   tail_bound=tb if math.isfinite(tb) else None)


_DIVERGENCE_FACTOR = 1e6  # x-norm blowup threshold relative to the iterate bound


def solve_fixed_point(cfg: SolveConfig, v0: Profile | None = None,
                      context: OperatorContext | None = None):
    """Damped Picard iteration from v = 0 (or a warm start).

    Returns (profile, report, state).  Structural config problems raise
    ConfigError; everything else (integrability gate, oscillation, blowup,
    non-finite arithmetic) lands in the report with converged = False and a
    reason string.
    """
    check = validate_config(cfg)
    if check.hard_errors:
        raise ConfigError("; ".join(check.hard_errors))

    symmetry = "radial" if cfg.grid.kind == "radial" else "even"
    if check.gate_failures:
        grid = cfg.build_grid()
        shape = grid.n if isinstance(grid, RadialGrid) else (grid.n_r, grid.n_angle)
        prof = Profile(grid=grid, values=np.zeros(shape), symmetry=symmetry)
        report = SolutionReport(converged=False, iters=0, final_residual=math.nan,
                                damping_final=cfg.damping, q=cfg.q,
                                kernel_variant=cfg.kernel_variant,
                                diverged_reason=check.gate_failures[0])
        return prof, report, IterationState(diverged_reason=check.gate_failures[0])

    ctx = context if context is not None else OperatorContext(cfg)
    grid = ctx.grid
    v = np.zeros_like(ctx.p_values) if v0 is None else np.array(v0.values, dtype=float)
    r_col = grid.r if isinstance(grid, RadialGrid) else grid.r[:, None]

    state = IterationState(theta=cfg.damping)
    bound = ctx.iterate_bound()
    rising = 0
    converged = False

    for k in range(cfg.max_iters):
        try:
            tv = ctx.apply(v)
        except NonFiniteError as exc:
            state.diverged_reason = str(exc)
            break
        v_next = (1.0 - state.theta) * v + state.theta * tv
        diff = float(np.max(np.abs(v_next - v) / (1.0 + r_col)))
        vn_norm = float(np.max(np.abs(v_next) / (1.0 + r_col)))
        state.iters = k + 1
        state.diff_history.append(diff)
        state.alpha_history.append(ctx.alpha_quadrature(ctx.density(v_next)))
        state.bound_violation = max(state.bound_violation, vn_norm - bound)
        v = v_next

        if vn_norm > _DIVERGENCE_FACTOR * max(bound, 1.0) or not math.isfinite(vn_norm):
            state.diverged_reason = (
                f"iterate norm {vn_norm:g} exceeded {_DIVERGENCE_FACTOR:g} x bound {bound:g}")
            break
        if diff < cfg.tol_fixed_point * (1.0 + vn_norm):
            converged = True
            break
        # halve the damping when the step norm stalls or oscillates: three
        # steps without real improvement cover both monotone growth and the
        # flip-flop of a marginally unstable far-field slope
        if len(state.diff_history) >= 2 and diff > 0.9 * state.diff_history[-2]:
            rising += 1
            if rising >= 3:
                state.theta = max(state.theta / 2.0, 0.125)
                rising = 0
        else:
            rising = 0

    if not converged and state.diverged_reason is None:
        state.diverged_reason = f"no convergence within max_iters = {cfg.max_iters}"

    prof = Profile(grid=grid, values=v, symmetry=symmetry,
                   tail_bound=(lambda tb: tb if math.isfinite(tb) else None)(
                       ctx.tail_bound_alpha()))
    dens = ctx.density(v)
    report = SolutionReport(
        converged=converged,
        iters=state.iters,
        final_residual=state.diff_history[-1] if state.diff_history else math.nan,
        damping_final=state.theta,
        q=cfg.q,
        kernel_variant=cfg.kernel_variant,
        diverged_reason=None if converged else state.diverged_reason,
        alpha=ctx.alpha_quadrature(dens),
        v_origin=ctx.origin_value(dens),
        u_origin=cfg.poly.c + ctx.origin_value(dens),
        x_norm_v=x_norm(prof),
        iterate_bound=bound,
        tail_bound=ctx.tail_bound_alpha(),
        diff_history=list(state.diff_history),
        alpha_history=list(state.alpha_history),
    )
    return prof, report, state


@dataclass
class ContinuationResult:
    """Stages of a decreasing-epsilon continuation with warm starts."""

    eps_values: list
    profiles: list
    reports: list
    cauchy: list  # sup over r <= 10 of |v_i - v_{i-1}| between consecutive stages
    limit_poly: object

    @property
    def final_profile(self) -> Profile:
        return self.profiles[-1]

    @property
    def final_report(self) -> SolutionReport:
        return self.reports[-1]


def continuation_eps_to_zero(cfg: SolveConfig) -> ContinuationResult:
    """Solve along cfg.continuation.eps_sequence, warm-starting each stage.

    The grid and kernel tables are shared across stages (only the polynomial
    changes).  Cauchy diagnostics record sup_{r <= 10} |v_i - v_{i-1}|; a
    decreasing sequence is the empirical sign that the family converges.
    """
    if cfg.continuation is None:
        raise ConfigError("continuation_eps_to_zero requires cfg.continuation")
    cont = cfg.continuation
    eps_values = list(cont.eps_sequence)
    profiles, reports, cauchy = [], [], []
    ctx = None
    warm = None
    for eps in eps_values:
        stage_cfg = cfg.replace_poly(cfg.poly.with_eps(cont.eps_param, eps))
        if ctx is None:
            ctx = OperatorContext(stage_cfg)
        else:
            ctx = OperatorContext(stage_cfg, grid=ctx.grid, _share=ctx)
        prof, rep, _ = solve_fixed_point(stage_cfg, v0=warm, context=ctx)
        profiles.append(prof)
        reports.append(rep)
        if warm is not None:
            g = prof.grid
            sel = g.r <= 10.0
            delta = np.abs(prof.values - profiles[-2].values)
            cauchy.append(float(np.max(delta[sel] if isinstance(g, RadialGrid)
                                       else delta[sel, :])))
        warm = prof
        if not rep.converged:
            break
    return ContinuationResult(eps_values=eps_values[:len(profiles)], profiles=profiles,
                              reports=reports, cauchy=cauchy,
                              limit_poly=cfg.poly.with_eps(cont.eps_param, 0.0))

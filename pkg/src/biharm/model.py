"""Core data types: polynomial data, quadrature grids, profiles, configs, reports.

Everything here is plain numpy plus frozen dataclasses.  Grids carry their own
quadrature weights so that integrals over R^3 under the declared symmetry are
single weighted sums.  Configuration objects round-trip through JSON with fixed
field names, and report serialization is deterministic (floats rounded to 12
significant digits) so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class ConfigError(ValueError):
    """Raised for structurally invalid configurations."""


class NonFiniteError(ArithmeticError):
    """Raised when an operator evaluation produces non-finite values."""


class NotIntegrableError(ArithmeticError):
    """Raised when a requested integral provably diverges for the given growth."""


class InsufficientTailError(ValueError):
    """Raised when a tail fit window has too few nodes or spans less than a decade."""


class GridTooCoarseError(ValueError):
    """Raised when a grid cannot support the requested finite-difference stencil."""


# ---------------------------------------------------------------------------
# polynomial data


@dataclass(frozen=True)
class QuadraticPolynomial:
    """P(x) = c + sum_i a_i x_i^2 + sum_i b_i x_i + eps_quartic |x|^4.

    The quartic term is an optional regularizer that restores integrability of
    P^-q when the quadratic part alone decays too slowly.
    """

    a: tuple[float, float, float]
    b: tuple[float, float, float] = (0.0, 0.0, 0.0)
    c: float = 1.0
    eps_quartic: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "eps_quartic", float(self.eps_quartic))
        if len(self.a) != 3 or len(self.b) != 3:
            raise ConfigError("polynomial coefficient vectors must have length 3")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (..., 3) array of Cartesian points."""
        pts = np.asarray(points, dtype=float)
        a = np.array(self.a)
        b = np.array(self.b)
        r2 = np.sum(pts * pts, axis=-1)
        return (
            self.c
            + np.sum(a * pts * pts, axis=-1)
            + np.sum(b * pts, axis=-1)
            + self.eps_quartic * r2 * r2
        )

    def value_rt(self, r: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Evaluate on spheres: radius r, polar cosine t against the x1 axis.

        Valid only for axially symmetric even data (a2 == a3, b == 0).
        """
        if not self.is_axisymmetric():
            raise ConfigError("value_rt requires a2 == a3 and b == 0")
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        r2 = r * r
        ang = self.a[0] * t * t + self.a[1] * (1.0 - t * t)
        return self.c + r2 * ang + self.eps_quartic * r2 * r2

    def value_radial(self, r: np.ndarray) -> np.ndarray:
        if not self.is_radial():
            raise ConfigError("value_radial requires a1 == a2 == a3 and b == 0")
        r = np.asarray(r, dtype=float)
        return self.c + self.a[0] * r * r + self.eps_quartic * r**4

    def pohozaev_weight_rt(self, r: np.ndarray, t: np.ndarray) -> np.ndarray:
        """2 (x . grad P) - P, the dilation weight entering the integral identity."""
        if not self.is_axisymmetric():
            raise ConfigError("pohozaev_weight_rt requires a2 == a3 and b == 0")
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        r2 = r * r
        ang = self.a[0] * t * t + self.a[1] * (1.0 - t * t)
        return 3.0 * r2 * ang + 7.0 * self.eps_quartic * r2 * r2 - self.c

    def laplacian_origin(self) -> float:
        return 2.0 * (self.a[0] + self.a[1] + self.a[2])

    # -- structure ----------------------------------------------------------

    def is_even(self) -> bool:
        return all(v == 0.0 for v in self.b)

    def is_axisymmetric(self) -> bool:
        return self.is_even() and self.a[1] == self.a[2]

    def is_radial(self) -> bool:
        return self.is_even() and self.a[0] == self.a[1] == self.a[2]

    def growth_order(self) -> int:
        """Power of |x| governing P at infinity in every direction (0, 2, or 4).

        A quartic term dominates all directions; otherwise growth is quadratic
        only when every axis coefficient is positive.
        """
        if self.eps_quartic > 0.0:
            return 4
        return 2 if min(self.a) > 0.0 else 0

    def tail_leading_coeff(self) -> float:
        """Coefficient of the leading term at infinity, for tail bounds."""
        if self.eps_quartic > 0.0:
            return self.eps_quartic
        if min(self.a) > 0.0:
            return min(self.a)
        return 0.0

    def positivity_margin(self) -> float:
        """inf P over R^3 when a_i >= 0 (else -inf); positive means P > 0."""
        if min(self.a) < 0.0:
            return -math.inf
        margin = self.c
        for ai, bi in zip(self.a, self.b):
            if bi != 0.0:
                if ai == 0.0:
                    return -math.inf
                margin -= bi * bi / (4.0 * ai)
        return margin

    def with_eps(self, param: str, eps: float) -> "QuadraticPolynomial":
        """Return a copy with the continuation knob `param` set to `eps`."""
        if param == "quartic":
            return QuadraticPolynomial(self.a, self.b, self.c, eps)
        if param == "axis1":
            return QuadraticPolynomial((eps, self.a[1], self.a[2]), self.b, self.c, self.eps_quartic)
        if param == "isotropic":
            return QuadraticPolynomial((eps, eps, eps), self.b, self.c, self.eps_quartic)
        raise ConfigError(f"unknown continuation parameter {param!r}")

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "c": self.c, "eps_quartic": self.eps_quartic}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadraticPolynomial":
        try:
            return cls(tuple(d["a"]), tuple(d.get("b", (0.0, 0.0, 0.0))),
                       float(d.get("c", 1.0)), float(d.get("eps_quartic", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed polynomial spec: {exc}") from exc


# ---------------------------------------------------------------------------
# grids


def _graded_nodes(n: int, r_max: float, grading: float):
    """Graded radial nodes r_k = r_max (k/n)^grading, k = 1..n, plus line weights.

    Line weights w_k approximate int_0^r_max f(r) dr = sum w_k f(r_k) via the
    trapezoid rule in the uniform index variable; for grading > 1 the index-0
    endpoint contributes exactly zero, and for grading = 1 the dropped origin
    cell is O((r_1)^3) under the r^2 measure every caller uses.
    """
    k = np.arange(0, n + 1, dtype=float)
    r_all = r_max * (k / n) ** grading
    dr = r_max * grading * k ** (grading - 1.0) / n**grading
    w = dr.copy()
    w[-1] *= 0.5
    # k = 0 endpoint: weight dr(0), zero for grading > 1
    return r_all[1:], w[1:]


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radii with weights for int_{R^3} f = 4 pi int f r^2 dr."""

    r: np.ndarray
    line_w: np.ndarray
    r_max: float
    grading: float

    @classmethod
    def graded(cls, n: int, r_max: float, grading: float = 2.0) -> "RadialGrid":
        if n < 8:
            raise ConfigError("radial grid needs at least 8 nodes")
        if r_max <= 0 or grading < 1.0:
            raise ConfigError("radial grid needs r_max > 0 and grading >= 1")
        r, w = _graded_nodes(n, float(r_max), float(grading))
        return cls(r=r, line_w=w, r_max=float(r_max), grading=float(grading))

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights for integration over R^3 of radial integrands."""
        return FOUR_PI * self.r * self.r * self.line_w

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))


@dataclass(frozen=True)
class AxisymmetricGrid:
    """Product grid: graded radii x Gauss-Legendre polar cosines.

    Nodes are (x1, rho) = (r t, r sqrt(1 - t^2)); the t nodes are symmetric
    about 0 so mirror symmetry in x1 is represented exactly (node i mirrors to
    node n_angle - 1 - i).  Weights reproduce
    int_{R^3} f = 2 pi int int f(x1, rho) rho drho dx1 = 2 pi int int f r^2 dr dt.
    """

    r: np.ndarray
    line_w: np.ndarray
    t: np.ndarray
    wt: np.ndarray
    r_max: float
    grading: float

    @classmethod
    def build(cls, n_r: int, n_angle: int, r_max: float, grading: float = 2.0) -> "AxisymmetricGrid":
        if n_r < 8:
            raise ConfigError("axisymmetric grid needs at least 8 radii")
        if n_angle < 4 or n_angle % 2 != 0:
            raise ConfigError("axisymmetric grid needs an even n_angle >= 4")
        if r_max <= 0 or grading < 1.0:
            raise ConfigError("axisymmetric grid needs r_max > 0 and grading >= 1")
        r, w = _graded_nodes(n_r, float(r_max), float(grading))
        t, wt = np.polynomial.legendre.leggauss(n_angle)
        # enforce bit-exact antisymmetry of the nodes about t = 0
        t = 0.5 * (t - t[::-1])
        wt = 0.5 * (wt + wt[::-1])
        return cls(r=r, line_w=w, t=t, wt=wt, r_max=float(r_max), grading=float(grading))

    @property
    def n_r(self) -> int:
        return self.r.size

    @property
    def n_angle(self) -> int:
        return self.t.size

    @property
    def x1(self) -> np.ndarray:
        return np.outer(self.r, self.t)

    @property
    def rho(self) -> np.ndarray:
        return np.outer(self.r, np.sqrt(np.maximum(1.0 - self.t * self.t, 0.0)))

    @property
    def weights(self) -> np.ndarray:
        return TWO_PI * np.outer(self.r * self.r * self.line_w, self.wt)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))

    def mirror(self, values: np.ndarray) -> np.ndarray:
        """Values at the x1-mirrored nodes."""
        return values[:, ::-1]


Grid = RadialGrid | AxisymmetricGrid


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Profile:
    """Sampled scalar field on a grid.

    values has shape (n,) on a radial grid and (n_r, n_angle) on an
    axisymmetric grid.  symmetry is "radial" or "even" (even in x1).
    """

    grid: Grid
    values: np.ndarray
    symmetry: str
    tail_bound: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if isinstance(self.grid, RadialGrid):
            if v.shape != (self.grid.n,):
                raise ConfigError(f"radial profile shape {v.shape} != ({self.grid.n},)")
        else:
            if v.shape != (self.grid.n_r, self.grid.n_angle):
                raise ConfigError(
                    f"axisymmetric profile shape {v.shape} != "
                    f"({self.grid.n_r}, {self.grid.n_angle})")
        if self.symmetry not in ("radial", "even"):
            raise ConfigError(f"unknown symmetry tag {self.symmetry!r}")


def x_norm(profile_or_values, r=None) -> float:
    """Weighted sup norm sup |v(x)| / (1 + |x|)."""
    if isinstance(profile_or_values, Profile):
        grid = profile_or_values.grid
        v = profile_or_values.values
        if isinstance(grid, RadialGrid):
            return float(np.max(np.abs(v) / (1.0 + grid.r)))
        return float(np.max(np.abs(v) / (1.0 + grid.r[:, None])))
    v = np.asarray(profile_or_values, dtype=float)
    r = np.asarray(r, dtype=float)
    return float(np.max(np.abs(v) / (1.0 + r)))


# ---------------------------------------------------------------------------
# profile CSV serialization


def save_profile_csv(profile: Profile, path) -> None:
    """Radial profiles as `r,value`; axisymmetric as `x1,rho,value` (row-major)."""
    g = profile.grid
    with open(path, "w") as f:
        if isinstance(g, RadialGrid):
            f.write("r,value\n")
            for r, v in zip(g.r, profile.values):
                f.write(f"{float(r)!r},{float(v)!r}\n")
        else:
            f.write("x1,rho,value\n")
            x1, rho = g.x1, g.rho
            vals = profile.values
            for j in range(g.n_r):
                for i in range(g.n_angle):
                    f.write(f"{float(x1[j, i])!r},{float(rho[j, i])!r},"
                            f"{float(vals[j, i])!r}\n")


def load_profile_csv(path, grid: Grid) -> Profile:
    """Load a profile written by save_profile_csv onto a matching grid."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    if isinstance(grid, RadialGrid):
        if data.dtype.names != ("r", "value"):
            raise ConfigError(f"expected header r,value, got {data.dtype.names}")
        r = np.atleast_1d(data["r"])
        v = np.atleast_1d(data["value"])
        if r.size != grid.n or not np.allclose(r, grid.r, rtol=1e-9, atol=1e-12):
            raise ConfigError("profile radii do not match the configured grid")
        return Profile(grid=grid, values=v, symmetry="radial")
    if data.dtype.names != ("x1", "rho", "value"):
        raise ConfigError(f"expected header x1,rho,value, got {data.dtype.names}")
    n = grid.n_r * grid.n_angle
    if data["value"].size != n:
        raise ConfigError(f"profile has {data['value'].size} rows, grid has {n} nodes")
    x1 = data["x1"].reshape(grid.n_r, grid.n_angle)
    rho = data["rho"].reshape(grid.n_r, grid.n_angle)
    scale = 1.0 + grid.r[:, None]
    if (np.max(np.abs(x1 - grid.x1) / scale) > 1e-9
            or np.max(np.abs(rho - grid.rho) / scale) > 1e-9):
        raise ConfigError("profile coordinates do not match the configured grid")
    return Profile(grid=grid, values=data["value"].reshape(grid.n_r, grid.n_angle),
                   symmetry="even")


# ---------------------------------------------------------------------------
# solver configuration


@dataclass(frozen=True)
class GridSpec:
    kind: str  # "radial" | "axisymmetric"
    n_r: int
    r_max: float
    grading: float = 2.0
    n_angle: int = 64

    def build(self) -> Grid:
        if self.kind == "radial":
            return RadialGrid.graded(self.n_r, self.r_max, self.grading)
        if self.kind == "axisymmetric":
            return AxisymmetricGrid.build(self.n_r, self.n_angle, self.r_max, self.grading)
        raise ConfigError(f"unknown grid kind {self.kind!r}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n_r": self.n_r, "r_max": self.r_max, "grading": self.grading}
        if self.kind == "axisymmetric":
            d["n_angle"] = self.n_angle
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        try:
            return cls(kind=d["kind"], n_r=int(d["n_r"]), r_max=float(d["r_max"]),
                       grading=float(d.get("grading", 2.0)), n_angle=int(d.get("n_angle", 64)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed grid spec: {exc}") from exc


@dataclass(frozen=True)
class ContinuationSpec:
    eps_sequence: tuple[float, ...]
    eps_param: str = "quartic"  # "quartic" | "axis1" | "isotropic"

    def to_dict(self) -> dict:
        return {"eps_sequence": list(self.eps_sequence), "eps_param": self.eps_param}

    @classmethod
    def from_dict(cls, d: dict) -> "ContinuationSpec":
        try:
            return cls(tuple(float(e) for e in d["eps_sequence"]),
                       d.get("eps_param", "quartic"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed continuation spec: {exc}") from exc


@dataclass(frozen=True)
class SolveConfig:
    """Everything needed for one fixed-point solve (plus optional continuation)."""

    q: float
    poly: QuadraticPolynomial
    kernel_variant: str  # "shifted" | "unshifted"
    grid: GridSpec
    damping: float = 1.0
    tol_fixed_point: float = 1e-8
    max_iters: int = 200
    seed: int = 0
    continuation: Optional[ContinuationSpec] = None

    def build_grid(self) -> Grid:
        return self.grid.build()

    def to_dict(self) -> dict:
        d = {
            "q": self.q,
            "poly": self.poly.to_dict(),
            "kernel_variant": self.kernel_variant,
            "grid": self.grid.to_dict(),
            "damping": self.damping,
            "tol_fixed_point": self.tol_fixed_point,
            "max_iters": self.max_iters,
            "seed": self.seed,
        }
        if self.continuation is not None:
            d["continuation"] = self.continuation.to_dict()
        return d

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as f:
                f.write(text + "\n")
        return text

    @classmethod
    def from_dict(cls, d: dict) -> "SolveConfig":
        try:
            cont = d.get("continuation")
            return cls(
                q=float(d["q"]),
                poly=QuadraticPolynomial.from_dict(d["poly"]),
                kernel_variant=d["kernel_variant"],
                grid=GridSpec.from_dict(d["grid"]),
                damping=float(d.get("damping", 1.0)),
                tol_fixed_point=float(d.get("tol_fixed_point", 1e-8)),
                max_iters=int(d.get("max_iters", 200)),
                seed=int(d.get("seed", 0)),
                continuation=ContinuationSpec.from_dict(cont) if cont else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "SolveConfig":
        with open(path) as f:
            try:
                d = json.load(f)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(d)

    def replace_poly(self, poly: QuadraticPolynomial) -> "SolveConfig":
        return SolveConfig(q=self.q, poly=poly, kernel_variant=self.kernel_variant,
                           grid=self.grid, damping=self.damping,
                           tol_fixed_point=self.tol_fixed_point, max_iters=self.max_iters,
                           seed=self.seed, continuation=None)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationResult:
    """Outcome of config validation.

    hard_errors: structural problems (bad grid, non-positive or odd polynomial);
    gate_failures: the analytic integrability gate (q in the nonexistence
    regime, or kernel mass of P^-q divergent for the chosen variant);
    warnings: advisory notes, e.g. a constant P whose convergence relies on
    the iterate's own linear growth.
    """

    ok: bool
    hard_errors: list = field(default_factory=list)
    gate_failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def nonexistence_regime(self) -> bool:
        return not self.hard_errors and bool(self.gate_failures)


def validate_config(cfg: SolveConfig) -> ValidationResult:
    hard, gates, warns = [], [], []

    if not (cfg.q > 0.0) or not math.isfinite(cfg.q):
        hard.append(f"q must be positive and finite, got {cfg.q}")
    if cfg.kernel_variant not in ("shifted", "unshifted"):
        hard.append(f"unknown kernel_variant {cfg.kernel_variant!r}")
    if not (0.0 < cfg.damping <= 1.0):
        hard.append(f"damping must lie in (0, 1], got {cfg.damping}")
    if not (cfg.tol_fixed_point > 0.0):
        hard.append(f"tol_fixed_point must be positive, got {cfg.tol_fixed_point}")
    if cfg.max_iters < 1:
        hard.append(f"max_iters must be >= 1, got {cfg.max_iters}")

    try:
        cfg.build_grid()
    except ConfigError as exc:
        hard.append(str(exc))

    p = cfg.poly
    if p.eps_quartic < 0.0:
        hard.append(f"eps_quartic must be >= 0, got {p.eps_quartic}")
    if min(p.a) < 0.0:
        hard.append(f"quadratic coefficients must be >= 0, got a = {p.a}")
    if p.c <= 0.0:
        hard.append(f"constant term must be positive, got c = {p.c} (P(0) = {p.c} <= 0)")
    for i, (ai, bi) in enumerate(zip(p.a, p.b)):
        if bi != 0.0 and ai == 0.0:
            hard.append(f"b[{i}] != 0 with a[{i}] = 0 makes P unbounded below")
    margin = p.positivity_margin()
    if math.isfinite(margin) and margin <= 0.0 and p.c > 0.0:
        hard.append(f"polynomial minimum {margin} <= 0 (c - sum b_i^2/(4 a_i))")
    if not p.is_even():
        hard.append(f"iteration requires an even polynomial, got b = {p.b}")
    if cfg.grid.kind == "radial" and not p.is_radial():
        hard.append("radial grid requires a radial polynomial (equal a_i, b = 0)")
    if cfg.grid.kind == "axisymmetric" and not p.is_axisymmetric():
        hard.append("axisymmetric grid requires a2 == a3 and b = 0")

    if cfg.continuation is not None:
        seq = cfg.continuation.eps_sequence
        if len(seq) == 0 or any(e <= 0 for e in seq) or any(
                seq[i] <= seq[i + 1] for i in range(len(seq) - 1)):
            hard.append("eps_sequence must be strictly decreasing and positive")
        if cfg.continuation.eps_param not in ("quartic", "axis1", "isotropic"):
            hard.append(f"unknown eps_param {cfg.continuation.eps_param!r}")

    if not hard:
        # with continuation the gate applies to the stage polynomials (all of
        # which share the first stage's growth order), not the limit
        gate_poly = p
        if cfg.continuation is not None:
            gate_poly = p.with_eps(cfg.continuation.eps_param,
                                   cfg.continuation.eps_sequence[0])
        m = gate_poly.growth_order()
        if not (cfg.q > 1.0):
            gates.append(
                f"integrability gate: q = {cfg.q:g} <= 1 is the nonexistence "
                f"regime; no positive entire solution with polynomial growth "
                f"exists there and the iteration cannot converge to one")
        elif m == 0:
            # P bounded along at least one direction: the iterate itself must
            # supply linear growth, making the density decay like r^-q there;
            # the shifted kernel needs the zeroth moment (q > 3), the
            # unshifted also the first (q > 4)
            need = 3.0 if cfg.kernel_variant == "shifted" else 4.0
            if cfg.q > need:
                warns.append(
                    f"P has no growth along at least one direction; "
                    f"convergence relies on the iterate's own linear growth "
                    f"(density ~ r^-{cfg.q:g}, q > {need:g} holds)")
            else:
                gates.append(
                    f"integrability gate: P has no growth and q = {cfg.q:g} <= "
                    f"{need:g}, so the kernel mass of the density diverges even "
                    f"with a linearly growing iterate")
        elif cfg.q * m <= 4.0:
            gates.append(
                f"integrability gate: int |x| P^-q diverges "
                f"(growth order {m} times q = {cfg.q * m:g} <= 4); raise the "
                f"decay with a quartic term and pass to the limit instead")

    return ValidationResult(ok=not hard and not gates, hard_errors=hard,
                            gate_failures=gates, warnings=warns)


# ---------------------------------------------------------------------------
# reports


def _round_floats(obj, sig: int = 12):
    """Recursively round floats to `sig` significant digits for stable output."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj), sig)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, sig) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round_floats(v, sig) for v in obj.tolist()]
    return obj


def report_json(d: dict, path=None) -> str:
    """Deterministic JSON for report dictionaries."""
    text = json.dumps(_round_floats(d), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as f:
            f.write(text + "\n")
    return text


@dataclass
class SolutionReport:
    """Summary of a fixed-point solve plus the verification battery."""

    converged: bool
    iters: int
    final_residual: float
    damping_final: float
    q: float
    kernel_variant: str
    diverged_reason: Optional[str] = None
    alpha: float = math.nan
    beta: Optional[float] = None
    beta_note: str = ""
    v_origin: float = math.nan
    u_origin: float = math.nan
    x_norm_v: float = math.nan
    iterate_bound: float = math.nan
    tail_bound: float = math.nan
    growth_fits: list = field(default_factory=list)
    gamma_offset: Optional[float] = None
    integral_residual_max: Optional[float] = None
    integral_residual_note: str = ""
    pde_residual_max: Optional[float] = None
    pohozaev_residual: Optional[float] = None
    pohozaev_note: str = ""
    decomposition: Optional[dict] = None
    diff_history: list = field(default_factory=list)
    alpha_history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path=None) -> str:
        return report_json(self.to_dict(), path)

"""Far-field structure analysis of computed profiles.

Everything here reads node values only: growth-law fits along rays, the
far-field slope beta = (1/8 pi) int u^-q dy with analytic tail correction,
the split of a solution into polynomial part plus kernel convolution, and
decay-rate checks for second derivatives of the correction term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import (AxisymmetricGrid, InsufficientTailError, NonFiniteError,
                    NotIntegrableError, Profile, RadialGrid)
from .operator import SphericalReduction, convolve

_LOG_DRIFT_MODEL = "linear_times_log_quarter"
FIT_MODELS = ("linear", "quadratic", "power", _LOG_DRIFT_MODEL)


@dataclass
class GrowthFit:
    """Least-squares fit of node values against a growth law on a radial window."""

    model: str
    params: dict
    rel_residual: float
    window: tuple
    n_nodes: int
    direction: Optional[float] = None  # polar cosine of the ray, None if radial

    def to_dict(self) -> dict:
        return {"model": self.model, "params": dict(self.params),
                "rel_residual": self.rel_residual,
                "window": list(self.window), "n_nodes": self.n_nodes,
                "direction": self.direction}


def _fit_window(r: np.ndarray, r_window, min_nodes: int):
    if r_window is None:
        r_window = (r[-1] / 10.0, r[-1])
    lo, hi = float(r_window[0]), float(r_window[1])
    mask = (r >= lo) & (r <= hi)
    n = int(np.count_nonzero(mask))
    if n < min_nodes:
        raise InsufficientTailError(
            f"fit window [{lo:g}, {hi:g}] contains {n} nodes, need {min_nodes}")
    rw = r[mask]
    if rw[-1] < 3.0 * rw[0]:
        raise InsufficientTailError(
            f"fit window [{rw[0]:g}, {rw[-1]:g}] spans a factor "
            f"{rw[-1] / rw[0]:.2f} < 3 in radius")
    return mask, (float(rw[0]), float(rw[-1]))


def fit_growth(r: np.ndarray, values: np.ndarray, model: str,
               r_window=None, min_nodes: int = 30,
               direction: Optional[float] = None) -> GrowthFit:
    """Fit one growth law to values(r) on a window (default: the last decade).

    Models: "linear" c0 + c1 r; "quadratic" c0 + c1 r + c2 r^2; "power"
    C r^p (positive values only); "linear_times_log_quarter" C r (log r)^(1/4)
    with a drift coefficient in log r.  rel_residual is the max deviation over
    the window divided by the max magnitude of the data there.
    """
    r = np.asarray(r, dtype=float)
    values = np.asarray(values, dtype=float)
    mask, window = _fit_window(r, r_window, min_nodes)
    rw, vw = r[mask], values[mask]
    scale = float(np.max(np.abs(vw)))
    if scale == 0.0:
        scale = 1.0

    if model == "linear":
        A = np.stack([np.ones_like(rw), rw], axis=1)
        coef, *_ = np.linalg.lstsq(A, vw, rcond=None)
        fitted = A @ coef
        params = {"intercept": float(coef[0]), "slope": float(coef[1])}
    elif model == "quadratic":
        A = np.stack([np.ones_like(rw), rw, rw * rw], axis=1)
        coef, *_ = np.linalg.lstsq(A, vw, rcond=None)
        fitted = A @ coef
        params = {"intercept": float(coef[0]), "slope": float(coef[1]),
                  "curvature": float(coef[2])}
    elif model == "power":
        if np.any(vw <= 0.0):
            raise NonFiniteError("power-law fit needs positive values on the window")
        A = np.stack([np.ones_like(rw), np.log(rw)], axis=1)
        coef, *_ = np.linalg.lstsq(A, np.log(vw), rcond=None)
        fitted = np.exp(A @ coef)
        params = {"coeff": float(math.exp(coef[0])), "exponent": float(coef[1])}
    elif model == _LOG_DRIFT_MODEL:
        if window[0] <= 1.0:
            raise InsufficientTailError(
                "log-quarter model needs the window inside r > 1")
        base = rw * np.log(rw) ** 0.25
        ratio = vw / base
        A = np.stack([np.ones_like(rw), np.log(rw)], axis=1)
        coef, *_ = np.linalg.lstsq(A, ratio, rcond=None)
        fitted = (A @ coef) * base
        params = {"coeff": float(np.mean(ratio)),
                  "coeff_end": float(ratio[-1]),
                  "drift_per_log": float(coef[1])}
    else:
        raise ValueError(f"unknown fit model {model!r}; choose from {FIT_MODELS}")

    rel = float(np.max(np.abs(vw - fitted)) / scale)
    return GrowthFit(model=model, params=params, rel_residual=rel,
                     window=window, n_nodes=rw.size, direction=direction)


def ray_values(profile: Profile, t: Optional[float] = None,
               reduction: Optional[SphericalReduction] = None):
    """(radii, values) along the ray with polar cosine t.

    Radial profiles ignore t.  Axisymmetric profiles are resynthesized from
    their even Legendre modes, which evaluates the ray exactly within the
    grid's angular band (t = +-1 gives the symmetry axis).
    """
    g = profile.grid
    if isinstance(g, RadialGrid):
        return g.r, profile.values
    if t is None:
        raise ValueError("axisymmetric profiles need a ray direction t")
    red = reduction if reduction is not None else SphericalReduction(g)
    coeffs = red.analyze(profile.values)
    return g.r, red.synthesize_at(coeffs, float(t))


def _mode0(profile_values, grid, reduction=None) -> np.ndarray:
    if isinstance(grid, RadialGrid):
        return np.asarray(profile_values, dtype=float)
    red = reduction if reduction is not None else SphericalReduction(grid)
    return red.analyze(profile_values)[:, 0]


def tail_power_fit(r: np.ndarray, g0: np.ndarray, r_window=None,
                   min_nodes: int = 30) -> tuple[float, float]:
    """(coeff, exponent) of a decaying power law fitted to the last decade."""
    fit = fit_growth(r, g0, "power", r_window=r_window, min_nodes=min_nodes)
    return fit.params["coeff"], -fit.params["exponent"]


def compute_beta(u_profile: Profile, q: float,
                 reduction: Optional[SphericalReduction] = None):
    """Far-field slope beta = (1/8 pi) int u^-q dy with analytic tail.

    The grid integral covers r <= r_max; the remainder is integrated in closed
    form from a power law fitted to the angular mean of u^-q over the last
    decade.  Raises NotIntegrableError when the fitted decay makes the tail
    divergent (exponent <= 3).
    """
    g = u_profile.grid
    u = u_profile.values
    if np.min(u) <= 0.0:
        raise NonFiniteError("beta needs a strictly positive profile")
    dens = u ** (-q)
    g0 = _mode0(dens, g, reduction)
    quad = 0.5 * float(np.sum(g.r**2 * g.line_w * g0))
    coeff, p = tail_power_fit(g.r, g0)
    if p <= 3.0:
        raise NotIntegrableError(
            f"int u^-q diverges: angular mean of u^-q decays like r^-{p:.3g} "
            f"(need faster than r^-3)")
    tail = coeff * g.r_max ** (3.0 - p) / (2.0 * (p - 3.0))
    note = (f"grid part {quad:.6g}, tail beyond r_max adds {tail:.3g} "
            f"(fitted decay r^-{p:.3g})")
    return quad + tail, note


def tail_correction_rows(r_targets: np.ndarray, r_max: float, coeff: float,
                         p: float, shifted: bool) -> np.ndarray:
    """Closed-form kernel mass beyond r_max for a power-law density tail.

    For s > r the spherical mean of |x - y| is s + r^2/(3 s); integrating
    C s^-p against (1/2) s^2 ds from r_max gives the unshifted correction.
    The shifted kernel subtracts the s term, leaving only the r^2 piece.
    Divergent pieces (p too small) return inf so callers can flag truncation.
    """
    r = np.asarray(r_targets, dtype=float)
    quad_piece = (coeff * r**2 / 3.0 * r_max ** (2.0 - p) / (2.0 * (p - 2.0))
                  if p > 2.0 else np.full_like(r, math.inf))
    if shifted:
        return quad_piece
    lin_piece = (coeff * r_max ** (4.0 - p) / (2.0 * (p - 4.0))
                 if p > 4.0 else math.inf)
    return quad_piece + lin_piece


def decompose(u_profile: Profile, q: float, beta: Optional[float] = None,
              b_tolerance: float = 0.02) -> dict:
    """Split u into polynomial part plus kernel convolution of u^-q.

    Computes v = (1/8 pi) int (|x-y| - |y|) u(y)^-q dy on the grid, fits
    w = u - v by a quadratic in the grid's symmetry class with weights
    (1 + r^2)^-2 under the R^3 measure, and reports the coefficients, the
    relative fit residual in the quadratic-weighted sup norm, and the
    constraint checks (nonnegative quadratic part, linear part bounded by the
    slope beta, positive constant).  gamma_identity_gap is the fitted constant
    minus (1/8 pi) int |y| u^-q dy; it vanishes when u itself satisfies the
    unshifted integral identity.
    """
    g = u_profile.grid
    u = u_profile.values
    if np.min(u) <= 0.0:
        raise NonFiniteError("decomposition needs a strictly positive profile")
    dens = u ** (-q)
    reduction = None if isinstance(g, RadialGrid) else SphericalReduction(g)
    v_dec = convolve(g, dens, shifted=True, reduction=reduction)
    w = u - v_dec

    if isinstance(g, RadialGrid):
        r = g.r
        basis = [np.ones_like(r), r * r]
        names = ["c", "r2"]
        quad_scale = 1.0 + r * r
        wts = g.weights / quad_scale**2
        flat_w = w
    else:
        x1 = g.x1
        basis = [np.ones_like(x1), x1, x1 * x1, g.rho**2]
        names = ["c", "x1", "x1sq", "rhosq"]
        quad_scale = 1.0 + g.r[:, None] ** 2
        wts = g.weights / quad_scale**2
        flat_w = w

    A = np.stack([b.ravel() for b in basis], axis=1)
    sw = np.sqrt(wts.ravel())
    coef, *_ = np.linalg.lstsq(A * sw[:, None], flat_w.ravel() * sw, rcond=None)
    fit_vals = (A @ coef).reshape(w.shape)
    denom = float(np.max(np.abs(fit_vals) / quad_scale))
    fit_residual = float(np.max(np.abs(w - fit_vals) / quad_scale)) / max(denom, 1e-300)

    coeffs = dict(zip(names, (float(c) for c in coef)))
    if isinstance(g, RadialGrid):
        a = [coeffs["r2"]] * 3
        b = [0.0, 0.0, 0.0]
    else:
        a = [coeffs["x1sq"], coeffs["rhosq"], coeffs["rhosq"]]
        b = [coeffs["x1"], 0.0, 0.0]
    c = coeffs["c"]

    # first moment of the density, for the identity gap (finite iff decay > 4)
    g0 = _mode0(dens, g, reduction)
    t_coeff, p = tail_power_fit(g.r, g0)
    first_moment = 0.5 * float(np.sum(g.r**3 * g.line_w * g0))
    gamma_gap = None
    if p > 4.0:
        first_moment += t_coeff * g.r_max ** (4.0 - p) / (2.0 * (p - 4.0))
        gamma_gap = c - first_moment

    a_scale = max(max(abs(x) for x in a), 1e-12)
    constraints = {
        "a_nonneg": bool(min(a) >= -1e-6 * a_scale),
        "c_positive": bool(c > 0.0),
    }
    if beta is not None:
        constraints["b_bounded_by_beta"] = bool(
            max(abs(x) for x in b) <= beta + b_tolerance)
    return {"a": a, "b": b, "c": c, "fit_residual": fit_residual,
            "gamma_identity_gap": gamma_gap, "first_moment": first_moment
            if p > 4.0 else None, "constraints": constraints}


def _second_derivative_nonuniform(r: np.ndarray, vals: np.ndarray):
    """Three-point second derivative at interior nodes of a nonuniform grid."""
    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    d2 = 2.0 * (hm * vals[2:] - (hm + hp) * vals[1:-1] + hp * vals[:-2]) / (
        hm * hp * (hm + hp))
    return r[1:-1], d2


def hessian_decay_rate(q: float) -> tuple[str, float]:
    """Expected decay law of second derivatives of the correction term."""
    if q > 1.5:
        return "r^-1", -1.0
    if q == 1.5:
        return "r^-1 log r", -1.0
    return f"r^{2.0 - 2.0 * q:g}", 2.0 - 2.0 * q


def check_hessian_decay(v_profile: Profile, q: float,
                        rays=(1.0, 0.5, 0.0), r_window=None) -> dict:
    """Check that second radial derivatives of v decay at the expected rate.

    Along each ray the second derivative (a diagonal entry of the Hessian in
    the radial direction) is compared to the decay law for the given q; the
    envelope coefficient is the max ratio over the window and the trend is the
    fitted power of the ratio, which should not grow.
    """
    g = v_profile.grid
    if r_window is None:
        r_window = (2.0, g.r_max / 2.0)
    label, expo = hessian_decay_rate(q)
    if isinstance(g, RadialGrid):
        ray_list = [(None, v_profile.values)]
    else:
        red = SphericalReduction(g)
        coeffs = red.analyze(v_profile.values)
        ray_list = [(t, coeffs @ np.polynomial.legendre.legvander(
            np.array([t]), red.l_values[-1])[0, red.l_values]) for t in rays]

    results = []
    for t, vals in ray_list:
        rm, d2 = _second_derivative_nonuniform(g.r, vals)
        sel = (rm >= r_window[0]) & (rm <= r_window[1])
        if np.count_nonzero(sel) < 30:
            raise InsufficientTailError(
                f"hessian window [{r_window[0]:g}, {r_window[1]:g}] has "
                f"{np.count_nonzero(sel)} interior nodes, need 30")
        rr, dd = rm[sel], np.abs(d2[sel])
        envelope = rr ** expo
        if q == 1.5:
            envelope = envelope * np.log(np.maximum(rr, math.e))
        ratio = dd / envelope
        floor = 1e-14 * max(float(np.max(dd)), 1e-300)
        trend = fit_growth(rr, np.maximum(ratio, floor), "power",
                           r_window=(rr[0], rr[-1]), min_nodes=10)
        results.append({
            "direction": t,
            "envelope_coeff": float(np.max(ratio)),
            "trend_exponent": trend.params["exponent"],
            "bounded": bool(trend.params["exponent"] <= 0.25),
        })
    return {"law": label, "rays": results,
            "bounded": bool(all(r["bounded"] for r in results))}

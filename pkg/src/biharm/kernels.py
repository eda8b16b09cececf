"""Distance kernels for the integral operator.

The operator inverts the bilaplacian through the kernel |x - y| / (8 pi).  On
symmetric grids the angular integrals collapse to closed forms:

* spherical mean over a source sphere |y| = s (the l = 0 mode)
      K(r, s) = ((r + s)^3 - |r - s|^3) / (6 r s),
  with K(r, 0) = r, K(0, s) = s, max(r, s) <= K <= r + s;

* general Legendre modes of |x - y| = sum_l K_l(r, s) P_l(cos gamma),
      K_l(r, s) = r_> (xi^(l+2) / (2l + 3) - xi^l / (2l - 1)),   xi = r_< / r_>,
  derived from the generating function of the Legendre polynomials.  The sum
  telescopes to |r - s| at cos gamma = 1 and to r + s at cos gamma = -1, which
  the tests check, and K_0 equals the spherical mean above.

* azimuthal mean at fixed (x1, rho) coordinates, evaluated by fixed-order
  Gauss-Legendre quadrature in the angle (smooth integrand away from node
  coincidence; accuracy checks live in the tests).

A Monte-Carlo sphere average with a counter-based generator (Philox) serves as
the model-independent oracle for all of the above.
"""

from __future__ import annotations

import math

import numpy as np

from .model import RadialGrid


def radial_kernel(r, s):
    """Spherical mean of |x - y| over |y| = s at |x| = r (l = 0 mode).

    Accepts scalars or broadcastable arrays; the r = 0 and s = 0 limits are
    taken analytically (K(r, 0) = r, K(0, s) = s).
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    hi = np.maximum(r, s)
    lo = np.minimum(r, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
    out = hi * (1.0 + xi * xi / 3.0)
    return out if out.shape else float(out)


def legendre_mode_kernel(l: int, r, s):
    """Mode-l radial kernel K_l(r, s) of the expansion of |x - y|."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    hi = np.maximum(r, s)
    lo = np.minimum(r, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
    xil = xi**l
    out = hi * (xil * xi * xi / (2 * l + 3) - xil / (2 * l - 1))
    return out if out.shape else float(out)


def axisym_kernel(x1, rho_x, y1, rho_y, order: int = 32):
    """Azimuthal mean of |x - y| between circles of constant (x1, rho).

    (1/2pi) int_0^{2pi} sqrt((x1-y1)^2 + rho_x^2 + rho_y^2 - 2 rho_x rho_y cos phi) dphi
    by Gauss-Legendre of fixed order on [0, pi] (the integrand is even in phi).
    Inputs broadcast.  At node coincidence (x1 = y1, rho_x = rho_y) the
    integrand has a root-type kink and fixed-order quadrature degrades; grids
    used by the operator avoid coincidence by construction.
    """
    x1 = np.asarray(x1, dtype=float)
    rho_x = np.asarray(rho_x, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    rho_y = np.asarray(rho_y, dtype=float)
    nodes, w = np.polynomial.legendre.leggauss(order)
    phi = 0.5 * math.pi * (nodes + 1.0)
    wphi = w * (0.5 * math.pi) / math.pi  # mean over [0, pi] equals mean over [0, 2pi]
    base = (x1 - y1) ** 2 + rho_x**2 + rho_y**2
    cross = 2.0 * rho_x * rho_y
    vals = np.sqrt(np.maximum(
        base[..., None] - cross[..., None] * np.cos(phi), 0.0))
    out = vals @ wphi
    return out if out.shape else float(out)


def mc_kernel_oracle(x, s: float, n_samples: int, seed: int):
    """Monte-Carlo estimate of the spherical mean of |x - y| over |y| = s.

    Returns (mean, standard_error).  Uses the Philox counter-based generator,
    so results are deterministic for a given seed and independent of chunking.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    total = 0.0
    total_sq = 0.0
    remaining = int(n_samples)
    while remaining > 0:
        m = min(remaining, 1 << 18)
        g = rng.standard_normal((m, 3))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        d = np.linalg.norm(x[None, :] - s * g, axis=1)
        total += float(np.sum(d))
        total_sq += float(np.sum(d * d))
        remaining -= m
    n = float(n_samples)
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def mode_kernel_table(grid: RadialGrid, l_values, shifted: bool) -> np.ndarray:
    """Stacked per-mode operator matrices mapping density modes to field modes.

    T[i] applied to the mode-l_values[i] coefficients g_l at the grid radii
    returns (1/8pi) * the mode coefficients of int |x-y| g(y) dy, i.e.
    each row j is the quadrature of K_l(r_j, s) s^2 g_l(s) / (2 (2l+1)).
    For the shifted variant the l = 0 matrix uses K_0(r, s) - s, which
    subtracts the constant (1/8pi) int |y| g(y) dy and pins the origin to 0.
    """
    r = grid.r
    hi = np.maximum(r[:, None], r[None, :])
    lo = np.minimum(r[:, None], r[None, :])
    xi = lo / hi
    sw = grid.r**2 * grid.line_w  # s^2 ds measure
    l_values = list(l_values)
    out = np.empty((len(l_values), r.size, r.size))
    xil = np.ones_like(xi)
    cur = 0
    for idx, l in enumerate(l_values):
        while cur < l:
            xil = xil * xi
            cur += 1
        kl = hi * (xil * xi * xi / (2 * l + 3) - xil / (2 * l - 1))
        if l == 0 and shifted:
            kl = kl - r[None, :]
        out[idx] = kl * (sw / (2.0 * (2 * l + 1)))[None, :]
    return out


def kernel_row(r_target: float, grid: RadialGrid, l: int = 0, shifted: bool = False) -> np.ndarray:
    """Quadrature row for one target radius (used for off-grid evaluation)."""
    kl = legendre_mode_kernel(l, r_target, grid.r)
    if l == 0 and shifted:
        kl = kl - grid.r
    return kl * grid.r**2 * grid.line_w / (2.0 * (2 * l + 1))

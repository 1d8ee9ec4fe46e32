"""First-order correction ``F(s) = -rho(s) H[tau(s, .) rho(.)](s)``.

To first order in ``eps`` the limiting spectral law moves by ``eps dF``:
``int g dmu_eps = int g dmu - eps int g'(s) F(s) ds + o(eps)`` for every
resolvent ``g(t) = 1/(z - t)``.  Besides ``F`` itself this module provides
the functional

    Lambda(g) = int int {g(t) - g(s) - g'(s)(t - s)} tau(s,t) rho(s) rho(t) / (t - s)^2

and its truncations, which are used as independent checks of ``F``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import PvQuadratureConfig, hilbert_pv, theta_eta
from .model import ModelSpec, check_holder
from .quadrature import gauss_legendre_rule, merge_cuts, midpoint_rule


class HypothesisError(ValueError):
    """The model does not satisfy a hypothesis the computation relies on."""


@dataclass
class CorrectionTable:
    grid: np.ndarray
    F: np.ndarray
    dF: np.ndarray
    flags: np.ndarray
    singular_points: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.grid)


def F_values(model: ModelSpec, s, cfg: PvQuadratureConfig | None = None) -> np.ndarray:
    """``F`` at arbitrary points; ``nan`` exactly on a jump of the density."""
    cfg = cfg or PvQuadratureConfig.for_width(model.width)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    rho = model.rho.pdf(s)
    for i, (si, ri) in enumerate(zip(s, rho)):
        if ri == 0.0:
            continue
        try:
            h = hilbert_pv(model.integrand(si), si, cfg, model.support,
                           breaks=model.breaks_at(si), jumps=model.jumps_at(si))
        except ValueError:
            out[i] = np.nan
            continue
        out[i] = -ri * h
    return out


def finite_difference(grid: np.ndarray, values: np.ndarray, singular=()) -> np.ndarray:
    """Centered differences, one-sided where the stencil would straddle a singular point."""
    n = len(grid)
    d = np.full(n, np.nan)
    if n < 2:
        return d
    sing = np.asarray(singular, dtype=float)

    def crosses(lo, hi):
        return bool(np.any((sing > lo) & (sing < hi))) if sing.size else False

    for i in range(n):
        left_ok = i > 0 and not crosses(grid[i - 1], grid[i]) and not np.any(sing == grid[i])
        right_ok = i < n - 1 and not crosses(grid[i], grid[i + 1]) and not np.any(sing == grid[i])
        if left_ok and right_ok:
            d[i] = (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1])
        elif right_ok:
            d[i] = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i])
        elif left_ok:
            d[i] = (values[i] - values[i - 1]) / (grid[i] - grid[i - 1])
    return d


def correction_F(model: ModelSpec, grid, cfg: PvQuadratureConfig | None = None) -> CorrectionTable:
    """Tabulate ``F`` and ``dF/ds`` on a uniform grid covering the support."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ValueError("grid must be 1-d with at least 3 points")
    steps = np.diff(grid)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean() * grid.size:
        raise ValueError("grid must be uniform and increasing")
    a, b = model.support
    if grid[0] > a or grid[-1] < b:
        raise ValueError(f"grid [{grid[0]:g}, {grid[-1]:g}] does not cover the support [{a:g}, {b:g}]")
    holder = check_holder(model)
    if not holder.passed:
        raise HypothesisError(f"Hoelder check failed: worst excess {holder.worst:.3g} ({holder.detail})")
    cfg = cfg or PvQuadratureConfig.for_width(model.width)
    F = F_values(model, grid, cfg)
    sing = model.singular_points()
    dF = finite_difference(grid, F, sing)
    near = np.zeros(grid.size, dtype=bool)
    for p in sing:
        near |= np.abs(grid - p) <= cfg.exclusion_eta
    near |= ~np.isfinite(F)
    flags = np.where(near, "singular", "ok")
    return CorrectionTable(grid, F, dF, flags, sing)


def closed_form_F(example: str, s, ell: float | None = None, c: float = 1.0):
    """Exact ``F`` for the built-in examples.

    ``uniform-band``: ``1_(0,1)(s) log((ell ^ (1-s)) / (ell ^ s))``.
    ``triangular-goe``: ``(1-|s|) {(1-s)log(1-s) - (1+s)log(1+s) + 2s log|s|}`` on
    ``[-1, 1]`` with ``0 log 0 = 0``.
    ``semicircle-goe``: ``-rho_c(s) s / (2c)``.
    """
    s = np.asarray(s, dtype=float)
    if example == "uniform-band":
        if ell is None or not 0.0 < ell <= 1.0:
            raise ValueError(f"band width must lie in (0, 1], got {ell}")
        inside = (s > 0) & (s < 1)
        sc = np.where(inside, s, 0.5)
        return np.where(inside, np.log(np.minimum(ell, 1 - sc) / np.minimum(ell, sc)), 0.0)
    if example == "triangular-goe":
        from .hilbert import _xlogx
        inside = np.abs(s) <= 1
        sc = np.where(inside, s, 0.0)
        val = (1 - np.abs(sc)) * (_xlogx(1 - sc) - _xlogx(1 + sc) + 2 * _xlogx(sc))
        return np.where(inside, val, 0.0)
    if example == "semicircle-goe":
        rho = np.sqrt(np.clip(4 * c - s * s, 0, None)) / (2 * np.pi * c)
        return -rho * s / (2 * c)
    raise ValueError(f"no closed form for {example!r}")


# --------------------------------------------------------------------------- Lambda


def _check_z(z) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    return z


def lambda_integrand(z: complex, s, t):
    """``{g(t) - g(s) - g'(s)(t - s)} / (t - s)^2`` for ``g = 1/(z - .)``, computed directly."""
    g = lambda x: 1.0 / (z - x)
    gp = lambda x: 1.0 / (z - x) ** 2
    return (g(t) - g(s) - gp(s) * (t - s)) / (t - s) ** 2


def _outer_rule(model: ModelSpec, panels: float, order: int, extra=()):
    a, b = model.support
    cuts = merge_cuts(a, b, model.rho.breaks, model.kernel.s_breaks, extra)
    return gauss_legendre_rule(cuts, panels / model.width, order, graded=model.rho.breaks)


def lambda_functional(model: ModelSpec, z, panels: float = 40.0, order: int = 10) -> complex:
    """``Lambda(g_z)`` by two-dimensional Gauss-Legendre quadrature.

    For resolvents the divided difference in the integrand equals
    ``g(t) g(s)^2`` exactly, so the integrand is bounded by ``1/Im(z)^3``
    (the Taylor-Lagrange bound) and the diagonal needs no special treatment.
    """
    z = _check_z(z)
    rho = model.rho
    a, b = model.support
    s, ws = _outer_rule(model, panels, order)
    outer = ws * rho.pdf(s) / (z - s) ** 2
    k = model.kernel
    if k.constant is not None:
        t, wt = _outer_rule(model, panels, order)
        inner = k.constant * np.sum(wt * rho.pdf(t) / (z - t))
        return complex(np.sum(outer) * inner)
    total = 0.0 + 0.0j
    for si, oi in zip(s, outer):
        if oi == 0:
            continue
        cuts = merge_cuts(a, b, model.breaks_at(si))
        t, wt = gauss_legendre_rule(cuts, panels / model.width, order, graded=rho.breaks)
        total += oi * np.sum(wt * k(si, t) * rho.pdf(t) / (z - t))
    return complex(total)


def lambda_eta(model: ModelSpec, z, eta: float, cfg: PvQuadratureConfig | None = None,
               panels: float = 40.0, order: int = 8) -> complex:
    """Truncated functional ``int int_{|s-t|>eta} g'(s) tau rho(s) rho(t) / (s - t)``."""
    z = _check_z(z)
    if not eta > 0:
        raise ValueError("eta must be positive")
    if eta >= 2 * model.M:
        return 0j
    cfg = cfg or PvQuadratureConfig.for_width(model.width)
    shifted = [p + d for p in model.rho.breaks for d in (-eta, eta)]
    s, ws = _outer_rule(model, panels, order, extra=shifted)
    theta = np.array([theta_eta(model, si, eta, cfg) for si in s])
    return complex(np.sum(ws * theta / (z - s) ** 2))


def lambda_eta_symmetric_part(model: ModelSpec, z, eta: float, nodes: int = 400):
    """``int int_{|s-t|>eta} {g(t) - g(s)} tau rho rho / (t - s)^2`` on a tensor midpoint grid.

    The integrand is antisymmetric under ``s <-> t`` when ``tau`` is
    symmetric, so the sum vanishes.  Returns ``(value, sum of |terms|)``.
    """
    z = _check_z(z)
    if not eta > 0:
        raise ValueError("eta must be positive")
    a, b = model.support
    x, w = midpoint_rule(merge_cuts(a, b), nodes / model.width)
    S, T = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    mask = np.abs(S - T) > eta
    d = np.where(mask, T - S, 1.0)
    g = 1.0 / (z - x)
    terms = (g[None, :] - g[:, None]) / d ** 2
    terms = terms * model.kernel(S, T) * np.outer(model.rho.pdf(x), model.rho.pdf(x)) * W
    terms = np.where(mask, terms, 0.0)
    return complex(np.sum(terms)), float(np.sum(np.abs(terms)))


def pairing_with_F(model: ModelSpec, z, F=None, cfg: PvQuadratureConfig | None = None,
                   panels: float = 40.0, order: int = 10) -> complex:
    """``-int g_z'(s) F(s) ds``; ``F`` defaults to the numerical correction."""
    z = _check_z(z)
    s, ws = _outer_rule(model, panels, order, extra=model.singular_points())
    if F is None:
        vals = F_values(model, s, cfg)
    else:
        vals = np.asarray(F(s), dtype=float)
    return complex(-np.sum(ws * vals / (z - s) ** 2))

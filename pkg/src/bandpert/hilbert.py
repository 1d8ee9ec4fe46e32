"""Principal-value Hilbert transform ``H[u](s) = p.v. int u(t) / (s - t) dt``.

The quadrature subtracts ``u(s)`` so the integrand is bounded for Hoelder
``u``; the removed part is the exact principal value of ``1/(s - t)`` over the
support.  Composite midpoint panels never straddle a declared break of ``u``
and are refined inside the window ``|t - s| <= exclusion_eta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import merge_cuts, midpoint_rule

WINDOW_NODES = 64


@dataclass(frozen=True)
class PvQuadratureConfig:
    exclusion_eta: float = 1e-3
    nodes: int = 8192
    use_singularity_subtraction: bool = True

    def __post_init__(self):
        if not self.exclusion_eta > 0:
            raise ValueError("exclusion_eta must be positive")
        if int(self.nodes) < 1:
            raise ValueError("nodes must be a positive integer")

    @classmethod
    def for_width(cls, width: float, **kw) -> "PvQuadratureConfig":
        """Defaults scaled to a support of the given width."""
        kw.setdefault("exclusion_eta", 1e-3 * width)
        return cls(**kw)

    def refined(self) -> "PvQuadratureConfig":
        return PvQuadratureConfig(self.exclusion_eta / 2, self.nodes * 2,
                                  self.use_singularity_subtraction)


def _check_finite(values: np.ndarray):
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand produced non-finite values")


def hilbert_pv(u: Callable, s: float, cfg: PvQuadratureConfig, support: tuple[float, float],
               breaks=(), jumps=()) -> float:
    """Principal value ``H[u](s)`` for ``u`` vanishing outside ``support``.

    ``breaks`` are points where ``u`` is not smooth; ``jumps`` (a subset) are
    discontinuities.  Evaluating exactly on a jump with subtraction enabled is
    an error because the transform diverges there.

    With ``use_singularity_subtraction=False`` the result is the truncated
    integral over ``|t - s| > exclusion_eta`` only.
    """
    a, b = map(float, support)
    s = float(s)
    eta = cfg.exclusion_eta
    jumps = np.atleast_1d(np.asarray(jumps, dtype=float))
    win_lo, win_hi = s - eta, s + eta
    cuts = merge_cuts(a, b, breaks, jumps, [win_lo, s, win_hi])
    t, w = midpoint_rule(cuts, cfg.nodes)
    # denser panels inside the window
    inside = (t > win_lo) & (t < win_hi)
    if np.any(inside) or (a < s < b):
        wc = merge_cuts(max(a, win_lo), min(b, win_hi), breaks, jumps, [s])
        tw, ww = midpoint_rule(wc, WINDOW_NODES / (2 * eta), min_nodes=2)
        t = np.concatenate([t[~inside], tw])
        w = np.concatenate([w[~inside], ww])

    ut = np.asarray(u(t), dtype=float)
    _check_finite(ut)
    if not cfg.use_singularity_subtraction:
        keep = np.abs(t - s) > eta
        return float(np.sum(w[keep] * ut[keep] / (s - t[keep])))

    if jumps.size and np.any(jumps == s):
        raise ValueError(f"s = {s} sits on a declared jump of u; the transform diverges")
    us = float(u(np.array([s]))[0]) if a <= s <= b else 0.0
    if not np.isfinite(us):
        raise ValueError("integrand produced non-finite values")
    total = float(np.sum(w * (ut - us) / (s - t)))
    if us != 0.0:
        if s == a or s == b:
            raise ValueError(f"s = {s} sits on a support edge where u is nonzero")
        total += us * np.log(abs(s - a) / abs(b - s))
    return total


def theta_eta(model, s: float, eta: float, cfg: PvQuadratureConfig | None = None) -> float:
    """Truncated transform ``int_{|t-s|>eta} tau(s,t) rho(s) rho(t) / (s - t) dt``.

    Integrated over ``[s - 2M, s - eta] U [s + eta, s + 2M]`` with ``u(s)``
    subtracted, which is exact because the domain is symmetric about ``s``.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    M = model.M
    if eta >= 2 * M:
        return 0.0
    rs = float(model.rho.pdf(s))
    if rs == 0.0:
        return 0.0
    cfg = cfg or PvQuadratureConfig.for_width(model.width)
    u = model.integrand(s)
    a, b = model.support
    us = float(u(np.array([s]))[0])
    total = 0.0
    for lo, hi in ((s - 2 * M, s - eta), (s + eta, s + 2 * M)):
        cuts = merge_cuts(lo, hi, model.breaks_at(s), [a, b])
        t, w = midpoint_rule(cuts, cfg.nodes)
        total += float(np.sum(w * (u(t) - us) / (s - t)))
    return rs * total


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(ax == 0, 0.0, x * np.log(np.where(ax == 0, 1.0, ax)))


def hilbert_closed_form(kind: str, s, variance: float = 1.0):
    """Analytic ``H[rho](s)`` for the reference densities.

    * ``uniform``: ``log|s / (s - 1)|`` (diverges at 0 and 1),
    * ``semicircle``: ``s / (2t)`` inside ``[-2 sqrt t, 2 sqrt t]``,
      ``(s - sign(s) sqrt(s^2 - 4t)) / (2t)`` outside,
    * ``triangular``: ``(1+s)log|1+s| - (1-s)log|1-s| - 2 s log|s|``.
    """
    s = np.asarray(s, dtype=float)
    if kind == "uniform":
        with np.errstate(divide="ignore"):
            return np.log(np.abs(s)) - np.log(np.abs(s - 1.0))
    if kind == "semicircle":
        t = float(variance)
        if not t > 0:
            raise ValueError("semicircle variance must be positive")
        out = s / (2 * t)
        outer = s * s > 4 * t
        root = np.sqrt(np.where(outer, s * s - 4 * t, 0.0))
        return np.where(outer, (s - np.sign(s) * root) / (2 * t), out)
    if kind == "triangular":
        return _xlogx(1 + s) - _xlogx(1 - s) - 2 * _xlogx(s)
    raise ValueError(f"no closed form for {kind!r}")

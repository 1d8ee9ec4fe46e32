"""Free convolution with the semicircle law and the real Burgers-type PDE.

For ``sigma^2 = 1`` the limiting law at time ``t`` is ``mu boxplus lambda_t``
and its density satisfies

    d/dt rho_t(s) + d/ds { rho_t(s) H[rho_t](s) } = 0.

This module checks that PDE as a finite-difference residual on given flows
and checks the semigroup ``lambda_c boxplus lambda_t = lambda_{c+t}`` against
the self-consistent solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cauchy import DensityTable, SolverConfig, stieltjes_invert
from .hilbert import PvQuadratureConfig, hilbert_pv
from .model import ModelSpec, semicircle_model

CLOSED_FORM = "closed-form-semicircle"
SOLVER = "solver"
SUPPORT_FRACTION = 0.05


def semicircle_density(variance: float, s):
    """``sqrt(4t - s^2) / (2 pi t)`` on ``[-2 sqrt t, 2 sqrt t]``, zero outside."""
    if not variance > 0:
        raise ValueError("variance must be positive")
    s = np.asarray(s, dtype=float)
    return np.sqrt(np.clip(4.0 * variance - s * s, 0.0, None)) / (2.0 * np.pi * variance)


def semicircle_cdf(variance: float, s):
    if not variance > 0:
        raise ValueError("variance must be positive")
    u = np.clip(np.asarray(s, dtype=float) / (2.0 * np.sqrt(variance)), -1.0, 1.0)
    return 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi


@dataclass
class DensityFlow:
    times: np.ndarray
    slices: list
    provenance: str
    c: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.slices) != self.times.size:
            raise ValueError("one slice per time is required")

    @property
    def s(self) -> np.ndarray:
        return self.slices[0].s

    def density_fn(self, k: int):
        if self.provenance == CLOSED_FORM:
            v = self.c + self.times[k]
            return lambda t: semicircle_density(v, t)
        tab = self.slices[k]
        return lambda t: np.interp(t, tab.s, tab.density, left=0.0, right=0.0)

    def support(self, k: int) -> tuple[float, float]:
        if self.provenance == CLOSED_FORM:
            r = 2.0 * np.sqrt(self.c + self.times[k])
            return -r, r
        # the smoothed density has Lorentzian tails; cut at a fraction of the peak
        tab = self.slices[k]
        on = np.nonzero(tab.density >= SUPPORT_FRACTION * tab.density.max())[0]
        return float(tab.s[on[0]]), float(tab.s[on[-1]])


def semicircle_flow(c: float, times, s_grid) -> DensityFlow:
    """Exact flow ``rho_t = density of lambda_{c+t}``."""
    if not c > 0:
        raise ValueError("c must be positive")
    s_grid = np.asarray(s_grid, dtype=float)
    slices = [DensityTable(s_grid, semicircle_density(c + t, s_grid), semicircle_cdf(c + t, s_grid), 0.0)
              for t in times]
    return DensityFlow(np.asarray(times, float), slices, CLOSED_FORM, float(c))


def solver_flow(model: ModelSpec, times, s_grid, smoothing_eta: float = 1e-3,
                cfg: SolverConfig | None = None) -> DensityFlow:
    """Flow ``t -> mu_t`` with each slice from the self-consistent solver at ``eps = t``."""
    slices = [stieltjes_invert(model, float(t), s_grid, smoothing_eta, cfg) for t in times]
    return DensityFlow(np.asarray(times, float), slices, SOLVER)


@dataclass
class ResidualTable:
    s: np.ndarray
    t: np.ndarray
    residual: np.ndarray      # shape (len(t), len(s)), nan where not computed
    interior: np.ndarray      # boolean mask, same shape

    def max_interior(self) -> float:
        vals = np.abs(self.residual[self.interior])
        return float(vals.max()) if vals.size else float("nan")

    def rows(self):
        for i, t in enumerate(self.t):
            for j, s in enumerate(self.s):
                if self.interior[i, j]:
                    yield float(s), float(t), float(self.residual[i, j])


def _stride(step: float | None, spacing: float, name: str) -> int:
    if step is None:
        return 1
    k = int(round(step / spacing))
    if k < 1 or abs(k * spacing - step) > 1e-9 * max(1.0, step):
        raise ValueError(f"{name}={step} is not a multiple of the grid spacing {spacing}")
    return k


def burgers_residual(flow: DensityFlow, cfg: PvQuadratureConfig | None = None,
                     dt: float | None = None, ds: float | None = None,
                     edge_margin: float = 5.0, interior_fraction: float = 0.9) -> ResidualTable:
    """Centered-difference residual of ``d_t rho + d_s(rho H[rho])``.

    ``dt`` and ``ds`` default to the flow's grid spacings.  Residuals are
    reported at interior points: within ``interior_fraction`` of the support
    half-width (closed-form flows) and at least ``edge_margin * ds`` from the
    support edges.
    """
    times = flow.times
    if times.size < 3:
        raise ValueError("need at least three time slices")
    if np.ptp(np.diff(times)) > 1e-9 * max(1.0, times[-1]):
        raise ValueError("time grid must be uniform")
    s = flow.s
    if np.ptp(np.diff(s)) > 1e-9 * np.ptp(s):
        raise ValueError("s grid must be uniform")
    if any(not np.any(sl.density > 0) for sl in flow.slices):
        raise ValueError("flow contains a slice with no mass")
    kt = _stride(dt, times[1] - times[0], "dt")
    ks = _stride(ds, s[1] - s[0], "ds")
    dt = kt * (times[1] - times[0])
    ds = ks * (s[1] - s[0])
    lo, hi = flow.support(times.size - 1)
    if s[0] > lo or s[-1] < hi:
        raise ValueError("s grid does not cover the support of the flow")
    cfg = cfg or PvQuadratureConfig()

    K = times.size - 2 * kt
    if K < 1:
        raise ValueError("dt too large for the time grid")
    res = np.full((K, s.size), np.nan)
    interior = np.zeros((K, s.size), dtype=bool)
    for row, k in enumerate(range(kt, times.size - kt)):
        a, b = flow.support(k)
        if flow.provenance != CLOSED_FORM:
            # the stencil also reads slices k - kt and k + kt
            for kk in (k - kt, k + kt):
                aa, bb = flow.support(kk)
                a, b = max(a, aa), min(b, bb)
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        ok = (s - ks * (s[1] - s[0]) >= s[0]) & (s + ds <= s[-1] + 1e-12)
        ok &= (s >= a + edge_margin * ds) & (s <= b - edge_margin * ds)
        if flow.provenance == CLOSED_FORM:
            ok &= np.abs(s - mid) <= interior_fraction * half
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            continue
        need = np.unique(np.concatenate([idx - ks, idx + ks]))
        u = flow.density_fn(k)
        breaks = (a, b) if flow.provenance == CLOSED_FORM else ()
        support = (a, b) if flow.provenance == CLOSED_FORM else (s[0], s[-1])
        flux = {j: float(u(np.array([s[j]]))[0]) * hilbert_pv(u, s[j], cfg, support, breaks=breaks)
                for j in need}
        rho_next = flow.slices[k + kt].density
        rho_prev = flow.slices[k - kt].density
        for j in idx:
            dtr = (rho_next[j] - rho_prev[j]) / (2 * dt)
            dsj = (flux[j + ks] - flux[j - ks]) / (2 * ds)
            res[row, j] = dtr + dsj
            interior[row, j] = True
    return ResidualTable(s, times[kt:times.size - kt], res, interior)


def semigroup_table(c: float, t: float, smoothing_eta: float = 1e-3, cfg: SolverConfig | None = None,
                    points: int = 401, interior_fraction: float = 0.9):
    """Solver density of ``lambda_c boxplus lambda_t`` next to the ``lambda_{c+t}`` density."""
    if not c > 0 or not t > 0:
        raise ValueError("c and t must be positive")
    r = 2.0 * np.sqrt(c + t) * interior_fraction
    s = np.linspace(-r, r, points)
    tab = stieltjes_invert(semicircle_model(c), t, s, smoothing_eta, cfg)
    exact = semicircle_density(c + t, s)
    return s, tab.density, exact


def semigroup_check(c: float, t: float, smoothing_eta: float = 1e-3, cfg: SolverConfig | None = None,
                    points: int = 401) -> float:
    """Sup distance between solver and closed-form densities at interior points."""
    _, solved, exact = semigroup_table(c, t, smoothing_eta, cfg, points)
    return float(np.max(np.abs(solved - exact)))

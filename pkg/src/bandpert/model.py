"""Model description: diagonal symbol, variance profile, spectral kernel, density.

A perturbation problem is the quadruple ``(f, sigma^2, tau, rho)``:

* ``f`` maps ``[0, 1]`` to the spectrum; the diagonal entries are ``f(i/n)``,
* ``sigma^2(x, y)`` is the variance profile of the Gaussian perturbation,
* ``tau(s, t)`` is the same profile expressed on the spectrum,
  ``sigma^2(x, y) = tau(f(x), f(y))``,
* ``rho`` is the density of the push-forward of ``Uniform[0, 1]`` by ``f``.

``f`` is always built as the quantile function of ``rho`` so that ``tau`` is
well defined (``tau(s, t) = sigma^2(F(s), F(t))`` with ``F`` the CDF).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import gauss_legendre_rule, merge_cuts

DEFAULT_RESOLUTION = 4096

DENSITY_KINDS = ("uniform", "triangular", "semicircle", "tabulated")
PROFILE_KINDS = ("constant", "band", "tabulated")


class ModelError(ValueError):
    """Raised for inputs that do not define a valid perturbation problem."""


# --------------------------------------------------------------------------- density


@dataclass(frozen=True, eq=False)
class LimitDensity:
    """Limiting spectral density ``rho``.

    ``kind`` is one of ``uniform`` (on ``[0, 1]``), ``triangular``
    (``(1 - |s|)`` on ``[-1, 1]``), ``semicircle`` (variance ``variance``) or
    ``tabulated`` (piecewise linear through ``values`` on a uniform ``grid``).
    """

    kind: str
    variance: float = 1.0
    grid: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise ModelError(f"unknown density kind {self.kind!r}")
        if self.kind == "semicircle" and not self.variance > 0:
            raise ModelError("semicircle variance must be positive")
        if self.kind == "tabulated":
            if self.grid is None or self.values is None:
                raise ModelError("tabulated density needs grid and values")
            grid = np.asarray(self.grid, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
                raise ModelError("tabulated density: grid and values must be 1-d, same length >= 2")
            if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
                raise ModelError("tabulated density contains non-finite values")
            if np.any(values < 0):
                raise ModelError("tabulated density must be nonnegative")
            steps = np.diff(grid)
            if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * abs(steps[0]) * grid.size:
                raise ModelError("tabulated density grid must be uniform and increasing")
            mass = float(np.sum(0.5 * (values[1:] + values[:-1]) * steps))
            if not mass > 0:
                raise ModelError("tabulated density has zero total mass")
            if abs(mass - 1.0) > 1e-3:
                raise ModelError(f"tabulated density integrates to {mass:.6g}, not 1")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls) -> "LimitDensity":
        return cls("uniform")

    @classmethod
    def triangular(cls) -> "LimitDensity":
        return cls("triangular")

    @classmethod
    def semicircle(cls, variance: float = 1.0) -> "LimitDensity":
        return cls("semicircle", variance=float(variance))

    @classmethod
    def tabulated(cls, grid, values) -> "LimitDensity":
        return cls("tabulated", grid=np.asarray(grid, float), values=np.asarray(values, float))

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "uniform":
            return 0.0, 1.0
        if self.kind == "triangular":
            return -1.0, 1.0
        if self.kind == "semicircle":
            r = 2.0 * np.sqrt(self.variance)
            return -r, r
        return float(self.grid[0]), float(self.grid[-1])

    @property
    def bound(self) -> float:
        """``M``: the spectrum lies in ``[-M, M]``."""
        a, b = self.support
        return max(abs(a), abs(b))

    @property
    def jumps(self) -> tuple[float, ...]:
        """Points where ``rho`` is discontinuous."""
        if self.kind == "uniform":
            return 0.0, 1.0
        if self.kind == "tabulated":
            out = []
            if self.values[0] > 0:
                out.append(float(self.grid[0]))
            if self.values[-1] > 0:
                out.append(float(self.grid[-1]))
            return tuple(out)
        return ()

    @property
    def kinks(self) -> tuple[float, ...]:
        """Points where ``rho`` is continuous but not smooth."""
        if self.kind == "triangular":
            return -1.0, 0.0, 1.0
        if self.kind == "semicircle":
            return self.support
        if self.kind == "tabulated":
            return tuple(float(p) for p in self.grid if p not in self.jumps)
        return ()

    @property
    def breaks(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.jumps) | set(self.kinks)))

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "uniform":
            return ((s >= 0.0) & (s <= 1.0)).astype(float)
        if self.kind == "triangular":
            return np.clip(1.0 - np.abs(s), 0.0, None)
        if self.kind == "semicircle":
            t = self.variance
            return np.sqrt(np.clip(4.0 * t - s * s, 0.0, None)) / (2.0 * np.pi * t)
        return np.interp(s, self.grid, self.values, left=0.0, right=0.0)

    __call__ = pdf

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "uniform":
            return np.clip(s, 0.0, 1.0)
        if self.kind == "triangular":
            c = np.clip(s, -1.0, 1.0)
            return np.where(c < 0, 0.5 * (1.0 + c) ** 2, 1.0 - 0.5 * (1.0 - c) ** 2)
        if self.kind == "semicircle":
            r = 2.0 * np.sqrt(self.variance)
            u = np.clip(s / r, -1.0, 1.0)
            return 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi
        g, v = self.grid, self.values
        h = g[1] - g[0]
        nodes = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * h)))
        total = nodes[-1]
        c = np.clip(s, g[0], g[-1])
        k = np.clip(((c - g[0]) / h).astype(int), 0, len(g) - 2)
        d = c - g[k]
        val = nodes[k] + v[k] * d + 0.5 * (v[k + 1] - v[k]) * d * d / h
        return np.clip(val / total, 0.0, 1.0)

    def sup_norm(self) -> float:
        if self.kind == "uniform" or self.kind == "triangular":
            return 1.0
        if self.kind == "semicircle":
            return 1.0 / (np.pi * np.sqrt(self.variance))
        return float(np.max(self.values))

    def mass(self) -> float:
        a, b = self.support
        x, w = gauss_legendre_rule(merge_cuts(a, b, self.breaks), 20.0 / (b - a), 12,
                                   graded=self.kinks)
        return float(np.sum(w * self.pdf(x)))

    def to_dict(self) -> dict:
        if self.kind == "semicircle":
            return {"kind": "semicircle", "params": {"variance": self.variance}}
        if self.kind == "tabulated":
            return {"kind": "tabulated",
                    "params": {"grid": self.grid.tolist(), "values": self.values.tolist()}}
        return {"kind": self.kind, "params": {}}


# --------------------------------------------------------------------------- f


@dataclass(frozen=True, eq=False)
class DiagonalSymbol:
    """The function ``f`` on ``[0, 1]``; tables are linearly interpolated."""

    kind: str
    table: np.ndarray | None = None
    density: LimitDensity | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "quantile", "tabulated"):
            raise ModelError(f"unknown diagonal symbol kind {self.kind!r}")
        if self.kind != "identity":
            table = np.asarray(self.table, dtype=float)
            if table.ndim != 1 or table.size < 2:
                raise ModelError("diagonal symbol table must be 1-d with >= 2 entries")
            if not np.all(np.isfinite(table)):
                raise ModelError("diagonal symbol table contains non-finite values")
            object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls) -> "DiagonalSymbol":
        return cls("identity")

    @classmethod
    def tabulated(cls, values) -> "DiagonalSymbol":
        return cls("tabulated", table=np.asarray(values, dtype=float))

    @property
    def xgrid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.table))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "identity":
            return x.copy() if x.ndim else x
        return np.interp(x, self.xgrid, self.table)

    @property
    def bound(self) -> float:
        """``M = sup |f|``."""
        if self.kind == "identity":
            return 1.0
        return float(np.max(np.abs(self.table)))

    @property
    def is_monotone(self) -> bool:
        if self.kind == "identity":
            return True
        return bool(np.all(np.diff(self.table) > 0))

    @property
    def range(self) -> tuple[float, float]:
        if self.kind == "identity":
            return 0.0, 1.0
        return float(self.table[0]), float(self.table[-1])

    def inverse(self, s):
        """Inverse of ``f`` (clamped to ``[0, 1]``); only for increasing ``f``."""
        s = np.asarray(s, dtype=float)
        if self.kind == "identity":
            return np.clip(s, 0.0, 1.0)
        if not self.is_monotone:
            raise ModelError("f is not increasing; its inverse is undefined")
        return np.interp(s, self.table, self.xgrid)

    @property
    def breaks(self) -> tuple[float, ...]:
        if self.density is not None:
            return self.density.breaks
        return self.range


def quantile_from_density(rho: LimitDensity, resolution: int = DEFAULT_RESOLUTION) -> DiagonalSymbol:
    """Quantile function of ``rho`` tabulated on ``resolution + 1`` points.

    ``f(x) = inf{s : CDF(s) >= x}``, found by bisection on the CDF.  The
    uniform law on ``[0, 1]`` maps to the exact identity.
    """
    if int(resolution) < 2:
        raise ModelError("resolution must be >= 2")
    if rho.kind == "uniform":
        return DiagonalSymbol("identity", density=rho)
    a, b = rho.support
    xs = np.linspace(0.0, 1.0, int(resolution) + 1)
    total = rho.cdf(np.array(b))
    if not np.isfinite(total) or total <= 0:
        raise ModelError("density CDF cannot be inverted")
    lo = np.full_like(xs, a)
    hi = np.full_like(xs, b)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        up = rho.cdf(mid) >= xs
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    table = hi
    table[0], table[-1] = a, b
    if not np.all(np.diff(table) > 0):
        raise ModelError("density quantile is not strictly increasing (atoms or NaN?)")
    return DiagonalSymbol("quantile", table=table, density=rho)


# --------------------------------------------------------------------------- sigma^2


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Variance profile ``sigma^2(x, y)`` on ``[0, 1]^2``."""

    kind: str
    value: float = 1.0
    width: float = 0.0
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ModelError(f"unknown profile kind {self.kind!r}")
        if self.kind == "constant" and not (np.isfinite(self.value) and self.value >= 0):
            raise ModelError("constant profile value must be finite and >= 0")
        if self.kind == "band" and not (0.0 <= self.width <= 1.0):
            raise ModelError(f"band width must lie in [0, 1], got {self.width}")
        if self.kind == "tabulated":
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 2:
                raise ModelError("tabulated profile must be a square matrix of size >= 2")
            if not np.all(np.isfinite(t)) or np.any(t < 0):
                raise ModelError("tabulated profile must be finite and nonnegative")
            object.__setattr__(self, "table", t)

    @classmethod
    def constant(cls, value: float = 1.0) -> "VarianceProfile":
        return cls("constant", value=float(value))

    @classmethod
    def band(cls, width: float) -> "VarianceProfile":
        return cls("band", width=float(width))

    @classmethod
    def tabulated(cls, table) -> "VarianceProfile":
        return cls("tabulated", table=np.asarray(table, dtype=float))

    @property
    def bound(self) -> float:
        if self.kind == "constant":
            return float(self.value)
        if self.kind == "band":
            return 1.0
        return float(np.max(self.table))

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def asymmetry(self) -> float:
        if self.kind == "tabulated":
            return float(np.max(np.abs(self.table - self.table.T)))
        return 0.0

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return np.full(np.broadcast(x, y).shape, self.value)
        if self.kind == "band":
            return (np.abs(x - y) <= self.width).astype(float)
        m = self.table.shape[0] - 1
        x, y = np.broadcast_arrays(np.clip(x, 0, 1) * m, np.clip(y, 0, 1) * m)
        i = np.clip(np.floor(x).astype(int), 0, m - 1)
        j = np.clip(np.floor(y).astype(int), 0, m - 1)
        u, v = x - i, y - j
        t = self.table
        return ((1 - u) * (1 - v) * t[i, j] + u * (1 - v) * t[i + 1, j]
                + (1 - u) * v * t[i, j + 1] + u * v * t[i + 1, j + 1])

    def near_jump(self, x, y, tol: float):
        """Mask of points within ``tol`` of a discontinuity of the profile."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "band":
            return np.abs(np.abs(x - y) - self.width) <= tol
        return np.zeros(np.broadcast(x, y).shape, dtype=bool)

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "params": {"value": self.value}}
        if self.kind == "band":
            return {"kind": "band", "params": {"width": self.width}}
        return {"kind": "tabulated", "params": {"table": self.table.tolist()}}


# --------------------------------------------------------------------------- tau


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """The profile on the spectrum, ``tau(s, t)``, with Hoelder parameters.

    ``t_jumps(s)`` lists where ``t -> tau(s, t)`` jumps; ``s_breaks`` lists
    the points where those jumps cross a break of the density.
    """

    tau: Callable
    bound: float
    alpha: float = 1.0
    C: float | None = None
    eta0: float = 0.05
    constant: float | None = None
    jumps_fn: Callable | None = None
    s_breaks: tuple = ()

    def __post_init__(self):
        if not self.alpha > 0:
            raise ModelError("Hoelder exponent alpha must be positive")
        if not self.eta0 > 0:
            raise ModelError("Hoelder window eta0 must be positive")

    def __call__(self, s, t):
        return self.tau(np.asarray(s, dtype=float), np.asarray(t, dtype=float))

    def t_jumps(self, s: float) -> np.ndarray:
        if self.jumps_fn is None:
            return np.empty(0)
        return np.atleast_1d(np.asarray(self.jumps_fn(float(s)), dtype=float))

    def with_holder(self, **kw) -> "SpectralKernel":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(kw)
        return SpectralKernel(**data)


def kernel_from_profile(profile: VarianceProfile, f: DiagonalSymbol,
                        resolution: int = DEFAULT_RESOLUTION, *, alpha: float = 1.0,
                        eta0: float | None = None, C: float | None = None) -> SpectralKernel:
    """Re-express ``sigma^2`` on the spectrum: ``tau(s, t) = sigma^2(f^-1(s), f^-1(t))``."""
    if not f.is_monotone:
        raise ModelError("f must be increasing for tau to be well defined")
    if profile.kind == "tabulated":
        tol = 1e-9 * max(1.0, profile.bound)
        if profile.asymmetry() > tol:
            raise ModelError("variance profile is not symmetric")
    else:
        xs = np.linspace(0.0, 1.0, min(int(resolution), 257))
        if np.max(np.abs(profile(xs[:, None], xs[None, :]) - profile(xs[None, :], xs[:, None]))) > 0:
            raise ModelError("variance profile is not symmetric")
    lo, hi = f.range
    if eta0 is None:
        eta0 = 0.05 * (hi - lo)
    common = dict(bound=profile.bound, alpha=float(alpha), C=C, eta0=float(eta0))

    if profile.kind == "constant":
        c = profile.value
        return SpectralKernel(tau=lambda s, t: np.full(np.broadcast(s, t).shape, c),
                              constant=c, **common)

    finv = f.inverse
    if profile.kind == "band":
        ell = profile.width

        def tau(s, t):
            return (np.abs(finv(s) - finv(t)) <= ell).astype(float)

        def jumps(s):
            x = float(finv(s))
            out = [float(f(x - ell))] if x - ell > 0 else []
            if x + ell < 1:
                out.append(float(f(x + ell)))
            return out

        s_breaks = []
        for b in f.breaks:
            xb = float(finv(b))
            for x in (xb - ell, xb + ell):
                if 0.0 < x < 1.0:
                    s_breaks.append(float(f(x)))
        return SpectralKernel(tau=tau, jumps_fn=jumps, s_breaks=tuple(sorted(set(s_breaks))),
                              **common)

    return SpectralKernel(tau=lambda s, t: profile(finv(s), finv(t)), **common)


# --------------------------------------------------------------------------- model


@dataclass(frozen=True, eq=False)
class ModelSpec:
    f: DiagonalSymbol
    profile: VarianceProfile
    kernel: SpectralKernel
    rho: LimitDensity
    resolution: int = DEFAULT_RESOLUTION
    name: str = ""

    @property
    def support(self) -> tuple[float, float]:
        return self.rho.support

    @property
    def width(self) -> float:
        a, b = self.support
        return b - a

    @property
    def M(self) -> float:
        return max(self.f.bound, self.rho.bound)

    def integrand(self, s: float) -> Callable:
        """``t -> tau(s, t) rho(t)``, the function whose Hilbert transform gives ``F``."""
        s = float(s)
        return lambda t: self.kernel(s, t) * self.rho.pdf(t)

    def jumps_at(self, s: float) -> np.ndarray:
        """Jump points of ``t -> tau(s, t) rho(t)`` inside the support."""
        a, b = self.support
        pts = [j for j in self.rho.jumps]
        pts.extend(t for t in self.kernel.t_jumps(s) if a < t < b)
        return np.unique(np.asarray(pts, dtype=float))

    def breaks_at(self, s: float) -> np.ndarray:
        """All non-smooth points of ``t -> tau(s, t) rho(t)``."""
        return np.unique(np.concatenate([self.jumps_at(s), np.asarray(self.rho.kinks, float)]))

    def singular_points(self) -> tuple[float, ...]:
        """Where ``F`` blows up (density jumps) or is not smooth."""
        pts = set(self.rho.breaks) | set(self.kernel.s_breaks)
        return tuple(sorted(pts))

    def to_dict(self) -> dict:
        return {
            "density": self.rho.to_dict(),
            "profile": self.profile.to_dict(),
            "kernel": {"alpha": self.kernel.alpha, "eta0": self.kernel.eta0, "C": self.kernel.C},
            "resolution": self.resolution,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _holder_samples(model: ModelSpec, n_s: int, n_off: int, offset: float = 0.0):
    """Sample ``|tau(s,t)rho(t) - tau(s,s)rho(s)|`` against ``|t - s|`` for ``|t-s| <= eta0``.

    Points ``s`` within ``eta0`` of a jump of ``rho`` are skipped: the
    density itself is discontinuous there and no finite constant can hold.
    """
    k = model.kernel
    eta0 = k.eta0
    a, b = model.support
    s = a - eta0 + (b - a + 2 * eta0) * (np.arange(n_s) + 0.5 + offset) / n_s
    for j in model.rho.jumps:
        s = s[np.abs(s - j) >= eta0]
    d = eta0 * np.linspace(-1.0, 1.0, n_off)
    d = d[d != 0]
    t = s[:, None] + d[None, :]
    lhs = np.abs(k(s[:, None], t) * model.rho.pdf(t) - k(s, s)[:, None] * model.rho.pdf(s)[:, None])
    return lhs, np.broadcast_to(np.abs(d)[None, :], lhs.shape), s


HOLDER_SAFETY = 1.1


def estimate_holder_constant(model: ModelSpec, n_s: int = 1025, n_off: int = 129) -> float:
    """Sampled Hoelder constant, inflated by ``HOLDER_SAFETY`` to cover unsampled pairs."""
    lhs, dist, _ = _holder_samples(model, n_s, n_off)
    if lhs.size == 0:
        return 0.0
    return HOLDER_SAFETY * float(np.max(lhs / dist ** model.kernel.alpha))


def build_model(rho: LimitDensity, profile: VarianceProfile, resolution: int = DEFAULT_RESOLUTION,
                *, alpha: float = 1.0, eta0: float | None = None, C: float | None = None,
                name: str = "") -> ModelSpec:
    f = quantile_from_density(rho, resolution)
    kernel = kernel_from_profile(profile, f, resolution, alpha=alpha, eta0=eta0, C=C)
    model = ModelSpec(f=f, profile=profile, kernel=kernel, rho=rho, resolution=int(resolution),
                      name=name)
    if C is None:
        model = ModelSpec(f=f, profile=profile,
                          kernel=kernel.with_holder(C=estimate_holder_constant(model)),
                          rho=rho, resolution=int(resolution), name=name)
    return model


def uniform_band_model(ell: float = 0.2, resolution: int = DEFAULT_RESOLUTION) -> ModelSpec:
    """``f(x) = x`` perturbed by a band of width ``ell``."""
    if not 0.0 < ell <= 1.0:
        raise ModelError(f"band width must lie in (0, 1], got {ell}")
    return build_model(LimitDensity.uniform(), VarianceProfile.band(ell), resolution,
                       name=f"uniform-band(ell={ell:g})")


def triangular_goe_model(resolution: int = DEFAULT_RESOLUTION) -> ModelSpec:
    """Triangular pulse density perturbed by a GOE matrix (``sigma^2 = 1``)."""
    return build_model(LimitDensity.triangular(), VarianceProfile.constant(1.0), resolution,
                       name="triangular-goe")


def semicircle_model(c: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> ModelSpec:
    """Semicircle of variance ``c`` perturbed by a GOE matrix."""
    # square-root edges: Hoelder with exponent 1/2, not Lipschitz
    return build_model(LimitDensity.semicircle(c), VarianceProfile.constant(1.0), resolution,
                       alpha=0.5, name=f"semicircle-goe(c={c:g})")


# --------------------------------------------------------------------------- validation


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[HypothesisCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [f"{c.name:<12} {'PASS' if c.passed else 'FAIL'}  worst={c.worst:.3e}  "
                f"tol={c.tolerance:.3e}  {c.detail}".rstrip() for c in self.checks]

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "worst": c.worst,
                            "tolerance": c.tolerance, "detail": c.detail} for c in self.checks]}


def check_holder(model: ModelSpec, samples: int = 1000) -> HypothesisCheck:
    k = model.kernel
    C = k.C if k.C is not None else estimate_holder_constant(model)
    lhs, dist, s = _holder_samples(model, samples, 97, offset=0.31)
    excess = lhs - C * dist ** k.alpha
    worst = float(np.max(excess)) if excess.size else 0.0
    tol = 1e-9 * max(1.0, C)
    return HypothesisCheck("holder", worst <= tol, max(worst, 0.0), tol,
                           f"alpha={k.alpha:g} C={C:.4g} eta0={k.eta0:.4g}")


def validate_hypotheses(model: ModelSpec, samples: int = 1000) -> ValidationReport:
    """Numerically check the checkable hypotheses; never raises on failure."""
    rng = np.random.default_rng(12345)
    report = ValidationReport()
    a, b = model.support
    k = model.kernel

    s = rng.uniform(a, b, samples)
    t = rng.uniform(a, b, samples)
    asym = float(np.max(np.abs(k(s, t) - k(t, s))))
    xs = rng.uniform(0, 1, samples)
    ys = rng.uniform(0, 1, samples)
    asym = max(asym, float(np.max(np.abs(model.profile(xs, ys) - model.profile(ys, xs)))))
    tol = 1e-12 * max(1.0, k.bound)
    report.checks.append(HypothesisCheck("symmetry", asym <= tol, asym, tol))

    grid = (np.arange(samples) + 0.5) / samples
    fx = model.f(grid)
    over_f = float(np.max(np.abs(fx)) - model.M)
    prof = model.profile(xs, ys)
    over_p = float(max(-np.min(prof), np.max(prof) - model.profile.bound))
    tv = k(s, t)
    over_t = float(np.max(np.abs(tv)) - k.bound) if np.all(np.isfinite(tv)) else np.inf
    worst = max(over_f, over_p, over_t, 0.0)
    report.checks.append(HypothesisCheck("bounded", worst <= 1e-12, worst, 1e-12,
                                         f"M={model.M:.4g} |sigma2|<={model.profile.bound:.4g}"))

    mass = model.rho.mass()
    neg = float(max(0.0, -np.min(model.rho.pdf(np.linspace(a, b, samples)))))
    worst = max(abs(mass - 1.0), neg)
    report.checks.append(HypothesisCheck("density", worst <= 1e-3, worst, 1e-3,
                                         f"mass={mass:.8f}"))

    report.checks.append(check_holder(model, samples))

    n = samples
    vals = np.sort(model.f(np.arange(1, n + 1) / n))
    cdf = model.rho.cdf(vals)
    ks = float(max(np.max(np.abs(np.arange(1, n + 1) / n - cdf)),
                   np.max(np.abs(np.arange(0, n) / n - cdf))))
    tol = 2.0 / n + 2.0 / model.resolution
    report.checks.append(HypothesisCheck("push_forward", ks <= tol, ks, tol))

    m = min(samples, 100)
    g = (np.arange(m) + 0.5) / m
    X, Y = np.meshgrid(g, g, indexing="ij")
    ftol = 10.0 / model.resolution
    diff = np.abs(model.profile(X, Y) - k(model.f(X), model.f(Y)))
    diff = np.where(model.profile.near_jump(X, Y, ftol), 0.0, diff)
    worst = float(np.max(diff))
    report.checks.append(HypothesisCheck("consistency", worst <= ftol, worst, ftol))
    return report

"""Finite-``n`` simulation of ``D_n + sqrt(eps/n) X_n``.

``X_n`` is real symmetric with independent entries
``x_ij ~ N(0, sigma^2(i/n, j/n))`` above the diagonal and
``x_ii ~ N(0, 2 sigma^2(i/n, i/n))`` on it (the GOE convention).  Normals
come from polar Box-Muller on a Philox counter-based stream keyed by
``(seed, replicate_id)``, so every replicate is reproducible on its own.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .eigen import symmetric_eigenvalues
from .model import DiagonalSymbol, ModelSpec

SEED_MASK = (1 << 64) - 1


@dataclass
class EnsembleSample:
    n: int
    eps: float
    seed: int
    replicate_id: int
    eigenvalues: np.ndarray
    model_digest: str = ""


class EmpiricalCDF:
    """Right-continuous step function ``s -> #{lambda <= s} / n``."""

    def __init__(self, points):
        self.points = np.sort(np.asarray(points, dtype=float))
        self.n = len(self.points)

    def __call__(self, s):
        return np.searchsorted(self.points, np.asarray(s, dtype=float), side="right") / self.n


def substream(seed: int, replicate_id: int) -> np.random.Generator:
    """Independent Philox stream for one replicate, keyed by a hash of (seed, replicate_id)."""
    if seed < 0 or replicate_id < 0:
        raise ValueError("seed and replicate_id must be nonnegative")
    ss = np.random.SeedSequence([int(seed) & SEED_MASK, int(replicate_id)])
    return np.random.Generator(np.random.Philox(ss))


def polar_box_muller(gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` standard normals by the Marsaglia polar method."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        pairs = int(need / 2 / 0.78) + 16
        u = 2.0 * gen.random((pairs, 2)) - 1.0
        r2 = np.einsum("ij,ij->i", u, u)
        ok = (r2 > 0.0) & (r2 < 1.0)
        u, r2 = u[ok], r2[ok]
        z = (u * np.sqrt(-2.0 * np.log(r2) / r2)[:, None]).ravel()
        take = min(z.size, need)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def build_diagonal(n: int, f: DiagonalSymbol, midpoint: bool = False) -> np.ndarray:
    """``a_n(i) = f(i/n)`` for ``i = 1..n`` (or ``f((i - 1/2)/n)``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1, dtype=float)
    x = (i - 0.5) / n if midpoint else i / n
    return np.asarray(f(x), dtype=float)


def perturbation_matrix(n: int, model: ModelSpec, gen: np.random.Generator) -> np.ndarray:
    """Symmetric Gaussian matrix with the model's variance profile at ``(i/n, j/n)``."""
    g = polar_box_muller(gen, n * n).reshape(n, n)
    x = np.triu(g, 1)
    x += x.T
    x[np.diag_indices(n)] = np.sqrt(2.0) * np.diag(g)
    del g
    prof = model.profile
    if prof.is_constant:
        x *= np.sqrt(prof.value)
    else:
        pos = np.arange(1, n + 1) / n
        x *= np.sqrt(prof(pos[:, None], pos[None, :]))
    return x


def sample_perturbed(n: int, eps: float, model: ModelSpec, seed: int, replicate_id: int = 0,
                     eigensolver: str = "lapack", midpoint: bool = False) -> EnsembleSample:
    """Eigenvalues of one draw of ``D_n + sqrt(eps/n) X_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    d = build_diagonal(n, model.f, midpoint)
    if eps == 0:
        w = np.sort(d)
    else:
        a = perturbation_matrix(n, model, substream(seed, replicate_id))
        a *= np.sqrt(eps / n)
        a[np.diag_indices(n)] += d
        w = symmetric_eigenvalues(a, eigensolver)
    if not np.all(np.isfinite(w)):
        raise FloatingPointError("eigensolver returned non-finite values")
    return EnsembleSample(n, float(eps), int(seed), int(replicate_id), w, model.digest())


def run_replicates(n: int, eps: float, model: ModelSpec, seed: int, replicates: int,
                   threads: int = 1, eigensolver: str = "lapack") -> list[EnsembleSample]:
    """Replicates ``0..replicates-1``; the result does not depend on ``threads``."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    job = lambda r: sample_perturbed(n, eps, model, seed, r, eigensolver)
    if threads <= 1:
        return [job(r) for r in range(replicates)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(job, range(replicates)))


def cdf_shift(sample: EnsembleSample, baseline: EnsembleSample, s_grid) -> np.ndarray:
    """``(F_{D_n^eps}(s) - F_{D_n}(s)) / eps`` on ``s_grid``."""
    if sample.n != baseline.n:
        raise ValueError(f"sample n={sample.n} differs from baseline n={baseline.n}")
    if not sample.eps > 0:
        raise ValueError("sample must have eps > 0")
    if baseline.eps != 0:
        raise ValueError("baseline must have eps = 0")
    s_grid = np.asarray(s_grid, dtype=float)
    return (EmpiricalCDF(sample.eigenvalues)(s_grid) - EmpiricalCDF(baseline.eigenvalues)(s_grid)) / sample.eps


@dataclass
class ShiftTable:
    s: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    replicates: int


def replicate_average(samples, baseline: EnsembleSample, s_grid) -> ShiftTable:
    """Mean CDF shift over replicates with pointwise standard error ``std / sqrt(R)``.

    With a single replicate the standard error is undefined and reported as ``nan``.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    keys = {(x.n, x.eps, x.model_digest) for x in samples}
    if len(keys) != 1:
        raise ValueError("samples do not share (n, eps, model)")
    curves = np.array([cdf_shift(x, baseline, s_grid) for x in samples])
    r = len(samples)
    mean = curves.mean(axis=0)
    if r > 1:
        stderr = curves.std(axis=0, ddof=1) / np.sqrt(r)
    else:
        stderr = np.full(mean.shape, np.nan)
    return ShiftTable(np.asarray(s_grid, dtype=float), mean, stderr, r)


def kolmogorov_distance(points, cdf) -> float:
    """Sup distance between the empirical CDF of ``points`` and a continuous ``cdf``."""
    x = np.sort(np.asarray(points, dtype=float))
    n = x.size
    c = cdf(x)
    return float(max(np.max(np.arange(1, n + 1) / n - c), np.max(c - np.arange(n) / n)))

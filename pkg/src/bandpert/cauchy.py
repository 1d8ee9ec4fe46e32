"""Self-consistent Cauchy transform of the perturbed model.

For ``z`` in the upper half-plane the field ``C(x, z)`` solves

    C(x, z) = 1 / (z - f(x) - eps * int_0^1 sigma^2(x, y) C(y, z) dy)

and ``C_eps(z) = int_0^1 C(x, z) dx`` is the Cauchy transform of the
limiting spectral law.  The ``y`` integral uses the midpoint rule on the same
``x`` grid.  Solutions map the upper half-plane into the lower one and obey
``|C(x, z)| <= 1 / Im z``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import ModelSpec

log = logging.getLogger(__name__)

DEFAULT_NODES = 512


class ConvergenceError(RuntimeError):
    """The fixed-point iteration did not reach the requested tolerance."""

    def __init__(self, z, residual, iterations):
        super().__init__(f"no convergence at z={z}: residual {residual:.3e} after {iterations} iterations")
        self.z = z
        self.residual = residual
        self.iterations = iterations


class InvariantError(RuntimeError):
    """An iterate left the region {Im C < 0, |C| <= 1/Im z}."""


@dataclass(frozen=True)
class SolverConfig:
    nodes: int = DEFAULT_NODES
    tol: float = 1e-12
    max_iter: int = 20000
    damping: float = 0.5
    method: str = "auto"
    newton_after: int = 50

    def __post_init__(self):
        if int(self.nodes) < 1:
            raise ValueError("nodes must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.method not in ("picard", "newton", "auto"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class CauchyField:
    x_grid: np.ndarray
    z: complex
    eps: float
    values: np.ndarray
    iterations: int
    residual: float
    tol: float
    history: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.residual <= self.tol


class FieldOperator:
    """``c -> (1/N) sum_j sigma^2(x_i, x_j) c_j`` on the midpoint grid."""

    def __init__(self, model: ModelSpec, nodes: int):
        self.n = int(nodes)
        self.x = (np.arange(self.n) + 0.5) / self.n
        self.f = np.asarray(model.f(self.x), dtype=float)
        prof = model.profile
        self.kind = prof.kind
        self.value = prof.value
        self._matrix = None
        if prof.kind == "band":
            # |i - j| / N <= width, guarded against round-off at the boundary
            self.half = int(np.floor(prof.width * self.n + 1e-9))
        elif prof.kind == "tabulated":
            self._matrix = prof(self.x[:, None], self.x[None, :])

    def __call__(self, c: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full(self.n, self.value * c.mean(), dtype=complex)
        if self.kind == "band":
            cs = np.concatenate(([0.0], np.cumsum(c)))
            idx = np.arange(self.n)
            lo = np.clip(idx - self.half, 0, self.n)
            hi = np.clip(idx + self.half + 1, 0, self.n)
            return (cs[hi] - cs[lo]) / self.n
        return self._matrix @ c / self.n

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self.kind == "constant":
                self._matrix = np.full((self.n, self.n), self.value)
            else:
                i = np.arange(self.n)
                self._matrix = (np.abs(i[:, None] - i[None, :]) <= self.half).astype(float)
        return self._matrix


def _rhs(op: FieldOperator, z: complex, eps: float, c: np.ndarray) -> np.ndarray:
    return 1.0 / (z - op.f - eps * op(c))


def _in_region(c: np.ndarray, z: complex) -> bool:
    bound = 1.0 / z.imag
    return bool(np.all(c.imag < 0) and np.all(np.abs(c) <= bound * (1 + 1e-12)))


def _newton_step(op: FieldOperator, z: complex, eps: float, c: np.ndarray):
    r = _rhs(op, z, eps, c)
    g = c - r
    r2 = eps * r * r
    if op.kind == "constant":
        # J = I - (eps*value/N) r^2 1^T  (rank one)
        k = op.value / op.n
        denom = 1.0 - k * np.sum(r2)
        sum_delta = -np.sum(g) / denom
        delta = -g + k * r2 * sum_delta
    else:
        J = np.eye(op.n) - r2[:, None] * op.matrix() / op.n
        delta = np.linalg.solve(J, -g)
    return c + delta


def solve_field(model: ModelSpec, eps: float, z, tol: float = 1e-12, max_iter: int = 20000,
                damping: float = 0.5, nodes: int = DEFAULT_NODES, initial=None,
                method: str = "picard", newton_after: int = 50, operator: FieldOperator | None = None,
                check_invariants: bool = True, record_history: bool = False,
                callback=None) -> CauchyField:
    """Solve the self-consistent equation at one ``z``.

    ``method="picard"`` is the damped iteration
    ``C <- (1 - damping) C + damping RHS(C)`` started from ``1/(z - f)``;
    every iterate stays in ``{Im C < 0, |C| <= 1/Im z}``, which is asserted
    when ``check_invariants`` is set.  ``"newton"`` polishes with Newton steps
    after ``newton_after`` Picard iterations (much faster close to the real
    axis); ``"auto"`` uses Newton only when the Jacobian solve is cheap.

    ``callback(iteration, values)`` is called after every update.

    Raises :class:`ConvergenceError` when ``max_iter`` is exhausted.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("z must lie in the upper half-plane")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not tol > 0:
        raise ValueError("tol must be positive")
    op = operator or FieldOperator(model, nodes)
    if method == "auto":
        method = "newton" if (op.kind == "constant" or op.n <= 1024) else "picard"
    x = op.x
    if eps == 0:
        vals = 1.0 / (z - op.f)
        return CauchyField(x, z, 0.0, vals, 1, 0.0, tol)

    c = 1.0 / (z - op.f) if initial is None else np.asarray(initial, dtype=complex).copy()
    history = []
    residual = np.inf
    it = 0
    use_newton = False
    while it < max_iter:
        it += 1
        if use_newton:
            new = _newton_step(op, z, eps, c)
            if not _in_region(new, z):
                # fall back to the invariant-preserving iteration
                use_newton = False
                method = "picard"
                r = _rhs(op, z, eps, c)
                new = (1 - damping) * c + damping * r
        else:
            r = _rhs(op, z, eps, c)
            new = (1 - damping) * c + damping * r
            if check_invariants and not _in_region(new, z):
                raise InvariantError(f"iterate {it} left the admissible region at z={z}")
        c = new
        if callback is not None:
            callback(it, c)
        residual = float(np.max(np.abs(_rhs(op, z, eps, c) - c)))
        if record_history:
            history.append(residual)
        if residual <= tol:
            break
        if method == "newton" and it >= newton_after:
            use_newton = True
    field_ = CauchyField(x, z, float(eps), c, it, residual, tol, history)
    log.debug("solve_field z=%s eps=%g iterations=%d residual=%.3e", z, eps, it, residual)
    if residual > tol:
        raise ConvergenceError(z, residual, it)
    return field_


def cauchy_transform(field_: CauchyField) -> complex:
    """``C_eps(z) = int_0^1 C(x, z) dx`` by the midpoint rule."""
    if not field_.converged:
        raise ConvergenceError(field_.z, field_.residual, field_.iterations)
    return complex(np.mean(field_.values))


@dataclass
class DensityTable:
    s: np.ndarray
    density: np.ndarray
    cdf: np.ndarray
    smoothing_eta: float
    iterations: np.ndarray | None = None

    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.s))

    def moment(self, k: int) -> float:
        return float(np.trapezoid(self.s ** k * self.density, self.s))


def cumulative_trapezoid(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y, dtype=float)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def inversion_nodes(model: ModelSpec, smoothing_eta: float, base: int = DEFAULT_NODES) -> int:
    """Grid size keeping the spacing of the ``f(x_i)`` atoms below ``smoothing_eta / 2``."""
    return int(max(base, np.ceil(2.0 * model.width / smoothing_eta)))


def stieltjes_invert(model: ModelSpec, eps: float, s_grid, smoothing_eta: float = 1e-3,
                     cfg: SolverConfig | None = None) -> DensityTable:
    """Density ``-Im C_eps(s + i eta) / pi`` along ``s_grid``, warm-started left to right.

    The x-grid is enlarged so the discrete atoms ``f(x_i)`` are resolved at
    height ``smoothing_eta``.  The CDF is the cumulative trapezoid, capped at 1.
    """
    if not smoothing_eta > 0:
        raise ValueError("smoothing_eta must be positive")
    cfg = cfg or SolverConfig()
    s_grid = np.asarray(s_grid, dtype=float)
    op = FieldOperator(model, inversion_nodes(model, smoothing_eta, cfg.nodes))
    dens = np.empty(s_grid.size)
    iters = np.empty(s_grid.size, dtype=int)
    prev = None
    for i, s in enumerate(s_grid):
        fld = solve_field(model, eps, s + 1j * smoothing_eta, tol=cfg.tol, max_iter=cfg.max_iter,
                          damping=cfg.damping, initial=prev, method=cfg.method,
                          newton_after=cfg.newton_after, operator=op, check_invariants=False)
        prev = fld.values
        dens[i] = -cauchy_transform(fld).imag / np.pi
        iters[i] = fld.iterations
    dens = np.clip(dens, 0.0, None)
    cdf = np.minimum(cumulative_trapezoid(dens, s_grid), 1.0)
    return DensityTable(s_grid, dens, cdf, float(smoothing_eta), iters)


def richardson(h: np.ndarray, values: np.ndarray) -> tuple[complex, float]:
    """Neville extrapolation of ``values(h)`` to ``h = 0``; returns (estimate, error)."""
    h = np.asarray(h, dtype=float)
    p = list(np.asarray(values, dtype=complex))
    prev_best = p[-1]
    best = p[-1]
    n = len(p)
    for level in range(1, n):
        p = [(h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i])
             for i in range(n - level)]
        prev_best, best = best, p[-1]
    return complex(best), float(abs(best - prev_best))


def first_order_slope(model: ModelSpec, z, eps_list=(1e-3, 5e-4, 2.5e-4), nodes: int = 1024,
                      tol: float = 1e-14, return_error: bool = False):
    """``d C_eps(z) / d eps`` at ``eps = 0`` by Richardson extrapolation of difference quotients."""
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 2:
        raise ValueError("need at least two eps values")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ValueError("eps_list must be positive and strictly decreasing")
    op = FieldOperator(model, nodes)
    c0 = cauchy_transform(solve_field(model, 0.0, z, operator=op))
    slopes = []
    for e in eps:
        ce = cauchy_transform(solve_field(model, e, z, tol=tol, operator=op, method="auto"))
        slopes.append((ce - c0) / e)
    est, err = richardson(eps, np.array(slopes))
    return (est, err) if return_error else est

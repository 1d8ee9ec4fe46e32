"""Eigenvalues of real symmetric matrices.

Two routes with the same algorithm family:

* ``"lapack"`` calls LAPACK ``dsyev`` through SciPy (Householder
  tridiagonalization followed by the implicit QL/QR iteration), used for the
  large simulations;
* ``"householder-ql"`` is a self-contained NumPy implementation (Householder
  reduction + implicit QL with Wilkinson shifts) kept as a cross-check for
  small matrices.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.linalg


class EigenSolverError(RuntimeError):
    pass


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction of a symmetric matrix; returns (diagonal, off-diagonal)."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        sub = a[k + 1:, k + 1:]
        p = beta * (sub @ v)
        w = p - 0.5 * beta * (p @ v) * v
        sub -= np.outer(v, w) + np.outer(w, v)
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2:, k] = 0.0
        a[k, k + 2:] = 0.0
    d = np.diag(a).copy()
    e = np.zeros(n)
    e[:-1] = np.diag(a, 1)
    return d, e


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of the tridiagonal matrix (``e[i]`` couples ``i`` and ``i+1``).

    Implicit QL with Wilkinson-type shifts; raises if an eigenvalue needs more
    than ``max_sweeps`` sweeps.
    """
    d = [float(v) for v in d]
    e = [float(v) for v in e]
    n = len(d)
    if n == 0:
        return np.empty(0)
    e[-1] = 0.0
    eps = np.finfo(float).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise EigenSolverError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.asarray(d))


def symmetric_eigenvalues(a: np.ndarray, method: str = "lapack") -> np.ndarray:
    """Sorted eigenvalues of a real symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if method == "lapack":
        try:
            w = scipy.linalg.eigvalsh(a, driver="ev", check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise EigenSolverError(str(exc)) from exc
        return np.sort(w)
    if method == "householder-ql":
        return tridiagonal_ql(*tridiagonalize(a))
    raise ValueError(f"unknown eigensolver {method!r}")

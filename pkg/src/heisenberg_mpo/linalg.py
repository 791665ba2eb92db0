"""Dense complex linear-algebra kernels shared by the MPO, model and oracle code."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, StabilityError

# relative width of a "degenerate" singular-value multiplet
DEGENERACY_RTOL = 1e-12


def _as_matrix(a, name: str = "a") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def kron_all(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Pade approximant."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix_exp needs a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix_exp input contains non-finite entries")
    return scipy.linalg.expm(a)


@dataclass
class SVDResult:
    """Truncated singular value decomposition ``m ~ U @ diag(s) @ Vh``.

    ``truncation_error`` is the 2-norm of the discarded singular values and
    ``degenerate`` flags an all-zero input.
    """

    U: np.ndarray
    singular_values: np.ndarray
    Vh: np.ndarray
    truncation_error: float = 0.0
    degenerate: bool = False

    @property
    def rank(self) -> int:
        return len(self.singular_values)


def _full_svd(m: np.ndarray):
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but robust
        return scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")


def truncation_rank(s: np.ndarray, chi_max: int, eps: float) -> int:
    """Number of singular values to keep from the sorted vector ``s``.

    Keeps values with ``s_k / s_1 > eps``, at most ``chi_max`` and at least one.
    A multiplet straddling the cut is kept whole when it fits under
    ``chi_max`` and dropped whole otherwise.
    """
    if len(s) == 0 or s[0] == 0.0:
        return 1
    r = int(np.count_nonzero(s > eps * s[0]))
    r = max(1, min(r, chi_max))
    if r < len(s):
        tol = DEGENERACY_RTOL * s[0]
        if s[r - 1] - s[r] <= tol:
            lo = r
            while lo > 0 and s[lo - 1] - s[r] <= tol:
                lo -= 1
            hi = r
            while hi < len(s) and s[r - 1] - s[hi] <= tol:
                hi += 1
            if hi <= chi_max:
                r = hi
            elif lo > 0:
                r = lo
    return r


def svd_truncated(m, chi_max: int, eps: float) -> SVDResult:
    """SVD of ``m`` truncated to ``truncation_rank(s, chi_max, eps)`` values."""
    m = _as_matrix(m, "m")
    if chi_max < 1:
        raise ValueError("chi_max must be positive")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    u, s, vh = _full_svd(m)
    if s.size == 0 or s[0] == 0.0:
        rows, cols = m.shape
        U = np.zeros((rows, 1), dtype=m.dtype)
        U[0, 0] = 1.0
        Vh = np.zeros((1, cols), dtype=m.dtype)
        Vh[0, 0] = 1.0
        return SVDResult(U, np.zeros(1), Vh, 0.0, degenerate=True)
    r = truncation_rank(s, chi_max, eps)
    err = float(np.sqrt(np.sum(s[r:] ** 2)))
    return SVDResult(u[:, :r], s[:r], vh[:r, :], err)


def solve_lyapunov(x, y) -> np.ndarray:
    """Solve ``x @ C + C @ x.T + y = 0`` for a stable drift ``x``.

    Raises:
        StabilityError: some eigenvalue of ``x`` has real part >= -1e-12.
    """
    x = _as_matrix(x, "x")
    y = _as_matrix(y, "y")
    n = x.shape[0]
    if x.shape != (n, n) or y.shape != (n, n):
        raise DimensionError(f"incompatible shapes {x.shape} and {y.shape}")
    ev = np.linalg.eigvals(x)
    worst = float(np.max(ev.real))
    if worst >= -1e-12:
        raise StabilityError(f"drift is not stable: max Re(eigenvalue) = {worst:.3e}")
    # the real-Schur path of scipy mishandles complex right-hand sides
    xc = x.astype(complex)
    c = scipy.linalg.solve_sylvester(xc, xc.T, -y.astype(complex))
    if np.isrealobj(x) and np.isrealobj(y):
        c = c.real
    return c

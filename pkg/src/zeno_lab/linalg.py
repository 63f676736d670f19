"""Dense complex linear algebra for small Hermitian problems.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. Subsystem
ordering is fixed: index 0 is the computational qubit, indices 1..N are the
memory qubits in stream order, and the leftmost Kronecker factor is the slowest
index.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import LinalgError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


def _as_square(a, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError(f"{name} has non-finite entries")
    return a


def hermiticity_residual(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T), initial=0.0))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = _as_square(a)
    res = hermiticity_residual(a)
    if res > tol:
        raise LinalgError(f"operator is not Hermitian (residual {res:.3e} > {tol:.1e})")
    return a


def check_density_matrix(rho, tol: float = HERMITIAN_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return the array."""
    rho = check_hermitian(rho, tol)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise LinalgError(f"density matrix trace is {tr.real:.15g}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -psd_tol:
        raise LinalgError(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return rho


def kron(a, b) -> np.ndarray:
    return np.kron(_as_square(a, "a"), _as_square(b, "b"))


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(kron, factors)


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector matrix of a Hermitian operator.

    The input is symmetrised before ``eigh`` so that only the validated
    Hermitian part is ever decomposed.
    """
    h = check_hermitian(h)
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return w, v


def spectral_propagator(w: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """``V exp(-i diag(w) t) V^dagger`` from a precomputed eigendecomposition."""
    if t == 0:
        return np.eye(w.size, dtype=complex)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def propagator(h, t: float) -> np.ndarray:
    """Unitary ``exp(-i H t)`` (units with hbar = 1)."""
    if not np.isfinite(t):
        raise LinalgError(f"propagation time must be finite, got {t}")
    w, v = eig_hermitian(h)
    return spectral_propagator(w, v, t)


def partial_trace(rho, dims: Sequence[int], keep: int) -> np.ndarray:
    """Reduced density matrix of subsystem ``keep``; all other factors are traced out."""
    rho = _as_square(rho, "rho")
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise LinalgError(f"subsystem dims {dims} do not multiply to {rho.shape[0]}")
    if not 0 <= keep < len(dims):
        raise LinalgError(f"keep={keep} out of range for {len(dims)} subsystems")
    d_left = int(np.prod(dims[:keep]))
    d_keep = dims[keep]
    d_right = int(np.prod(dims[keep + 1:]))
    t = rho.reshape(d_left, d_keep, d_right, d_left, d_keep, d_right)
    return np.einsum("aibajb->ij", t)


def reduced_from_pure(psi: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Reduced density matrix of a pure state vector without forming ``|psi><psi|``."""
    dims = [int(d) for d in dims]
    d_left = int(np.prod(dims[:keep]))
    d_right = int(np.prod(dims[keep + 1:]))
    t = np.asarray(psi, dtype=complex).reshape(d_left, dims[keep], d_right)
    return np.einsum("aib,ajb->ij", t, t.conj())


def unitarity_residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))

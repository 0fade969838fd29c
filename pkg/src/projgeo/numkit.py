"""Dense complex linear-algebra kernel with explicit tolerance contracts.

Every matrix function of a normal matrix (exponential, logarithm, polar
factor) is evaluated through an eigendecomposition or a Schur form, never
through a truncated series, so structural properties of the output
(unitarity, skewness) hold to eigensolver accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    BadRho,
    BranchCut,
    NotHermitian,
    NotSkewHermitian,
    SingularInput,
)

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class ToleranceProfile:
    """Separates structural validation (tight) from spectral classification.

    atol_structure bounds Hermiticity/idempotency/unitarity residuals,
    atol_spectral is the eigenvalue-classification width (meets, branch
    cuts), and atol_rank is a base factor scaled by ``n * smax`` wherever a
    numerical rank cutoff is needed.
    """

    atol_structure: float = 1e-8
    atol_spectral: float = 1e-6
    atol_rank: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("atol_structure", "atol_spectral", "atol_rank"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.atol_rank < _EPS:
            raise ValueError("atol_rank must be at least machine epsilon")

    def rank_cutoff(self, n: int, smax: float) -> float:
        """Singular values at or below this count as zero."""
        return self.atol_rank * n * max(smax, _EPS)


DEFAULT_TOL = ToleranceProfile()


def as_complex(a) -> np.ndarray:
    """Coerce to a square complex128 matrix with finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def operator_norm(a) -> float:
    """Largest singular value."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def fix_phases(u: np.ndarray) -> np.ndarray:
    """Rotate each column so its first nonzero entry is real positive."""
    u = u.copy()
    if u.shape[1] == 0:
        return u
    mags = np.abs(u)
    floor = 1e-12 * max(mags.max(), 1.0)
    for j in range(u.shape[1]):
        nz = np.flatnonzero(mags[:, j] > floor)
        if nz.size == 0:
            continue
        pivot = u[nz[0], j]
        u[:, j] *= pivot.conjugate() / abs(pivot)
    return u


def hermitian_eig(h, tol: ToleranceProfile = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending eigenvalues and a unitary whose columns are the
    eigenvectors, phase-fixed so the first nonzero component of each is
    real positive.
    """
    h = as_complex(h)
    if operator_norm(h - adjoint(h)) > tol.atol_structure:
        raise NotHermitian("Hermiticity residual exceeds atol_structure")
    w, u = np.linalg.eigh((h + adjoint(h)) / 2)
    return w, fix_phases(u)


def polar_unitary(a, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Unitary factor v of the polar decomposition a = v |a|.

    Requires a invertible; otherwise the polar factor is not unitary.
    """
    a = as_complex(a)
    u, s, vh = np.linalg.svd(a)
    if s[-1] <= tol.rank_cutoff(a.shape[0], s[0]):
        raise SingularInput("smallest singular value at the rank cutoff")
    return u @ vh


def exp_skew(z, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Unitary exponential of a skew-Hermitian matrix."""
    z = as_complex(z)
    if operator_norm(z + adjoint(z)) > tol.atol_structure:
        raise NotSkewHermitian("skewness residual exceeds atol_structure")
    skew = (z - adjoint(z)) / 2
    w, u = np.linalg.eigh(1j * skew)  # 1j*z is Hermitian for skew z
    return (u * np.exp(-1j * w)) @ adjoint(u)


def log_unitary_principal(w, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    """Skew-Hermitian logarithm of a unitary, spectrum in i*(-pi, pi).

    Uses the complex Schur form, which is diagonal for a (normal) unitary
    input, so the computed logarithm is skew to eigensolver accuracy.
    """
    w = as_complex(w)
    n = w.shape[0]
    if operator_norm(adjoint(w) @ w - np.eye(n)) > tol.atol_structure:
        raise ValueError("input is not unitary within atol_structure")
    t, q = scipy.linalg.schur(w, output="complex")
    lam = np.diag(t)
    if np.any(np.abs(lam + 1.0) <= tol.atol_spectral):
        raise BranchCut("eigenvalue at -1: principal logarithm undefined")
    z = (q * (1j * np.angle(lam))) @ adjoint(q)
    return (z - adjoint(z)) / 2


def rho_norm(a, rho: float, trace=None, tol: ToleranceProfile = DEFAULT_TOL) -> float:
    """Noncommutative L^rho norm (tau((a* a)^{rho/2}))^{1/rho}.

    ``trace`` is any callable implementing a normalized trace (tau(I) = 1);
    when omitted, the normalized trace of the full matrix algebra,
    tr(x)/n, is used.
    """
    if rho < 1:
        raise BadRho(f"rho must be >= 1, got {rho}")
    a = as_complex(a)
    n = a.shape[0]
    gram = adjoint(a) @ a
    w, u = np.linalg.eigh((gram + adjoint(gram)) / 2)
    w = np.clip(w, 0.0, None)
    powered = w ** (rho / 2.0)
    if trace is None:
        val = float(powered.sum()) / n
    else:
        val = complex(trace((u * powered) @ adjoint(u))).real
    return max(val, 0.0) ** (1.0 / rho)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the
    R-diagonal phase correction."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phases.conjugate()

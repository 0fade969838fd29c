"""The projection lattice: validated projections, meets, the five-part
position decomposition of a pair, the reflection symmetry of the generic
part, and principal angles.

Meets are computed by spectral clustering of p + q at eigenvalue 2, so
their accuracy is tied directly to the kernel's eigensolver contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import numkit
from .errors import DimensionMismatch, NoGenericPart, NotProjection, RankDeficient
from .numkit import DEFAULT_TOL, ToleranceProfile, adjoint, operator_norm


@dataclass(frozen=True, eq=False)
class Projection:
    """A validated Hermitian idempotent matrix.

    Instances are produced by :func:`make_projection` or :func:`from_span`;
    the matrix is made read-only so values can be shared freely.
    """

    m: np.ndarray
    tol: ToleranceProfile
    rank: int

    @property
    def n(self) -> int:
        return self.m.shape[0]


def make_projection(m, tol: ToleranceProfile = DEFAULT_TOL) -> Projection:
    """Validate and wrap a matrix as an orthogonal projection.

    The entries are re-symmetrized as (m + m*)/2 before the idempotency
    and spectral checks, but a Hermiticity residual above atol_structure
    in the original input is already grounds for rejection.
    """
    m = numkit.as_complex(m)
    herm = operator_norm(m - adjoint(m))
    if herm > tol.atol_structure:
        raise NotProjection(f"Hermiticity residual {herm:.3e} > atol_structure")
    sym = (m + adjoint(m)) / 2
    idem = operator_norm(sym @ sym - sym)
    if idem > tol.atol_structure:
        raise NotProjection(f"idempotency residual {idem:.3e} > atol_structure")
    eigs = np.linalg.eigvalsh(sym)
    off = np.minimum(np.abs(eigs), np.abs(eigs - 1.0))
    if off.size and off.max() > tol.atol_spectral:
        raise NotProjection("spectrum not within atol_spectral of {0, 1}")
    sym.flags.writeable = False
    return Projection(m=sym, tol=tol, rank=int((eigs > 0.5).sum()))


def from_span(columns, tol: ToleranceProfile = DEFAULT_TOL) -> Projection:
    """Orthogonal projection onto the column span of an n x k matrix."""
    cols = np.asarray(columns, dtype=np.complex128)
    if cols.ndim == 1:
        cols = cols[:, None]
    if cols.ndim != 2:
        raise ValueError("expected a vector or an n x k matrix of columns")
    n, k = cols.shape
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if k == 0 or s[-1] <= tol.rank_cutoff(max(n, k), s[0]):
        raise RankDeficient(f"columns do not have numerical rank {k}")
    return make_projection(u @ adjoint(u), tol)


def complement(p: Projection) -> Projection:
    """I - p."""
    return make_projection(np.eye(p.n) - p.m, p.tol)


def meet(p: Projection, q: Projection) -> Projection:
    """Projection onto range(p) intersect range(q).

    Computed as the spectral projection of p + q onto the eigenvalue
    cluster at 2 (width atol_spectral).
    """
    if p.n != q.n:
        raise DimensionMismatch(f"ambient dimensions differ: {p.n} vs {q.n}")
    w, u = np.linalg.eigh(p.m + q.m)
    sel = w >= 2.0 - p.tol.atol_spectral
    if not sel.any():
        return make_projection(np.zeros((p.n, p.n)), p.tol)
    b = u[:, sel]
    return make_projection(b @ adjoint(b), p.tol)


@dataclass(frozen=True, eq=False)
class HalmosParts:
    """Five mutually orthogonal projections commuting with both p and q.

    e11 = p ^ q, e00 = p' ^ q', e10 = p ^ q', e01 = p' ^ q, and e0 is the
    remainder (the generic part), where ' denotes the complement.
    """

    e11: Projection
    e00: Projection
    e10: Projection
    e01: Projection
    e0: Projection

    def ranks(self) -> tuple[int, int, int, int, int]:
        return (self.e11.rank, self.e00.rank, self.e10.rank,
                self.e01.rank, self.e0.rank)


def halmos_decompose(p: Projection, q: Projection) -> HalmosParts:
    """Split the ambient space by the relative position of p and q."""
    if p.n != q.n:
        raise DimensionMismatch(f"ambient dimensions differ: {p.n} vs {q.n}")
    pc, qc = complement(p), complement(q)
    e11 = meet(p, q)
    e00 = meet(pc, qc)
    e10 = meet(p, qc)
    e01 = meet(pc, q)
    rem = np.eye(p.n) - e11.m - e00.m - e10.m - e01.m
    e0 = make_projection(rem, p.tol)
    return HalmosParts(e11=e11, e00=e00, e10=e10, e01=e01, e0=e0)


def range_basis(p: Projection) -> np.ndarray:
    """Deterministic orthonormal basis (n x rank) of range(p).

    Column-pivoted QR of the projection matrix keeps each basis vector
    inside the support of the columns it came from, so block-diagonal
    projections get block-supported bases even when the rank exceeds 1
    (an eigenvector basis of the degenerate eigenvalue 1 would not).
    Phases are fixed to make the basis reproducible.
    """
    if p.rank == 0:
        return np.zeros((p.n, 0), dtype=np.complex128)
    qmat, _, _ = scipy.linalg.qr(p.m, pivoting=True)
    return numkit.fix_phases(qmat[:, : p.rank])


def compress(m: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """basis* m basis: the matrix of m restricted to span(basis)."""
    return adjoint(basis) @ m @ basis


def davis_symmetry(p: Projection, q: Projection) -> np.ndarray:
    """Self-adjoint unitary v0 on the generic part with v0 (p-q) v0 = q-p.

    v0 is the polar factor of p + q - 1 restricted to the generic part,
    embedded back as an n x n matrix supported on range(e0), so that
    v0* = v0 and v0^2 = e0.
    """
    parts = halmos_decompose(p, q)
    if parts.e0.rank == 0:
        raise NoGenericPart("the pair has no generic part")
    basis = range_basis(parts.e0)
    b0 = compress(p.m + q.m, basis) - np.eye(parts.e0.rank)
    v0 = numkit.polar_unitary(b0, p.tol)
    return basis @ v0 @ adjoint(basis)


def principal_angles(p: Projection, q: Projection) -> np.ndarray:
    """Ascending principal angles of the generic part, in (0, pi/2].

    These are arccos(sqrt(lambda)) over the spectrum of q compressed to
    the range of p restricted to the generic part, counted with
    multiplicity; the list is empty when the projections commute.
    """
    parts = halmos_decompose(p, q)
    if parts.e0.rank == 0:
        return np.zeros(0)
    pg = make_projection(parts.e0.m @ p.m @ parts.e0.m, p.tol)
    basis = range_basis(pg)
    lam = np.linalg.eigvalsh(compress(q.m, basis))
    lam = np.clip(lam, 0.0, 1.0)
    return np.sort(np.arccos(np.sqrt(lam)))

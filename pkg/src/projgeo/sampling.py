"""Random and structured generation of projection pairs, plus the
diagnostic battery the batch experiments and property tests share.

Structured pairs are assembled in a canonical basis from prescribed part
ranks and generic angles, then conjugated by a common Haar unitary, so
the ground-truth decomposition is known exactly.
"""

from __future__ import annotations

import numpy as np

from . import geo, numkit, projlat
from .numkit import DEFAULT_TOL, ToleranceProfile, adjoint, operator_norm
from .projlat import Projection


def random_projection(n: int, rank: int, rng: np.random.Generator,
                      tol: ToleranceProfile = DEFAULT_TOL) -> Projection:
    """Haar-random projection of the given rank in M_n."""
    if not 0 <= rank <= n:
        raise ValueError(f"rank must lie in [0, {n}]")
    d = np.zeros((n, n), dtype=np.complex128)
    d[np.arange(rank), np.arange(rank)] = 1.0
    u = numkit.haar_unitary(n, rng)
    return projlat.make_projection(u @ d @ adjoint(u), tol)


def structured_pair(n11: int, n00: int, n10: int, n01: int, angles,
                    rng: np.random.Generator | None = None,
                    tol: ToleranceProfile = DEFAULT_TOL):
    """Pair with prescribed part ranks and generic principal angles.

    Returns (p, q, info) where info records the ambient dimension and the
    intended ranks (e11, e00, e10, e01, e0). Angles must avoid 0 and
    pi/2 by more than the spectral classification width, otherwise the
    corresponding plane is absorbed into a meet or wedge part.
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    g = angles.size
    n = n11 + n00 + n10 + n01 + 2 * g
    pm = np.zeros((n, n), dtype=np.complex128)
    qm = np.zeros((n, n), dtype=np.complex128)
    i = 0
    pm[i:i + n11, i:i + n11] = np.eye(n11)
    qm[i:i + n11, i:i + n11] = np.eye(n11)
    i += n11 + n00
    pm[i:i + n10, i:i + n10] = np.eye(n10)
    i += n10
    qm[i:i + n01, i:i + n01] = np.eye(n01)
    i += n01
    for theta in angles:
        c, s = np.cos(theta), np.sin(theta)
        pm[i, i] = 1.0
        qm[i:i + 2, i:i + 2] = [[c * c, c * s], [c * s, s * s]]
        i += 2
    if rng is not None:
        u = numkit.haar_unitary(n, rng)
        pm = u @ pm @ adjoint(u)
        qm = u @ qm @ adjoint(u)
    info = {"n": n, "ranks": (n11, n00, n10, n01, 2 * g),
            "angles": np.sort(angles).tolist()}
    return (projlat.make_projection(pm, tol),
            projlat.make_projection(qm, tol), info)


def random_pair(n: int, rng: np.random.Generator, force_wedge: bool = False,
                tol: ToleranceProfile = DEFAULT_TOL):
    """Random pair in M_n with a randomly drawn position structure.

    With force_wedge the pair always has equal wedge ranks >= 1 (so a
    geodesic exists but is not unique). Generic angles are kept away
    from 0 and pi/2 so the spectral classification is unambiguous.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    while True:
        gmax = (n - 2) // 2 if force_wedge else n // 2
        g = int(rng.integers(0, gmax + 1))
        rest = n - 2 * g
        if force_wedge:
            wedge = int(rng.integers(1, rest // 2 + 1))
            n10 = n01 = wedge
            rest -= 2 * wedge
        else:
            n10 = int(rng.integers(0, rest + 1))
            rest -= n10
            n01 = int(rng.integers(0, rest + 1))
            rest -= n01
        n11 = int(rng.integers(0, rest + 1))
        n00 = rest - n11
        if g + n11 + n00 + n10 + n01 > 0:
            break
    angles = rng.uniform(0.05, np.pi / 2 - 0.05, size=g)
    p, q, info = structured_pair(n11, n00, n10, n01, angles, rng, tol)
    return p, q, info


def spectral_symmetry_residual(p: Projection, q: Projection,
                               parts: projlat.HalmosParts | None = None) -> float:
    """How far the spectrum of p - q on the generic part is from being
    symmetric about the origin (0.0 when there is no generic part)."""
    if parts is None:
        parts = projlat.halmos_decompose(p, q)
    if parts.e0.rank == 0:
        return 0.0
    basis = projlat.range_basis(parts.e0)
    lam = np.linalg.eigvalsh(projlat.compress(p.m - q.m, basis))
    return float(np.abs(lam + lam[::-1]).max())


def pair_diagnostics(p: Projection, q: Projection, seeds=(1, 2)) -> dict:
    """Run the full invariant battery on one pair; plain-value report.

    Covers the decomposition residuals, existence/uniqueness verdicts,
    the exponent contract, the wedge intertwining, spectral symmetry,
    and (for non-unique pairs) distinctness of seeded exponents.
    """
    parts = projlat.halmos_decompose(p, q)
    eye = np.eye(p.n)
    mats = [parts.e11.m, parts.e00.m, parts.e10.m, parts.e01.m, parts.e0.m]
    sum_residual = operator_norm(sum(mats) - eye)
    commutator = max(operator_norm(e @ r.m - r.m @ e)
                     for e in mats for r in (p, q))
    pairwise = max((operator_norm(a @ b) for i, a in enumerate(mats)
                    for b in mats[i + 1:]), default=0.0)
    exists = parts.e10.rank == parts.e01.rank
    report = {
        "n": p.n,
        "ranks": list(parts.ranks()),
        "halmos_sum_residual": float(sum_residual),
        "halmos_commutator_residual": float(commutator),
        "halmos_pairwise_residual": float(pairwise),
        "spectral_symmetry_residual": spectral_symmetry_residual(p, q, parts),
        "exists": bool(exists),
        "angles": [float(a) for a in projlat.principal_angles(p, q)],
    }
    if not exists:
        return report
    report["unique"] = parts.e10.rank == 0
    g = geo.minimal_exponent(p, q)
    res = geo.verify_geodesic(g)
    ez = numkit.exp_skew(g.z, p.tol)
    report.update({
        "distance": geo.geodesic_distance(p, q),
        "exponent_skewness": res.skewness,
        "exponent_codiagonality": res.codiagonality,
        "exponent_norm_excess": res.norm_bound,
        "exponent_endpoint": res.endpoint,
        "wedge_intertwine": float(operator_norm(
            ez @ parts.e10.m @ adjoint(ez) - parts.e01.m)),
    })
    if parts.e10.rank > 0:
        zs = [geo.minimal_exponent(
            p, q, geo.partial_isometry(parts.e10, parts.e01, seed=s)).z
            for s in seeds]
        report["seeded_exponent_gap"] = float(operator_norm(zs[0] - zs[1]))
    return report

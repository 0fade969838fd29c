"""Shared oracles and generators for the test suite.

The oracles deliberately take different computational routes than the
library (null spaces via SVD instead of eigenvalue clustering, generic
matrix exponentials instead of eigendecompositions) so agreement is
evidence, not tautology.
"""

import numpy as np

import projgeo as pg
from projgeo import sampling


def adj(a):
    return a.conj().T


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotation_pair(theta, tol=pg.DEFAULT_TOL):
    """p = diag(1, 0) and its rotation by theta, in M_2."""
    p = pg.make_projection(np.diag([1.0, 0.0]), tol)
    r = rotation(theta)
    q = pg.make_projection(r @ p.m @ adj(r), tol)
    return p, q


def meet_oracle(pm, qm, atol=1e-8):
    """Projection onto range(p) & range(q) via the null space of
    p + q - 2I, computed with an SVD (independent of the library's
    eigenvalue-cluster route)."""
    n = pm.shape[0]
    u, s, vh = np.linalg.svd(pm + qm - 2 * np.eye(n))
    null = vh[s < atol].conj().T
    return null @ adj(null)


def random_joinable_pair(n, rng, force_wedge=False, tol=pg.DEFAULT_TOL):
    """Random pair guaranteed to admit a geodesic: equal wedge ranks,
    drawn structure, Haar-conjugated."""
    while True:
        g = int(rng.integers(0, n // 2 + 1))
        rest = n - 2 * g
        wmax = rest // 2
        wmin = 1 if force_wedge else 0
        if wmax < wmin:
            continue
        w = int(rng.integers(wmin, wmax + 1))
        rest -= 2 * w
        n11 = int(rng.integers(0, rest + 1))
        n00 = rest - n11
        if g + w + n11 + n00 > 0:
            break
    angles = rng.uniform(0.05, np.pi / 2 - 0.05, size=g)
    p, q, info = sampling.structured_pair(n11, n00, w, w, angles, rng, tol)
    return p, q, info


def perturbed_curves(g, rng, count, samples=1000, amp=0.25, reparam=0.12):
    """Smooth competitor curves through the endpoints of a geodesic.

    Each curve is the geodesic under a random time reparametrization,
    conjugated by a one-parameter unitary group whose parameter vanishes
    at the endpoints. Yields (samples, n, n) stacks of projections.
    """
    z = g.z
    n = g.p.n
    ts = np.linspace(0.0, 1.0, samples)
    lam_z, u_z = np.linalg.eigh(1j * z)

    def group(u, lam, params):
        phases = np.exp(-1j * np.outer(params, lam))
        return np.einsum("ij,tj,kj->tik", u, phases, u.conj())

    for _ in range(count):
        b = reparam * rng.uniform(-1.0, 1.0)
        hs = ts + b * np.sin(np.pi * ts)
        k = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        k = (k - adj(k)) / 2
        k /= max(np.linalg.norm(k, 2), 1e-12)
        ss = amp * rng.uniform(0.2, 1.0) * np.sin(np.pi * ts) \
            + amp * rng.uniform(-0.5, 0.5) * np.sin(2 * np.pi * ts)
        lam_k, u_k = np.linalg.eigh(1j * k)
        w_geo = group(u_z, lam_z, hs)
        w_pert = group(u_k, lam_k, ss)
        delta = w_geo @ g.p.m @ w_geo.conj().transpose(0, 2, 1)
        yield w_pert @ delta @ w_pert.conj().transpose(0, 2, 1)

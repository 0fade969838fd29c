"""Index geometry at matrix scale: angle pairs satisfying p q p = tau p,
conditional expectations realized as orthogonal projections on the
Hilbert-Schmidt space of M_n, the geodesic path of expectations between
two subalgebras, and the parallel transport equation with its propagator.

The Hilbert-Schmidt inner product uses the normalized trace, so the
identity has norm one; orthogonal projections onto vectorized
subalgebras then induce the trace-preserving conditional expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geo, numkit, projlat
from .errors import (
    InternalConsistencyError,
    InvariantViolation,
    NotSubalgebra,
    TooFar,
)
from .factor import FiniteAlgebra, NormalizedTrace
from .geo import GeodesicExponent
from .numkit import DEFAULT_TOL, ToleranceProfile, adjoint, operator_norm
from .projlat import Projection

IDX_ATOL = 1e-9  # tolerance of the index-distance identities


def vec(x: np.ndarray) -> np.ndarray:
    """Flatten a matrix to a Hilbert-Schmidt vector (row-major)."""
    return np.asarray(x, dtype=np.complex128).reshape(-1)


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v, dtype=np.complex128).reshape(n, n)


# ---------------------------------------------------------------------------
# subalgebra specifications


@dataclass(frozen=True)
class BlockPartition:
    """Matrices block-diagonal over groups of coordinates (0-based)."""

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "groups", tuple(tuple(int(i) for i in g) for g in self.groups))


@dataclass(frozen=True)
class TensorFactor:
    """The subalgebra M_k tensor I_m inside M_{k m}."""

    k: int
    m: int


@dataclass(frozen=True, eq=False)
class MatrixSpan:
    """A linear spanning set of the subalgebra (must be *- and
    product-closed as a subspace; this is validated, not completed)."""

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "mats", tuple(numkit.as_complex(m) for m in self.mats))


SubalgebraSpec = BlockPartition | TensorFactor | MatrixSpan


def diagonal_spec(n: int) -> BlockPartition:
    """The diagonal subalgebra of M_n."""
    return BlockPartition(groups=tuple((i,) for i in range(n)))


def rotated_diagonal_spec(n: int, theta: float) -> MatrixSpan:
    """The diagonal subalgebra conjugated by a rotation of angle theta in
    the first two coordinates."""
    u = np.eye(n, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    u[0, 0] = c
    u[0, 1] = -s
    u[1, 0] = s
    u[1, 1] = c
    mats = []
    for i in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[i, i] = 1.0
        mats.append(u @ e @ adjoint(u))
    return MatrixSpan(mats=tuple(mats))


def spanning_matrices(spec: SubalgebraSpec, n: int) -> list[np.ndarray]:
    """A linear spanning set of the specified subset of M_n."""
    if isinstance(spec, BlockPartition):
        seen = sorted(i for g in spec.groups for i in g)
        if seen != list(range(n)):
            raise ValueError("groups must partition the coordinates 0..n-1")
        mats = []
        for g in spec.groups:
            for i in g:
                for j in g:
                    e = np.zeros((n, n), dtype=np.complex128)
                    e[i, j] = 1.0
                    mats.append(e)
        return mats
    if isinstance(spec, TensorFactor):
        if spec.k * spec.m != n:
            raise ValueError(f"k*m = {spec.k * spec.m} does not match n = {n}")
        eye = np.eye(spec.m)
        mats = []
        for i in range(spec.k):
            for j in range(spec.k):
                e = np.zeros((spec.k, spec.k), dtype=np.complex128)
                e[i, j] = 1.0
                mats.append(np.kron(e, eye))
        return mats
    if isinstance(spec, MatrixSpan):
        for m in spec.mats:
            if m.shape[0] != n:
                raise ValueError("spanning matrices have the wrong dimension")
        return list(spec.mats)
    raise TypeError(f"unknown subalgebra specification: {type(spec)!r}")


# ---------------------------------------------------------------------------
# conditional expectations as Hilbert-Schmidt projections


@dataclass(frozen=True, eq=False)
class ExpectationProjection:
    """Orthogonal projection of HS(M_n) onto a vectorized *-subalgebra.

    The induced map E(x) = unvec(big . vec(x)) is the trace-preserving
    conditional expectation onto the subalgebra.
    """

    big: Projection
    spec: SubalgebraSpec
    n: int
    basis: np.ndarray  # n^2 x r, orthonormal columns spanning the range

    def expect(self, x) -> np.ndarray:
        return unvec(self.big.m @ vec(numkit.as_complex(x)), self.n)


def _orthonormal_range(mats: list[np.ndarray], n: int,
                       tol: ToleranceProfile) -> np.ndarray:
    cols = np.stack([vec(m) for m in mats], axis=1)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    r = int((s > tol.rank_cutoff(n * n, s[0])).sum())
    return u[:, :r]


def _span_residual(basis: np.ndarray, x: np.ndarray) -> float:
    v = vec(x)
    return float(np.linalg.norm(v - basis @ (adjoint(basis) @ v)))


def expectation_projection(spec: SubalgebraSpec, n: int,
                           tol: ToleranceProfile = DEFAULT_TOL
                           ) -> ExpectationProjection:
    """Build the expectation projection for a unital *-subalgebra of M_n.

    The spanning set is orthonormalized on the Hilbert-Schmidt space;
    closure under adjoints and products and the presence of the identity
    are validated, raising NotSubalgebra on failure.
    """
    mats = spanning_matrices(spec, n)
    basis = _orthonormal_range(mats, n, tol)
    members = [unvec(basis[:, j], n) for j in range(basis.shape[1])]
    checks = [_span_residual(basis, np.eye(n))]
    checks += [_span_residual(basis, adjoint(x)) for x in members]
    checks += [_span_residual(basis, x @ y) for x in members for y in members]
    if max(checks) > tol.atol_structure:
        raise NotSubalgebra(
            f"span is not a unital *-subalgebra (residual {max(checks):.3e})")
    big = projlat.make_projection(basis @ adjoint(basis), tol)
    ep = ExpectationProjection(big=big, spec=spec, n=n, basis=basis)
    res = expectation_axioms(big, n).max()
    if res > tol.atol_structure:
        raise InternalConsistencyError(
            f"expectation axioms fail on a validated subalgebra ({res:.3e})")
    return ep


@dataclass(frozen=True)
class ExpectationAxioms:
    """Residuals of the conditional-expectation axioms for an HS
    projection: idempotency, unitality, *-preservation, trace
    invariance, the bimodule property over the range algebra, and
    closure of the range under products."""

    idempotent: float
    unital: float
    star: float
    trace: float
    bimodule: float
    closure: float

    def max(self) -> float:
        return max(self.idempotent, self.unital, self.star,
                   self.trace, self.bimodule, self.closure)


def _range_members(big: Projection, n: int) -> list[np.ndarray]:
    basis = projlat.range_basis(big)
    return [unvec(basis[:, j], n) for j in range(basis.shape[1])]


def expectation_axioms(big: Projection, n: int, samples: int = 4,
                       seed: int = 7) -> ExpectationAxioms:
    """Measure the conditional-expectation axioms for a projection acting
    on HS(M_n), against its own range algebra."""
    P = big.m
    members = _range_members(big, n)
    rng = np.random.default_rng(seed)
    xs = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
          for _ in range(samples)]

    def E(x):
        return unvec(P @ vec(x), n)

    idem = operator_norm(P @ P - P)
    unital = operator_norm(E(np.eye(n)) - np.eye(n))
    star = max(operator_norm(E(adjoint(x)) - adjoint(E(x))) for x in xs)
    tr = max(abs(np.trace(E(x)) - np.trace(x)) / n for x in xs)
    bimod = 0.0
    for a in members:
        for b in members:
            for x in xs:
                bimod = max(bimod, operator_norm(E(a @ x @ b) - a @ E(x) @ b))
    closure = max((_span_residual_proj(P, a @ b) for a in members for b in members),
                  default=0.0)
    return ExpectationAxioms(idempotent=idem, unital=unital, star=star,
                             trace=float(tr), bimodule=bimod, closure=closure)


def _span_residual_proj(P: np.ndarray, x: np.ndarray) -> float:
    v = vec(x)
    return float(np.linalg.norm(v - P @ v))


# ---------------------------------------------------------------------------
# index pairs and the distance theorem


@dataclass(frozen=True, eq=False)
class JonesPair:
    """Projections p, q in M_{k m} with p q p = tau p, tau = 1/m, equal
    normalized traces tau, and no wedge or meet parts besides the common
    null corner."""

    p: Projection
    q: Projection
    tau: float
    m: int
    k: int

    @property
    def n(self) -> int:
        return self.p.n


def jones_pair(m: int, k: int, tol: ToleranceProfile = DEFAULT_TOL) -> JonesPair:
    """Construct the canonical angle pair with index parameter tau = 1/m.

    In M_{k m}, p projects onto the even coordinates f_0, f_2, ...,
    f_{2(k-1)} and q onto their rotations by theta = arccos(sqrt(tau))
    into the following odd coordinates; the remaining k m - 2 k
    coordinates lie in neither range.
    """
    if m < 2 or k < 1:
        raise ValueError("need m >= 2 and k >= 1")
    n = k * m
    tau = 1.0 / m
    theta = math.acos(math.sqrt(tau))
    pm = np.zeros((n, n), dtype=np.complex128)
    qm = np.zeros((n, n), dtype=np.complex128)
    for j in range(k):
        v = np.zeros(n, dtype=np.complex128)
        v[2 * j] = math.cos(theta)
        v[2 * j + 1] = math.sin(theta)
        pm[2 * j, 2 * j] = 1.0
        qm += np.outer(v, v.conj())
    p = projlat.make_projection(pm, tol)
    q = projlat.make_projection(qm, tol)
    if operator_norm(pm @ qm @ pm - tau * pm) > 1e-10:
        raise InternalConsistencyError("angle relation p q p = tau p fails")
    parts = projlat.halmos_decompose(p, q)
    if parts.ranks() != (0, n - 2 * k, 0, 0, 2 * k):
        raise InternalConsistencyError(f"unexpected position ranks {parts.ranks()}")
    return JonesPair(p=p, q=q, tau=tau, m=m, k=k)


def index_distance(jp: JonesPair):
    """Geodesic distance data for an index pair.

    Returns (d, d_rho): d is the operator-norm distance, checked against
    the closed form arccos(sqrt(tau)); d_rho(rho) computes the rho-norm
    length of the minimal exponent under the normalized trace of the
    ambient matrix algebra and checks it against the closed form
    tau^{1/rho} * arccos(sqrt(tau)), raising InvariantViolation when the
    check fails (the raised error carries the computed value).
    """
    d = geo.geodesic_distance(jp.p, jp.q)
    closed = math.acos(math.sqrt(jp.tau))
    if abs(d - closed) > IDX_ATOL:
        raise InvariantViolation(
            f"distance {d!r} != arccos(sqrt(tau)) = {closed!r}",
            computed=d, expected=closed)
    tr = NormalizedTrace(FiniteAlgebra.full(jp.n))
    g = geo.minimal_exponent(jp.p, jp.q)

    def d_rho(rho: float) -> float:
        val = geo.rho_length(g, rho, tr)
        expected = jp.tau ** (1.0 / rho) * closed
        if abs(val - expected) > IDX_ATOL:
            raise InvariantViolation(
                f"rho-distance {val!r} != tau^(1/rho) arccos(sqrt(tau)) = "
                f"{expected!r} at rho = {rho}", computed=val, expected=expected)
        return val

    return d, d_rho


# ---------------------------------------------------------------------------
# the geodesic path of expectations and parallel transport


@dataclass(frozen=True, eq=False)
class ExpectationPath:
    """Geodesic of expectation projections between two subalgebras.

    Immutable handle; evaluation at any t is a pure function, so
    concurrent use at distinct times is safe.
    """

    z: GeodesicExponent  # exponent on the HS space of M_n
    end0: ExpectationProjection
    end1: ExpectationProjection
    n: int

    def projection_at(self, t: float) -> Projection:
        return geo.geodesic_point(self.z, t)

    def expect(self, t: float, x) -> np.ndarray:
        """E(t, x): the expectation at time t applied to x."""
        return unvec(self.projection_at(t).m @ vec(numkit.as_complex(x)), self.n)

    def transport(self, t: float, x) -> np.ndarray:
        """Gamma_t(x): the propagator of the transport equation."""
        u = numkit.exp_skew(t * self.z.z, self.z.p.tol)
        return unvec(u @ vec(numkit.as_complex(x)), self.n)

    def algebra_members_at(self, t: float) -> list[np.ndarray]:
        """Matrices spanning the range algebra of the expectation at t."""
        return _range_members(self.projection_at(t), self.n)


def expectation_path(spec0: SubalgebraSpec, spec1: SubalgebraSpec, n: int,
                     tol: ToleranceProfile = DEFAULT_TOL,
                     check_distance: bool = True) -> ExpectationPath:
    """The minimal geodesic between two expectation projections.

    Requires the gap ||e0 - e1|| to be below 1 (raising TooFar at the
    boundary), which guarantees a unique normalized geodesic whose
    points stay conditional expectations. Passing check_distance=False
    skips the guard; the resulting path is the experiment for the open
    boundary regime and comes with no guarantees.
    """
    end0 = expectation_projection(spec0, n, tol)
    end1 = expectation_projection(spec1, n, tol)
    gap = operator_norm(end0.big.m - end1.big.m)
    if check_distance and gap >= 1.0 - tol.atol_spectral:
        raise TooFar(f"||e0 - e1|| = {gap:.6f} is not below 1")
    z = geo.minimal_exponent(end0.big, end1.big)
    return ExpectationPath(z=z, end0=end0, end1=end1, n=n)


def transport_ode_solve(path: ExpectationPath, x0, steps: int):
    """Integrate the parallel transport equation with fixed-step RK4.

    The state is the vectorized matrix; the generator is the commutator
    [dE_t, E_t] with E_t the geodesic projection at time t and dE_t its
    exact derivative Z E_t - E_t Z (no finite differencing). Returns the
    times and the transported matrices at steps + 1 uniform points.
    """
    if steps < 100:
        raise ValueError("need at least 100 steps")
    n = path.n
    Z = path.z.z
    P0 = path.end0.big.m
    lam, u = np.linalg.eigh(1j * Z)

    def generator(t: float) -> np.ndarray:
        w = (u * np.exp(-1j * t * lam)) @ adjoint(u)  # e^{tZ}
        pt = w @ P0 @ adjoint(w)
        # [dE, E] with dE = ZP - PZ collapses to ZP + PZ - 2 PZP
        return Z @ pt + pt @ Z - 2.0 * pt @ Z @ pt

    h = 1.0 / steps
    y = vec(numkit.as_complex(x0))
    times = np.linspace(0.0, 1.0, steps + 1)
    states = np.empty((steps + 1, n, n), dtype=np.complex128)
    states[0] = unvec(y, n)
    a_t = generator(0.0)
    for j in range(steps):
        t = j * h
        a_mid = generator(t + h / 2)
        a_next = generator(t + h)
        k1 = a_t @ y
        k2 = a_mid @ (y + (h / 2) * k1)
        k3 = a_mid @ (y + (h / 2) * k2)
        k4 = a_next @ (y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[j + 1] = unvec(y, n)
        a_t = a_next
    return times, states


@dataclass(frozen=True)
class PropagatorReport:
    """Residuals of the propagator identities along a path: the
    intertwining Gamma_t E_0 Gamma_{-t} = E_t, multiplicativity and
    *-preservation of Gamma_t on the initial subalgebra, and the
    codiagonality identity z e0 + e0 z = z on the HS space."""

    intertwine: float
    multiplicative: float
    star: float
    codiagonal: float

    def max(self) -> float:
        return max(self.intertwine, self.multiplicative,
                   self.star, self.codiagonal)


def propagator_checks(path: ExpectationPath, ts, xs) -> PropagatorReport:
    """Check the propagator identities at the given times.

    ``xs`` are arbitrary test matrices for the intertwining identity;
    multiplicativity and *-preservation are checked on the initial
    subalgebra (its basis together with the projections of ``xs``).
    """
    xs = [numkit.as_complex(x) for x in xs]
    members = _range_members(path.end0.big, path.n)
    members += [path.end0.expect(x) for x in xs]
    intertwine = mult = star = 0.0
    for t in ts:
        pt = path.projection_at(t).m

        def E_t(x, pt=pt):
            return unvec(pt @ vec(x), path.n)

        for x in xs:
            lhs = path.transport(t, path.end0.expect(path.transport(-t, x)))
            intertwine = max(intertwine, operator_norm(lhs - E_t(x)))
        gammas = [path.transport(t, a) for a in members]
        for (a, ga) in zip(members, gammas):
            star = max(star, operator_norm(path.transport(t, adjoint(a)) - adjoint(ga)))
            for (b, gb) in zip(members, gammas):
                mult = max(mult, operator_norm(path.transport(t, a @ b) - ga @ gb))
    Z, P0 = path.z.z, path.end0.big.m
    codiag = operator_norm(Z @ P0 + P0 @ Z - Z)
    return PropagatorReport(intertwine=intertwine, multiplicative=mult,
                            star=star, codiagonal=codiag)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projgeo import numkit
from projgeo.errors import (
    BadRho,
    BranchCut,
    NotHermitian,
    NotSkewHermitian,
    SingularInput,
)

from _helpers import adj, rotation


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + adj(a)) / 2


def random_skew(n, rng, max_norm):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = (a - adj(a)) / 2
    return a * (max_norm * rng.uniform(0.1, 1.0) / np.linalg.norm(a, 2))


class TestHermitianEig:
    def test_diagonal_input(self):
        w, u = numkit.hermitian_eig(np.diag([2.0, 1.0]))
        assert np.allclose(w, [1.0, 2.0])
        assert np.allclose(np.abs(u), [[0, 1], [1, 0]])

    def test_flip_matrix(self):
        h = np.array([[0.0, 1.0], [1.0, 0.0]])
        w, u = numkit.hermitian_eig(h)
        assert np.allclose(w, [-1.0, 1.0])
        expected = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
        assert np.allclose(np.abs(u), np.abs(expected))

    def test_reconstruction(self):
        rng = np.random.default_rng(11)
        h = random_hermitian(6, rng)
        w, u = numkit.hermitian_eig(h)
        assert np.linalg.norm(h - (u * w) @ adj(u), 2) < 1e-12
        assert np.linalg.norm(adj(u) @ u - np.eye(6), 2) < 1e-13
        assert np.all(np.diff(w) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            numkit.hermitian_eig([[0.0, 1.0], [0.0, 0.0]])

    def test_phase_fix_deterministic(self):
        rng = np.random.default_rng(2)
        h = random_hermitian(5, rng)
        _, u1 = numkit.hermitian_eig(h)
        _, u2 = numkit.hermitian_eig(h.copy())
        assert np.array_equal(u1, u2)


class TestPolarUnitary:
    def test_positive_input(self):
        assert np.allclose(numkit.polar_unitary(2 * np.eye(2)), np.eye(2))

    def test_scaled_rotation(self):
        a = np.array([[0.0, -2.0], [2.0, 0.0]])
        assert np.allclose(numkit.polar_unitary(a), [[0, -1], [1, 0]])

    def test_real_diagonal_signs(self):
        assert np.allclose(numkit.polar_unitary(np.diag([1.0, -3.0])),
                           np.diag([1.0, -1.0]))

    def test_singular_input(self):
        with pytest.raises(SingularInput):
            numkit.polar_unitary(np.diag([1.0, 0.0]))

    def test_reconstruction(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)) + 3 * np.eye(5)
        v = numkit.polar_unitary(a)
        pos = adj(v) @ a  # |a| since a = v |a|
        assert np.linalg.norm(v @ pos - a, 2) < 1e-10
        assert np.linalg.norm(adj(v) @ v - np.eye(5), 2) < 1e-10


class TestExpSkew:
    def test_zero(self):
        assert np.allclose(numkit.exp_skew(np.zeros((3, 3))), np.eye(3))

    def test_planar_rotation(self):
        theta = 0.7
        z = theta * np.array([[0.0, -1.0], [1.0, 0.0]])
        assert np.allclose(numkit.exp_skew(z), rotation(theta), atol=1e-14)

    def test_scalar_exponentials(self):
        z = 1j * np.pi * np.diag([1.0, 0.0])
        assert np.allclose(numkit.exp_skew(z), np.diag([-1.0, 1.0]), atol=1e-14)

    def test_rejects_non_skew(self):
        with pytest.raises(NotSkewHermitian):
            numkit.exp_skew(np.eye(2))

    def test_output_unitary(self):
        rng = np.random.default_rng(4)
        z = random_skew(7, rng, 2.0)
        w = numkit.exp_skew(z)
        assert np.linalg.norm(adj(w) @ w - np.eye(7), 2) < 1e-13


class TestLogUnitaryPrincipal:
    def test_identity(self):
        assert np.allclose(numkit.log_unitary_principal(np.eye(3)), 0.0)

    def test_rotation_round_trip(self):
        theta = np.pi / 3
        z = theta * np.array([[0.0, -1.0], [1.0, 0.0]])
        w = numkit.exp_skew(z)
        assert np.linalg.norm(numkit.log_unitary_principal(w) - z, 2) < 1e-12

    def test_branch_cut(self):
        with pytest.raises(BranchCut):
            numkit.log_unitary_principal(-np.eye(2))

    def test_spectrum_in_open_strip(self):
        rng = np.random.default_rng(5)
        z = random_skew(6, rng, np.pi - 0.2)
        lam = np.linalg.eigvalsh(1j * numkit.log_unitary_principal(numkit.exp_skew(z)))
        assert np.all(np.abs(lam) < np.pi)


class TestOperatorNorm:
    def test_diagonal(self):
        assert numkit.operator_norm(np.diag([1.0, -3.0])) == pytest.approx(3.0)

    def test_zero(self):
        assert numkit.operator_norm(np.zeros((2, 2))) == 0.0

    def test_rank_one(self):
        xi = np.array([1.0, 1j]) / np.sqrt(2)
        eta = np.array([1.0, -1.0]) / np.sqrt(2)
        assert numkit.operator_norm(np.outer(xi, eta.conj())) == pytest.approx(1.0)


class TestRhoNorm:
    @pytest.mark.parametrize("rho", [1.0, 2.0, 3.5, 8.0])
    def test_identity_normalization(self, rho):
        assert numkit.rho_norm(np.eye(5), rho) == pytest.approx(1.0)

    def test_rank_one_projection(self):
        assert numkit.rho_norm(np.diag([1.0, 0.0]), 2.0) == pytest.approx(np.sqrt(0.5))

    def test_wedge_exponent_norm(self):
        w = np.array([[0.0, 0.0], [1.0, 0.0]])
        a = (np.pi / 2) * (w + adj(w))  # squares to (pi/2)^2 I
        assert numkit.rho_norm(a, 2.0) == pytest.approx(np.pi / 2)

    def test_bad_rho(self):
        with pytest.raises(BadRho):
            numkit.rho_norm(np.eye(2), 0.5)

    def test_monotone_and_bounded_by_operator_norm(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
            vals = [numkit.rho_norm(a, r) for r in (2, 4, 8, 16)]
            top = numkit.operator_norm(a)
            assert all(v2 >= v1 - 1e-12 for v1, v2 in zip(vals, vals[1:]))
            assert all(v <= top + 1e-12 for v in vals)

    def test_custom_trace_matches_default_on_full_algebra(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(4, 4))
        tr = lambda x: np.trace(x) / 4
        assert numkit.rho_norm(a, 3.0, trace=tr) == pytest.approx(
            numkit.rho_norm(a, 3.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 8))
def test_log_exp_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    z = random_skew(n, rng, np.pi - 0.1)
    back = numkit.log_unitary_principal(numkit.exp_skew(z))
    assert np.linalg.norm(back - z, 2) < 1e-9


def test_haar_unitary_is_unitary_and_seeded():
    u1 = numkit.haar_unitary(5, np.random.default_rng(9))
    u2 = numkit.haar_unitary(5, np.random.default_rng(9))
    assert np.array_equal(u1, u2)
    assert np.linalg.norm(adj(u1) @ u1 - np.eye(5), 2) < 1e-13

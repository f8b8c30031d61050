import numpy as np
import pytest

from hermitia import linalg
from hermitia.errors import SymmetryViolation, ZeroTensor

from conftest import random_unitary


def charpoly_coefficients(a: np.ndarray) -> np.ndarray:
    """Faddeev-LeVerrier expansion of det(tI - A); oracle independent of
    any eigensolver."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -(a @ m).trace() / k
    return coeffs


def eigs_by_charpoly(a: np.ndarray) -> np.ndarray:
    roots = np.roots(charpoly_coefficients(a))
    return np.sort(roots.real)


def random_hermitian_matrix(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


class TestHermEig:
    def test_identity(self):
        sd = linalg.herm_eig(np.eye(3))
        assert np.allclose(sd.eigenvalues, 1.0)

    def test_diag(self):
        sd = linalg.herm_eig(np.diag([3.0, -1.0]))
        assert np.allclose(sd.eigenvalues, [-1.0, 3.0])

    def test_against_charpoly_oracle(self, rng):
        for n in (3, 4):
            for _ in range(10):
                a = random_hermitian_matrix(rng, n)
                sd = linalg.herm_eig(a)
                assert np.abs(sd.eigenvalues - eigs_by_charpoly(a)).max() < 1e-8

    def test_reconstruction_and_unitarity(self, rng):
        for n in (2, 5, 9):
            a = random_hermitian_matrix(rng, n)
            sd = linalg.herm_eig(a)
            scale = 1.0 + np.linalg.norm(a)
            assert np.linalg.norm(sd.reconstruct() - a) <= 1e-10 * scale
            v = sd.eigenvectors
            assert np.abs(v.conj().T @ v - np.eye(n)).max() < 1e-10

    def test_unitary_conjugation_invariance(self, rng):
        a = random_hermitian_matrix(rng, 4)
        q = random_unitary(rng, 4)
        w1 = linalg.herm_eig(a).eigenvalues
        w2 = linalg.herm_eig(q @ a @ q.conj().T).eigenvalues
        assert np.abs(w1 - w2).max() < 1e-8

    def test_real_input_stays_real(self, rng):
        a = rng.standard_normal((5, 5))
        a = (a + a.T) / 2
        sd = linalg.herm_eig(a)
        assert np.abs(sd.eigenvectors.imag).max() == 0.0

    def test_rejects_nonhermitian(self):
        with pytest.raises(SymmetryViolation):
            linalg.herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_moderate_size(self, rng):
        a = random_hermitian_matrix(rng, 32)
        sd = linalg.herm_eig(a)
        scale = 1.0 + np.linalg.norm(a)
        assert np.linalg.norm(sd.reconstruct() - a) <= 1e-10 * scale

    def test_zero_matrix(self):
        sd = linalg.herm_eig(np.zeros((3, 3)))
        assert np.allclose(sd.eigenvalues, 0.0)
        assert np.allclose(sd.eigenvectors, np.eye(3))


class TestMatrixRank:
    def test_zero(self):
        assert linalg.matrix_rank(np.zeros((3, 3))) == 0

    def test_outer_product(self, rng):
        u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert linalg.matrix_rank(np.outer(u, v.conj())) == 1

    def test_basis_flattening_rank2(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 3] = 1.0
        m[3, 0] = 1.0
        assert linalg.matrix_rank(m) == 2

    def test_permutation_invariance(self, rng):
        a = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
        p = np.eye(4)[rng.permutation(4)]
        q = np.eye(5)[rng.permutation(5)]
        assert linalg.matrix_rank(a) == linalg.matrix_rank(p @ a @ q)


class TestPsdProject:
    def test_psd_unchanged(self, rng):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        a = g @ g.conj().T
        assert np.linalg.norm(linalg.psd_project(a) - a) < 1e-9 * (1 + np.linalg.norm(a))

    def test_clips_diag(self):
        out = linalg.psd_project(np.diag([1.0, -2.0]))
        assert np.allclose(out, np.diag([1.0, 0.0]))

    def test_nearest_among_samples(self, rng):
        a = random_hermitian_matrix(rng, 3)
        out = linalg.psd_project(a)
        d_out = np.linalg.norm(out - a)
        for _ in range(100):
            g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            p = g @ g.conj().T
            assert d_out <= np.linalg.norm(p - a) + 1e-12

    def test_idempotent(self, rng):
        a = random_hermitian_matrix(rng, 4)
        once = linalg.psd_project(a)
        twice = linalg.psd_project(once)
        assert np.linalg.norm(twice - once) < 1e-9 * (1 + np.linalg.norm(once))


class TestRank1Factor:
    def test_exact_rank1(self, rng):
        t = np.multiply.outer(
            np.multiply.outer(rng.standard_normal(2) + 1j * rng.standard_normal(2),
                              rng.standard_normal(3) + 1j * rng.standard_normal(3)),
            rng.standard_normal(2) + 1j * rng.standard_normal(2),
        )
        _, res = linalg.rank1_factor(t)
        assert res <= 1e-10

    def test_identity_matrix_residual(self):
        # best rank-1 of I_2 removes one unit singular value out of sqrt(2)
        _, res = linalg.rank1_factor(np.eye(2))
        assert res == pytest.approx(1 / np.sqrt(2), rel=1e-12)

    def test_scale_invariant(self, rng):
        t = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        _, r1 = linalg.rank1_factor(t)
        _, r2 = linalg.rank1_factor((3.0 - 4.0j) * t)
        assert r1 == pytest.approx(r2, rel=1e-10)

    def test_zero_rejected(self):
        with pytest.raises(ZeroTensor):
            linalg.rank1_factor(np.zeros((2, 2)))


def test_matrix_rank_random_rank_deficient(rng):
    # the Gram route's noise floor sits at the threshold; the deflation
    # refinement must still classify random low-rank products exactly
    for _ in range(150):
        n = int(rng.integers(3, 13))
        r = int(rng.integers(1, n))
        x = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
        y = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
        a = (x @ y) * (10.0 ** rng.integers(-3, 4))
        assert linalg.matrix_rank(a) == r

"""Dense symmetric eigensolver and Gershgorin brackets, cross-checked
against numpy.linalg.eigh as an independent oracle."""

import numpy as np
import pytest

from klflow.linalg import (
    SymMat,
    gershgorin_max,
    gershgorin_min,
    lambda_min_plus,
    sym_eigen,
    vec,
)
from klflow.rng import SplitMix64


class TestSymMat:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            SymMat(np.zeros((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            SymMat(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SymMat(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SymMat(np.zeros((0, 0)))

    def test_stores_exact_symmetrization(self):
        a = np.array([[1.0, 2.0 + 1e-13], [2.0, 1.0]])
        m = SymMat(a)
        assert np.array_equal(m.a, 0.5 * (a + a.T))

    def test_accepts_tiny_asymmetry_only(self):
        base = np.eye(3)
        base[0, 1] = 1e-11
        with pytest.raises(ValueError):
            SymMat(base)


class TestSymEigen:
    def test_matches_lapack_on_random_matrices(self):
        rng = SplitMix64(21)
        for _ in range(200):
            n = rng.integer(1, 8)
            raw = rng.uniforms(n * n, -1.0, 1.0).reshape(n, n)
            m = SymMat(0.5 * (raw + raw.T))
            eig = sym_eigen(m)
            oracle = np.linalg.eigvalsh(m.a)
            np.testing.assert_allclose(eig.values, oracle, atol=1e-10, rtol=1e-10)

    def test_reconstruction_and_orthonormality(self):
        rng = SplitMix64(22)
        for _ in range(50):
            n = rng.integer(2, 6)
            raw = rng.normals(n, n)
            m = SymMat(raw + raw.T)
            eig = sym_eigen(m)
            v, lam = eig.vectors, eig.values
            recon = v @ np.diag(lam) @ v.T
            np.testing.assert_allclose(recon, m.a, atol=1e-9 * np.linalg.norm(m.a))
            np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-9)

    def test_values_ascending(self):
        rng = SplitMix64(23)
        raw = rng.normals(6, 6)
        eig = sym_eigen(SymMat(raw + raw.T))
        assert np.all(np.diff(eig.values) >= 0.0)

    def test_diagonal_matrix_exact(self):
        eig = sym_eigen(SymMat(np.diag([3.0, -1.0, 2.0])))
        np.testing.assert_array_equal(eig.values, [-1.0, 2.0, 3.0])

    def test_accepts_plain_array(self):
        eig = sym_eigen(np.eye(2))
        np.testing.assert_array_equal(eig.values, [1.0, 1.0])

    def test_one_by_one(self):
        eig = sym_eigen(SymMat(np.array([[4.0]])))
        assert eig.values[0] == 4.0
        assert eig.vectors[0, 0] == 1.0

    def test_repeated_eigenvalues(self):
        # projector with a double eigenvalue
        u = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
        m = SymMat(np.eye(3) - np.outer(u, u))
        eig = sym_eigen(m)
        np.testing.assert_allclose(eig.values, [0.0, 1.0, 1.0], atol=1e-14)


class TestGershgorin:
    def test_brackets_contain_spectrum(self):
        rng = SplitMix64(24)
        for _ in range(300):
            n = rng.integer(1, 7)
            raw = rng.uniforms(n * n, -1.0, 1.0).reshape(n, n)
            sym = 0.5 * (raw + raw.T)
            vals = np.linalg.eigvalsh(sym)
            assert gershgorin_min(sym) <= vals[0] + 1e-12
            assert vals[-1] <= gershgorin_max(sym) + 1e-12

    def test_non_symmetric_input_uses_half_sums(self):
        m = np.array([[2.0, 4.0], [0.0, 2.0]])
        # radius for each row is (|4| + |0|)/2 = 2
        assert gershgorin_min(m) == 0.0
        assert gershgorin_max(m) == 4.0

    def test_diagonal_is_tight(self):
        d = np.diag([1.0, 5.0, -2.0])
        assert gershgorin_min(d) == -2.0
        assert gershgorin_max(d) == 5.0


class TestLambdaMinPlus:
    def test_skips_zero_eigenvalues(self):
        m = np.diag([0.0, 0.0, 3.0, 7.0])
        assert lambda_min_plus(m) == pytest.approx(3.0, abs=1e-14)

    def test_zero_matrix(self):
        assert lambda_min_plus(np.zeros((3, 3))) == 0.0

    def test_identity(self):
        assert lambda_min_plus(np.eye(4)) == pytest.approx(1.0, abs=1e-14)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            lambda_min_plus(np.diag([-1.0, 2.0]))

    def test_tolerates_quadrature_noise(self):
        m = np.diag([-1e-14, 1.0])
        assert lambda_min_plus(m) == pytest.approx(1.0, abs=1e-14)

    def test_gram_matrix_rank_deficient(self):
        # x x^T + y y^T with dependent columns has a structural zero
        x = np.array([1.0, 2.0, 3.0])
        g = np.outer(x, x)
        assert lambda_min_plus(g) == pytest.approx(float(x @ x), rel=1e-12)


class TestVec:
    def test_flattens_and_copies(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        v = vec(a)
        assert v.shape == (4,)
        v[0] = 99.0
        assert a[0, 0] == 1.0

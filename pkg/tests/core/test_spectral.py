import json

import numpy as np
import pytest
import scipy.linalg as la

from digraph_perf.core.errors import (
    DefectiveOrIllConditioned,
    NoReachableNode,
    NotPSD,
    OutputAssumptionViolated,
    ResidualTooLarge,
    ShapeMismatch,
    SingularR,
)
from digraph_perf.core.graph import (
    build_laplacian,
    cyclic_laplacian,
    deviation_from_average_output,
    directed_path_laplacian,
    imploding_star_laplacian,
    local_disorder_output,
    random_digraph_laplacian,
    random_normal_laplacian,
)
from digraph_perf.core.spectral import (
    decompose,
    fourier_mu,
    geometric_weights,
    import_jordan,
    import_jordan_model,
    jordan_matrix,
    load_jordan,
    observable_indices,
    sigma_q,
)
from digraph_perf.schemas import FamilyHint, InputSpec, WeightedDigraph


def _residual(L, S):
    return np.linalg.norm(L @ S.R - S.R @ S.jordan())


class TestDecompose:
    def test_cycle_eigenvalues(self):
        L = cyclic_laplacian(4, 1.0, 1)
        S = decompose(L, FamilyHint(kind="cycle", n=4))
        expected = {0j, 1 + 1j, 2 + 0j, 1 - 1j}
        for lam in S.eigenvalues:
            assert min(abs(lam - e) for e in expected) < 1e-12
        assert S.is_unitary()
        assert S.alpha == pytest.approx(0.5)

    def test_cycle_without_hint_uses_schur(self):
        L = cyclic_laplacian(6, 1.0, 2)
        S = decompose(L)
        assert S.source == "normal"
        assert S.is_unitary()
        assert _residual(L, S) < 1e-10

    def test_star(self, star5):
        L, hint = star5
        S = decompose(L, hint)
        assert S.eigenvalues[0] == 0
        assert all(lam == pytest.approx(1.25) for lam in S.eigenvalues[1:])
        assert S.block_sizes == (1,) * 5

    def test_path_jordan_blocks(self):
        L = directed_path_laplacian(4)
        S = decompose(L, FamilyHint(kind="path", n=4))
        assert S.block_sizes == (1, 3)
        assert S.eigenvalues == (0j, 1 + 0j)
        assert not S.is_diagonal
        assert _residual(L, S) < 1e-12
        np.testing.assert_allclose(S.R @ S.Rinv, np.eye(4), atol=1e-12)

    def test_path_without_hint_is_defective(self):
        with pytest.raises(DefectiveOrIllConditioned):
            decompose(directed_path_laplacian(4))

    def test_random_digraph_numeric(self, rng):
        L = random_digraph_laplacian(7, rng)
        S = decompose(L)
        assert S.source == "numeric"
        assert abs(S.eigenvalues[0]) < 1e-9
        np.testing.assert_allclose(S.R[:, 0], 1.0)
        assert _residual(L, S) < 1e-8 * np.linalg.norm(L)

    def test_no_reachable_node(self):
        L = build_laplacian(WeightedDigraph(n=3, edges=[(1, 2, 1.0), (1, 3, 1.0)]))
        with pytest.raises(NoReachableNode):
            decompose(L)

    def test_hint_size_mismatch(self):
        with pytest.raises(ShapeMismatch):
            decompose(cyclic_laplacian(4, 1.0, 1), FamilyHint(kind="cycle", n=5))

    def test_column_blocks(self):
        S = decompose(directed_path_laplacian(4), FamilyHint(kind="path", n=4))
        assert S.column_blocks.tolist() == [1, 2, 2, 2]
        assert S.block_columns(2) == slice(1, 4)

    def test_jordan_matrix(self):
        J = jordan_matrix((0j, 2 + 0j), (1, 2))
        np.testing.assert_array_equal(J, [[0, 0, 0], [0, 2, 1], [0, 0, 2]])


class TestImportJordan:
    def _star_data(self, n):
        S = decompose(imploding_star_laplacian(n), FamilyHint(kind="star", n=n))
        return list(S.eigenvalues), list(S.block_sizes), S.R.copy()

    def test_exact_star_accepted(self):
        eigenvalues, sizes, R = self._star_data(4)
        S = import_jordan(imploding_star_laplacian(4), eigenvalues, sizes, R)
        assert S.source == "import"

    def test_duplicated_column(self):
        eigenvalues, sizes, R = self._star_data(4)
        R[:, 2] = R[:, 1]
        with pytest.raises(SingularR):
            import_jordan(imploding_star_laplacian(4), eigenvalues, sizes, R)

    def test_wrong_eigenvalue_order(self):
        L = cyclic_laplacian(4, 1.0, 1)
        S = decompose(L, FamilyHint(kind="cycle", n=4))
        eigenvalues = [S.eigenvalues[0], S.eigenvalues[2], S.eigenvalues[1], S.eigenvalues[3]]
        with pytest.raises(ResidualTooLarge):
            import_jordan(L, eigenvalues, list(S.block_sizes), S.R)

    def test_block_sizes_must_sum_to_n(self):
        eigenvalues, _, R = self._star_data(3)
        with pytest.raises(ShapeMismatch):
            import_jordan(imploding_star_laplacian(3), eigenvalues, [1, 1, 2], R)

    def test_json_round_trip(self, tmp_path):
        S = decompose(directed_path_laplacian(3), FamilyHint(kind="path", n=3))
        payload = {
            "eigenvalues": [[lam.real, lam.imag] for lam in S.eigenvalues],
            "block_sizes": list(S.block_sizes),
            "R": [[[z.real, z.imag] for z in row] for row in S.R],
        }
        path = tmp_path / "jordan.json"
        path.write_text(json.dumps(payload))
        imported = import_jordan_model(directed_path_laplacian(3), load_jordan(path))
        assert imported.block_sizes == (1, 2)


class TestObservability:
    def test_dav_on_circulant(self):
        S = decompose(cyclic_laplacian(5, 1.0, 2), FamilyHint(kind="cycle", n=5, omega=2))
        assert observable_indices(deviation_from_average_output(5), S) == (2, 3, 4, 5)

    def test_zero_output(self):
        S = decompose(cyclic_laplacian(5, 1.0, 1), FamilyHint(kind="cycle", n=5))
        C = np.zeros((2, 5))
        assert observable_indices(C, S) == ()
        W = geometric_weights(C, S)
        np.testing.assert_allclose(W.nu, 0.0)

    def test_output_orthogonal_to_one_mode(self):
        n = 5
        S = decompose(cyclic_laplacian(n, 1.0, 1), FamilyHint(kind="cycle", n=n))
        basis = np.column_stack([np.ones(n), S.R[:, 1].real, S.R[:, 1].imag])
        complement = la.null_space(basis.T)
        C = complement.T
        np.testing.assert_allclose(C @ S.R[:, 1], 0.0, atol=1e-12)
        obsv = observable_indices(C, S)
        assert 2 not in obsv
        assert obsv

    def test_identity_output_rejected(self):
        S = decompose(cyclic_laplacian(3, 1.0, 1), FamilyHint(kind="cycle", n=3))
        with pytest.raises(OutputAssumptionViolated):
            observable_indices(np.eye(3), S)


class TestGeometricWeights:
    def test_nu_matches_definition(self, rng):
        L = random_normal_laplacian(6, rng)
        S = decompose(L)
        C = rng.standard_normal((4, 6))
        C -= C.mean(axis=1, keepdims=True)
        W = geometric_weights(C, S)
        expected = S.r_tilde.conj().T @ C.T @ C @ S.r_tilde
        np.testing.assert_allclose(W.nu, expected, atol=1e-12)

    def test_nu_is_psd(self, rng):
        S = decompose(random_digraph_laplacian(5, rng))
        W = geometric_weights(deviation_from_average_output(5), S)
        np.testing.assert_allclose(W.nu, W.nu.conj().T, atol=1e-12)
        assert la.eigvalsh(W.nu).min() > -1e-10

    def test_dav_mu(self):
        assert fourier_mu(deviation_from_average_output(6)) == pytest.approx((0.0,) + (1.0,) * 5)


class TestNormalWeights:
    """Zero weights of a normal Laplacian match the unobservable eigenvectors."""

    @staticmethod
    def _without_alternating_mode(n):
        alternating = (-1.0) ** np.arange(n)
        return deviation_from_average_output(n) - np.outer(alternating, alternating) / n

    @pytest.mark.parametrize("source", ["cycle", "schur"])
    def test_nu_positive_iff_observable(self, source, rng):
        n = 6
        C = self._without_alternating_mode(n)
        if source == "cycle":
            S = decompose(cyclic_laplacian(n, 1.0, 2), FamilyHint(kind="cycle", n=n, omega=2))
        else:
            S = decompose(random_normal_laplacian(n, rng))
        W = geometric_weights(C, S)
        assert len(W.observable) == n - 2
        for k in range(2, n + 1):
            nu_kk = W.nu[k - 2, k - 2].real
            assert (nu_kk > 1e-10) == (k in W.observable)
            assert (np.linalg.norm(C @ S.R[:, k - 1]) > 1e-10) == (k in W.observable)

    def test_mu_zero_iff_output_annihilates_mode(self):
        n = 6
        C = self._without_alternating_mode(n)
        S = decompose(cyclic_laplacian(n, 1.0, 1), FamilyHint(kind="cycle", n=n))
        mu = fourier_mu(C)
        assert mu == pytest.approx((0.0, 1.0, 1.0, 0.0, 1.0, 1.0), abs=1e-12)
        for k in range(n):
            annihilated = np.linalg.norm(C @ S.R[:, k]) <= 1e-10
            assert (abs(mu[k]) <= 1e-10) == annihilated

    def test_cycle_nu_diagonal_is_mu(self):
        n = 7
        C = local_disorder_output(n)
        S = decompose(cyclic_laplacian(n, 1.0, 3), FamilyHint(kind="cycle", n=n, omega=3))
        W = geometric_weights(C, S)
        np.testing.assert_allclose(np.diag(W.nu).real, fourier_mu(C)[1:], atol=1e-12)


class TestSigmaQ:
    def test_normal_identity(self):
        S = decompose(cyclic_laplacian(5, 1.0, 1), FamilyHint(kind="cycle", n=5))
        np.testing.assert_allclose(sigma_q(S, InputSpec.identity()), np.eye(4), atol=1e-12)

    def test_star_identity(self):
        S = decompose(imploding_star_laplacian(4), FamilyHint(kind="star", n=4))
        np.testing.assert_allclose(sigma_q(S, InputSpec.identity()), np.eye(3) + np.ones((3, 3)))

    def test_zero_covariance(self):
        S = decompose(imploding_star_laplacian(4), FamilyHint(kind="star", n=4))
        np.testing.assert_allclose(sigma_q(S, InputSpec.covariance(np.zeros((4, 4)))), 0.0)

    def test_indefinite_covariance(self):
        S = decompose(imploding_star_laplacian(3), FamilyHint(kind="star", n=3))
        with pytest.raises(NotPSD):
            sigma_q(S, InputSpec.covariance(np.diag([1.0, -1.0, 1.0])))

    def test_wrong_shape(self):
        S = decompose(imploding_star_laplacian(3), FamilyHint(kind="star", n=3))
        with pytest.raises(ShapeMismatch):
            sigma_q(S, InputSpec.covariance(np.eye(2)))

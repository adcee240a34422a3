"""End-to-end checks of the closed form against the state-space oracles and the
directionality results on randomized instances."""
import math

import numpy as np
import pytest

from digraph_perf.core.analysis import (
    argmin_omega,
    compare_directed_undirected,
    gamma_p_thresholds,
    gamma_sweep,
    monte_carlo_h2,
    omega_sweep,
    star_vs_complete,
)
from digraph_perf.core.closed_form import performance, star_performance
from digraph_perf.core.errors import Unstable
from digraph_perf.core.graph import (
    complete_laplacian,
    cyclic_laplacian,
    deviation_from_average_output,
    directed_path_laplacian,
    hermitian_part,
    imploding_star_laplacian,
    random_digraph_laplacian,
    random_normal_laplacian,
)
from digraph_perf.core.oracle import assemble, covariance_response, deflate, h2_norm, l2_response
from digraph_perf.core.partial_fractions import (
    omega,
    pf_coefficients_distinct,
    pf_coefficients_repeated,
    reconstruct,
)
from digraph_perf.core.spectral import decompose, fourier_mu, geometric_weights
from digraph_perf.core.stability import char_roots
from digraph_perf.schemas import Dynamics, FamilyHint, InputSpec, OutputKind
from tests.helpers import first_order_query, gains, second_order_query

pytestmark = pytest.mark.slow

FIRST = Dynamics.FIRST
SECOND = Dynamics.SECOND
POSITION = OutputKind.POSITION
VELOCITY = OutputKind.VELOCITY

# the five query families of the ω-sweep figure
FIGURE_QUERIES = [
    (FIRST, POSITION, None),
    (SECOND, POSITION, gains(1, 1, 1, 1)),
    (SECOND, POSITION, gains(1, 1, 0, 1)),
    (SECOND, VELOCITY, gains(1, 1, 1, 1)),
    (SECOND, VELOCITY, gains(1, 1, 0, 1)),
]


def _random_instance(rng, i):
    family = i % 5
    if family == 0:
        n = int(rng.integers(3, 21))
        return random_digraph_laplacian(n, rng), None
    if family == 1:
        n = int(rng.integers(3, 30))
        omega_ = int(rng.integers(1, n))
        d = float(rng.uniform(0.5, 2))
        return cyclic_laplacian(n, d, omega_), FamilyHint(kind="cycle", n=n, d=d, omega=omega_)
    if family == 2:
        n = int(rng.integers(2, 30))
        return imploding_star_laplacian(n), FamilyHint(kind="star", n=n)
    if family == 3:
        n = int(rng.integers(2, 30))
        return complete_laplacian(n), FamilyHint(kind="complete", n=n)
    n = int(rng.integers(3, 13))
    return directed_path_laplacian(n), FamilyHint(kind="path", n=n)


def _random_input(rng, n):
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return InputSpec.identity()
    if kind == 1:
        return InputSpec.deterministic(rng.standard_normal(n))
    M = rng.standard_normal((n, n))
    return InputSpec.covariance(M @ M.T / n)


def _oracle_value(L, S, query):
    ss = assemble(L, query.gains, query.dynamics, query.output, query.C)
    d = deflate(ss, S)
    if query.input.kind == "identity":
        return h2_norm(d)
    if query.input.kind == "deterministic":
        return l2_response(d, query.input.w0)
    return covariance_response(d, query.input.sigma(S.n))


class TestOracleEquivalence:
    def test_random_queries(self, rng):
        checked = 0
        for i in range(200):
            L, hint = _random_instance(rng, i)
            n = L.shape[0]
            S = decompose(L, hint)
            dynamics = FIRST if i % 3 == 0 else SECOND
            output = VELOCITY if dynamics == SECOND and i % 2 else POSITION
            g = gains(*rng.uniform(0.2, 2.0, size=4))
            query = (
                first_order_query(n) if dynamics == FIRST else second_order_query(n, g, output)
            ).with_input(_random_input(rng, n))
            try:
                value = performance(L, S, query).value
            except Unstable:
                continue
            expected = _oracle_value(L, S, query)
            assert value == pytest.approx(expected, rel=1e-8, abs=1e-12), (i, hint, query.gains)
            checked += 1
        assert checked >= 150


class TestStarFormulas:
    def test_first_order(self):
        for n in range(2, 50):
            L = imploding_star_laplacian(n)
            value = performance(L, decompose(L, FamilyHint(kind="star", n=n)), first_order_query(n)).value
            assert value == pytest.approx((n - 1) ** 2 / (2 * n), rel=1e-12)

    @pytest.mark.parametrize("output", [POSITION, VELOCITY])
    def test_second_order(self, output):
        g = gains(1, 1, 1, 1)
        for n in range(2, 50):
            L = imploding_star_laplacian(n)
            S = decompose(L, FamilyHint(kind="star", n=n))
            value = performance(L, S, second_order_query(n, g, output)).value
            mu = fourier_mu(deviation_from_average_output(n))
            assert value == pytest.approx(star_performance(n, SECOND, output, g, mu), rel=1e-12)

    @pytest.mark.parametrize("dynamics,output,g", FIGURE_QUERIES)
    def test_star_equals_complete(self, dynamics, output, g):
        for row in star_vs_complete(range(2, 50), g, dynamics, output):
            assert row.abs_diff <= 1e-10 * max(row.p_star, row.p_complete)


class TestDirectionality:
    def test_random_normal_samples(self, rng):
        checked = 0
        for i in range(500):
            n = int(rng.integers(3, 9))
            L = random_normal_laplacian(n, rng)
            C = rng.standard_normal((int(rng.integers(1, n + 1)), n))
            C -= C.mean(axis=1, keepdims=True)
            if i % 3 == 0:
                query = first_order_query(n, C=C)
            else:
                output = VELOCITY if i % 3 == 1 else POSITION
                query = second_order_query(n, gains(*rng.uniform(0.1, 2.0, size=4)), output, C=C)
            try:
                report = compare_directed_undirected(L, query)
            except Unstable:
                continue
            checked += 1
            assert report.consistent, (i, report)
            if query.output == VELOCITY:
                assert report.p_directed >= report.p_undirected - 1e-9 * (1 + report.p_undirected)
        assert checked >= 400

    def test_gamma_threshold_behaviour(self):
        n = 50
        L = cyclic_laplacian(n, 1.0, 1)
        hint = FamilyHint(kind="cycle", n=n)
        C = deviation_from_average_output(n)
        report = gamma_p_thresholds(L, 1.0, 2.0, 6.5, C, hint)
        assert report.crossings
        assert all(report.gamma_l <= c <= report.gamma_u for c in report.crossings)
        below = [0.25 * report.gamma_l, 0.5 * report.gamma_l, 0.9 * report.gamma_l]
        above = [1.1 * report.gamma_u, 1.5 * report.gamma_u, 2.0 * report.gamma_u]
        rows = gamma_sweep(L, hermitian_part(L), 1.0, 2.0, 6.5, below + above, POSITION, C, hint)
        for row in rows[:3]:
            assert row.p_directed < row.p_undirected
        for row in rows[3:]:
            assert row.p_directed > row.p_undirected


class TestOmegaSweep:
    @pytest.mark.parametrize("dynamics,output,g", [FIGURE_QUERIES[i] for i in (0, 1, 2, 4)])
    def test_optimum_at_half(self, dynamics, output, g):
        rows = omega_sweep(51, g, dynamics, output)
        assert argmin_omega(rows) == 25

    def test_velocity_with_relative_position_improves(self):
        dynamics, output, g = FIGURE_QUERIES[3]
        values = [r.performance for r in omega_sweep(51, g, dynamics, output)]
        for before, after in zip(values[:-1], values[1:], strict=False):
            assert after <= before * (1 + 1e-9)


class TestPartialFractions:
    def test_random_reconstruction(self, rng):
        for i in range(1000):
            delta = int(rng.integers(1, 5))
            output = POSITION if i % 2 else VELOCITY
            if i % 4 < 2:
                lam = complex(rng.uniform(0.1, 3), rng.uniform(-2, 2))
                g = gains(*rng.uniform(0.1, 2.0, size=4))
            else:
                lam = rng.uniform(0.1, 3)
                k_d, gamma_d = rng.uniform(0.1, 2.0, size=2)
                b = k_d + gamma_d * lam
                gamma_p = rng.uniform(0.0, b * b / (4 * lam))
                g = gains(max(b * b / 4 - gamma_p * lam, 0.0), k_d, gamma_p, gamma_d)
            roots = char_roots(complex(lam), g)
            pf = pf_coefficients_repeated if roots.repeated else pf_coefficients_distinct
            c = pf(lam, g, delta, output, roots)
            for s in rng.uniform(-3, 3, 10) + 1j * rng.uniform(-3, 3, 10):
                direct = omega(lam, g, delta, output, s)
                assert abs(reconstruct(c, roots, delta, s) - direct) <= 1e-9 * max(abs(direct), 1e-12)


class TestMonteCarlo:
    def test_random_digraph(self, rng):
        L = random_digraph_laplacian(8, rng)
        S = decompose(L)
        query = second_order_query(8, gains(1, 2, 1, 1))
        report = monte_carlo_h2(S, geometric_weights(query.C, S), query, 10_000, rng)
        assert report.h2 == pytest.approx(performance(L, S, query).value, rel=1e-10)
        assert abs(report.z_score) < 3.0
        assert math.isfinite(report.mean)


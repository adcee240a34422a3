import numpy as np
import pytest

from digraph_perf.core.config import settings
from digraph_perf.core.errors import BlockTooLarge, DistinctRoots, RepeatedRoots
from digraph_perf.core.partial_fractions import (
    binom,
    omega,
    pf_coefficients_distinct,
    pf_coefficients_repeated,
    reconstruct,
)
from digraph_perf.core.stability import char_roots
from digraph_perf.schemas import OutputKind
from tests.helpers import gains

POSITION = OutputKind.POSITION
VELOCITY = OutputKind.VELOCITY

# s² + 3s + 2 = (s + 1)(s + 2)
ROOTS_1_2 = (1.0, gains(1, 2, 1, 1))
# s² + 6s + 9 = (s + 3)²
ROOT_3 = (0.0, gains(9, 6, 0, 0))


def _random_s(rng, count=10):
    return rng.uniform(-3, 3, count) + 1j * rng.uniform(-3, 3, count)


def _check_reconstruction(lam, g, delta, output, points):
    roots = char_roots(complex(lam), g)
    if roots.repeated:
        c = pf_coefficients_repeated(lam, g, delta, output, roots)
    else:
        c = pf_coefficients_distinct(lam, g, delta, output, roots)
    for s in points:
        direct = omega(lam, g, delta, output, s)
        assert abs(reconstruct(c, roots, delta, s) - direct) <= 1e-9 * max(abs(direct), 1e-12)


class TestDistinctRoots:
    def test_position_first_block(self):
        c = pf_coefficients_distinct(*ROOTS_1_2, 1, POSITION)
        np.testing.assert_allclose(c, [1.0, -1.0])

    def test_velocity_first_block(self):
        c = pf_coefficients_distinct(*ROOTS_1_2, 1, VELOCITY)
        np.testing.assert_allclose(c, [-1.0, 2.0])

    def test_second_block_reconstructs(self, rng):
        g = gains(1, 1, 1, 1)
        for output in (POSITION, VELOCITY):
            _check_reconstruction(3.0, g, 2, output, _random_s(rng))

    def test_rejects_repeated_roots(self):
        with pytest.raises(RepeatedRoots):
            pf_coefficients_distinct(*ROOT_3, 1, POSITION)


class TestRepeatedRoots:
    def test_position_first_block(self):
        np.testing.assert_allclose(pf_coefficients_repeated(*ROOT_3, 1, POSITION), [1.0, 0.0])

    def test_velocity_first_block(self):
        np.testing.assert_allclose(pf_coefficients_repeated(*ROOT_3, 1, VELOCITY), [-3.0, 1.0])

    def test_numerator_cancels_one_factor(self):
        # (1 + s)/(s + 1)⁴ = 1/(s + 1)³
        c = pf_coefficients_repeated(1.0, gains(0, 1, 1, 1), 2, POSITION)
        np.testing.assert_allclose(c, [0.0, 1.0, 0.0, 0.0], atol=1e-15)

    def test_rejects_distinct_roots(self):
        with pytest.raises(DistinctRoots):
            pf_coefficients_repeated(*ROOTS_1_2, 1, POSITION)


class TestReconstruction:
    @pytest.mark.parametrize("delta", [1, 2, 3, 4])
    @pytest.mark.parametrize("output", [POSITION, VELOCITY])
    def test_random_distinct(self, rng, delta, output):
        for _ in range(25):
            lam = complex(rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0))
            g = gains(*rng.uniform(0.1, 2.0, size=4))
            _check_reconstruction(lam, g, delta, output, _random_s(rng))

    @pytest.mark.parametrize("delta", [1, 2, 3, 4])
    @pytest.mark.parametrize("output", [POSITION, VELOCITY])
    def test_random_repeated(self, rng, delta, output):
        for _ in range(25):
            lam = rng.uniform(0.1, 3.0)
            k_d, gamma_d = rng.uniform(0.1, 2.0, size=2)
            b = k_d + gamma_d * lam
            gamma_p = rng.uniform(0.0, b * b / (4.0 * lam))
            g = gains(max(b * b / 4.0 - gamma_p * lam, 0.0), k_d, gamma_p, gamma_d)
            assert char_roots(lam, g).repeated
            _check_reconstruction(lam, g, delta, output, _random_s(rng))


class TestHelpers:
    def test_binom(self):
        assert binom(5, 2) == 10.0
        assert binom(3, 4) == 0.0
        assert binom(0, 0) == 1.0

    def test_block_too_large(self):
        with pytest.raises(BlockTooLarge):
            pf_coefficients_distinct(*ROOTS_1_2, settings.MAX_JORDAN_BLOCK + 1, POSITION)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prosumer_cpt.prosumer import (
    GenerationModel,
    ProsumerProfile,
    consumer_demand,
    consumer_payoff,
    convenience,
    sellback_convenience,
)

PROFILE = ProsumerProfile(5.0, GenerationModel(5.0, 5.5))


@pytest.mark.parametrize("x,expected", [(0.0, 0.0), (5.0, 12.5), (3.0, 10.5), (9.0, 12.5)])
def test_convenience_examples(x, expected):
    assert convenience(5.0, 1.0, x) == expected


def test_negative_consumption_rejected():
    with pytest.raises(ValueError):
        convenience(5.0, 1.0, -0.1)


@pytest.mark.parametrize("z,expected", [(0.3, 12.5), (5.3, 0.0), (2.3, 10.5)])
def test_sellback_convenience_examples(z, expected):
    assert sellback_convenience(PROFILE, 5.3, z) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("z", [-0.1, 5.31])
def test_sellback_outside_range(z):
    with pytest.raises(ValueError):
        sellback_convenience(PROFILE, 5.3, z)


@pytest.mark.parametrize("omega,alpha", [(5.0, 1.0), (3.2, 0.7), (6.0, 2.5)])
def test_kink_is_smooth(omega, alpha):
    k = omega / alpha
    h = 1e-3
    f = lambda x: convenience(omega, alpha, x)  # noqa: E731
    # second-order one-sided differences are exact on each quadratic/constant branch
    left = (3 * f(k) - 4 * f(k - h) + f(k - 2 * h)) / (2 * h)
    right = (-3 * f(k) + 4 * f(k + h) - f(k + 2 * h)) / (2 * h)
    assert abs(left) <= 1e-9
    assert abs(right) <= 1e-9


@given(
    st.floats(0.1, 10), st.floats(0.1, 5), st.floats(0, 20), st.floats(0, 20), st.floats(0, 1)
)
def test_concave(omega, alpha, x1, x2, t):
    mid = convenience(omega, alpha, t * x1 + (1 - t) * x2)
    chord = t * convenience(omega, alpha, x1) + (1 - t) * convenience(omega, alpha, x2)
    assert mid >= chord - 1e-9


def test_nondecreasing_and_saturates():
    xs = np.linspace(0, 10, 2001)
    vals = [convenience(5.0, 1.0, x) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert max(vals) == 12.5


class TestConsumerDemand:
    def test_formula(self):
        assert consumer_demand(5.0, 1.0, 1.5) == 3.5

    def test_clamped_at_zero(self):
        assert consumer_demand(1.0, 1.0, 1.5) == 0.0

    def test_negative_price_rejected(self):
        with pytest.raises(ValueError):
            consumer_demand(5.0, 1.0, -1.0)

    def test_nonincreasing_in_price(self):
        prices = np.linspace(0, 8, 200)
        d = [consumer_demand(5.0, 1.3, p) for p in prices]
        assert all(b <= a for a, b in zip(d, d[1:]))

    @given(st.floats(0.5, 8), st.floats(0.2, 3), st.floats(0, 6))
    def test_maximises_payoff_against_grid(self, omega, alpha, price):
        xs = np.linspace(0, 2 * omega / alpha, 4001)
        best = max(consumer_payoff(omega, alpha, price, x) for x in xs)
        x_star = consumer_demand(omega, alpha, price)
        assert consumer_payoff(omega, alpha, price, x_star) >= best - 1e-12


class TestProfiles:
    def test_generation_bounds(self):
        with pytest.raises(ValueError):
            GenerationModel(2.0, 1.0)
        with pytest.raises(ValueError):
            GenerationModel(-1.0, 1.0)

    def test_generation_below_satiation_rejected(self):
        with pytest.raises(ValueError):
            ProsumerProfile(5.0, GenerationModel(4.0, 5.0))

    def test_with_noise(self):
        p = ProsumerProfile.with_noise(6.0, 2.0, 0.0, 0.5)
        assert (p.generation.s_min, p.generation.s_max) == (3.0, 3.5)
        assert p.satiation == 3.0

    def test_distributed_generator_without_demand(self):
        p = ProsumerProfile(0.0, GenerationModel(0.0, 1.0))
        assert p.satiation == 0.0

    @pytest.mark.parametrize("kw", [{"omega": -1.0}, {"alpha": 0.0}])
    def test_invalid_parameters(self, kw):
        args = {"omega": 5.0, "generation": GenerationModel(5.0, 5.5), **kw}
        with pytest.raises(ValueError):
            ProsumerProfile(**args)

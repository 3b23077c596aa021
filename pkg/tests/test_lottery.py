import math

import numpy as np
import pytest

from oracles import lottery_grid_argmax, random_lottery_case
from prosumer_cpt.cpt_core import WeightFunctionParams
from prosumer_cpt.lottery import (
    LotterySpec,
    lottery_marginal,
    lottery_utility,
    optimal_lottery_sellback,
    winning_probabilities,
)
from prosumer_cpt.prosumer import GenerationModel, ProsumerProfile

PROFILE = ProsumerProfile(5.0, GenerationModel(5.0, 5.5))
W = WeightFunctionParams(gamma=0.5)
S = 5.3
M = 4e-5
# exp(-sqrt(-ln 4e-5)), mpmath at 40 digits
W_4E5 = 0.041492739939727385


class TestSpec:
    @pytest.mark.parametrize("kw", [{"prize": -1.0, "scale": 1e-4}, {"prize": 1.0, "scale": 0.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            LotterySpec(**kw)

    def test_feasibility(self):
        LotterySpec(1.0, 0.1 / 2500).check_feasible(25000.0)
        with pytest.raises(ValueError):
            LotterySpec(1.0, 0.1 / 2500).check_feasible(25001.0)


class TestUtility:
    def test_no_prize_at_satiation(self):
        spec = LotterySpec(0.0, M)
        assert lottery_utility(PROFILE, spec, W, S, S - 5.0) == pytest.approx(12.5)

    def test_no_sellback_means_no_lottery_term(self):
        spec = LotterySpec(1e4, M)
        kept = S
        assert lottery_utility(PROFILE, spec, W, S, 0.0) == pytest.approx(5.0 * kept - 0.5 * kept**2)

    def test_example_point(self):
        # quadratic part at kept = 4.3 is 21.5 - 9.245 = 12.255
        spec = LotterySpec(1e4, M)
        assert lottery_utility(PROFILE, spec, W, S, 1.0) == pytest.approx(12.255 + 1e4 * W_4E5, abs=1e-9)

    def test_quadratic_used_beyond_satiation(self):
        # z = 0 keeps 5.3 > omega/alpha; the objective keeps the unsaturated quadratic
        spec = LotterySpec(0.0, M)
        assert lottery_utility(PROFILE, spec, W, S, 0.0) == pytest.approx(5.0 * 5.3 - 0.5 * 5.3**2)
        assert lottery_utility(PROFILE, spec, W, S, 0.0) < 12.5

    @pytest.mark.parametrize("z", [-0.1, 5.4])
    def test_range(self, z):
        with pytest.raises(ValueError):
            lottery_utility(PROFILE, LotterySpec(1.0, M), W, S, z)

    def test_probability_over_one(self):
        with pytest.raises(ValueError):
            lottery_utility(PROFILE, LotterySpec(1.0, 0.5), W, S, 3.0)

    @pytest.mark.parametrize("z", [0.01, 0.5, 2.0, 5.0])
    def test_marginal_matches_finite_difference(self, z):
        spec = LotterySpec(3000.0, M)
        h = 1e-6
        fd = (lottery_utility(PROFILE, spec, W, S, z + h) - lottery_utility(PROFILE, spec, W, S, z - h)) / (2 * h)
        assert lottery_marginal(PROFILE, spec, W, S, z) == pytest.approx(fd, rel=1e-5)


class TestOptimum:
    def test_no_prize(self):
        assert optimal_lottery_sellback(PROFILE, LotterySpec(0.0, M), W, S) == pytest.approx(0.3, abs=1e-15)

    def test_example_against_grid(self):
        spec = LotterySpec(1e4, M)
        z = optimal_lottery_sellback(PROFILE, spec, W, S)
        assert z > 0.3
        assert abs(z - lottery_grid_argmax(PROFILE, spec, W, S)) <= 1e-4

    def test_example_prizes_saturate(self):
        # both prizes push the optimum onto z = s, so the ordering there is only weak
        z1 = optimal_lottery_sellback(PROFILE, LotterySpec(1e4, M), W, S)
        z2 = optimal_lottery_sellback(PROFILE, LotterySpec(2e4, M), W, S)
        assert z2 >= z1
        assert z1 == z2 == S

    def test_strict_increase_at_interior_prizes(self):
        zs = [optimal_lottery_sellback(PROFILE, LotterySpec(r, M), W, S) for r in (500, 1000, 2000, 2800)]
        assert all(b > a for a, b in zip(zs, zs[1:]))
        assert zs[-1] < S

    @pytest.mark.parametrize("prize", [500.0, 1000.0, 2000.0, 2800.0])
    def test_first_order_residual(self, prize):
        spec = LotterySpec(prize, M)
        z = optimal_lottery_sellback(PROFILE, spec, W, S)
        assert 0 < z < S
        assert abs(lottery_marginal(PROFILE, spec, W, S, z)) <= 1e-8

    def test_positive_for_any_prize(self):
        for r in (1e-6, 1e-2, 1.0):
            assert optimal_lottery_sellback(PROFILE, LotterySpec(r, M), W, S) > 0.3

    def test_identity_weights_linear_closed_form(self):
        spec = LotterySpec(1e4, M)
        z = optimal_lottery_sellback(PROFILE, spec, WeightFunctionParams.eut(), S)
        assert z == pytest.approx(0.3 + 1e4 * M)

    def test_zero_generation(self):
        profile = ProsumerProfile(0.0, GenerationModel(0.0, 0.5))
        assert optimal_lottery_sellback(profile, LotterySpec(10.0, M), W, 0.0) == 0.0

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            optimal_lottery_sellback(PROFILE, LotterySpec(10.0, 0.5), W, S)

    def test_convex_region_reachable(self):
        # m * s above the 1/e inflection: the convex tail and the boundary are compared
        spec = LotterySpec(50.0, 0.1)
        z = optimal_lottery_sellback(PROFILE, spec, W, S)
        assert abs(z - lottery_grid_argmax(PROFILE, spec, W, S)) <= 1e-4

    def test_random_against_grid(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            profile, s, m, wp = random_lottery_case(rng)
            spec = LotterySpec(float(rng.uniform(0, 5000)), m)
            z = optimal_lottery_sellback(profile, spec, wp, s)
            assert abs(z - lottery_grid_argmax(profile, spec, wp, s, step=1e-4)) <= 2e-4

    def test_weakly_increasing_in_prize(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            profile, s, m, wp = random_lottery_case(rng)
            zs = [optimal_lottery_sellback(profile, LotterySpec(r, m), wp, s) for r in (0, 100, 1000, 5000, 10000)]
            assert all(b >= a for a, b in zip(zs, zs[1:]))
            assert all(b > a for a, b in zip(zs, zs[1:]) if a < s)


class TestWinningProbabilities:
    def test_nobody_sells(self):
        probs, none = winning_probabilities([0.0, 0.0], 0.1)
        assert probs == [0.0, 0.0]
        assert none == 1.0

    def test_full_ceiling(self):
        n = 2500
        probs, none = winning_probabilities([10.0] * n, 0.1 / n)
        assert probs[0] == pytest.approx(4e-4)
        assert math.fsum(probs) == pytest.approx(1.0)
        assert none == pytest.approx(0.0, abs=1e-12)

    def test_arithmetic(self):
        probs, none = winning_probabilities([1.0, 3.0], 0.1)
        assert probs == pytest.approx([0.1, 0.3])
        assert none == pytest.approx(0.6)

    def test_infeasible(self):
        with pytest.raises(ValueError):
            winning_probabilities([6.0, 6.0], 0.1)

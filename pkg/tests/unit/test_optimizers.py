"""
Tests for the PSO, GA and SA tuners against analytic landscapes, plus the
shared evaluator and convergence statistics.
"""

import functools
import math
import statistics

import numpy as np
import pytest

from errors import ConfigurationError, ParameterError
from models.report import CampaignResult, GaConfig, OptimizationReport, PsoConfig, SaConfig, SearchSpace
from optimizer.base import BatchEvaluator, convergence_iteration, convergence_speedup
from optimizer.benchmarks import constant, rastrigin, sphere
from optimizer.ga import blend_crossover, ga_minimize
from optimizer.pso import pso_minimize
from optimizer.sa import metropolis_probability, sa_minimize

BOX = SearchSpace(lower=(-10.0, -10.0, -10.0), upper=(10.0, 10.0, 10.0), names=("x", "y", "z"))
CENTER = (1.5, -2.0, 3.0)
SEEDS = range(10)


def shifted_sphere():
    return functools.partial(sphere, center=CENTER)


def median_best(minimize, make_config):
    return statistics.median(minimize(shifted_sphere(), BOX, make_config(seed)).best_cost for seed in SEEDS)


def nan_on_negative_first(x):
    return float("nan") if x[0] < 0 else float(x[0])


class TestBenchmarks:
    def test_sphere_minimum(self):
        assert sphere(CENTER, CENTER) == 0.0
        assert sphere([1.0, 2.0]) == 5.0

    def test_rastrigin_minimum(self):
        assert rastrigin(CENTER, CENTER) == pytest.approx(0.0, abs=1e-12)
        assert rastrigin([0.5, 0.0, 0.0]) == pytest.approx(20.25)

    def test_constant(self):
        assert constant([3.0, 4.0], 2.5) == 2.5


class TestSphereOracles:
    def test_pso(self):
        assert median_best(pso_minimize, lambda s: PsoConfig(seed=s)) < 1e-4

    def test_ga(self):
        assert median_best(ga_minimize, lambda s: GaConfig(seed=s)) < 1e-2

    def test_sa_with_generous_moves(self):
        def generous(seed):
            return SaConfig(initial_temperature=1.0, cooling_rate=0.8, step_scale=0.02, seed=seed)

        assert median_best(sa_minimize, generous) < 1e-1


@pytest.mark.parametrize("minimize, cfg, expected_evaluations", [
    (pso_minimize, PsoConfig(swarm_size=50, max_iterations=45, seed=1), 50 * 45),
    (ga_minimize, GaConfig(population=50, generations=45, seed=1), 50 * 45),
    (sa_minimize, SaConfig(iterations=45, moves_per_temperature=50, seed=1), 50 * 45 + 1),
])
class TestOptimizerContract:
    def test_budget_and_curve(self, minimize, cfg, expected_evaluations):
        report = minimize(rastrigin, BOX, cfg, log_evaluations=True)
        assert report.evaluations == expected_evaluations
        assert len(report.evaluation_log) == expected_evaluations
        assert report.iterations == 45
        assert report.is_monotone()
        assert report.curve[-1] == report.best_cost

    def test_best_is_minimum_of_all_evaluations(self, minimize, cfg, expected_evaluations):
        report = minimize(rastrigin, BOX, cfg, log_evaluations=True)
        assert report.best_cost == min(report.evaluation_log)
        assert rastrigin(report.best_x) == pytest.approx(report.best_cost)
        assert BOX.contains(np.array(report.best_x))

    def test_same_seed_same_result(self, minimize, cfg, expected_evaluations):
        first = minimize(rastrigin, BOX, cfg)
        second = minimize(rastrigin, BOX, cfg)
        assert first.curve == second.curve
        assert first.best_x == second.best_x

    def test_constant_landscape_gives_flat_curve(self, minimize, cfg, expected_evaluations):
        report = minimize(functools.partial(constant, value=2.0), BOX, cfg)
        assert report.curve == [2.0] * 45
        assert report.best_cost == 2.0

    def test_candidates_never_leave_the_box(self, minimize, cfg, expected_evaluations):
        seen = []

        def recording_cost(x):
            seen.append(np.array(x))
            return sphere(x, center=(25.0, -25.0, 0.0))

        report = minimize(recording_cost, BOX, cfg)
        assert len(seen) == expected_evaluations
        assert all(BOX.contains(x) for x in seen)
        assert report.best_x[0] == pytest.approx(10.0, abs=0.5)
        assert report.best_x[1] == pytest.approx(-10.0, abs=0.5)


class TestParallelEvaluation:
    @pytest.mark.parametrize("minimize, cfg", [
        (pso_minimize, PsoConfig(swarm_size=6, max_iterations=4, seed=3)),
        (ga_minimize, GaConfig(population=6, generations=4, seed=3)),
        (sa_minimize, SaConfig(iterations=4, moves_per_temperature=3, seed=3)),
    ])
    def test_workers_do_not_change_the_result(self, minimize, cfg):
        serial = minimize(shifted_sphere(), BOX, cfg, workers=1)
        pooled = minimize(shifted_sphere(), BOX, cfg, workers=2)
        assert serial.curve == pooled.curve
        assert serial.best_x == pooled.best_x


class TestPso:
    def test_inertia_schedule(self):
        cfg = PsoConfig()
        assert cfg.inertia(1) == pytest.approx(1.1)
        assert cfg.inertia(45) == pytest.approx(0.1)
        assert cfg.inertia(23) == pytest.approx(0.6)

    def test_single_iteration_is_random_search(self):
        report = pso_minimize(shifted_sphere(), BOX, PsoConfig(swarm_size=10, max_iterations=1, seed=0))
        assert report.evaluations == 10
        assert len(report.curve) == 1

    @pytest.mark.parametrize("kwargs", [{"swarm_size": 1}, {"max_iterations": 0}, {"w_low": 2.0}, {"c_1": 0.0}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ParameterError):
            PsoConfig(**kwargs)


class TestGa:
    def test_blend_crossover_range(self):
        rng = np.random.default_rng(0)
        a, b = np.array([0.0, 2.0]), np.array([1.0, 2.0])
        for _ in range(200):
            child, sibling = blend_crossover(rng, a, b, 0.5)
            assert -0.5 <= child[0] <= 1.5
            assert child[1] == 2.0 and sibling[1] == 2.0

    def test_elite_survives(self):
        report = ga_minimize(shifted_sphere(), BOX, GaConfig(population=10, generations=20, seed=4),
                             log_evaluations=True)
        log = np.array(report.evaluation_log).reshape(20, 10)
        # the elite is re-evaluated first in every later generation
        np.testing.assert_array_equal(log[1:, 0], np.minimum.accumulate(log.min(axis=1))[:-1])

    @pytest.mark.parametrize("kwargs", [{"population": 3}, {"elitism": 50}, {"mutation_probability": 1.5}])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ParameterError):
            GaConfig(**kwargs)


class TestSa:
    def test_temperature_schedule(self):
        cfg = SaConfig(initial_temperature=100.0, cooling_rate=0.9)
        assert cfg.temperature(1) == 100.0
        assert cfg.temperature(3) == pytest.approx(81.0)

    @pytest.mark.parametrize("delta, temperature, expected", [
        (-1.0, 1.0, 1.0),
        (0.0, 1e-9, 1.0),
        (1.0, math.inf, 1.0),
        (1.0, 1.0, math.exp(-1.0)),
        (2.0, 0.5, math.exp(-4.0)),
    ])
    def test_metropolis_probability(self, delta, temperature, expected):
        assert metropolis_probability(delta, temperature) == pytest.approx(expected)

    def test_evaluates_serially_even_with_workers(self, mocker):
        pool = mocker.patch("optimizer.base.ProcessPoolExecutor")
        report = sa_minimize(shifted_sphere(), BOX, SaConfig(iterations=2, moves_per_temperature=2), workers=4)
        pool.assert_not_called()
        assert report.evaluations == 5


class TestBatchEvaluator:
    def test_non_finite_costs_become_penalty(self):
        with BatchEvaluator(nan_on_negative_first, penalty=123.0) as evaluator:
            costs = evaluator.evaluate(np.array([[1.0], [-1.0], [2.0]]))
        np.testing.assert_array_equal(costs, [1.0, 123.0, 2.0])
        assert evaluator.evaluations == 3

    def test_order_is_kept_on_a_pool(self):
        candidates = np.arange(12, dtype=float).reshape(6, 2)
        with BatchEvaluator(sphere, workers=2) as evaluator:
            costs = evaluator.evaluate(candidates)
        np.testing.assert_array_equal(costs, [sphere(row) for row in candidates])

    def test_rejects_zero_workers(self):
        with pytest.raises(ParameterError):
            BatchEvaluator(sphere, workers=0)


class TestConvergence:
    def test_first_crossing(self):
        assert convergence_iteration([0.10, 0.05, 0.03, 0.03], 0.037) == 3

    def test_never_crossing(self):
        assert convergence_iteration([0.10, 0.05, 0.03, 0.03], 0.02) is None

    def test_threshold_must_be_positive(self):
        with pytest.raises(ParameterError):
            convergence_iteration([1.0], 0.0)

    def test_speedup(self):
        assert convergence_speedup(3, 22) == pytest.approx(86.3636, abs=1e-4)
        assert convergence_speedup(3, 27) == pytest.approx(88.8889, abs=1e-4)
        assert convergence_speedup(None, 27) is None

    def test_campaign_median_convergence(self):
        reports = [OptimizationReport("pso", (0.0,), c[-1], c, 4, 0.0, seed)
                   for seed, c in enumerate([[0.1, 0.03], [0.1, 0.1, 0.02], [0.5, 0.5, 0.5]])]
        result = CampaignResult("pso", reports)
        assert result.median_convergence(0.037) == 3.0
        assert result.median_convergence(0.025) is None
        assert result.min_cost == 0.02

    def test_report_dict_has_no_extra_keys(self):
        report = OptimizationReport("ga", (1.0, 2.0, 3.0), 0.5, [0.7, 0.5], 8, 1.0, 9)
        assert list(report.to_dict()) == ["method", "seed", "best_cost", "k_cd", "k_cq", "k_sat",
                                          "iterations", "evaluations", "wall_time_s"]
        assert report.best_gains.k_sat == 3.0


def test_search_space_rejects_inverted_bounds():
    with pytest.raises(ParameterError):
        SearchSpace(lower=(1.0, 1.0, 1.0), upper=(2.0, 0.5, 2.0))


def test_unknown_optimizer_name():
    from optimizer.campaign import optimizer_config
    with pytest.raises(ConfigurationError):
        optimizer_config("de", None, 0)

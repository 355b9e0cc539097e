"""Tests for the randomized structural-property checks.

The positive families must survive every check they claim; the pointwise
square is the designed negative control and must be caught with a witness
that reproduces its violation exactly.
"""

import numpy as np
import pytest

import korovkin as kv
from korovkin.function_space import SampledFunction, uniform_grid

from helpers import grid_for

TRIALS = 120  # above the default min_trials, far cheaper than a full run


def _smallish_handles():
    handles = []
    for family, n in (("bernstein", 3), ("max_bernstein", 2), ("sup_bernstein", 3)):
        K = grid_for((family, n), grid_points=61)
        handles.append(kv.build_operator(family, n, kv.identity_warp(K), K, K))
    K = uniform_grid(0.0, 1.0, 61)
    warp = kv.snap_warp(kv.quadratic_warp(K), K)
    handles.append(kv.make_composition(warp, K, K))
    handles.append(kv.make_yosida_kakutani(kv.make_composition(warp, K, K), 3))
    return handles


def _recompute_violation(T, axiom, witness):
    """Re-evaluate a witness from its stored inputs alone."""
    pt = witness.point
    if witness.description.startswith("positive homogeneity"):
        (f,) = witness.inputs
        lhs = T(witness.alpha * f).values[pt]
        rhs = witness.alpha * T(f).values[pt]
        return lhs, rhs, abs(lhs - rhs)
    if witness.description.startswith("subadditivity"):
        f, g = witness.inputs
        lhs = T(f + g).values[pt]
        rhs = (T(f).values + T(g).values)[pt]
        return lhs, rhs, lhs - rhs
    if witness.description.startswith("monotonicity"):
        f, g = witness.inputs
        lhs = T(f).values[pt]
        rhs = T(g).values[pt]
        return lhs, rhs, lhs - rhs
    if witness.description.startswith("comonotonic additivity"):
        f, g = witness.inputs
        lhs = T(f + g).values[pt]
        rhs = (T(f).values + T(g).values)[pt]
        return lhs, rhs, abs(lhs - rhs)
    raise AssertionError(f"unexpected witness kind: {witness.description}")


class TestPositiveFamiliesPass:
    @pytest.mark.parametrize("axiom", [kv.SL, kv.TR_STAR, kv.M])
    def test_claimed_properties_survive_search(self, axiom):
        for T in _smallish_handles():
            report = kv.check_axiom(T, axiom, trials=TRIALS, seed=0)
            assert report.verdict == "pass", (T.name, axiom, report.worst_violation)
            assert report.passed
            assert report.trials == TRIALS
            assert report.worst_violation <= report.tol

    def test_weak_translatability_follows_from_strong(self):
        K = grid_for(("max_bernstein", 2), grid_points=61)
        T = kv.make_max_bernstein(kv.identity_warp(K), 2, K, K)
        assert kv.check_axiom(T, kv.TR, trials=TRIALS, seed=0).passed

    def test_comonotonic_additivity_passes_for_composition(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        assert kv.check_axiom(A, kv.CA, trials=TRIALS, seed=0).passed

    def test_linearity_passes_for_bernstein(self):
        K = grid_for(("bernstein", 3), grid_points=61)
        B = kv.make_bernstein(kv.identity_warp(K), 3, K, K)
        assert kv.check_axiom(B, kv.LINEAR, trials=TRIALS, seed=0).passed

    def test_report_records_context(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        report = kv.check_axiom(A, kv.SL, trials=TRIALS, seed=42)
        assert report.operator == A.name
        assert report.axiom == kv.SL
        assert report.seed == 42
        assert report.witness is None


class TestSeedDeterminism:
    def test_same_seed_reproduces_report_bitwise(self):
        K = grid_for(("max_bernstein", 2), grid_points=61)
        T = kv.make_max_bernstein(kv.identity_warp(K), 2, K, K)
        first = kv.check_axiom(T, kv.SL, trials=80, seed=7, min_trials=50)
        second = kv.check_axiom(T, kv.SL, trials=80, seed=7, min_trials=50)
        assert first.worst_violation == second.worst_violation
        assert first.verdict == second.verdict
        assert first.trials == second.trials

    def test_failures_are_deterministic_too(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        first = kv.check_axiom(bad, kv.SL, trials=50, seed=3)
        second = kv.check_axiom(bad, kv.SL, trials=50, seed=3)
        assert first.verdict == second.verdict == "fail"
        assert first.trials == second.trials
        assert first.worst_violation == second.worst_violation
        assert first.witness.point == second.witness.point
        assert first.witness.lhs == second.witness.lhs


class TestNegativeControl:
    def test_square_fails_sublinearity_with_reproducible_witness(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        report = kv.check_axiom(bad, kv.SL, trials=50, seed=0)
        assert report.verdict == "fail"
        assert not report.passed
        assert report.worst_violation > report.tol
        wit = report.witness
        assert wit is not None
        lhs, rhs, violation = _recompute_violation(bad, kv.SL, wit)
        assert lhs == pytest.approx(wit.lhs, abs=1e-12)
        assert rhs == pytest.approx(wit.rhs, abs=1e-12)
        assert violation == pytest.approx(wit.violation, abs=1e-12)

    def test_square_fails_monotonicity(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        report = kv.check_axiom(bad, kv.M, trials=50, seed=0)
        assert report.verdict == "fail"
        lhs, rhs, violation = _recompute_violation(bad, kv.M, report.witness)
        assert violation == pytest.approx(report.witness.violation, abs=1e-12)
        assert violation > report.tol

    def test_square_fails_comonotonic_additivity(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        report = kv.check_axiom(bad, kv.CA, trials=50, seed=0)
        assert report.verdict == "fail"
        lhs, rhs, violation = _recompute_violation(bad, kv.CA, report.witness)
        assert violation == pytest.approx(report.witness.violation, abs=1e-12)

    def test_square_passes_its_single_claim(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        assert kv.check_axiom(bad, kv.UNITAL, trials=1).passed

    def test_sup_bernstein_fails_linearity(self):
        K = grid_for(("sup_bernstein", 3), grid_points=61)
        T = kv.make_sup_bernstein(kv.identity_warp(K), 3, K, K)
        report = kv.check_axiom(T, kv.LINEAR, trials=200, seed=0)
        assert report.verdict == "fail"
        assert kv.LINEAR not in T.claims  # the construction never claimed it


class TestUnitalityCheck:
    def test_single_deterministic_evaluation(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        report = kv.check_axiom(A, kv.UNITAL, trials=500, seed=0)
        assert report.passed
        assert report.trials == 1

    def test_scaled_operator_fails_with_witness(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.scale_operator(kv.make_composition(kv.identity_warp(K), K, K), 2.0)
        report = kv.check_axiom(A, kv.UNITAL, trials=1)
        assert report.verdict == "fail"
        assert report.witness.lhs == pytest.approx(2.0)
        assert report.witness.rhs == 1.0
        assert report.worst_violation == pytest.approx(1.0)


class TestVerdictMechanics:
    def test_too_few_trials_is_inconclusive(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        report = kv.check_axiom(A, kv.SL, trials=10, seed=0, min_trials=100)
        assert report.verdict == "inconclusive"
        assert not report.passed

    def test_lowering_min_trials_makes_short_runs_conclusive(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        report = kv.check_axiom(A, kv.SL, trials=10, seed=0, min_trials=10)
        assert report.verdict == "pass"

    def test_unknown_flag_rejected(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        with pytest.raises(ValueError, match="unknown axiom flag"):
            kv.check_axiom(A, "BANACH")

    def test_zero_trials_rejected(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        with pytest.raises(ValueError, match="at least one trial"):
            kv.check_axiom(A, kv.SL, trials=0)


class TestLipschitzBound:
    def test_passes_for_sublinear_monotone_families(self):
        for T in _smallish_handles():
            report = kv.verify_lipschitz_bound(T, trials=TRIALS, seed=0)
            assert report.passed, (T.name, report.worst_violation)
            assert report.axiom == "LIPSCHITZ"

    def test_composition_attains_equality(self):
        # |f(phi) - g(phi)| is exactly |f - g| composed with phi, so the
        # pointwise gap is zero to the last bit
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.quadratic_warp(K), K, K)
        report = kv.verify_lipschitz_bound(A, trials=TRIALS, seed=0)
        assert report.passed
        assert report.worst_violation <= 1e-12

    def test_requires_sublinearity_and_monotonicity_claims(self):
        K = uniform_grid(0.0, 1.0, 61)
        bad = kv.make_square_negative_control(K)
        with pytest.raises(ValueError, match="Lipschitz estimate needs claims"):
            kv.verify_lipschitz_bound(bad)

    def test_zero_trials_rejected(self):
        K = uniform_grid(0.0, 1.0, 61)
        A = kv.make_composition(kv.identity_warp(K), K, K)
        with pytest.raises(ValueError, match="at least one trial"):
            kv.verify_lipschitz_bound(A, trials=0)


class TestRandomDraws:
    def test_values_bounded_and_deterministic(self):
        K = uniform_grid(0.0, 1.0, 101)
        f1 = kv.random_piecewise_linear(K, np.random.default_rng(5))
        f2 = kv.random_piecewise_linear(K, np.random.default_rng(5))
        np.testing.assert_array_equal(f1.values, f2.values)
        assert f1.values.min() >= -1.0
        assert f1.values.max() <= 1.0

    def test_linear_between_knots(self):
        K = uniform_grid(0.0, 1.0, 101)
        f = kv.random_piecewise_linear(K, np.random.default_rng(9), knot_stride=10)
        inner = [i for i in range(1, 100) if i % 10 != 0]
        second_diff = f.values[:-2] - 2.0 * f.values[1:-1] + f.values[2:]
        for i in inner:
            assert abs(second_diff[i - 1]) <= 1e-12

    def test_needs_one_dimensional_grid(self):
        G = kv.product_grid([uniform_grid(0.0, 1.0, 5), uniform_grid(0.0, 1.0, 5)])
        with pytest.raises(ValueError, match="1-D"):
            kv.random_piecewise_linear(G, np.random.default_rng(0))

import math

import numpy as np
import pytest

from fredreg.assembly import OperatorCache
from fredreg.experiment import NoiseSpec, add_noise, exact_problem, sample_grid
from fredreg.iteration import (
    IterationState,
    SolverConfig,
    closed_form_iterate,
    discrepancy_update,
    dsm_step,
    geometric_weights,
    rank_schedule,
    run_adaptive,
    run_fixed,
)

C1 = 16.0 / 180.0


@pytest.fixture(scope="module")
def bench():
    problem = exact_problem()
    ops = OperatorCache(problem.kernel)
    grid = sample_grid(6)
    samples = problem.exact_rhs(grid)
    return problem, ops, samples


class TestGeometricWeights:
    def test_example_q025_n2(self):
        w = geometric_weights(2, 0.25)
        np.testing.assert_allclose(w, [0.1875, 0.75], atol=1e-16)
        assert w.sum() == pytest.approx(1 - 0.25 ** 2, abs=1e-16)

    def test_single_step(self):
        np.testing.assert_allclose(geometric_weights(1, 0.5), [0.5], atol=0)

    def test_sum_identity(self):
        for q in (0.1, 0.25, 0.5, 0.9):
            for n in (1, 5, 10, 37, 60):
                w = geometric_weights(n, q)
                assert np.all(w > 0)
                assert abs(w.sum() - (1 - q ** n)) < 1e-14

    def test_rejects(self):
        with pytest.raises(ValueError):
            geometric_weights(0, 0.5)
        with pytest.raises(ValueError):
            geometric_weights(3, 1.0)


def oracle_rank(a, c1, eta):
    """Independent direct evaluation of the three ceiling terms."""
    t1 = math.ceil(math.log2(2.0 * c1 / a) / 4.0)
    t2 = math.ceil(math.log2(17.0 / (180.0 * eta * a * a)) / 2.0)
    t3 = math.ceil(math.log2(2.0 * c1 / math.sqrt(a)) / 2.0)
    return max(t1, t2, t3, 1)


class TestRankSchedule:
    def test_derived_example_a025(self):
        # raw ceiling terms at a = 0.25: (0, -1, 0) -> max 0 -> clamped to 1
        a, eta = 0.25, 10.0
        t1 = math.ceil(math.log(2 * C1 / a) / (4 * math.log(2)))
        t2 = math.ceil(math.log(17 / (180 * eta * a * a)) / (2 * math.log(2)))
        t3 = math.ceil(math.log(2 * C1 / math.sqrt(a)) / (2 * math.log(2)))
        assert (t1, t2, t3) == (0, -1, 0)
        assert rank_schedule(a, C1, eta) == 1

    def test_derived_example_a025_pow4(self):
        a, eta = 0.25 ** 4, 10.0
        t1 = math.ceil(math.log(2 * C1 / a) / (4 * math.log(2)))
        t2 = math.ceil(math.log(17 / (180 * eta * a * a)) / (2 * math.log(2)))
        t3 = math.ceil(math.log(2 * C1 / math.sqrt(a)) / (2 * math.log(2)))
        assert (t1, t2, t3) == (2, 5, 1)
        assert rank_schedule(a, C1, eta) == 5

    def test_monotone_in_a(self):
        values = [rank_schedule(0.5 ** k, C1, 10.0) for k in range(1, 30)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            a = 10.0 ** rng.uniform(-6, 0)
            eta = 10.0 ** rng.uniform(1, 3)
            c1 = 10.0 ** rng.uniform(-3, 0)
            assert rank_schedule(a, c1, eta) == oracle_rank(a, c1, eta)

    def test_cap(self):
        assert rank_schedule(1e-8, C1, 10.0, m_cap=6) == 6
        assert rank_schedule(1e-8, C1, 10.0) > 6

    def test_rejects(self):
        with pytest.raises(ValueError):
            rank_schedule(0.0, C1, 10.0)
        with pytest.raises(ValueError):
            rank_schedule(0.5, C1, 1.0)


class TestDsmStep:
    def make_state(self, u):
        u = np.asarray(u, dtype=float)
        m = int(len(u)).bit_length() - 1
        return IterationState(n=3, a=0.1, m=m, u=u, G=0.2)

    def test_first_step_from_zero(self):
        state = IterationState(n=0, a=1.0, m=0, u=np.zeros(1), G=0.0)
        zeta = np.array([1.0, 2.0, 3.0, 4.0])
        new = dsm_step(state, zeta, 0.25)
        np.testing.assert_allclose(new.u, 0.75 * zeta, atol=0)
        assert new.n == 1 and new.m == 2

    def test_fixed_point(self):
        u = np.array([1.0, -2.0])
        new = dsm_step(self.make_state(u), u, 0.25)
        np.testing.assert_allclose(new.u, u, atol=1e-16)

    def test_degenerate_blend_q_zero(self):
        u = np.array([1.0, -2.0])
        zeta = np.array([5.0, 6.0])
        new = dsm_step(self.make_state(u), zeta, 0.0)
        np.testing.assert_array_equal(new.u, zeta)

    def test_padding_on_growth(self):
        u = np.array([1.0, 1.0])
        zeta = np.zeros(8)
        new = dsm_step(self.make_state(u), zeta, 0.5)
        np.testing.assert_allclose(new.u, [0.5, 0.5, 0, 0, 0, 0, 0, 0], atol=0)

    def test_rejects_shrink(self):
        with pytest.raises(ValueError):
            dsm_step(self.make_state(np.ones(8)), np.ones(4), 0.25)


class TestDiscrepancyUpdate:
    def test_example(self):
        assert discrepancy_update(0.0, 0.25, 2.0, 0.25) == pytest.approx(0.375, abs=0)

    def test_zero_gamma(self):
        assert discrepancy_update(0.8, 0.25, 0.0, 0.25) == pytest.approx(0.2, abs=0)

    def test_listing_variant_drops_factor(self):
        formal = discrepancy_update(1.0, 0.5, 3.0, 0.25, variant="formal")
        listing = discrepancy_update(1.0, 0.5, 3.0, 0.25, variant="listing")
        assert formal == pytest.approx(0.25 + 0.75 * 1.5)
        assert listing == pytest.approx(0.25 + 1.5)

    def test_geometric_decay_limit(self):
        # constant gamma with a_n = q^n drives G to zero
        q, g = 0.25, 1.0
        G, a = 0.0, 1.0
        for _ in range(60):
            a *= q
            G = discrepancy_update(G, a, g, q)
        assert G < 1e-30

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            discrepancy_update(-1.0, 0.1, 1.0, 0.25)
        with pytest.raises(ValueError):
            discrepancy_update(0.0, 0.1, 1.0, 0.25, variant="other")


class TestSolverConfig:
    def test_defaults_are_benchmark_preset(self):
        cfg = SolverConfig()
        assert (cfg.alpha0, cfg.q, cfg.C, cfg.eps, cfg.eta) == (1.0, 0.25, 2.01, 0.99, 10.0)
        assert cfg.gnm_variant == "formal"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha0": 0.0},
            {"q": 1.0},
            {"q": 0.0},
            {"C": 2.0},
            {"eps": 1.0},
            {"eta": 9.0},
            {"max_iter": 0},
            {"m_cap": 0},
            {"gnm_variant": "loose"},
        ],
    )
    def test_rejects_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)


class TestClosedFormOracle:
    def test_base_case_single_step(self, bench):
        _, ops, samples = bench
        cfg = SolverConfig()
        rec = run_adaptive(ops, samples, None, cfg, fixed_n=1)
        cf = closed_form_iterate(ops, samples, 1, [rec.trace[0].m], cfg)
        np.testing.assert_allclose(rec.solution.values, cf.values, atol=1e-16)

    @pytest.mark.parametrize("q", [0.25, 0.5])
    def test_recursion_equals_closed_form(self, bench, q):
        _, ops, samples = bench
        cfg = SolverConfig(q=q)
        rec = run_adaptive(ops, samples, None, cfg, fixed_n=10)
        schedule = [r.m for r in rec.trace]
        cf = closed_form_iterate(ops, samples, 10, schedule, cfg)
        assert np.max(np.abs(rec.solution.values - cf.values)) <= 1e-10

    def test_non_dyadic_ratio(self, bench):
        _, ops, samples = bench
        cfg = SolverConfig(q=0.3)
        rec = run_adaptive(ops, samples, None, cfg, fixed_n=8)
        cf = closed_form_iterate(ops, samples, 8, [r.m for r in rec.trace], cfg)
        assert np.max(np.abs(rec.solution.values - cf.values)) <= 1e-12

    def test_zero_data(self, bench):
        _, ops, _ = bench
        cfg = SolverConfig()
        zero = np.zeros(180 * 2 ** 6 + 1)
        for n in (1, 4):
            out = closed_form_iterate(ops, zero, n, [1] * n, cfg)
            assert np.max(np.abs(out.values)) == 0.0

    def test_rejects_bad_schedule(self, bench):
        _, ops, samples = bench
        cfg = SolverConfig()
        with pytest.raises(ValueError):
            closed_form_iterate(ops, samples, 2, [3, 2], cfg)
        with pytest.raises(ValueError):
            closed_form_iterate(ops, samples, 2, [1], cfg)


class TestRunAdaptive:
    def test_noisy_run_terminates_by_discrepancy(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.05, seed=0))
        out = run_adaptive(ops, noisy, dabs, SolverConfig())
        assert out.stop_reason == "discrepancy_met"
        assert out.G_final <= out.threshold
        assert all(rec.G > out.threshold for rec in out.trace[:-1])
        assert out.n_delta == len(out.trace)

    def test_levels_non_decreasing_and_G_non_negative(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.005, seed=1))
        out = run_adaptive(ops, noisy, dabs, SolverConfig())
        ms = [rec.m for rec in out.trace]
        assert all(b >= a for a, b in zip(ms, ms[1:]))
        assert all(rec.G >= 0 for rec in out.trace)
        assert all(rec.m <= 6 for rec in out.trace)

    def test_initial_below_threshold(self, bench):
        _, ops, samples = bench
        # an enormous noise bound makes the threshold exceed G_1
        noisy, _ = add_noise(samples, NoiseSpec(rel_level=0.3, seed=2))
        out = run_adaptive(ops, noisy, 0.3, SolverConfig())
        assert out.stop_reason == "initial_below_threshold"
        assert out.n_delta == 1

    def test_max_iter_cap(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.05, seed=3))
        out = run_adaptive(ops, noisy, dabs * 1e-9, SolverConfig(max_iter=2))
        assert out.stop_reason == "max_iter"
        assert out.n_delta == 2

    def test_m_cap_reason_when_budget_spent_while_clamped(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.05, seed=3))
        out = run_adaptive(ops, noisy, dabs * 1e-12, SolverConfig(max_iter=8, m_cap=3))
        assert out.capped
        assert out.stop_reason == "m_cap"

    def test_rejects_missing_delta(self, bench):
        _, ops, samples = bench
        with pytest.raises(ValueError):
            run_adaptive(ops, samples, None, SolverConfig())


class TestRunFixed:
    def test_terminates_and_keeps_level(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.01, seed=0))
        out = run_fixed(ops, noisy, dabs, SolverConfig(), 4)
        assert out.stop_reason == "discrepancy_met"
        assert out.m_final == 4
        assert all(rec.m == 4 for rec in out.trace)

    def test_adaptive_uses_smaller_space_at_high_noise(self, bench):
        _, ops, samples = bench
        noisy, dabs = add_noise(samples, NoiseSpec(rel_level=0.05, seed=0))
        ada = run_adaptive(ops, noisy, dabs, SolverConfig())
        fix = run_fixed(ops, noisy, dabs, SolverConfig(), 4)
        assert ada.stop_reason == fix.stop_reason == "discrepancy_met"
        assert 2 ** ada.m_final <= 2 ** 4 / 2

    def test_rejects_bad_level(self, bench):
        _, ops, samples = bench
        with pytest.raises(ValueError):
            run_fixed(ops, samples, 0.1, SolverConfig(), 0)

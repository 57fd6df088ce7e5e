import json
import math

import numpy as np
import pytest

from synthcost import (
    ConstraintParams,
    ExperimentConfig,
    InvalidParams,
    TooLarge,
    canonical_reference,
    cost_concentration_experiment,
    default_alternative_references,
    dominance_experiment,
    hoeffding_bound,
    max_edge_hitting_time,
    step_cost_tail_fractions,
)
from synthcost.experiments import _trial_seed

from helpers import measure_for

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def hitting_oracle(measure, tol=1e-12) -> float:
    """Value-iteration route to the worst edge-to-edge expected hitting time."""
    n = measure.n_states
    r = measure.params.r
    edges = [(u, v) for u in range(n) for v in measure.graph.succ[u]]
    index = {e: i for i, e in enumerate(edges)}
    m = len(edges)
    p = np.zeros((m, m))
    for i, (_, v) in enumerate(edges):
        for w in measure.graph.succ[v]:
            p[i, index[(v, w)]] = measure.label_probs[v, w % r]
    worst = 0.0
    for t in range(m):
        masked = p.copy()
        masked[:, t] = 0.0
        h = np.zeros(m)
        for _ in range(200_000):
            nxt = 1.0 + masked @ h
            if np.max(np.abs(nxt - h)) < tol:
                h = nxt
                break
            h = nxt
        worst = max(worst, float(h.max()))
    return worst


class TestAlternativeMenu:
    def test_quaternary_menu(self):
        refs = default_alternative_references(4, count=5, seed=0)
        cycles = [ref.cycle for ref in refs]
        assert cycles[0] == (0, 0, 1, 1, 2, 2, 3, 3)
        assert cycles[1] == (3, 2, 1, 0)
        assert len(set(cycles)) == 5
        assert (0, 1, 2, 3) not in cycles
        for ref in refs:
            assert ref.prefix == () and ref.is_periodic
            assert set(ref.cycle) == {0, 1, 2, 3}

    def test_deterministic(self):
        a = default_alternative_references(3, count=4, seed=9)
        b = default_alternative_references(3, count=4, seed=9)
        assert [x.cycle for x in a] == [y.cycle for y in b]

    def test_count_validated(self):
        with pytest.raises(InvalidParams):
            default_alternative_references(2, count=0)


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig(r=2, k=2, n=100, m=5, trials=10, seed=0)
        assert cfg.epsilon == 0.02
        assert cfg.t_grid == 20
        assert cfg.references is None
        assert len(cfg.resolved_references()) == 5

    @pytest.mark.parametrize(
        "kw",
        [
            {"r": 1}, {"k": 0}, {"n": 0}, {"m": 0}, {"trials": 1},
            {"seed": -1}, {"epsilon": 0.0}, {"t_grid": 1},
        ],
    )
    def test_validation(self, kw):
        base = dict(r=2, k=2, n=100, m=5, trials=10, seed=0)
        base.update(kw)
        with pytest.raises(InvalidParams):
            ExperimentConfig(**base)

    def test_references_must_be_pure_cycles(self):
        with pytest.raises(InvalidParams):
            ExperimentConfig(r=2, k=2, n=10, m=2, trials=2, seed=0,
                             references=("finite:0101",))

    def test_explicit_references_resolved(self):
        cfg = ExperimentConfig(r=2, k=2, n=10, m=2, trials=2, seed=0,
                               references=("periodic:10",))
        refs = cfg.resolved_references()
        assert len(refs) == 1 and refs[0].cycle == (1, 0)

    def test_from_dict(self):
        raw = dict(r=2, k=2, n=10, m=2, trials=2, seed=0)
        cfg = ExperimentConfig.from_dict(raw)
        assert cfg.n == 10
        with pytest.raises(InvalidParams):
            ExperimentConfig.from_dict({**raw, "bogus": 1})
        with pytest.raises(InvalidParams):
            ExperimentConfig.from_dict({"r": 2, "k": 2})


class TestTrialSeeds:
    def test_distinct_and_mixed(self):
        seeds = [_trial_seed(0, t) for t in range(100)]
        assert len(set(seeds)) == 100
        # must not collide with the per-strand xor streams of any trial seed
        strand_streams = {s ^ j for s in seeds for j in range(64)}
        assert len(strand_streams) == 100 * 64

    def test_deterministic(self):
        assert _trial_seed(123, 7) == _trial_seed(123, 7)


class TestHittingTime:
    def test_binary_k1(self):
        assert max_edge_hitting_time(measure_for(2, 1)) == pytest.approx(2.0, abs=1e-9)

    def test_binary_pair_closed_form(self):
        got = max_edge_hitting_time(measure_for(2, 2))
        assert got == pytest.approx(4.0 + 2.0 * GOLDEN, abs=1e-9)

    def test_quaternary_triple_frozen(self):
        got = max_edge_hitting_time(measure_for(4, 3))
        assert got == pytest.approx(318.482536448259, abs=1e-6)

    @pytest.mark.parametrize("r,k", [(2, 1), (2, 2), (3, 2), (2, 3)])
    def test_against_value_iteration(self, r, k):
        m = measure_for(r, k)
        assert max_edge_hitting_time(m) == pytest.approx(hitting_oracle(m), abs=1e-8)

    @pytest.mark.parametrize("r,k", [(2, 2), (3, 2)])
    def test_at_least_worst_return_time(self, r, k):
        # the expected return time to edge (u, v) is 1 / (pi_u * Q(u, v))
        m = measure_for(r, k)
        edge_probs = [
            m.pi[u] * m.label_probs[u, v % r]
            for u in range(m.n_states)
            for v in m.graph.succ[u]
        ]
        assert max_edge_hitting_time(m) >= 1.0 / min(edge_probs) - 1e-9

    def test_size_guard(self):
        with pytest.raises(TooLarge):
            max_edge_hitting_time(measure_for(4, 4))
        with pytest.raises(TooLarge):
            max_edge_hitting_time(measure_for(2, 3), max_state_count=4)


class TestHoeffdingBound:
    def test_frozen_value(self):
        assert hoeffding_bound(100, 0.5, 2.0, 2.0) == pytest.approx(
            2.0 * math.exp(-3.125), abs=1e-15
        )

    def test_monotone(self):
        assert hoeffding_bound(200, 0.1, 1.0, 2.0) < hoeffding_bound(100, 0.1, 1.0, 2.0)
        assert hoeffding_bound(100, 0.2, 1.0, 2.0) < hoeffding_bound(100, 0.1, 1.0, 2.0)

    def test_validation(self):
        with pytest.raises(InvalidParams):
            hoeffding_bound(0, 0.1, 1.0, 1.0)
        with pytest.raises(InvalidParams):
            hoeffding_bound(10, 0.0, 1.0, 1.0)
        with pytest.raises(InvalidParams):
            hoeffding_bound(10, 0.1, -1.0, 1.0)


SMALL_CFG = dict(r=2, k=2, n=400, m=5, trials=12, seed=7, epsilon=0.2)


class TestConcentrationExperiment:
    def test_report_shape(self):
        rep = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG))
        assert rep.kind == "theorem1"
        assert rep.config["n"] == 400
        res = rep.results
        for key in [
            "expected_cost_rate", "fraction_in_band", "band_threshold",
            "canonical", "canonical_strand_mean_rate", "comparisons",
            "hitting_time_max", "hoeffding_bound_at_epsilon", "hoeffding_bound_union",
        ]:
            assert key in res
        assert res["band_threshold"] == pytest.approx(1 - 1 / 400)
        assert len(res["comparisons"]) == 5
        assert len(rep.verdicts) == 6
        assert rep.passed == all(v["passed"] for v in rep.verdicts)
        json.dumps(rep.to_dict())  # must be serializable as-is

    def test_wide_band_passes(self):
        rep = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG))
        assert rep.verdicts[0]["name"] == "cost_rate_band"
        assert rep.verdicts[0]["passed"]
        assert rep.results["fraction_in_band"] == 1.0

    def test_rate_statistics_sane(self):
        rep = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG))
        stats = rep.results["canonical"]
        assert 1.0 <= stats["min"] <= stats["mean"] <= stats["max"] <= 2.0
        assert stats["std"] >= 0
        assert stats["quantiles"]["0.5"] <= stats["quantiles"]["0.95"]

    def test_hitting_bound_attached_for_small_chains(self):
        rep = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG))
        res = rep.results
        assert res["hitting_time_max"] == pytest.approx(4 + 2 * GOLDEN, abs=1e-9)
        expect = hoeffding_bound(400, 0.2, 1.0, res["hitting_time_max"])
        assert res["hoeffding_bound_at_epsilon"] == pytest.approx(expect)
        assert res["hoeffding_bound_union"] == pytest.approx(min(1.0, 5 * expect))

    def test_hitting_bound_skipped_for_large_chains(self):
        cfg = ExperimentConfig(r=4, k=4, n=50, m=2, trials=3, seed=1, epsilon=0.5)
        rep = cost_concentration_experiment(cfg)
        assert rep.results["hitting_time_max"] is None
        assert rep.results["hoeffding_bound_at_epsilon"] is None

    def test_deterministic_and_thread_invariant(self):
        a = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG))
        b = cost_concentration_experiment(ExperimentConfig(**SMALL_CFG), threads=3)
        assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(
            b.to_dict(), sort_keys=True
        )

    def test_explicit_reference_menu(self):
        cfg = ExperimentConfig(r=2, k=2, n=200, m=3, trials=8, seed=2,
                               epsilon=0.3, references=("periodic:10", "periodic:0110"))
        rep = cost_concentration_experiment(cfg)
        names = [c["reference"] for c in rep.results["comparisons"]]
        assert names == ["periodic:10", "periodic:0110"]
        assert len(rep.verdicts) == 3


class TestDominanceExperiment:
    def test_report_shape(self):
        cfg = ExperimentConfig(r=2, k=2, n=300, m=1, trials=40, seed=3)
        rep = dominance_experiment(cfg)
        assert rep.kind == "dominance"
        assert isinstance(rep.results["t_grid"], list)
        assert all(isinstance(t, int) for t in rep.results["t_grid"])
        assert len(rep.results["per_reference"]) == 5
        for row in rep.results["per_reference"]:
            assert 0.0 <= row["fraction_holding"] <= 1.0
            assert row["violations"] >= 0
        json.dumps(rep.to_dict())

    def test_reversed_cycle_ties_canonical(self):
        # symbol-permutation invariance of the chain makes the reversed cycle
        # cost-equivalent in distribution, so no grid point may reject it
        cfg = ExperimentConfig(r=4, k=3, n=200, m=1, trials=400, seed=11,
                               references=("periodic:3210",))
        rep = dominance_experiment(cfg)
        row = rep.results["per_reference"][0]
        assert row["passed"]
        assert rep.passed

    def test_deterministic(self):
        cfg = ExperimentConfig(r=2, k=2, n=300, m=1, trials=40, seed=3)
        a = dominance_experiment(cfg).to_dict()
        b = dominance_experiment(cfg).to_dict()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


class TestStepCostTails:
    def test_structure_and_bound(self):
        m = measure_for(2, 2)
        out = step_cost_tail_fractions(m, n=200, trials=2000, seed=5,
                                       thresholds=[0.1, 0.2])
        assert out["expected_cost_rate"] == pytest.approx(
            (3 + GOLDEN) / (2 + GOLDEN), abs=1e-12
        )
        assert len(out["tails"]) == 2
        for tail in out["tails"]:
            assert 0.0 <= tail["empirical"] <= 1.0
            assert tail["within"] == (tail["empirical"] <= tail["bound"])

    def test_deterministic(self):
        m = measure_for(2, 2)
        a = step_cost_tail_fractions(m, 100, 500, 9, [0.1])
        b = step_cost_tail_fractions(m, 100, 500, 9, [0.1])
        assert a == b

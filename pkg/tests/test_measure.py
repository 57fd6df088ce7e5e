import math

import numpy as np
import pytest

from synthcost import (
    Batch,
    ConstraintParams,
    InputError,
    InvalidParams,
    MarkovMeasure,
    NumericalFailure,
    SymbolOutOfRange,
    build_measure,
    default_thread_count,
    entropy_rate,
    is_admissible,
    pattern_probability,
    run_probability_table,
    sample_batch,
    state_to_word,
    transitions_favor_short_runs,
)

from helpers import graph_for, measure_for, spectral_for

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

SMALL = [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2), (4, 3)]


class TestTransitionMatrix:
    def test_binary_pair_frozen(self):
        m = measure_for(2, 2)
        q = m.Q.toarray()
        inv = 1.0 / GOLDEN
        expect = np.array([
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, inv, inv**2],
            [inv**2, inv, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        assert q == pytest.approx(expect, abs=1e-12)

    @pytest.mark.parametrize("r,k", SMALL)
    def test_row_stochastic_on_edges(self, r, k):
        m = measure_for(r, k)
        g = graph_for(r, k)
        q = m.Q.toarray()
        assert q.sum(axis=1) == pytest.approx(np.ones(m.n_states), abs=1e-12)
        assert (q >= 0).all()
        assert np.array_equal(q > 0, g.dense() > 0)

    def test_transition_prob_lookup(self):
        m = measure_for(2, 2)
        assert m.transition_prob(0, 1) == pytest.approx(1.0)
        assert m.transition_prob(1, 2) == pytest.approx(1 / GOLDEN, abs=1e-12)
        assert m.transition_prob(0, 0) == 0.0  # run would exceed k
        assert m.transition_prob(0, 3) == 0.0  # not an edge at all
        with pytest.raises(InvalidParams):
            m.transition_prob(0, 9)

    def test_label_probs_match_q(self):
        m = measure_for(3, 2)
        q = m.Q.toarray()
        for i, row in enumerate(m.graph.succ):
            for j in row:
                assert m.label_probs[i, j % 3] == pytest.approx(q[i, j], abs=0)

    def test_mismatched_inputs_rejected(self):
        with pytest.raises(InvalidParams):
            build_measure(spectral_for(2, 2), graph_for(2, 3))


class TestStationaryLaw:
    def test_binary_pair_frozen(self):
        m = measure_for(2, 2)
        a = 1.0 / (4.0 + 2.0 * GOLDEN)
        expect = [a, GOLDEN**2 * a, GOLDEN**2 * a, a]
        assert m.pi == pytest.approx(expect, abs=1e-9)

    @pytest.mark.parametrize("r,k", SMALL)
    def test_fixed_point_of_q(self, r, k):
        m = measure_for(r, k)
        assert m.pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert m.pi.min() > 0
        assert m.pi @ m.Q.toarray() == pytest.approx(m.pi, abs=1e-10)

    @pytest.mark.parametrize("r,k", [(2, 2), (3, 2), (2, 3)])
    def test_against_dense_eig(self, r, k):
        m = measure_for(r, k)
        vals, vecs = np.linalg.eig(m.Q.toarray().T)
        dom = np.argmax(vals.real)
        assert vals[dom].real == pytest.approx(1.0, abs=1e-10)
        ref = np.abs(vecs[:, dom].real)
        ref /= ref.sum()
        assert m.pi == pytest.approx(ref, abs=1e-9)

    def test_symbol_symmetry(self):
        # relabeling symbols permutes states but not the set of pi values
        m = measure_for(4, 2)
        by_label = [m.pi[np.arange(16) % 4 == c].sum() for c in range(4)]
        assert by_label == pytest.approx([0.25] * 4, abs=1e-12)

    def test_bad_spectral_data_caught(self):
        s = spectral_for(2, 2)
        broken = type(s)(
            params=s.params, lam=s.lam, phi=s.phi.copy(), xi=s.xi * 1.5,
            capacity=s.capacity,
        )
        with pytest.raises(NumericalFailure):
            build_measure(broken, graph_for(2, 2))


class TestEntropy:
    @pytest.mark.parametrize("r,k", SMALL + [(2, 6), (3, 4)])
    def test_equals_capacity(self, r, k):
        m = measure_for(r, k)
        s = spectral_for(r, k)
        assert entropy_rate(m) == pytest.approx(s.capacity, abs=1e-10)

    def test_binary_pair_value(self):
        assert entropy_rate(measure_for(2, 2)) == pytest.approx(
            math.log2(GOLDEN), abs=1e-10
        )


class TestPatternProbability:
    def test_single_symbols_uniform(self):
        for r, k in [(2, 2), (3, 2), (4, 3)]:
            m = measure_for(r, k)
            for c in range(r):
                assert pattern_probability(m, (c,)) == pytest.approx(1 / r, abs=1e-12)

    def test_extension_consistency(self):
        m = measure_for(3, 2)
        for w in [(0,), (0, 1), (2, 0, 1)]:
            total = sum(pattern_probability(m, w + (c,)) for c in range(3))
            assert total == pytest.approx(pattern_probability(m, w), abs=1e-12)

    def test_inadmissible_is_exactly_zero(self):
        m = measure_for(2, 2)
        assert pattern_probability(m, (1, 1, 1)) == 0.0
        assert pattern_probability(m, (0, 0, 0, 1)) == 0.0

    def test_run_of_k_positive(self):
        m = measure_for(2, 2)
        assert pattern_probability(m, (1, 1)) > 0

    def test_validation(self):
        m = measure_for(2, 2)
        with pytest.raises(InputError):
            pattern_probability(m, ())
        with pytest.raises(SymbolOutOfRange):
            pattern_probability(m, (0, 2))

    def test_against_sampled_frequency(self):
        m = measure_for(2, 2)
        batch = sample_batch(m, 100_000, 1, seed=99)
        s = batch.strands[0]
        freq = np.mean((s[:-1] == 0) & (s[1:] == 1))
        assert freq == pytest.approx(pattern_probability(m, (0, 1)), abs=0.01)


class TestRunTable:
    def test_binary_pair_frozen(self):
        t = run_probability_table(measure_for(2, 2), 2)
        assert t == pytest.approx([0.3618033988749895, 0.13819660112501048], abs=1e-9)

    @pytest.mark.parametrize("r,k", [(2, 2), (2, 5), (3, 3), (4, 3), (4, 5)])
    def test_strictly_decreasing(self, r, k):
        t = run_probability_table(measure_for(r, k), k)
        assert all(a > b + 1e-12 for a, b in zip(t, t[1:]))

    def test_beyond_k_is_zero(self):
        m = measure_for(4, 3)
        assert pattern_probability(m, (0,) + (1,) * 4) == 0.0

    def test_bounds_checked(self):
        m = measure_for(2, 2)
        with pytest.raises(InvalidParams):
            run_probability_table(m, 0)
        with pytest.raises(InvalidParams):
            run_probability_table(m, 3)


class TestShortRunPreference:
    @pytest.mark.parametrize("r,k", [(2, 2), (2, 4), (3, 2), (4, 3)])
    def test_true_for_max_entropy_chain(self, r, k):
        assert transitions_favor_short_runs(measure_for(r, k))

    def test_false_for_uniform_rows(self):
        m = measure_for(2, 2)
        uniform = np.where(m.label_probs > 0, 0.5, 0.0)
        uniform[0] = [0.0, 1.0]
        uniform[3] = [1.0, 0.0]
        flat = MarkovMeasure(
            params=m.params, graph=m.graph, lam=m.lam, pi=m.pi,
            label_probs=uniform, cum_label=np.cumsum(uniform, axis=1),
            cum_pi=m.cum_pi,
        )
        assert not transitions_favor_short_runs(flat)


class TestSampling:
    def test_shapes_and_dtypes(self):
        m = measure_for(4, 3)
        b = sample_batch(m, 50, 7, seed=1)
        assert b.strands.shape == (7, 50)
        assert b.strands.dtype == np.int16
        assert b.start_states.shape == (7,)
        assert b.size == 7
        assert b.n == 50 and b.seed == 1

    def test_deterministic(self):
        m = measure_for(2, 2)
        a = sample_batch(m, 100, 10, seed=42)
        b = sample_batch(m, 100, 10, seed=42)
        assert np.array_equal(a.strands, b.strands)
        assert np.array_equal(a.start_states, b.start_states)

    def test_deterministic_across_measure_rebuild(self):
        g = graph_for(3, 2)
        from synthcost import compute_spectral

        m1 = build_measure(compute_spectral(g), g)
        m2 = build_measure(compute_spectral(g), g)
        a = sample_batch(m1, 64, 5, seed=123)
        b = sample_batch(m2, 64, 5, seed=123)
        assert np.array_equal(a.strands, b.strands)

    def test_thread_count_invariant(self):
        m = measure_for(4, 3)
        one = sample_batch(m, 80, 32, seed=5, threads=1)
        four = sample_batch(m, 80, 32, seed=5, threads=4)
        assert np.array_equal(one.strands, four.strands)
        assert np.array_equal(one.start_states, four.start_states)

    def test_strand_streams_independent_of_batch_size(self):
        # strand j depends only on (seed, j), so prefixes of a bigger batch
        # reproduce a smaller one exactly
        m = measure_for(2, 3)
        small = sample_batch(m, 40, 3, seed=11)
        big = sample_batch(m, 40, 10, seed=11)
        assert np.array_equal(big.strands[:3], small.strands)

    def test_seed_changes_output(self):
        m = measure_for(2, 2)
        a = sample_batch(m, 100, 4, seed=0)
        b = sample_batch(m, 100, 4, seed=1)
        assert not np.array_equal(a.strands, b.strands)

    def test_strands_admissible_with_hidden_prefix(self):
        for r, k in [(2, 2), (4, 3)]:
            m = measure_for(r, k)
            b = sample_batch(m, 60, 20, seed=3)
            for j in range(b.size):
                word = state_to_word(int(b.start_states[j]), m.params) + tuple(
                    int(s) for s in b.strands[j]
                )
                assert is_admissible(word, m.params)

    def test_start_states_follow_stationary_law(self):
        m = measure_for(2, 2)
        b = sample_batch(m, 1, 20_000, seed=17)
        counts = np.bincount(b.start_states, minlength=4) / b.size
        sigma = np.sqrt(m.pi * (1 - m.pi) / b.size)
        assert np.all(np.abs(counts - m.pi) < 5 * sigma + 1e-9)

    def test_symbol_marginals(self):
        m = measure_for(4, 2)
        b = sample_batch(m, 200, 100, seed=23)
        freq = np.bincount(b.strands.ravel(), minlength=4) / b.strands.size
        assert freq == pytest.approx([0.25] * 4, abs=0.01)

    def test_validation(self):
        m = measure_for(2, 2)
        with pytest.raises(InvalidParams):
            sample_batch(m, 0, 1, seed=0)
        with pytest.raises(InvalidParams):
            sample_batch(m, 1, 0, seed=0)
        with pytest.raises(InvalidParams):
            sample_batch(m, 1, 1, seed=-1)
        with pytest.raises(InvalidParams):
            sample_batch(m, 1, 1, seed=2**64)


class TestThreadDefault:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("SYNTHCOST_THREADS", "3")
        assert default_thread_count() == 3

    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("SYNTHCOST_THREADS", raising=False)
        assert default_thread_count() == 1

    def test_rejects_garbage(self, monkeypatch):
        monkeypatch.setenv("SYNTHCOST_THREADS", "many")
        with pytest.raises(InvalidParams):
            default_thread_count()
        monkeypatch.setenv("SYNTHCOST_THREADS", "0")
        with pytest.raises(InvalidParams):
            default_thread_count()

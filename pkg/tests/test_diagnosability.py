import json

import pytest
from hypothesis import given, strategies as st

from tools.diagnosability import (EXHAUSTIVE, RANDOMIZED, WITNESS_ONLY, SearchBudget, brute_force_diagnosability,
                                  closed_neighborhood_witness, conditional_diagnosability, diagnosability,
                                  find_indistinguishable_pair, lemma6_witness, make_witness, theorem2_side_facts,
                                  verify_lemma4, verify_lemma5, verify_theorem2_exhaustive)
from tools.errors import BudgetExceededError, ValidationError, VerificationError
from tools.perm_graph import (build_bubble_sort, complete_bipartite_graph, complete_graph, cycle_graph,
                              path_graph, random_graph, star_graph)
from tools.pmc_core import are_distinguishable, is_conditional_fault_set


def exhaustive(**overrides):
    values = dict(mode=EXHAUSTIVE, threads=1)
    values.update(overrides)
    return SearchBudget(**values)


SMALL_GRAPHS = [path_graph(5), cycle_graph(6), complete_graph(4), complete_bipartite_graph(2, 3), star_graph(4)] + [
    random_graph(k, density, seed) for k, density, seed in
    [(6, 0.5, 1), (7, 0.4, 2), (8, 0.6, 3), (9, 0.3, 4), (10, 0.5, 5), (10, 0.7, 6)]]


class TestPairEdgeWitness:
    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_sizes_and_flags(self, n):
        """Test |F1| = |F2| = 4n-10 with every verification flag set"""
        witness = lemma6_witness(n)
        assert witness.sizes == (4 * n - 10, 4 * n - 10)
        assert witness.conditional
        assert all(witness.verification.values())
        assert set(witness.verification) >= {'indistinguishable', 'F1_conditional', 'F2_conditional',
                                             'neighbor_conditions', 'gadget_neighborhood', 'sizes'}

    def test_other_pair_edges(self, b5):
        witness = lemma6_witness(5, "31245", "13245")
        assert witness.sizes == (10, 10)
        assert not are_distinguishable(b5, witness.F1, witness.F2)

    def test_rejects_small_dimension(self):
        with pytest.raises(ValidationError):
            lemma6_witness(3)

    def test_document_uses_labels(self, b4):
        document = lemma6_witness(4).to_document(b4)
        assert document['sizes'] == [6, 6]
        assert "1234" in document['F1'] and "1243" in document['F2']
        assert document['D'] == ["1234", "1243", "2134", "2143"]


class TestWitnessChecks:
    def test_closed_neighborhood_witness(self, b4):
        witness = closed_neighborhood_witness(b4, 0)
        assert witness.sizes == (3, 4)
        assert not witness.verification['F1_conditional'] or not witness.verification['F2_conditional']

    def test_make_witness_rejects_distinguishable_pairs(self, b4):
        with pytest.raises(VerificationError):
            make_witness(b4, b4.vertex_set(["1234"]), b4.vertex_set(["4321"]), conditional=False)

    def test_make_witness_rejects_non_conditional_pairs(self, b4):
        witness = closed_neighborhood_witness(b4, 0)
        with pytest.raises(VerificationError):
            make_witness(b4, witness.F1, witness.F2, conditional=True)

    def test_make_witness_enforces_neighbor_conditions(self, b4, monkeypatch):
        pair = lemma6_witness(4)
        monkeypatch.setattr('tools.diagnosability.verify_lemma4', lambda g, F1, F2: False)
        with pytest.raises(VerificationError):
            make_witness(b4, pair.F1, pair.F2, conditional=True)
        assert make_witness(b4, pair.F1, pair.F2, conditional=False).sizes == (6, 6)

    def test_neighbor_conditions_need_conditional_pairs(self, b4):
        witness = closed_neighborhood_witness(b4, 0)
        with pytest.raises(ValidationError):
            verify_lemma4(b4, witness.F1, witness.F2)
        pair = lemma6_witness(4)
        assert verify_lemma4(b4, pair.F1, pair.F2)


class TestPairSearch:
    def test_hexagon(self, b3):
        assert find_indistinguishable_pair(b3, 2, False, exhaustive()).witness is None
        found = find_indistinguishable_pair(b3, 3, False, exhaustive())
        assert found.witness is not None and found.witness.max_size == 3
        assert found.conclusive and found.subsets_examined == 2 ** 6 - 1

    def test_returned_witness_is_oriented_and_valid(self, b3):
        witness = find_indistinguishable_pair(b3, 3, False, exhaustive()).witness
        assert witness.F1.sort_key() < witness.F2.sort_key()
        assert not are_distinguishable(b3, witness.F1, witness.F2)

    @pytest.mark.parametrize("g", SMALL_GRAPHS, ids=lambda g: g.name)
    @pytest.mark.parametrize("conditional", [False, True])
    def test_found_pairs_persist_at_larger_bounds(self, g, conditional):
        budget = exhaustive(max_t=g.vertex_count, override=True)
        found = [find_indistinguishable_pair(g, t, conditional, budget).witness is not None
                 for t in range(1, g.vertex_count + 1)]
        assert found == sorted(found)

    def test_budget_guards(self, b4, b5):
        with pytest.raises(BudgetExceededError):
            find_indistinguishable_pair(b5, 3, True, exhaustive())
        with pytest.raises(BudgetExceededError):
            find_indistinguishable_pair(b4, 9, True, exhaustive())
        with pytest.raises(ValidationError):
            find_indistinguishable_pair(b4, 0, True, exhaustive())
        with pytest.raises(ValidationError):
            find_indistinguishable_pair(b4, 3, True, exhaustive(mode='guess'))
        with pytest.raises(ValidationError):
            find_indistinguishable_pair(b4, 3, True, exhaustive(mode=WITNESS_ONLY))

    def test_budget_from_settings(self, default_settings):
        budget = SearchBudget.from_settings(default_settings, mode=RANDOMIZED, samples=500, seed=None)
        assert budget.samples == 500 and budget.seed == default_settings.seed and budget.threads == 1


class TestDualOracle:
    @pytest.mark.parametrize("g", SMALL_GRAPHS, ids=lambda g: g.name)
    @pytest.mark.parametrize("conditional", [False, True])
    def test_pruned_search_matches_naive_enumeration(self, g, conditional):
        """Test the pruned D-enumeration against the all-pairs oracle"""
        search = conditional_diagnosability if conditional else diagnosability
        report = search(g, exhaustive(max_t=g.vertex_count, override=True))
        assert report.value == brute_force_diagnosability(g, conditional)

    def test_known_values(self):
        budget = exhaustive(max_t=10, override=True)
        assert diagnosability(complete_graph(4), budget).value == 1
        assert diagnosability(cycle_graph(6), budget).value == 2
        assert diagnosability(path_graph(5), budget).value == 1
        assert diagnosability(complete_graph(2), budget).value == 0
        assert diagnosability(star_graph(3), budget).value == 1
        report = conditional_diagnosability(path_graph(5), budget)
        assert report.value == 5 and report.witness is None
        assert report.notes == ["no indistinguishable pair of any size"]

    @given(st.integers(5, 9), st.floats(0.3, 0.7), st.integers(0, 10_000))
    def test_conditional_never_below_ordinary(self, k, density, seed):
        g = random_graph(k, density, seed)
        assert brute_force_diagnosability(g, True) >= brute_force_diagnosability(g, False)

    def test_naive_oracle_size_guard(self, b4):
        with pytest.raises(BudgetExceededError):
            brute_force_diagnosability(b4, True)


class TestBubbleSortValues:
    @pytest.mark.slow
    def test_conditional_diagnosability_b4(self, b4):
        report = conditional_diagnosability(b4, exhaustive())
        assert report.value == 5
        assert report.witness.max_size == 6
        assert is_conditional_fault_set(b4, report.witness.F1)
        assert not are_distinguishable(b4, report.witness.F1, report.witness.F2)
        assert report.conclusive

    @pytest.mark.slow
    def test_ordinary_diagnosability_b4(self, b4):
        report = diagnosability(b4, exhaustive())
        assert report.value == 3
        assert report.witness.max_size == 4
        assert any("t_c(B4) = 5" in note for note in report.notes)

    @pytest.mark.slow
    def test_exhaustive_verification(self):
        report = verify_theorem2_exhaustive(exhaustive())
        assert report.value == 5
        assert any("20 vertices" in note for note in report.notes)

    def test_exhaustive_guard_on_b5(self, b5):
        with pytest.raises(BudgetExceededError):
            conditional_diagnosability(b5, exhaustive())

    def test_isolating_cuts_leave_twenty_vertices(self, b4):
        facts = theorem2_side_facts(b4)
        assert facts['remaining_component_sizes'] == [20]
        assert facts['isolating_cuts'] > 0

    def test_witness_only_mode(self, b5):
        report = conditional_diagnosability(b5, exhaustive(mode=WITNESS_ONLY))
        assert report.value == 9 and not report.conclusive
        assert report.witness.sizes == (10, 10) and report.subsets_examined == 0

    def test_randomized_refutation_b5(self, b5):
        report = conditional_diagnosability(b5, exhaustive(mode=RANDOMIZED, samples=2000, blocks=8))
        assert report.value == 9
        assert report.witness.sizes == (10, 10)
        assert report.subsets_examined == 2000
        assert not report.conclusive

    def test_randomized_reports_are_thread_independent(self, b5):
        documents = set()
        for threads in (1, 2):
            budget = exhaustive(mode=RANDOMIZED, samples=400, blocks=8, threads=threads)
            documents.add(json.dumps(conditional_diagnosability(b5, budget).to_document(b5)))
        assert len(documents) == 1

    def test_randomized_ordinary_bound(self, b4):
        report = diagnosability(b4, exhaustive(mode=RANDOMIZED, samples=500, blocks=4))
        assert report.value == 3
        assert report.witness.sizes == (3, 4)

    def test_timings_only_on_request(self, b3):
        report = diagnosability(b3, exhaustive())
        assert 'wall_ms' not in report.to_document(b3)
        assert 'wall_ms' in report.to_document(b3, timings=True)


class TestCrossPartConnectivity:
    def test_random_trials_on_b5(self, b5):
        assert verify_lemma5(b5, 300, seed=17)

    def test_needs_dimension_five(self, b4):
        with pytest.raises(ValidationError):
            verify_lemma5(b4, 10, seed=1)

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tools.diagnosability import lemma6_witness
from tools.diagnoser import OutcomeKind, agreement_components, diagnose
from tools.errors import BudgetExceededError, ValidationError
from tools.fault_set import FaultSet
from tools.perm_graph import build_bubble_sort
from tools.pmc_core import (TesterStrategy, generate_syndrome, is_consistent, sample_conditional_fault_set,
                            shared_syndrome)


class TestAgreementComponents:
    def test_all_zero_syndrome_is_one_component(self, b4):
        sigma = generate_syndrome(b4, FaultSet.empty(24), TesterStrategy.zero())
        assert agreement_components(b4, sigma) == [FaultSet.full(24)]

    def test_fixed_one_isolates_the_faulty_vertex(self, b4):
        F = b4.vertex_set(["1234"])
        parts = agreement_components(b4, generate_syndrome(b4, F, TesterStrategy.one()))
        assert parts[0] == F
        assert [len(p) for p in parts] == [1, 23]

    def test_components_are_ordered_and_disjoint(self, b4):
        F = b4.vertex_set(["1234", "3412", "2143"])
        parts = agreement_components(b4, generate_syndrome(b4, F, TesterStrategy.random(4)))
        assert [min(p) for p in parts] == sorted(min(p) for p in parts)
        assert sum(len(p) for p in parts) == 24


class TestDiagnose:
    def test_fault_free_system(self, b4):
        sigma = generate_syndrome(b4, FaultSet.empty(24), TesterStrategy.zero())
        outcome = diagnose(b4, sigma, 0)
        assert outcome.kind is OutcomeKind.UNIQUE
        assert outcome.faults == FaultSet.empty(24)

    @pytest.mark.parametrize("strategy", ['zero', 'one', 'random'])
    def test_round_trip(self, b4, strategy):
        rng = np.random.default_rng(2024)
        for trial in range(60):
            F = sample_conditional_fault_set(b4, int(rng.integers(0, 6)), rng)
            sigma = generate_syndrome(b4, F, TesterStrategy.parse(strategy, seed=trial))
            outcome = diagnose(b4, sigma, 5, conditional=True)
            assert outcome.kind is OutcomeKind.UNIQUE
            assert outcome.faults == F

    @given(st.sets(st.integers(0, 23), max_size=3), st.integers(0, 2**32))
    def test_unconditional_round_trip_within_ordinary_bound(self, vertices, seed):
        g = build_bubble_sort(4)
        F = FaultSet.of(24, vertices)
        outcome = diagnose(g, generate_syndrome(g, F, TesterStrategy.random(seed)), 3)
        assert outcome.kind is OutcomeKind.UNIQUE and outcome.faults == F

    @given(st.sets(st.integers(0, 23), max_size=7), st.sampled_from(['zero', 'one', 'random']), st.integers(0, 8))
    def test_unique_outcomes_are_consistent(self, vertices, strategy, t):
        g = build_bubble_sort(4)
        sigma = generate_syndrome(g, FaultSet.of(24, vertices), TesterStrategy.parse(strategy, seed=t))
        outcome = diagnose(g, sigma, t)
        for F in outcome.candidates:
            assert is_consistent(g, F, sigma) and len(F) <= t
        if outcome.kind is OutcomeKind.UNIQUE:
            assert outcome.consistent_sets == 1

    def test_shared_syndrome_is_ambiguous(self, b4):
        witness = lemma6_witness(4)
        sigma = shared_syndrome(b4, witness.F1, witness.F2)
        outcome = diagnose(b4, sigma, 6, conditional=True)
        assert outcome.kind is OutcomeKind.AMBIGUOUS
        assert set(outcome.candidates) == {witness.F1, witness.F2}
        assert outcome.consistent_sets == 2 and not outcome.truncated
        assert list(outcome.candidates) == sorted(outcome.candidates, key=lambda F: F.sort_key())

    def test_bound_below_the_fault_count_is_infeasible(self, b4):
        F = b4.vertex_set(["1234", "3412", "4321"])
        sigma = generate_syndrome(b4, F, TesterStrategy.zero())
        outcome = diagnose(b4, sigma, 2)
        assert outcome.kind is OutcomeKind.INFEASIBLE
        assert outcome.candidates == ()

    def test_ambiguous_list_is_capped(self, b4):
        around = b4.vertex_set(["2134", "1324", "1243"])
        sigma = generate_syndrome(b4, around, TesterStrategy.one())
        outcome = diagnose(b4, sigma, 24, cap=2)
        assert outcome.kind is OutcomeKind.AMBIGUOUS
        assert len(outcome.candidates) == 2 and outcome.truncated
        assert outcome.consistent_sets > 2

    def test_budget_and_validation(self, b4):
        sigma = generate_syndrome(b4, b4.vertex_set(["1234"]), TesterStrategy.one())
        with pytest.raises(ValidationError):
            diagnose(b4, sigma, -1)
        with pytest.raises(BudgetExceededError):
            diagnose(b4, sigma, 24, max_candidates=2)
        with pytest.raises(ValidationError):
            diagnose(build_bubble_sort(3), sigma, 1)

    def test_outcome_documents(self, b4):
        F = b4.vertex_set(["1324"])
        unique = diagnose(b4, generate_syndrome(b4, F, TesterStrategy.zero()), 1).to_document(b4)
        assert unique['kind'] == 'unique' and unique['faults'] == ["1324"]
        assert unique['schema_version'] == 1
        witness = lemma6_witness(4)
        ambiguous = diagnose(b4, shared_syndrome(b4, witness.F1, witness.F2), 6, conditional=True).to_document(b4)
        assert ambiguous['kind'] == 'ambiguous'
        assert b4.labels_of(witness.F1) in ambiguous['candidates']

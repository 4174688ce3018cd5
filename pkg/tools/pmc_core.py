"""
PMC-model semantics: fault sets, the conditional fault-set predicate,
syndrome generation and consistency, and the distinguishability test.

Output-bit convention: a result of 1 means the tester deems the tested
vertex faulty. For a fault-free tester u, result(u, v) = 1 iff v is in F.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from tools.errors import ValidationError
from tools.fault_set import FaultSet
from tools.perm_graph import Graph, neighborhood_set

logger = logging.getLogger(__name__)

__all__ = [
    'FaultSet', 'Syndrome', 'StrategyKind', 'TesterStrategy', 'is_conditional_fault_set',
    'generate_syndrome', 'is_consistent', 'are_distinguishable', 'shared_syndrome',
    'sample_conditional_fault_set', 'fault_set_document', 'fault_set_from_document', 'parse_fault_labels',
]


def _require_member_set(g: Graph, F: FaultSet) -> None:
    if F.universe != g.vertex_count:
        raise ValidationError(f"fault set over {F.universe} vertices used with {g.name} ({g.vertex_count} vertices)")


class Syndrome:
    """Test results for every ordered adjacent pair, indexed by directed-edge id."""

    def __init__(self, graph: Graph, results: np.ndarray):
        results = np.asarray(results, dtype=np.uint8)
        if results.shape != (graph.arc_count,):
            raise ValidationError(
                f"syndrome has {results.size} results, {graph.name} needs {graph.arc_count}")
        if results.size and results.max() > 1:
            raise ValidationError("syndrome results must be 0 or 1")
        results.setflags(write=False)
        self.graph = graph
        self.results = results

    def result(self, tester: int, tested: int) -> int:
        return int(self.results[self.graph.arc_id(tester, tested)])

    @cached_property
    def ones_masks(self) -> Tuple[int, ...]:
        """Per tester: bit mask of the tested vertices it reports faulty."""
        g = self.graph
        masks = []
        for u, nbrs in enumerate(g.adjacency):
            base = g.arc_offsets[u]
            m = 0
            for k, v in enumerate(nbrs):
                if self.results[base + k]:
                    m |= 1 << v
            masks.append(m)
        return tuple(masks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Syndrome):
            return NotImplemented
        return self.graph.vertex_count == other.graph.vertex_count and np.array_equal(self.results, other.results)

    def __hash__(self) -> int:
        return hash(self.results.tobytes())

    def to_document(self) -> Dict[str, Any]:
        g = self.graph
        tests = []
        for u, nbrs in enumerate(g.adjacency):
            base = g.arc_offsets[u]
            for k, v in enumerate(nbrs):
                tests.append({'tester': g.label_text(u), 'tested': g.label_text(v), 'result': int(self.results[base + k])})
        tests.sort(key=lambda t: (t['tester'], t['tested']))
        return {'schema_version': 1, 'n': g.dimension, 'tests': tests}

    @classmethod
    def from_document(cls, graph: Graph, document: Dict[str, Any]) -> "Syndrome":
        """Decode a complete syndrome document.

        Raises:
            ValidationError: missing, duplicate or non-adjacent pairs
        """
        if graph.dimension is not None and document.get('n') not in (None, graph.dimension):
            raise ValidationError(f"syndrome is for n={document.get('n')}, graph is {graph.name}")
        results = np.full(graph.arc_count, 255, dtype=np.uint8)
        for test in document.get('tests', []):
            u = graph.vertex_of(test['tester'])
            v = graph.vertex_of(test['tested'])
            arc = graph.arc_id(u, v)
            if results[arc] != 255:
                raise ValidationError(f"duplicate test ({test['tester']}, {test['tested']})")
            results[arc] = int(test['result'])
        missing = int(np.count_nonzero(results == 255))
        if missing:
            raise ValidationError(f"partial syndrome: {missing} of {graph.arc_count} ordered pairs missing")
        return cls(graph, results)


class StrategyKind(str, Enum):
    FIXED_ZERO = 'zero'
    FIXED_ONE = 'one'
    RANDOM_SEEDED = 'random'
    IMPERSONATE = 'impersonate'
    REPLAY = 'replay'


@dataclass(frozen=True)
class TesterStrategy:
    """How faulty testers answer.

    RANDOM_SEEDED derives each answer from (seed, tester, tested) alone, so
    syndromes do not depend on generation order or worker count.
    IMPERSONATE answers as if ``as_if`` were the fault set; REPLAY copies
    ``replay``.
    """

    kind: StrategyKind
    seed: int = 0
    as_if: Optional[FaultSet] = None
    replay: Optional[Syndrome] = None

    @classmethod
    def zero(cls) -> "TesterStrategy":
        return cls(StrategyKind.FIXED_ZERO)

    @classmethod
    def one(cls) -> "TesterStrategy":
        return cls(StrategyKind.FIXED_ONE)

    @classmethod
    def random(cls, seed: int) -> "TesterStrategy":
        if not 0 <= seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
        return cls(StrategyKind.RANDOM_SEEDED, seed=seed)

    @classmethod
    def impersonate(cls, as_if: FaultSet) -> "TesterStrategy":
        return cls(StrategyKind.IMPERSONATE, as_if=as_if)

    @classmethod
    def replaying(cls, syndrome: Syndrome) -> "TesterStrategy":
        return cls(StrategyKind.REPLAY, replay=syndrome)

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> "TesterStrategy":
        if name == StrategyKind.FIXED_ZERO.value:
            return cls.zero()
        if name == StrategyKind.FIXED_ONE.value:
            return cls.one()
        if name == StrategyKind.RANDOM_SEEDED.value:
            return cls.random(seed)
        raise ValidationError(f"unknown strategy {name!r}; expected zero, one or random")

    def answer(self, tester: int, tested: int) -> int:
        if self.kind is StrategyKind.FIXED_ZERO:
            return 0
        if self.kind is StrategyKind.FIXED_ONE:
            return 1
        if self.kind is StrategyKind.RANDOM_SEEDED:
            state = np.random.SeedSequence([self.seed, tester, tested]).generate_state(1)
            return int(state[0] & 1)
        if self.kind is StrategyKind.IMPERSONATE:
            return int(tested in self.as_if)
        return self.replay.result(tester, tested)


def is_conditional_fault_set(g: Graph, F: FaultSet) -> bool:
    """True iff no vertex has its whole neighborhood inside F."""
    _require_member_set(g, F)
    outside = ~F.bits
    return all(mask & outside for mask in g.neighbor_masks)


def generate_syndrome(g: Graph, F: FaultSet, s: TesterStrategy) -> Syndrome:
    _require_member_set(g, F)
    if s.kind is StrategyKind.IMPERSONATE:
        _require_member_set(g, s.as_if)
    results = np.zeros(g.arc_count, dtype=np.uint8)
    arc = 0
    for u, nbrs in enumerate(g.adjacency):
        faulty_tester = u in F
        for v in nbrs:
            results[arc] = s.answer(u, v) if faulty_tester else int(v in F)
            arc += 1
    return Syndrome(g, results)


def is_consistent(g: Graph, F: FaultSet, sigma: Syndrome) -> bool:
    """True iff every fault-free tester's results match F-membership of what it tests."""
    _require_member_set(g, F)
    if sigma.graph.vertex_count != g.vertex_count or sigma.results.size != g.arc_count:
        raise ValidationError(f"syndrome does not cover the ordered adjacent pairs of {g.name}")
    masks = g.neighbor_masks
    ones = sigma.ones_masks
    bits = F.bits
    for u in range(g.vertex_count):
        if (bits >> u) & 1:
            continue
        if ones[u] != masks[u] & bits:
            return False
    return True


def are_distinguishable(g: Graph, F1: FaultSet, F2: FaultSet) -> bool:
    """Some vertex outside F1 u F2 is adjacent to a vertex of F1 delta F2.

    Raises:
        ValidationError: F1 == F2
    """
    _require_member_set(g, F1)
    _require_member_set(g, F2)
    if F1 == F2:
        raise ValidationError("distinguishability is defined for distinct fault sets")
    outside = (F1 | F2).complement()
    return bool(neighborhood_set(g, F1 ^ F2) & outside)


def shared_syndrome(g: Graph, F1: FaultSet, F2: FaultSet) -> Syndrome:
    """A syndrome consistent with both sets of an indistinguishable pair.

    Testers in F1 answer as if F2 were the truth, so testers in F1 - F2 tell
    the F2 story and fault-free testers tell the F1 story.

    Raises:
        ValidationError: the pair is distinguishable
    """
    if are_distinguishable(g, F1, F2):
        raise ValidationError("a distinguishable pair has no common syndrome")
    sigma = generate_syndrome(g, F1, TesterStrategy.impersonate(F2))
    assert is_consistent(g, F1, sigma) and is_consistent(g, F2, sigma)
    return sigma


def sample_conditional_fault_set(g: Graph, size: int, rng: np.random.Generator, attempts: int = 1000) -> FaultSet:
    """Uniformly drawn vertex set of the given size, redrawn until conditional."""
    if not 0 <= size <= g.vertex_count:
        raise ValidationError(f"fault set size {size} outside 0..{g.vertex_count}")
    for _ in range(attempts):
        F = FaultSet.of(g.vertex_count, rng.choice(g.vertex_count, size=size, replace=False))
        if is_conditional_fault_set(g, F):
            return F
    raise ValidationError(f"no conditional fault set of size {size} found in {attempts} draws on {g.name}")


def fault_set_document(g: Graph, F: FaultSet) -> Dict[str, Any]:
    return {'schema_version': 1, 'vertices': g.labels_of(F)}


def fault_set_from_document(g: Graph, document: Dict[str, Any]) -> FaultSet:
    return g.vertex_set(document.get('vertices', []))


def parse_fault_labels(g: Graph, text: str) -> FaultSet:
    """Comma-separated permutation labels, e.g. "1234,2134"."""
    labels: List[str] = [part.strip() for part in text.split(',') if part.strip()]
    return g.vertex_set(labels)

"""
Syndrome decoding under the PMC model.

Every consistent fault set is a union of agreement components: if a
fault-free u reports 0 on v then v is fault-free, and a 0 from a fault-free v
about u makes u fault-free too, so both ends of a mutual-0 edge share a
status. The decoder walks the components in order of their smallest vertex,
deciding each one faulty or fault-free, and propagates what every fault-free
component forces about its neighbors.
"""

import bisect
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from monitoring.metrics import CANDIDATES_DECODED
from tools.engine_config import get_settings
from tools.errors import BudgetExceededError, ValidationError
from tools.fault_set import FaultSet
from tools.perm_graph import Graph
from tools.pmc_core import Syndrome

logger = logging.getLogger(__name__)


class OutcomeKind(str, Enum):
    UNIQUE = 'unique'
    AMBIGUOUS = 'ambiguous'
    INFEASIBLE = 'infeasible'


@dataclass(frozen=True)
class DiagnosisOutcome:
    """Result of decoding one syndrome at a fault bound t.

    ``candidates`` holds the consistent sets in lexicographic order, at most
    ``cap`` of them; ``consistent_sets`` is the full count.
    """

    kind: OutcomeKind
    candidates: Tuple[FaultSet, ...]
    t: int
    conditional: bool
    consistent_sets: int
    candidates_examined: int
    truncated: bool = False

    @property
    def faults(self) -> Optional[FaultSet]:
        return self.candidates[0] if self.kind is OutcomeKind.UNIQUE else None

    def to_document(self, g: Graph) -> Dict[str, Any]:
        document: Dict[str, Any] = {'schema_version': 1, 'kind': self.kind.value}
        if self.kind is OutcomeKind.UNIQUE:
            document['faults'] = g.labels_of(self.candidates[0])
        elif self.kind is OutcomeKind.AMBIGUOUS:
            document['candidates'] = [g.labels_of(F) for F in self.candidates]
            document['truncated'] = self.truncated
        document.update({
            't': self.t,
            'conditional': self.conditional,
            'consistent_sets': self.consistent_sets,
            'candidates_examined': self.candidates_examined,
        })
        return document


def agreement_components(g: Graph, sigma: Syndrome) -> List[FaultSet]:
    """Components of the mutual-0 subgraph, ordered by smallest vertex."""
    if sigma.graph.vertex_count != g.vertex_count or sigma.results.size != g.arc_count:
        raise ValidationError(f"syndrome does not cover the ordered adjacent pairs of {g.name}")
    ones = sigma.ones_masks
    agree = nx.Graph()
    agree.add_nodes_from(range(g.vertex_count))
    agree.add_edges_from((u, v) for u, v in g.edges() if not (ones[u] >> v) & 1 and not (ones[v] >> u) & 1)
    found = [FaultSet.of(g.vertex_count, comp) for comp in nx.connected_components(agree)]
    found.sort(key=lambda c: min(c))
    return found


def _covering(bits: int, comp_of: List[int], comp_bits: List[int]) -> int:
    covered = 0
    while bits:
        low = bits & -bits
        covered |= comp_bits[comp_of[low.bit_length() - 1]]
        bits ^= low
    return covered


def diagnose(g: Graph, sigma: Syndrome, t: int, conditional: bool = False,
             max_candidates: Optional[int] = None, cap: Optional[int] = None) -> DiagnosisOutcome:
    """Decode ``sigma`` into the consistent fault sets of size at most t.

    Args:
        g: graph the syndrome was produced on
        sigma: complete syndrome
        t: fault bound, t >= 0
        conditional: keep only conditional fault sets
        max_candidates: search-node budget (settings.diagnose_max_candidates)
        cap: most candidates reported for an ambiguous outcome (settings.ambiguous_cap)

    Returns:
        DiagnosisOutcome: Unique, Ambiguous or Infeasible

    Raises:
        ValidationError: t < 0 or a syndrome for another graph
        BudgetExceededError: the search visits more than max_candidates nodes
    """
    if t < 0:
        raise ValidationError(f"fault bound must be non-negative, got {t}")
    settings = get_settings()
    max_candidates = max_candidates or settings.diagnose_max_candidates
    cap = cap or settings.ambiguous_cap

    comps = agreement_components(g, sigma)
    comp_bits = [c.bits for c in comps]
    comp_sizes = [len(c) for c in comps]
    comp_of = [0] * g.vertex_count
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i

    masks = g.neighbor_masks
    ones = sigma.ones_masks
    # what a fault-free component asserts: its 1-results are faulty, its 0-results fault-free
    says_faulty = []
    says_free = []
    for c in comps:
        faulty = free = 0
        for u in c:
            faulty |= ones[u]
            free |= masks[u] & ~ones[u]
        says_faulty.append(faulty)
        says_free.append(free | c.bits)

    found: List[Tuple[Tuple[int, ...], FaultSet]] = []
    consistent = 0
    examined = 0
    # (component index, faulty bits, fault-free bits, forced faulty, forced free, size)
    stack = [(0, 0, 0, 0, 0, 0)]
    while stack:
        i, inside, outside, need_in, need_out, size = stack.pop()
        examined += 1
        if examined > max_candidates:
            raise BudgetExceededError(
                f"diagnosis on {g.name} with t={t} visited more than {max_candidates} search nodes")
        if need_in & outside or need_out & inside:
            continue
        pending = need_in & ~inside
        if pending and size + _covering(pending, comp_of, comp_bits).bit_count() > t:
            continue
        if i == len(comps):
            F = FaultSet(inside, g.vertex_count)
            if conditional and not all(m & ~inside for m in masks):
                continue
            consistent += 1
            entry = (F.sort_key(), F)
            if len(found) < cap or entry[0] < found[-1][0]:
                bisect.insort(found, entry, key=lambda e: e[0])
                del found[cap:]
            continue
        c = comp_bits[i]
        if not c & need_in:
            stack.append((i + 1, inside, outside | c, need_in | says_faulty[i], need_out | says_free[i], size))
        if not c & need_out and size + comp_sizes[i] <= t:
            stack.append((i + 1, inside | c, outside, need_in, need_out, size + comp_sizes[i]))

    CANDIDATES_DECODED.inc(examined)
    candidates = tuple(F for _, F in found)
    if consistent == 0:
        kind = OutcomeKind.INFEASIBLE
    elif consistent == 1:
        kind = OutcomeKind.UNIQUE
    else:
        kind = OutcomeKind.AMBIGUOUS
    logger.info(f"Diagnosed {g.name} at t={t}: {kind.value}, {consistent} consistent sets, "
                f"{len(comps)} agreement components, {examined} search nodes")
    return DiagnosisOutcome(kind=kind, candidates=candidates, t=t, conditional=conditional,
                            consistent_sets=consistent, candidates_examined=examined,
                            truncated=consistent > len(candidates))

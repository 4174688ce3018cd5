"""
Exact and witness-based computation of the diagnosability t(G) and the
conditional diagnosability t_c(G).

The search enumerates candidate symmetric differences D = F1 delta F2 and
fixes S = F1 n F2 = N(D). Any indistinguishable pair has N(D) inside S, and
replacing S by N(D) keeps the pair indistinguishable, shrinks both sets and
keeps them conditional (a subset of a conditional set is conditional). So the
smallest witness always has S = N(D), and max(|F1|, |F2|) >= |N(D)| + ceil(|D|/2)
bounds every bipartition of D.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from monitoring.metrics import record_search
from tools.engine_config import EngineSettings, get_settings
from tools.errors import BudgetExceededError, ValidationError, VerificationError
from tools.fault_set import FaultSet
from tools.perm_graph import (Graph, Permutation, build_bubble_sort, classify_parts, components,
                              cross_matching_edges, decompose_last_symbol, neighborhood_set, pair_edge_gadget)
from tools.pmc_core import are_distinguishable, is_conditional_fault_set

logger = logging.getLogger(__name__)

EXHAUSTIVE = 'exhaustive'
RANDOMIZED = 'randomized'
WITNESS_ONLY = 'witness-only'

# uint64 lookup tables; 2**32 subsets is far beyond any exhaustive budget anyway
_HARD_VERTEX_LIMIT = 32
_LOW_WIDTH = 16
_SCAN_CHUNKS = 16

_POPCOUNT8 = np.array([bin(i).count('1') for i in range(256)], dtype=np.int16)


@dataclass(frozen=True)
class SearchBudget:
    """Limits and parallelism for one search."""

    mode: str = EXHAUSTIVE
    max_vertices: int = 24
    max_t: int = 8
    samples: int = 100_000
    blocks: int = 64
    seed: int = 20100601
    threads: int = 1
    override: bool = False

    @classmethod
    def from_settings(cls, settings: Optional[EngineSettings] = None, **overrides) -> "SearchBudget":
        settings = settings or get_settings()
        values = dict(max_vertices=settings.exhaustive_max_vertices, max_t=settings.exhaustive_max_t,
                      samples=settings.randomized_samples, blocks=settings.randomized_blocks,
                      seed=settings.seed, threads=settings.resolved_threads())
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def validate(self) -> None:
        if self.mode not in (EXHAUSTIVE, RANDOMIZED, WITNESS_ONLY):
            raise ValidationError(f"unknown search mode {self.mode!r}")
        if self.max_vertices < 1 or self.max_t < 1 or self.samples < 1 or self.blocks < 1 or self.threads < 1:
            raise ValidationError(f"invalid search budget {self}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class WitnessPair:
    """An indistinguishable pair (F1, F2) with S = F1 n F2 and D = F1 delta F2."""

    F1: FaultSet
    F2: FaultSet
    conditional: bool
    verification: Dict[str, bool] = field(default_factory=dict, compare=False, hash=False)

    @property
    def S(self) -> FaultSet:
        return self.F1 & self.F2

    @property
    def D(self) -> FaultSet:
        return self.F1 ^ self.F2

    @property
    def sizes(self) -> Tuple[int, int]:
        return len(self.F1), len(self.F2)

    @property
    def max_size(self) -> int:
        return max(self.sizes)

    def sort_key(self):
        return _pair_key(self.F1.bits, self.F2.bits)

    def to_document(self, g: Graph) -> Dict[str, Any]:
        return {
            'F1': g.labels_of(self.F1),
            'F2': g.labels_of(self.F2),
            'S': g.labels_of(self.S),
            'D': g.labels_of(self.D),
            'sizes': list(self.sizes),
            'conditional': self.conditional,
            'verification': dict(self.verification),
        }


def _members(bits: int) -> Tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def _pair_key(f1: int, f2: int):
    """(max size, min size, lexicographic F1, F2) with the pair oriented so F1 <= F2."""
    a, b = _members(f1), _members(f2)
    if b < a:
        a, b = b, a
    return max(len(a), len(b)), min(len(a), len(b)), a, b


def make_witness(g: Graph, F1: FaultSet, F2: FaultSet, conditional: bool) -> WitnessPair:
    """Check the witness invariants and attach the verification record.

    Raises:
        VerificationError: the pair is distinguishable, or not conditional when required
    """
    if F1 == F2:
        raise VerificationError("a witness needs two distinct fault sets")
    indistinguishable = not are_distinguishable(g, F1, F2)
    f1_conditional = is_conditional_fault_set(g, F1)
    f2_conditional = is_conditional_fault_set(g, F2)
    record = {
        'indistinguishable': indistinguishable,
        'F1_conditional': f1_conditional,
        'F2_conditional': f2_conditional,
    }
    if not indistinguishable:
        raise VerificationError("witness pair is distinguishable")
    if conditional and not (f1_conditional and f2_conditional):
        raise VerificationError("witness pair is not a pair of conditional fault sets")
    if conditional:
        record['neighbor_conditions'] = verify_lemma4(g, F1, F2)
        if not record['neighbor_conditions']:
            raise VerificationError("conditional witness pair violates the neighbor conditions")
    return WitnessPair(F1=F1, F2=F2, conditional=conditional, verification=record)


def _oriented_witness(g: Graph, f1: int, f2: int, conditional: bool) -> WitnessPair:
    _, _, a, b = _pair_key(f1, f2)
    return make_witness(g, FaultSet.of(g.vertex_count, a), FaultSet.of(g.vertex_count, b), conditional)


@dataclass(frozen=True)
class PairSearch:
    """Outcome of one indistinguishable-pair search at a size bound t."""

    t: int
    mode: str
    conditional: bool
    witness: Optional[WitnessPair]
    conclusive: bool
    subsets_examined: int
    candidates: int
    bipartitions: int
    wall_ms: float = field(compare=False)

    @property
    def budget_exceeded(self) -> bool:
        return self.witness is None and not self.conclusive


@dataclass
class DiagnosabilityReport:
    graph: str
    measure: str
    value: int
    mode: str
    witness: Optional[WitnessPair]
    subsets_examined: int = 0
    candidates: int = 0
    wall_ms: float = 0.0
    conclusive: bool = True
    notes: List[str] = field(default_factory=list)

    def to_document(self, g: Graph, timings: bool = False) -> Dict[str, Any]:
        document = {
            'schema_version': 1,
            'graph': self.graph,
            'mode': self.mode,
            self.measure: self.value,
            'conclusive': self.conclusive,
            'witness': self.witness.to_document(g) if self.witness else None,
            'subsets_examined': self.subsets_examined,
            'candidates': self.candidates,
            'notes': list(self.notes),
        }
        if timings:
            document['wall_ms'] = round(self.wall_ms, 3)
        return document


def _popcount(values: np.ndarray, width: int) -> np.ndarray:
    counts = np.zeros(values.shape, dtype=np.int16)
    for shift in range(0, width, 8):
        counts += _POPCOUNT8[(values >> np.uint64(shift)) & np.uint64(0xFF)]
    return counts


def _neighbor_table(masks: Sequence[int], offset: int, width: int) -> np.ndarray:
    """table[m] = OR of masks[offset + k] over the set bits k of m."""
    table = np.zeros(1 << width, dtype=np.uint64)
    for k in range(width):
        span = 1 << k
        table[span:2 * span] = table[:span] | np.uint64(masks[offset + k])
    return table


def _is_conditional(masks: Sequence[int], f: int) -> bool:
    outside = ~f
    return all(m & outside for m in masks)


def _best_split(masks: Sequence[int], d: int, s: int, bound: int, conditional: bool):
    """Best bipartition D = D1 + D2 with F_i = S u D_i inside the bound.

    Returns (key, f1, f2) or None, and the number of bipartitions tried.
    """
    members = _members(d)
    size = len(members)
    slack = bound - s.bit_count()
    if conditional:
        # every vertex of D needs a neighbor in D1 and one in D2
        if any((masks[v] & d).bit_count() < 2 for v in members):
            return None, 0
        lo, hi = max(size - slack, 1), min(slack, size - 1)
    else:
        lo, hi = max(size - slack, 0), min(slack, size)
    best = None
    tried = 0
    for k in range(lo, hi + 1):
        for combo in combinations(members, k):
            d1 = 0
            for v in combo:
                d1 |= 1 << v
            d2 = d ^ d1
            tried += 1
            if conditional:
                if any(not (masks[v] & d1) or not (masks[v] & d2) for v in members):
                    continue
                if not (_is_conditional(masks, s | d1) and _is_conditional(masks, s | d2)):
                    continue
            key = _pair_key(s | d1, s | d2)
            if best is None or key < best[0]:
                best = (key, s | d1, s | d2)
    return best, tried


def _scan_partitions(masks: Tuple[int, ...], universe: int, low_width: int, highs: Sequence[int],
                     bound: int, conditional: bool):
    """Scan every D whose bits above low_width equal one of ``highs``."""
    low_table = _neighbor_table(masks, 0, low_width)
    low_ids = np.arange(1 << low_width, dtype=np.uint64)
    low_pop = _popcount(low_ids, low_width)
    full = np.uint64((1 << universe) - 1)
    best = None
    examined = candidates = bipartitions = 0
    for h in highs:
        h = int(h)
        high_nbr = 0
        for k in _members(h):
            high_nbr |= masks[low_width + k]
        subsets = low_ids | np.uint64(h << low_width)
        nbr = (low_table | np.uint64(high_nbr)) & ~subsets & full
        score = _popcount(nbr, universe) + (low_pop + h.bit_count() + 1) // 2
        keep = score <= bound
        if h == 0:
            keep[0] = False
        examined += subsets.size - (1 if h == 0 else 0)
        for d, s in zip(subsets[keep].tolist(), nbr[keep].tolist()):
            candidates += 1
            found, tried = _best_split(masks, d, s, bound, conditional)
            bipartitions += tried
            if found and (best is None or found[0] < best[0]):
                best = found
    return best, examined, candidates, bipartitions


def _grow_subgraph(masks: Sequence[int], universe: int, rng: np.random.Generator, target: int,
                   conditional: bool) -> int:
    """Random connected vertex set; in conditional mode peeled to its 2-core."""
    start = int(rng.integers(universe))
    d = 1 << start
    frontier = masks[start] & ~d
    count = 1
    while count < target and frontier:
        options = _members(frontier)
        if conditional and rng.random() < 0.5:
            weights = [(masks[w] & d).bit_count() for w in options]
            top = max(weights)
            options = [w for w, wt in zip(options, weights) if wt == top]
        w = options[int(rng.integers(len(options)))]
        d |= 1 << w
        frontier = (frontier | masks[w]) & ~d
        count += 1
    if conditional:
        changed = True
        while changed and d:
            changed = False
            for v in _members(d):
                if (masks[v] & d).bit_count() < 2:
                    d &= ~(1 << v)
                    changed = True
    return d


def _sample_block(masks: Tuple[int, ...], universe: int, seed_seq: np.random.SeedSequence, samples: int,
                  bound: int, conditional: bool):
    rng = np.random.default_rng(seed_seq)
    smallest = 4 if conditional else 1
    best = None
    examined = candidates = bipartitions = 0
    for _ in range(samples):
        target = int(rng.integers(smallest, 13))
        d = _grow_subgraph(masks, universe, rng, target, conditional)
        examined += 1
        if d.bit_count() < smallest:
            continue
        nbr = 0
        for v in _members(d):
            nbr |= masks[v]
        s = nbr & ~d
        if s.bit_count() + (d.bit_count() + 1) // 2 > bound:
            continue
        candidates += 1
        found, tried = _best_split(masks, d, s, bound, conditional)
        bipartitions += tried
        if found and (best is None or found[0] < best[0]):
            best = found
    return best, examined, candidates, bipartitions


def _merge(results) -> Tuple[Any, int, int, int]:
    best = None
    examined = candidates = bipartitions = 0
    for found, e, c, b in results:
        examined += e
        candidates += c
        bipartitions += b
        if found and (best is None or found[0] < best[0]):
            best = found
    return best, examined, candidates, bipartitions


def find_indistinguishable_pair(g: Graph, t: int, conditional: bool, budget: SearchBudget) -> PairSearch:
    """Smallest indistinguishable pair with max(|F1|, |F2|) <= t.

    Exhaustive mode proves absence when no witness is returned; randomized
    mode returns an inconclusive (budget exceeded) result instead.

    Raises:
        ValidationError: t < 1 or an invalid budget
        BudgetExceededError: exhaustive guards on |V| or t
    """
    budget.validate()
    if t < 1:
        raise ValidationError(f"size bound must be at least 1, got {t}")
    if budget.mode == WITNESS_ONLY:
        raise ValidationError("witness-only budgets do not search for pairs")
    universe = g.vertex_count
    masks = g.neighbor_masks
    started = time.perf_counter()

    if budget.mode == EXHAUSTIVE:
        if universe > _HARD_VERTEX_LIMIT:
            raise BudgetExceededError(f"exhaustive search supports at most {_HARD_VERTEX_LIMIT} vertices")
        if universe > budget.max_vertices or t > budget.max_t:
            if not budget.override:
                raise BudgetExceededError(
                    f"exhaustive search on {g.name} with t={t} exceeds |V| <= {budget.max_vertices}, t <= {budget.max_t}")
            logger.warning(f"Exhaustive budget overridden: {g.name} ({universe} vertices), t={t}")
        low_width = min(universe, _LOW_WIDTH)
        highs = np.arange(1 << (universe - low_width))
        chunks = [c for c in np.array_split(highs, min(_SCAN_CHUNKS, highs.size)) if c.size]
        if len(chunks) == 1 or budget.threads == 1:
            results = [_scan_partitions(masks, universe, low_width, c.tolist(), t, conditional) for c in chunks]
        else:
            results = Parallel(n_jobs=budget.threads)(
                delayed(_scan_partitions)(masks, universe, low_width, c.tolist(), t, conditional) for c in chunks)
        conclusive = True
    else:
        per_block, extra = divmod(budget.samples, budget.blocks)
        seeds = np.random.SeedSequence(budget.seed).spawn(budget.blocks)
        jobs = [(seq, per_block + (1 if i < extra else 0)) for i, seq in enumerate(seeds)]
        jobs = [(seq, n) for seq, n in jobs if n]
        if budget.threads == 1:
            results = [_sample_block(masks, universe, seq, n, t, conditional) for seq, n in jobs]
        else:
            results = Parallel(n_jobs=budget.threads)(
                delayed(_sample_block)(masks, universe, seq, n, t, conditional) for seq, n in jobs)
        conclusive = False

    best, examined, candidates, bipartitions = _merge(results)
    witness = _oriented_witness(g, best[1], best[2], conditional) if best else None
    elapsed = time.perf_counter() - started
    record_search(budget.mode, examined, elapsed, witness is not None, conditional)
    logger.info(f"{budget.mode} search on {g.name} (t={t}, conditional={conditional}): "
                f"{examined} subsets, {candidates} candidates, witness={'yes' if witness else 'no'}")
    return PairSearch(t=t, mode=budget.mode, conditional=conditional, witness=witness,
                      conclusive=conclusive or witness is not None, subsets_examined=examined,
                      candidates=candidates, bipartitions=bipartitions, wall_ms=elapsed * 1000.0)


def lemma6_witness(n: int, x: Union[int, str, Permutation, None] = None,
                   y: Union[int, str, Permutation, None] = None) -> WitnessPair:
    """F1 = N(x, y, x', y') u {x, y} and F2 = N(x, y, x', y') u {x', y'} in B_n.

    The default pair-edge is the identity and the identity with positions 1, 2
    swapped.
    """
    if n < 4:
        raise ValidationError(f"the pair-edge construction needs n >= 4, got {n}")
    g = build_bubble_sort(n)
    if x is None:
        x = Permutation.identity(n)
    if y is None:
        y = g.label(g.vertex_of(x)).swap(1)
    gadget = pair_edge_gadget(g, x, y)
    cycle = gadget.vertices(g.vertex_count)
    around = neighborhood_set(g, cycle)
    F1 = around | FaultSet.of(g.vertex_count, (gadget.x, gadget.y))
    F2 = around | FaultSet.of(g.vertex_count, (gadget.x_prime, gadget.y_prime))
    witness = make_witness(g, F1, F2, conditional=True)
    witness.verification['gadget_neighborhood'] = len(around) == 4 * (n - 3)
    witness.verification['sizes'] = witness.sizes == (4 * n - 10, 4 * n - 10)
    return witness


def closed_neighborhood_witness(g: Graph, v: int) -> WitnessPair:
    """F1 = N(v), F2 = N[v]: indistinguishable, so t(G) <= deg(v)."""
    F1 = neighborhood_set(g, FaultSet.of(g.vertex_count, [v]))
    F2 = F1 | FaultSet.of(g.vertex_count, [v])
    return make_witness(g, F1, F2, conditional=False)


def _deepening(g: Graph, conditional: bool, budget: SearchBudget, measure: str) -> DiagnosabilityReport:
    if g.vertex_count > budget.max_vertices and not budget.override:
        raise BudgetExceededError(
            f"exhaustive mode requires |V| <= {budget.max_vertices}; {g.name} has {g.vertex_count}")
    report = DiagnosabilityReport(graph=g.name, measure=measure, value=g.vertex_count, mode=EXHAUSTIVE, witness=None)
    for t in range(1, g.vertex_count + 1):
        if t > budget.max_t and not budget.override:
            raise BudgetExceededError(f"{measure}({g.name}) exceeds the exhaustive cap t <= {budget.max_t}")
        search = find_indistinguishable_pair(g, t, conditional, budget)
        report.subsets_examined += search.subsets_examined
        report.candidates += search.candidates
        report.wall_ms += search.wall_ms
        if search.witness is not None:
            report.value = t - 1
            report.witness = search.witness
            break
    else:
        report.notes.append("no indistinguishable pair of any size")
    return report


def _witness_upper(g: Graph, conditional: bool, budget: SearchBudget, measure: str) -> DiagnosabilityReport:
    if conditional:
        if g.dimension is None or g.dimension < 4:
            raise ValidationError(f"{budget.mode} conditional mode needs a bubble-sort graph with n >= 4")
        upper_witness = lemma6_witness(g.dimension)
    else:
        v = min(range(g.vertex_count), key=g.degree)
        upper_witness = closed_neighborhood_witness(g, v)
    claimed = upper_witness.max_size - 1
    report = DiagnosabilityReport(graph=g.name, measure=measure, value=claimed, mode=budget.mode,
                                  witness=upper_witness, conclusive=False)
    if budget.mode == RANDOMIZED and claimed >= 1:
        search = find_indistinguishable_pair(g, claimed, conditional, budget)
        report.subsets_examined = search.subsets_examined
        report.candidates = search.candidates
        report.wall_ms = search.wall_ms
        if search.witness is not None:
            report.value = search.witness.max_size - 1
            report.witness = search.witness
            report.notes.append(f"refutation search found a witness of size {search.witness.max_size}")
            logger.warning(f"Randomized refutation found a smaller witness on {g.name}")
        else:
            report.notes.append(f"witness gives {measure} <= {claimed}; {search.subsets_examined} random samples "
                                f"found no indistinguishable pair within size {claimed}")
    return report


def conditional_diagnosability(g: Graph, budget: SearchBudget) -> DiagnosabilityReport:
    """Largest t with no indistinguishable conditional pair of sizes <= t."""
    budget.validate()
    if budget.mode in (RANDOMIZED, WITNESS_ONLY):
        report = _witness_upper(g, True, budget, 't_c')
    else:
        report = _deepening(g, True, budget, 't_c')
    if g.dimension is not None and g.dimension >= 4:
        n = g.dimension
        report.notes.append(f"4n-11 = {4 * n - 11}; the closed form is claimed for n >= 4 but proved in "
                            f"general for n >= 5, with n = 4 settled by exhaustive search")
    return report


def diagnosability(g: Graph, budget: SearchBudget) -> DiagnosabilityReport:
    """Largest t with no indistinguishable pair of sizes <= t."""
    budget.validate()
    if budget.mode in (RANDOMIZED, WITNESS_ONLY):
        report = _witness_upper(g, False, budget, 't')
    else:
        report = _deepening(g, False, budget, 't')
    if g.dimension == 4:
        report.notes.append("t_c(B4) = 5 against t(B4) = 3 at n = 4; the conditional measure approaches "
                            "four times the ordinary one only as n grows")
    return report


def brute_force_diagnosability(g: Graph, conditional: bool, max_vertices: Optional[int] = None) -> int:
    """Reference value from a direct scan of all pairs of vertex subsets."""
    universe = g.vertex_count
    limit = max_vertices or get_settings().naive_max_vertices
    if universe > limit:
        raise BudgetExceededError(f"naive enumeration supports at most {limit} vertices, {g.name} has {universe}")
    masks = g.neighbor_masks
    count = 1 << universe
    ids = np.arange(count, dtype=np.uint64)
    full = np.uint64(count - 1)
    nbr = _neighbor_table(masks, 0, universe)
    sizes = _popcount(ids, universe)
    allowed = np.ones(count, dtype=bool)
    if conditional:
        for m in masks:
            allowed &= (np.uint64(m) & ~ids) != 0
    best = math.inf
    for f1 in range(count):
        if not allowed[f1]:
            continue
        others = ids[f1 + 1:]
        delta = others ^ np.uint64(f1)
        outside = ~(others | np.uint64(f1)) & full
        indistinguishable = ((nbr[delta] & outside) == 0) & allowed[f1 + 1:]
        if indistinguishable.any():
            largest = np.maximum(sizes[f1 + 1:][indistinguishable], sizes[f1])
            best = min(best, int(largest.min()))
    return universe if best == math.inf else best - 1


def verify_lemma4(g: Graph, F1: FaultSet, F2: FaultSet) -> bool:
    """Both necessary conditions on an indistinguishable conditional pair.

    Raises:
        ValidationError: the inputs are not an indistinguishable conditional pair
    """
    if F1 == F2 or are_distinguishable(g, F1, F2):
        raise ValidationError("verify_lemma4 needs an indistinguishable pair of distinct sets")
    if not (is_conditional_fault_set(g, F1) and is_conditional_fault_set(g, F2)):
        raise ValidationError("verify_lemma4 needs conditional fault sets")
    masks = g.neighbor_masks
    outside = (F1 | F2).complement().bits
    only1, only2 = (F1 - F2).bits, (F2 - F1).bits
    for u in _members(outside) if g.vertex_count <= 4096 else (F1 | F2).complement():
        if not masks[u] & outside:
            return False
    for v in F1 ^ F2:
        if not (masks[v] & only1 and masks[v] & only2):
            return False
    return True


def verify_lemma5(g: Graph, trials: int, seed: int) -> bool:
    """Random fault sets S with |S| <= 4n-13 never disconnect the union of the A2 parts.

    Also checks the fault-free reading of the cross-part matching argument:
    every two A2 parts keep at least one edge with both ends outside S.
    """
    n = g.dimension
    if n is None or g.permutations is None:
        raise ValidationError(f"{g.name} is not a bubble-sort graph")
    if n < 5:
        raise ValidationError(f"the cross-part counting argument needs n >= 5, got n={n}")
    d = decompose_last_symbol(g)
    rng = np.random.default_rng(seed)
    cap = 4 * n - 13
    universe = g.vertex_count
    for trial in range(trials):
        size = int(rng.integers(0, cap + 1))
        chosen: set = set()
        if trial % 2 and size >= n - 2:
            # crowd one part so that A1 is non-empty
            part = d.parts[int(rng.integers(1, n + 1))].members()
            chosen.update(int(v) for v in rng.choice(part, size=n - 2, replace=False))
        while len(chosen) < size:
            chosen.add(int(rng.integers(universe)))
        S = FaultSet.of(universe, chosen)
        split = classify_parts(d, S)
        if not split.a2:
            continue
        a2_vertices = FaultSet(0, universe)
        for i in split.a2:
            a2_vertices = a2_vertices | d.parts[i]
        survivors = [c for c in components(g, S | a2_vertices.complement())]
        if len(survivors) != 1:
            logger.error(f"A2 connectivity trial {trial} failed: S={g.labels_of(S)} leaves {len(survivors)} components")
            return False
        for i, j in combinations(split.a2, 2):
            if not any(u not in S and w not in S for u, w in cross_matching_edges(d, i, j)):
                logger.error(f"A2 connectivity trial {trial}: parts {i}, {j} lost every cross edge")
                return False
    logger.info(f"A2 parts minus S stayed connected on {g.name} for {trials} trials")
    return True


def theorem2_side_facts(g: Optional[Graph] = None) -> Dict[str, Any]:
    """For |S| <= 3, every split of B_4 - S into an isolated vertex and one more component leaves 20 vertices."""
    g = g or build_bubble_sort(4)
    sizes = set()
    cuts = 0
    for k in range(4):
        for chosen in combinations(range(g.vertex_count), k):
            parts = components(g, FaultSet.of(g.vertex_count, chosen))
            if len(parts) == 2 and any(c.trivial for c in parts):
                cuts += 1
                sizes.add(max(c.size for c in parts))
    return {'isolating_cuts': cuts, 'remaining_component_sizes': sorted(sizes)}


def verify_theorem2_exhaustive(budget: SearchBudget) -> DiagnosabilityReport:
    """Exhaustive t_c(B_4) = 5 with its size-6 witness and the |C| = 20 side fact.

    Raises:
        VerificationError: any of the checked facts fails
    """
    g = build_bubble_sort(4)
    report = conditional_diagnosability(g, replace(budget, mode=EXHAUSTIVE))
    if report.value != 5:
        raise VerificationError(f"t_c(B4) computed as {report.value}, expected 5")
    witness = report.witness
    if witness is None or witness.max_size != 6:
        raise VerificationError(f"expected a witness of size 6, got {witness.sizes if witness else None}")
    masks = g.neighbor_masks
    delta = witness.D.bits
    if any(not masks[v] & delta for v in witness.D):
        raise VerificationError("witness symmetric difference has an isolated vertex")
    facts = theorem2_side_facts(g)
    if facts['remaining_component_sizes'] != [g.vertex_count - 3 - 1]:
        raise VerificationError(f"isolating cuts leave components of sizes {facts['remaining_component_sizes']}")
    report.notes.append(f"{facts['isolating_cuts']} cuts with |S| <= 3 isolate one vertex; "
                        f"the other component always has {g.vertex_count - 4} vertices")
    report.notes.append("isolated vertex read as the same vertex in both places of the |C| = 20 count")
    return report

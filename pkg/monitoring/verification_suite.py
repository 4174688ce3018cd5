import csv
import json
import logging
import math
import time
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from monitoring.metrics import CHECKS
from tools.diagnosability import (EXHAUSTIVE, RANDOMIZED, SearchBudget, brute_force_diagnosability,
                                  conditional_diagnosability, diagnosability, lemma6_witness,
                                  verify_lemma5, verify_theorem2_exhaustive)
from tools.diagnoser import OutcomeKind, diagnose
from tools.engine_config import EngineSettings, get_settings
from tools.errors import DiagnosisError
from tools.perm_graph import (build_bubble_sort, complete_bipartite_graph, complete_graph, cycle_graph,
                              diameter, path_graph, random_graph, vertex_connectivity)
from tools.pmc_core import TesterStrategy, generate_syndrome, sample_conditional_fault_set, shared_syndrome


class VerificationSuite:
    """Reproducible acceptance checks for the structural and diagnosability facts."""

    def __init__(self, settings: Optional[EngineSettings] = None, seed: Optional[int] = None,
                 threads: Optional[int] = None, samples: Optional[int] = None, timings: bool = False):
        self.logger = logging.getLogger(__name__)
        self.settings = settings or get_settings()
        self.seed = self.settings.seed if seed is None else seed
        self.budget = SearchBudget.from_settings(self.settings, seed=self.seed, threads=threads, samples=samples)
        self.timings = timings

    def _outcome(self, name: str, passed: bool, detail: str) -> Dict[str, Any]:
        status = 'pass' if passed else 'fail'
        CHECKS.labels(status=status).inc()
        return {'check': name, 'status': status, 'detail': detail}

    def check_structure(self) -> Dict[str, Any]:
        """Vertex, edge and degree counts for n = 2..7; connectivity and diameter for n = 4, 5."""
        problems = []
        for n in range(2, 8):
            g = build_bubble_sort(n)
            degrees = {g.degree(v) for v in range(g.vertex_count)}
            if g.vertex_count != math.factorial(n) or g.edge_count != (n - 1) * math.factorial(n) // 2:
                problems.append(f"B{n}: {g.vertex_count} vertices, {g.edge_count} edges")
            if degrees != {n - 1}:
                problems.append(f"B{n}: degrees {sorted(degrees)}")
        for n in (4, 5):
            g = build_bubble_sort(n)
            kappa, diam = vertex_connectivity(g), diameter(g)
            if kappa != n - 1 or diam != n * (n - 1) // 2:
                problems.append(f"B{n}: connectivity {kappa}, diameter {diam}")
        return self._outcome('structure', not problems, '; '.join(problems) or
                             "n! vertices, (n-1)n!/2 edges, (n-1)-regular for n=2..7; "
                             "connectivity 3, 4 and diameter 6, 10 for n=4, 5")

    def check_pair_edge_witness(self) -> Dict[str, Any]:
        problems = []
        for n in range(4, 8):
            witness = lemma6_witness(n)
            if not all(witness.verification.values()) or witness.sizes != (4 * n - 10, 4 * n - 10):
                problems.append(f"n={n}: sizes {witness.sizes}, flags {witness.verification}")
        return self._outcome('pair_edge_witness', not problems,
                             '; '.join(problems) or "|F1| = |F2| = 4n-10 and indistinguishable for n=4..7")

    def check_exhaustive_b4(self) -> Dict[str, Any]:
        report = verify_theorem2_exhaustive(self.budget)
        return self._outcome('exhaustive_tc_b4', report.value == 5,
                             f"t_c(B4) = {report.value}, witness sizes {list(report.witness.sizes)}, "
                             f"{report.subsets_examined} subsets examined")

    def check_ordinary_b4(self) -> Dict[str, Any]:
        report = diagnosability(build_bubble_sort(4), replace(self.budget, mode=EXHAUSTIVE))
        return self._outcome('ordinary_t_b4', report.value == 3,
                             f"t(B4) = {report.value}; t_c(B4) = 5, so the ratio at n = 4 is 5/3")

    def _randomized_b5(self, threads: int):
        g = build_bubble_sort(5)
        report = conditional_diagnosability(g, replace(self.budget, mode=RANDOMIZED, threads=threads))
        return g, report

    def check_randomized_b5(self) -> Dict[str, Any]:
        _, report = self._randomized_b5(self.budget.threads)
        passed = report.value == 9 and report.witness is not None and report.witness.sizes == (10, 10)
        return self._outcome('randomized_tc_b5', passed,
                             f"t_c(B5) <= 9 by witness; {report.subsets_examined} samples "
                             f"{'found no' if passed else 'found a'} smaller indistinguishable pair")

    def check_dual_oracle(self, graphs: int = 20) -> Dict[str, Any]:
        """Pruned enumeration against the naive all-pairs oracle on small graphs."""
        rng = np.random.default_rng(self.seed)
        cases = [path_graph(5), cycle_graph(6), complete_graph(4), complete_bipartite_graph(2, 3)]
        for i in range(graphs):
            k = int(rng.integers(4, 11))
            density = float(rng.uniform(0.3, 0.7))
            cases.append(random_graph(k, density, seed=self.seed + i))
        mismatches = []
        for g in cases:
            budget = replace(self.budget, mode=EXHAUSTIVE, max_t=g.vertex_count, override=True)
            for conditional in (False, True):
                search = conditional_diagnosability if conditional else diagnosability
                fast = search(g, budget).value
                naive = brute_force_diagnosability(g, conditional)
                if fast != naive:
                    mismatches.append(f"{g.name} conditional={conditional}: {fast} vs {naive}")
        return self._outcome('dual_oracle', not mismatches,
                             '; '.join(mismatches) or f"t and t_c agree with the naive oracle on {len(cases)} graphs")

    def check_a2_connectivity(self, trials: int = 1000) -> Dict[str, Any]:
        passed = verify_lemma5(build_bubble_sort(5), trials, self.seed)
        return self._outcome('a2_connectivity_b5', passed, f"{trials} trials with |S| <= 7 on B5")

    def check_diagnosis_round_trip(self, trials: int = 1000) -> Dict[str, Any]:
        g = build_bubble_sort(4)
        rng = np.random.default_rng(self.seed)
        kinds = ('zero', 'one', 'random')
        failures = []
        for trial in range(trials):
            F = sample_conditional_fault_set(g, int(rng.integers(0, 6)), rng)
            strategy = TesterStrategy.parse(kinds[trial % 3], seed=self.seed + trial)
            outcome = diagnose(g, generate_syndrome(g, F, strategy), 5, conditional=True)
            if outcome.kind is not OutcomeKind.UNIQUE or outcome.faults != F:
                failures.append(f"trial {trial}: {outcome.kind.value}")
        witness = lemma6_witness(4)
        shared = diagnose(g, shared_syndrome(g, witness.F1, witness.F2), 6, conditional=True)
        ambiguous_ok = shared.kind is OutcomeKind.AMBIGUOUS and set(shared.candidates) == {witness.F1, witness.F2}
        if not ambiguous_ok:
            failures.append(f"shared syndrome: {shared.kind.value} with {shared.consistent_sets} candidates")
        return self._outcome('diagnosis_round_trip', not failures,
                             '; '.join(failures[:5]) or f"{trials} unique decodings; shared syndrome ambiguous "
                                                         f"between exactly the two witness sets")

    def check_determinism(self, thread_counts=(1, 4, 8)) -> Dict[str, Any]:
        g4 = build_bubble_sort(4)
        exhaustive, randomized = set(), set()
        for threads in thread_counts:
            report = conditional_diagnosability(g4, replace(self.budget, mode=EXHAUSTIVE, threads=threads))
            exhaustive.add(json.dumps(report.to_document(g4)))
            g5, report = self._randomized_b5(threads)
            randomized.add(json.dumps(report.to_document(g5)))
        passed = len(exhaustive) == 1 and len(randomized) == 1
        return self._outcome('determinism', passed,
                             f"identical reports under threads {list(thread_counts)}" if passed else
                             f"{len(exhaustive)} distinct exhaustive and {len(randomized)} distinct randomized reports")

    def checks(self) -> List[Callable[[], Dict[str, Any]]]:
        return [self.check_structure, self.check_pair_edge_witness, self.check_exhaustive_b4,
                self.check_ordinary_b4, self.check_randomized_b5, self.check_dual_oracle,
                self.check_a2_connectivity, self.check_diagnosis_round_trip, self.check_determinism]

    def run_all(self, progress: Optional[Callable[[str], None]] = None) -> Dict[str, Any]:
        """Run every check; a check that raises is recorded as failed."""
        results = []
        for check in self.checks():
            name = check.__name__[len('check_'):]
            if progress:
                progress(name)
            started = time.perf_counter()
            try:
                result = check()
            except DiagnosisError as e:
                self.logger.error(f"Check {name} raised: {str(e)}", exc_info=True)
                result = self._outcome(name, False, f"{type(e).__name__}: {e}")
            if self.timings:
                result['wall_ms'] = round((time.perf_counter() - started) * 1000.0, 3)
            self.logger.info(f"Check {result['check']}: {result['status']}")
            results.append(result)
        return {
            'schema_version': 1,
            'suite': 'paper',
            'seed': self.seed,
            'passed': all(r['status'] == 'pass' for r in results),
            'checks': results,
        }


def write_csv(document: Dict[str, Any], path: str) -> None:
    fields = ['check', 'status', 'detail'] + (['wall_ms'] if any('wall_ms' in c for c in document['checks']) else [])
    try:
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=fields)
            writer.writeheader()
            writer.writerows(document['checks'])
    except OSError as e:
        logging.getLogger(__name__).error(f"Error writing verification CSV {path}: {str(e)}")
        raise

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Union

from rich.box import ROUNDED
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from instructions.report_schemas import validate_document, validate_syndrome_input
from monitoring.metrics import export_metrics
from monitoring.verification_suite import VerificationSuite, write_csv
from tools.diagnosability import (EXHAUSTIVE, RANDOMIZED, WITNESS_ONLY, SearchBudget, conditional_diagnosability,
                                  diagnosability, lemma6_witness)
from tools.diagnoser import diagnose
from tools.engine_config import EngineConfig, EngineSettings, set_settings
from tools.errors import DiagnosisError, ValidationError, VerificationError
from tools.perm_graph import (Permutation, build_bubble_sort, decompose_last_symbol, decomposition_facts,
                              diameter, dot_text, edge_list_text, pair_edge_gadget, vertex_connectivity)
from tools.pmc_core import Syndrome, TesterStrategy, generate_syndrome, parse_fault_labels

console = Console(stderr=True)
logger = logging.getLogger(__name__)

# connectivity and diameter are reported up to B7 (5040 vertices)
PROPS_METRIC_MAX_N = 7

Payload = Union[str, Dict[str, Any]]


def _budget(args: argparse.Namespace, settings: EngineSettings, mode: str) -> SearchBudget:
    return SearchBudget.from_settings(settings, mode=mode, threads=args.threads, seed=args.seed,
                                      samples=getattr(args, 'samples', None),
                                      override=getattr(args, 'override_budget', False))


def _spinner(message: str, work: Callable[[], Any]) -> Any:
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  console=console, transient=True) as progress:
        progress.add_task(message, total=None)
        return work()


def handle_gen(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    return dot_text(g) if args.format == 'dot' else edge_list_text(g)


def handle_props(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    document: Dict[str, Any] = {
        'schema_version': 1,
        'n': args.n,
        'vertices': g.vertex_count,
        'edges': g.edge_count,
        'degree': args.n - 1,
        'connectivity': None,
        'diameter': None,
    }
    notes: List[str] = []
    if args.n <= PROPS_METRIC_MAX_N:
        document['connectivity'] = _spinner(f"Vertex connectivity of {g.name}", lambda: vertex_connectivity(g))
        document['diameter'] = diameter(g)
    else:
        notes.append(f"connectivity and diameter are computed for n <= {PROPS_METRIC_MAX_N}")
    facts = decomposition_facts(decompose_last_symbol(g))
    document['decomposition'] = {
        'part_size': facts['part_sizes'][1],
        'internal_degrees': facts['internal_degrees'],
        'external_degrees': facts['external_degrees'],
        'part_edges': facts['part_edges'][1],
    }
    document['notes'] = notes
    return document


def handle_witness(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    x = Permutation.parse(args.x) if args.x else Permutation.identity(args.n)
    y = Permutation.parse(args.y) if args.y else x.swap(1)
    gadget = pair_edge_gadget(g, x, y)
    witness = lemma6_witness(args.n, x, y)
    return {
        'schema_version': 1,
        'n': args.n,
        'x': g.label_text(gadget.x),
        'y': g.label_text(gadget.y),
        'x_prime': g.label_text(gadget.x_prime),
        'y_prime': g.label_text(gadget.y_prime),
        'indistinguishable': witness.verification['indistinguishable'],
        'witness': witness.to_document(g),
    }


def handle_tc(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    budget = _budget(args, settings, args.mode)
    report = _spinner(f"Conditional diagnosability of {g.name} ({args.mode})",
                      lambda: conditional_diagnosability(g, budget))
    return report.to_document(g, timings=args.timings)


def handle_t(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    budget = _budget(args, settings, args.mode)
    report = _spinner(f"Diagnosability of {g.name} ({args.mode})", lambda: diagnosability(g, budget))
    return report.to_document(g, timings=args.timings)


def handle_simulate(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    faults = parse_fault_labels(g, args.faults)
    strategy = TesterStrategy.parse(args.strategy, seed=settings.seed if args.seed is None else args.seed)
    return generate_syndrome(g, faults, strategy).to_document()


def handle_diagnose(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    g = build_bubble_sort(args.n)
    try:
        with open(args.syndrome) as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read syndrome file {args.syndrome}: {e}") from e
    validate_syndrome_input(document)
    sigma = Syndrome.from_document(g, document)
    outcome = _spinner(f"Diagnosing {g.name} at t={args.t}", lambda: diagnose(g, sigma, args.t, args.conditional))
    return outcome.to_document(g)


def handle_verify(args: argparse.Namespace, settings: EngineSettings) -> Payload:
    suite = VerificationSuite(settings, seed=args.seed, threads=args.threads, samples=args.samples,
                              timings=args.timings)
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  console=console, transient=True) as progress:
        task = progress.add_task("Verifying", total=None)
        document = suite.run_all(progress=lambda name: progress.update(task, description=f"Check {name}"))

    table = Table(box=ROUNDED, title=f"Verification suite '{args.suite}'")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Detail", style="magenta")
    for check in document['checks']:
        style = "green" if check['status'] == 'pass' else "bold red"
        table.add_row(check['check'], f"[{style}]{check['status']}[/{style}]", check['detail'])
    console.print(table)
    if args.csv:
        write_csv(document, args.csv)
    return document


COMMANDS: Dict[str, Callable[[argparse.Namespace, EngineSettings], Payload]] = {
    'gen': handle_gen,
    'props': handle_props,
    'witness': handle_witness,
    'tc': handle_tc,
    't': handle_t,
    'simulate': handle_simulate,
    'diagnose': handle_diagnose,
    'verify': handle_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pmc-diag', allow_abbrev=False,
        description="PMC-model fault diagnosis and (conditional) diagnosability of bubble-sort graphs")
    parser.add_argument('--threads', type=int, default=None,
                        help="worker count (default: PMC_THREADS, then available parallelism)")
    parser.add_argument('--seed', type=int, default=None, help="64-bit seed (default: PMC_SEED or 20100601)")
    parser.add_argument('--output', '-o', default=None, help="write the result here instead of stdout")
    parser.add_argument('--config', default=None, help="JSON settings file (default: config/engine.json)")
    parser.add_argument('--log-level', default=None, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--timings', action='store_true', help="include wall-clock fields in JSON output")
    parser.add_argument('--metrics-file', default=None, help="write prometheus metrics here on exit")
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help="emit B_n as an edge list or DOT graph")
    gen.add_argument('--n', type=int, required=True)
    gen.add_argument('--format', choices=['edge-list', 'dot'], default='edge-list')

    props = sub.add_parser('props', help="structural properties of B_n")
    props.add_argument('--n', type=int, required=True)

    witness = sub.add_parser('witness', help="pair-edge witness of t_c(B_n) <= 4n-11")
    witness.add_argument('--n', type=int, required=True)
    witness.add_argument('--x', default=None, help="pair-edge endpoint, e.g. 1234")
    witness.add_argument('--y', default=None, help="pair-edge endpoint, e.g. 2134")

    for name, text in (('tc', "conditional diagnosability t_c(B_n)"), ('t', "diagnosability t(B_n)")):
        measure = sub.add_parser(name, help=text)
        measure.add_argument('--n', type=int, required=True)
        measure.add_argument('--mode', choices=[EXHAUSTIVE, RANDOMIZED, WITNESS_ONLY], default=EXHAUSTIVE)
        measure.add_argument('--samples', type=int, default=None, help="randomized samples")
        measure.add_argument('--override-budget', action='store_true',
                             help="run exhaustive searches past the configured size guards")

    simulate = sub.add_parser('simulate', help="generate a syndrome for a fault set")
    simulate.add_argument('--n', type=int, required=True)
    simulate.add_argument('--faults', required=True, help="comma-separated permutation labels")
    simulate.add_argument('--strategy', choices=['zero', 'one', 'random'], default='random')

    diagnose_cmd = sub.add_parser('diagnose', help="decode a syndrome")
    diagnose_cmd.add_argument('--n', type=int, required=True)
    diagnose_cmd.add_argument('--syndrome', required=True, help="syndrome JSON file")
    diagnose_cmd.add_argument('--t', type=int, required=True)
    diagnose_cmd.add_argument('--conditional', action='store_true')

    verify = sub.add_parser('verify', help="run the acceptance checks")
    verify.add_argument('--suite', choices=['paper'], default='paper')
    verify.add_argument('--csv', default=None, help="also write the results as CSV")
    verify.add_argument('--samples', type=int, default=None, help="randomized samples for the B5 checks")
    return parser


def write_output(command: str, payload: Payload, path: Optional[str]) -> None:
    if isinstance(payload, dict):
        validate_document(command, payload)
        text = json.dumps(payload, indent=2) + '\n'
    else:
        text = payload
    if path:
        try:
            with open(path, 'w') as f:
                f.write(text)
        except OSError as e:
            raise ValidationError(f"cannot write {command} output to {path}: {e}") from e
        logger.info(f"Wrote {command} output to {path}")
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = EngineConfig(args.config).load_config()
    except DiagnosisError as e:
        console.print(Panel(str(e), title="Configuration error", style="bold red"))
        return e.exit_code
    logging.basicConfig(level=args.log_level or settings.log_level, stream=sys.stderr,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    set_settings(settings)

    try:
        payload = COMMANDS[args.command](args, settings)
        write_output(args.command, payload, args.output)
        if args.command == 'verify' and not payload['passed']:
            raise VerificationError("one or more verification checks failed")
        return 0
    except DiagnosisError as e:
        logger.error(f"{args.command} failed: {str(e)}", exc_info=logger.isEnabledFor(logging.DEBUG))
        console.print(Panel(str(e), title=type(e).__name__, style="bold red"))
        return e.exit_code
    except KeyboardInterrupt:
        console.print("\nInterrupted by user.", style="bold red")
        return 130
    finally:
        if args.metrics_file:
            export_metrics(args.metrics_file)


if __name__ == "__main__":
    sys.exit(main())

import csv
import json

import pytest

from main import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


class TestCommands:
    def test_gen_edge_list(self, capsys):
        code, out = run(capsys, 'gen', '--n', '3')
        assert code == 0
        assert out.splitlines()[0] == "123 132"
        assert len(out.splitlines()) == 6

    def test_gen_dot(self, capsys):
        code, out = run(capsys, 'gen', '--n', '3', '--format', 'dot')
        assert code == 0 and out.startswith('graph "B3"')

    def test_props(self, capsys):
        """Test the structural facts of B4"""
        code, out = run(capsys, 'props', '--n', '4')
        document = json.loads(out)
        assert code == 0
        assert (document['vertices'], document['edges'], document['connectivity'], document['diameter']) == \
            (24, 36, 3, 6)
        assert document['decomposition']['internal_degrees'] == [2]

    def test_witness(self, capsys):
        code, out = run(capsys, 'witness', '--n', '5')
        document = json.loads(out)
        assert code == 0
        assert document['witness']['sizes'] == [10, 10]
        assert document['indistinguishable'] is True
        assert document['x'] == "12345" and document['x_prime'] == "12354"

    def test_witness_only_tc(self, capsys):
        code, out = run(capsys, 'tc', '--n', '5', '--mode', 'witness-only')
        document = json.loads(out)
        assert code == 0
        assert document['t_c'] == 9 and document['mode'] == 'witness-only'
        assert 'wall_ms' not in document

    def test_exhaustive_t_on_b3(self, capsys):
        code, out = run(capsys, '--timings', 't', '--n', '3')
        document = json.loads(out)
        assert code == 0 and document['t'] == 2
        assert 'wall_ms' in document

    @pytest.mark.slow
    def test_exhaustive_tc_on_b4(self, capsys):
        code, out = run(capsys, '--threads', '2', 'tc', '--n', '4', '--mode', 'exhaustive')
        assert code == 0 and json.loads(out)['t_c'] == 5

    def test_simulate_then_diagnose(self, capsys, tmp_path):
        syndrome = tmp_path / 'syndrome.json'
        code, _ = run(capsys, '--seed', '5', '--output', str(syndrome),
                      'simulate', '--n', '4', '--faults', '1234,3412', '--strategy', 'random')
        assert code == 0
        assert len(json.loads(syndrome.read_text())['tests']) == 72
        code, out = run(capsys, 'diagnose', '--n', '4', '--syndrome', str(syndrome), '--t', '3')
        document = json.loads(out)
        assert code == 0
        assert document == {'schema_version': 1, 'kind': 'unique', 'faults': ["1234", "3412"], 't': 3,
                            'conditional': False, 'consistent_sets': 1,
                            'candidates_examined': document['candidates_examined']}

    @pytest.mark.parametrize("bound", [['--t', '1'], ['--t=1']])
    def test_diagnose_bound_is_not_read_as_a_global_flag(self, capsys, tmp_path, bound):
        syndrome = tmp_path / 'syndrome.json'
        run(capsys, '--output', str(syndrome), 'simulate', '--n', '4', '--faults', '2143', '--strategy', 'one')
        code, out = run(capsys, 'diagnose', '--n', '4', '--syndrome', str(syndrome), *bound)
        assert code == 0
        assert json.loads(out)['faults'] == ["2143"]

    def test_hand_written_syndrome_without_version(self, capsys, tmp_path):
        syndrome = tmp_path / 'syndrome.json'
        run(capsys, '--output', str(syndrome), 'simulate', '--n', '4', '--faults', '1234', '--strategy', 'zero')
        document = json.loads(syndrome.read_text())
        del document['schema_version']
        syndrome.write_text(json.dumps(document))
        code, out = run(capsys, 'diagnose', '--n', '4', '--syndrome', str(syndrome), '--t', '1')
        assert code == 0
        assert json.loads(out)['faults'] == ["1234"]

    def test_randomized_output_is_thread_independent(self, capsys):
        outputs = set()
        for threads in ('1', '2'):
            code, out = run(capsys, '--threads', threads, '--seed', '3',
                            'tc', '--n', '5', '--mode', 'randomized', '--samples', '300')
            assert code == 0
            outputs.add(out)
        assert len(outputs) == 1

    def test_metrics_file(self, capsys, tmp_path):
        metrics = tmp_path / 'metrics.prom'
        code, _ = run(capsys, '--metrics-file', str(metrics), 't', '--n', '3')
        assert code == 0
        assert 'pmc_subsets_examined_total' in metrics.read_text()


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        ['props', '--n', '1'],
        ['witness', '--n', '3'],
        ['witness', '--n', '4', '--x', '1234', '--y', '1243'],
        ['simulate', '--n', '4', '--faults', '1235'],
        ['diagnose', '--n', '4', '--syndrome', 'missing.json', '--t', '2'],
    ])
    def test_validation_errors_exit_1(self, capsys, argv):
        assert run(capsys, *argv)[0] == 1

    @pytest.mark.parametrize("argv", [
        ['tc', '--n', '5', '--mode', 'exhaustive'],
        ['props', '--n', '10'],
    ])
    def test_budget_errors_exit_2(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_partial_syndrome_is_rejected(self, capsys, tmp_path):
        syndrome = tmp_path / 'syndrome.json'
        run(capsys, '--output', str(syndrome), 'simulate', '--n', '4', '--faults', '1234', '--strategy', 'one')
        document = json.loads(syndrome.read_text())
        document['tests'] = document['tests'][:-1]
        syndrome.write_text(json.dumps(document))
        assert run(capsys, 'diagnose', '--n', '4', '--syndrome', str(syndrome), '--t', '1')[0] == 1

    def test_unwritable_output_path(self, capsys, tmp_path):
        target = tmp_path / 'missing' / 'edges.txt'
        assert run(capsys, '--output', str(target), 'gen', '--n', '3')[0] == 1
        assert not target.exists()

    def test_bad_config_file(self, capsys, tmp_path):
        config = tmp_path / 'engine.json'
        config.write_text('{"ambiguous_cap": 0}')
        assert run(capsys, '--config', str(config), 'gen', '--n', '3')[0] == 1

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(['explode'])


@pytest.mark.slow
def test_verify_suite(capsys, tmp_path):
    table = tmp_path / 'checks.csv'
    code, out = run(capsys, '--threads', '4', 'verify', '--suite', 'paper', '--csv', str(table))
    document = json.loads(out)
    assert [c['check'] for c in document['checks']] == [
        'structure', 'pair_edge_witness', 'exhaustive_tc_b4', 'ordinary_t_b4', 'randomized_tc_b5',
        'dual_oracle', 'a2_connectivity_b5', 'diagnosis_round_trip', 'determinism']
    with open(table) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 9
    assert code == 0 and document['passed']

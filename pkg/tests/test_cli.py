import csv
import json
from pathlib import Path

import pytest

from coalsim.console.cli import golden_difference, golden_tables, main
from coalsim.experiments.scenario import RECORD_FIELDS

GOLDENS = Path(__file__).resolve().parent.parent / 'goldens'

ERDOS_TAYLOR = ['erdos-taylor', '--t', '100', '--alpha', '0.5', '--beta', '1.0',
                '--replicates', '5', '--seed', '9', '--threads', '1']


def _rows(path):
    with open(path, newline='', encoding='utf-8') as stream:
        return list(csv.reader(stream))


class TestScenarioCommands:
    def test_records_are_written(self, tmp_path, capsys):
        out = tmp_path / 'records.csv'
        assert main(ERDOS_TAYLOR + ['--out', str(out)]) == 0
        rows = _rows(out)
        assert tuple(rows[0]) == RECORD_FIELDS
        assert len(rows) == 6
        assert {row[0] for row in rows[1:]} == {'erdos_taylor'}
        assert "✅ 5 records" in capsys.readouterr().err

    def test_same_invocation_same_bytes(self, tmp_path):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        assert main(ERDOS_TAYLOR + ['--out', str(first)]) == 0
        assert main(ERDOS_TAYLOR + ['--out', str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_records_go_to_stdout(self, capsys):
        assert main(ERDOS_TAYLOR) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ','.join(RECORD_FIELDS)
        assert len(lines) == 6

    def test_json_summary(self, tmp_path):
        out = tmp_path / 'summary.json'
        assert main(ERDOS_TAYLOR + ['--format', 'json', '--out', str(out)]) == 0
        summary = json.loads(out.read_text(encoding='utf-8'))
        assert summary['scenario'] == 'erdos_taylor'
        assert summary['seed'] == 9
        assert summary['statistics']['no_meeting[alpha=0.5,beta=1.0]']['limit'] == 0.5

    def test_config_file_and_flags(self, tmp_path, scenario_file):
        path = scenario_file({'scenario': 'erdos_taylor', 't': 100.0, 'alpha': 0.5,
                              'beta': 1.0, 'replicates': 50, 'seed': 9})
        out = tmp_path / 'records.csv'
        assert main(['erdos-taylor', '--config', str(path), '--replicates', '5',
                     '--threads', '1', '--out', str(out)]) == 0
        expected = tmp_path / 'expected.csv'
        assert main(ERDOS_TAYLOR + ['--out', str(expected)]) == 0
        assert out.read_bytes() == expected.read_bytes()

    def test_constraint_violation_exits_with_two(self, capsys):
        assert main(['theorem1', '--alpha', '0.9', '--beta', '0.6', '--threads', '1']) == 2
        assert "error: alpha < beta" in capsys.readouterr().err

    def test_infeasible_horizon_exits_with_two(self, capsys):
        code = main(['theorem1', '--t', '100', '--beta', '0.6,1.2', '--replicates', '1',
                     '--threads', '1'])
        assert code == 2
        assert "error: beta <= 1" in capsys.readouterr().err

    def test_mismatched_config_file(self, scenario_file, capsys):
        path = scenario_file({'scenario': 'theorem3', 't': 100.0})
        assert main(['theorem1', '--config', str(path), '--threads', '1']) == 2
        assert "config scenario matches the subcommand" in capsys.readouterr().err

    @pytest.mark.parametrize('argv', [
        ['theorem1', '--alpha', 'abc'],
        ['theorem1', '--gamma', 'fast'],
        ['theorem9'],
    ])
    def test_usage_errors_exit_with_two(self, argv, capsys):
        assert main(argv) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_failed_gates_are_reported(self, capsys):
        code = main(['theorem1', '--t', '100', '--alpha', '0.3', '--beta', '0.6', '--rho', '1',
                     '--replicates', '1', '--truncation', '1', '--gate-samples', '200',
                     '--threads', '1'])
        assert code == 0
        assert "⚠️  truncation gates failed: entrance" in capsys.readouterr().err

    def test_block_cap_flag(self, tmp_path):
        out = tmp_path / 'summary.json'
        assert main(['moment-bound', '--t', '100', '--alpha', '0.3', '--beta', '0.6',
                     '--rho', '1', '--replicates', '2', '--block-cap', '3', '--threads', '1',
                     '--format', 'json', '--out', str(out)]) == 0
        extras = json.loads(out.read_text(encoding='utf-8'))['extras']
        assert extras['block_cap'] == 3


class TestSnapshotDump:
    REBIRTH = ['theorem5', '--t', '16', '--alpha', '0.3', '--u', '0.5,0.8', '--rho', '1',
               '--buffer', '1', '--replicates', '2', '--truncation', '20',
               '--gate-samples', '30', '--threads', '1']

    def test_snapshots_of_replicate_zero(self, tmp_path, capsys):
        records, dump = tmp_path / 'records.csv', tmp_path / 'snapshots.json'
        assert main(self.REBIRTH + ['--out', str(records), '--dump-snapshots', str(dump)]) == 0
        snapshots = json.loads(dump.read_text(encoding='utf-8'))
        assert len(snapshots) == 2
        assert f"📄 wrote {dump}" in capsys.readouterr().err

    def test_only_the_rebirth_scenario_dumps(self, tmp_path, capsys):
        code = main(ERDOS_TAYLOR + ['--dump-snapshots', str(tmp_path / 'snapshots.json')])
        assert code == 2
        assert capsys.readouterr().err.startswith("error:")


class TestValidateCommand:
    def test_valid_file(self, scenario_file):
        path = scenario_file({'scenario': 'theorem1', 't': 100.0, 'beta': [0.6, 1.0]})
        assert main(['validate', '--config', str(path)]) == 0

    def test_invalid_file(self, scenario_file, capsys):
        path = scenario_file({'scenario': 'theorem1', 'alpha': 0.7, 'beta': [0.6, 1.0]})
        assert main(['validate', '--config', str(path)]) == 2
        assert capsys.readouterr().err.strip() == "error: alpha < beta"

    def test_scenario_is_required(self, scenario_file, capsys):
        path = scenario_file({'t': 100.0})
        assert main(['validate', '--config', str(path)]) == 2
        assert "error: scenario is given" in capsys.readouterr().err

    def test_infeasible_file(self, scenario_file, capsys):
        path = scenario_file({'scenario': 'theorem1', 'beta': [0.6, 1.5]})
        assert main(['validate', '--config', str(path)]) == 2
        assert "error: beta <= 1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(['validate', '--config', str(tmp_path / 'absent.json')]) == 2
        assert "error: config file exists" in capsys.readouterr().err


class TestGoldens:
    def test_checked_in_tables_match(self):
        assert main(['goldens', '--dir', str(GOLDENS)]) == 0

    def test_tables_are_written_then_diffed(self, tmp_path):
        assert main(['goldens', '--dir', str(tmp_path)]) == 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ['kingman_marginals.csv',
                                                               'tiny_torus.csv']
        assert main(['goldens', '--dir', str(tmp_path)]) == 0

    def test_corrupted_table_fails(self, tmp_path, capsys):
        assert main(['goldens', '--dir', str(tmp_path)]) == 0
        path = tmp_path / 'tiny_torus.csv'
        lines = path.read_text(encoding='utf-8').splitlines()
        lines[1] = '0.5,1.0,0.3'
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        capsys.readouterr()

        assert main(['goldens', '--dir', str(tmp_path)]) == 1
        err = capsys.readouterr().err
        assert "❌ tiny_torus.csv differs" in err
        assert "✅ kingman_marginals.csv matches" in err

    def test_update_rewrites(self, tmp_path):
        path = tmp_path / 'tiny_torus.csv'
        path.write_text('s,gamma,probability\n', encoding='utf-8')
        assert main(['goldens', '--dir', str(tmp_path), '--update']) == 0
        assert path.read_text(encoding='utf-8') == golden_tables()['tiny_torus.csv']

    def test_golden_difference(self):
        table = golden_tables()['tiny_torus.csv']
        assert golden_difference(table, table) == 0.0
        assert golden_difference(table, 's,gamma\n') == float('inf')
        shifted = table.replace('0.5,', '0.5000001,', 1)
        assert golden_difference(table, shifted) == pytest.approx(1e-7)

import json
import pytest
import pandas as pd
import abresolvent.cli as cli
from abresolvent.cli import build_parser, config_from_args, discretization_checks, main, write_reports
from abresolvent.analysis.grid import GridSpec
from abresolvent.config import RunConfig
from abresolvent.geometry import PolarPoint
from abresolvent.kernel import free_oracle
from abresolvent.ledger import LEDGER_ENV, ConstantsLedger
from abresolvent.report import BoundCheckReport


@pytest.fixture
def return_ledger_env(tmp_path, monkeypatch):
    path = tmp_path / 'ledger.jsonl'
    monkeypatch.setenv(LEDGER_ENV, str(path))
    return path


def test_parser_requires_command_options():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(['verify-bounds'])
    with pytest.raises(SystemExit):
        parser.parse_args(['eigen-bounds', '--backend', 'dense'])
    args = parser.parse_args(['scan-sigma', '--deltas', '0.5,-0.5', '--q', '6'])
    assert args.deltas == [0.5, -0.5]


def test_check_appendix_alias(tmp_path):
    args = build_parser().parse_args(['check-appendix', '--samples', '100', '--out', str(tmp_path)])
    config = config_from_args(args)
    assert config.command == 'verify-bounds'
    assert config.param('suite') == 'appendix'
    assert config.param('samples') == 100
    assert config.output == str(tmp_path)


def test_command_line_overrides_config_file(tmp_path):
    base = RunConfig(command='selftest', tolerance=1e-9, seed=1, output='results')
    base.save(str(tmp_path / 'run.yaml'))
    args = build_parser().parse_args(['scan-sigma', '--config', str(tmp_path / 'run.yaml'), '--alpha', '0.25',
                                      '--grid', '0.01,4,8,16', '--seed', '9', '--p', '1.2', '--q', '6',
                                      '--regime', 'i', '--deltas', '0.5'])
    config = config_from_args(args)
    assert config.seed == 9
    assert config.profile == {"type": "constant", "alpha": 0.25}
    assert config.grid_spec().n_theta == 16
    config.validate()


def test_eigen_grid_is_separate(tmp_path):
    args = build_parser().parse_args(['eigen-bounds', '--grid', '0.05,6,12,8', '--out', str(tmp_path)])
    config = config_from_args(args)
    assert config.param('eigen_grid')['n_r'] == 12
    assert config.grid == RunConfig.default().grid


def test_eval_kernel_writes_json(tmp_path, return_ledger_env):
    status = main(['eval-kernel', '--alpha', '0', '--sigma-re', '-1', '--sigma-im', '0', '--x', '1,0',
                   '--y', '2,1', '--out', str(tmp_path), '--tol', '1e-10'])
    assert status == 0
    with open(tmp_path / 'eval_kernel.json') as file:
        data = json.load(file)
    expected = free_oracle(-1.0, PolarPoint(1.0, 0.0), PolarPoint(2.0, 1.0))
    assert abs(complex(data['total']['re'], data['total']['im']) - expected) < 1e-6 * abs(expected)
    assert data['regime'] == 'i'


def test_usage_errors_exit_two(tmp_path, capsys):
    status = main(['eval-kernel', '--sigma-re', '4', '--sigma-im', '0', '--x', '1,0', '--y', '2,1',
                   '--out', str(tmp_path)])
    assert status == 2
    assert 'usage error' in capsys.readouterr().err
    assert main(['scan-sigma', '--p', '1.2', '--q', '4', '--regime', 'i', '--deltas', '0.5',
                 '--out', str(tmp_path)]) == 2
    assert main(['scan-sigma', '--p', '1.2', '--q', '6', '--regime', 'ii', '--deltas', '0.01',
                 '--out', str(tmp_path)]) == 2
    assert main(['selftest', '--config', str(tmp_path / 'missing.yaml')]) == 2


def test_computation_errors_exit_one(tmp_path, capsys, monkeypatch):
    def diverging(config, verbose):
        raise ValueError("array must not contain infs or NaNs")

    monkeypatch.setitem(cli.HANDLERS, 'selftest', diverging)
    assert main(['selftest', '--out', str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert 'usage error' not in err
    assert 'ValueError: array must not contain infs or NaNs' in err


def test_write_reports(tmp_path, return_ledger_env):
    config = RunConfig(command='verify-bounds', tolerance=1e-9, seed=0, output=str(tmp_path / 'out'),
                       params={"suite": 'schur'})
    samples = pd.DataFrame({"j": [1, 2, 3], "ratio": [0.2, 0.5, 0.4]})
    reports = [BoundCheckReport.from_samples('claim_a', samples),
               BoundCheckReport.from_samples('claim_b', pd.DataFrame())]
    assert not write_reports(reports, config, 'verify_schur')
    with open(tmp_path / 'out' / 'verify_schur.json') as file:
        summary = json.load(file)
    assert summary['verdict'] == 'fail'
    assert summary['config_hash'] == config.config_hash()
    assert [r['claim_id'] for r in summary['reports']] == ['claim_a', 'claim_b']
    worst = pd.read_csv(tmp_path / 'out' / 'verify_schur_worst.csv')
    assert list(worst['ratio']) == [0.5, 0.4, 0.2]
    assert ConstantsLedger(str(return_ledger_env)).read('claim_a') == 0.5


def test_discretization_checks():
    config = RunConfig(command='selftest', tolerance=1e-9, seed=0, output='results')
    well, identity = discretization_checks(config, well_grid=GridSpec(0.01, 8.0, 80, 4, 'uniform'),
                                           identity_grid=GridSpec(0.2, 2.0, 3, 4))
    assert well.claim_id == 'shallow_well_ground_state'
    assert well.verdict
    assert well.details['dense'].iloc[0] < 0
    assert well.max_ratio < 0.1
    assert identity.claim_id == 'resolvent_identity'
    assert identity.sample_count == 2
    assert set(identity.details['alpha']) == {0.0, 0.5}

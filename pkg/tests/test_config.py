import math
import pytest
import yaml
from abresolvent.config import DEFAULT_CONFIG_PATH, RunConfig, UsageError


@pytest.fixture
def return_config():
    return RunConfig(command='scan-sigma', tolerance=1e-9, seed=3, output='results',
                     params={"p": 1.2, "q": 6.0, "regime": 'iii', "deltas": [0.1, 0.01]})


def test_default_config_file():
    config = RunConfig.default()
    assert DEFAULT_CONFIG_PATH.exists()
    assert config.command == 'selftest'
    assert config.grid_spec().n_theta == 128
    assert config.validate() is config


def test_missing_fields():
    with pytest.raises(ValueError) as info:
        RunConfig.from_dict({"command": 'selftest', "tolerance": 1e-9, "seed": 1})
    assert 'output' in str(info.value)
    with pytest.raises(TypeError):
        RunConfig.from_dict(['selftest'])


def test_hash_is_canonical(return_config):
    same = RunConfig.from_dict(return_config.to_dict())
    assert same.config_hash() == return_config.config_hash()
    assert len(return_config.config_hash()) == 64
    assert return_config.with_overrides(seed=4).config_hash() != return_config.config_hash()


def test_overrides(return_config):
    config = return_config.with_overrides(tolerance=1e-6, suite='schur', threads=None)
    assert config.tolerance == 1e-6
    assert config.param('suite') == 'schur'
    assert config.threads == 1
    assert return_config.param('suite') is None


@pytest.mark.parametrize("change, message", [({"command": 'plot'}, "command"),
                                             ({"tolerance": 0.0}, "tolerance"),
                                             ({"threads": 0}, "threads"),
                                             ({"profile": {"type": "constant", "alpha": 1.0}}, "alpha"),
                                             ({"q": 4.0}, "q must"),
                                             ({"deltas": [0.5, 0.0]}, "deltas"),
                                             ({"regime": 'ii'}, "regime ii"),
                                             ({"deltas": [0.5]}, "regime iii"),
                                             ({"regime": 'iv'}, "regime")])
def test_validation_errors(return_config, change, message):
    with pytest.raises(UsageError) as info:
        return_config.with_overrides(**change).validate()
    assert message in str(info.value)


def test_suite_and_samples_validation():
    config = RunConfig(command='verify-bounds', tolerance=1e-9, seed=0, output='out', params={"suite": 'lemma3'})
    config.validate()
    with pytest.raises(ValueError):
        config.with_overrides(suite='unknown').validate()
    with pytest.raises(ValueError):
        config.with_overrides(samples=0).validate()


def test_infinite_q_accepted(return_config):
    return_config.with_overrides(p=1.3, q='inf').validate()


def test_save_and_reload(return_config, tmp_path):
    for name in ('run.yaml', 'run.json'):
        path = tmp_path / name
        return_config.save(str(path))
        assert RunConfig.from_file(str(path)).config_hash() == return_config.config_hash()
    with open(tmp_path / 'run.yaml') as file:
        assert 'run' in yaml.safe_load(file)
    with pytest.raises(FileNotFoundError):
        RunConfig.from_file(str(tmp_path / 'missing.yaml'))


def test_default_config_runs_each_command():
    config = RunConfig.default()
    assert config.with_overrides(command='scan-sigma').validate().param('regime') == 'iii'
    assert config.with_overrides(command='eigen-bounds').validate().param('gamma') == 0.5


def test_eval_kernel_validation():
    config = RunConfig(command='eval-kernel', tolerance=1e-9, seed=0, output='out',
                       params={"sigma_re": 4.0, "sigma_im": 0.0, "x": '1,0', "y": '2,1'})
    with pytest.raises(UsageError) as info:
        config.validate()
    assert 'branch' in str(info.value)
    on_axis = config.with_overrides(branch='+').validate()
    assert on_axis.spectral_parameter().branch == 1
    with pytest.raises(UsageError):
        config.with_overrides(sigma_re=-1.0, y='2').validate()
    with pytest.raises(UsageError):
        config.with_overrides(sigma_re=-1.0, gamma=0.75, command='eigen-bounds').validate()

import json

import click
import pytest
from click.testing import CliRunner

from utils.config import DEFAULTS, echo_config, load_config_file, resolve_config, to_default_map
from utils.error_handlers import handle_cli_errors, safe_execute
from utils.exceptions import ConfigError, DataError, IoError, ParamError, RamanError, ValidationError


def test_error_hierarchy():
    error = ParamError("bad", {'k': 0})
    assert isinstance(error, RamanError) and isinstance(error, ValueError)
    assert error.message == "bad" and error.details == {'k': 0}
    assert isinstance(IoError("x"), OSError)
    assert isinstance(ValidationError("x"), ValueError)


def test_resolve_config_prefers_explicit_values():
    cfg = resolve_config('pipeline', {'k': 6, 'seed': None, 'out': None})
    assert cfg['k'] == 6
    assert cfg['seed'] == DEFAULTS['pipeline']['seed']
    assert cfg['out'] is None
    assert cfg['command'] == 'pipeline'


def test_load_config_file(tmp_path):
    assert load_config_file(None) == {}
    path = tmp_path / 'raman.toml'
    path.write_text('[train]\nmax-lr = 0.001\nepochs = 3\n', encoding='utf-8')
    assert to_default_map(load_config_file(str(path))) == {'train': {'max_lr': 0.001, 'epochs': 3}}
    with pytest.raises(IoError):
        load_config_file(str(tmp_path / 'missing.toml'))
    flat = tmp_path / 'flat.toml'
    flat.write_text('epochs = 3\n', encoding='utf-8')
    with pytest.raises(ConfigError):
        load_config_file(str(flat))


def test_echo_config_writes_resolved_file(tmp_path):
    text = echo_config({'seed': 1, 'out': str(tmp_path)}, str(tmp_path / 'run'))
    assert json.loads(text) == {'seed': 1, 'out': str(tmp_path)}
    assert json.loads((tmp_path / 'run' / 'resolved_config.json').read_text(encoding='utf-8'))['seed'] == 1


def test_safe_execute():
    assert safe_execute(lambda a, b: a + b, 1, b=2) == 3
    with pytest.raises(DataError):
        safe_execute(lambda: (_ for _ in ()).throw(DataError("keep")))
    with pytest.raises(RamanError) as info:
        safe_execute(lambda: 1 / 0, error_message="division")
    assert info.value.message == "division"
    assert info.value.details['error_type'] == 'ZeroDivisionError'


def _command(error):
    @click.command()
    @handle_cli_errors
    def run():
        if error is not None:
            raise error
        click.echo("ok")
    return run


@pytest.mark.parametrize('error, code', [
    (None, 0),
    (ConfigError("scale mismatch"), 1),
    (FileNotFoundError("missing"), 1),
    (RuntimeError("boom"), 1),
    (click.UsageError("bad flag"), 2),
])
def test_handle_cli_errors_exit_codes(error, code):
    result = CliRunner().invoke(_command(error))
    assert result.exit_code == code
    if code == 1:
        assert 'Error:' in result.output

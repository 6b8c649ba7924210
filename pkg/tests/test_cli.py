import json
import sys

import pytest

import pcbfv
from engine.config_read import ConfigRead
from engine.constant import EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_PASS
from engine.errors import ConfigError
from utilities import dumpview


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    """Run the program from an empty folder with no configuration file in reach."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv('HOME', str(tmp_path))
    monkeypatch.delenv(pcbfv.THREADS_VARIABLE, raising=False)
    return tmp_path


def test_settings_from_config_file(monkeypatch):
    monkeypatch.delenv(pcbfv.THREADS_VARIABLE, raising=False)
    config = ConfigRead()
    config.read_string('[sampling]\nseed = 42\ngrid = 24\n[tolerances]\nhvf = 1e-7\n')
    settings = pcbfv.read_settings(config)
    assert settings['seed'] == 42
    assert settings['grid'] == 24
    assert settings['tol_hvf'] == 1e-7
    assert settings['K'] == 1


def test_bad_config_value(monkeypatch):
    monkeypatch.delenv(pcbfv.THREADS_VARIABLE, raising=False)
    config = ConfigRead()
    config.read_string('[sampling]\nseed = seven\n')
    with pytest.raises(ConfigError):
        pcbfv.read_settings(config)


def test_thread_variable(monkeypatch):
    monkeypatch.setenv(pcbfv.THREADS_VARIABLE, '3')
    assert pcbfv.read_settings(ConfigRead())['workers'] == 3
    monkeypatch.setenv(pcbfv.THREADS_VARIABLE, 'many')
    with pytest.raises(ConfigError):
        pcbfv.read_settings(ConfigRead())


def test_command_line_overrides_settings():
    args = pcbfv.parse_args(['--suite', 'clifford', '--seed', '9', '--tol.exact', '1e-12'])
    assert args.command == 'run'
    settings = pcbfv.merge({'seed': 7, 'tol_exact': 1e-10, 'K': 1}, args)
    assert settings == {'seed': 9, 'tol_exact': 1e-12, 'K': 1}


def test_no_suite_is_a_config_error(workspace, capsys):
    assert pcbfv.main([]) == EXIT_CONFIG_ERROR
    assert 'no suite selected' in capsys.readouterr().err


def test_unknown_suite(workspace):
    assert pcbfv.main(['--suite', 'brackets:gravitino']) == EXIT_CONFIG_ERROR


def test_bad_thread_variable(workspace, monkeypatch):
    monkeypatch.setenv(pcbfv.THREADS_VARIABLE, 'x')
    assert pcbfv.main(['--suite', 'clifford']) == EXIT_CONFIG_ERROR


def test_run_writes_json_report(workspace, capsys):
    assert pcbfv.main(['--suite', 'galg-identities', '--samples', '2', '--backend', 'exact']) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report['pass'] is True
    assert report['config']['backend'] == 'exact'
    assert {r['check'] for r in report['records']} >= {'bulk-1', '▼'}


def test_impossible_tolerance_fails(workspace, capsys):
    code = pcbfv.main(['run', '--suite', 'clifford', '--samples', '1', '--tol.spectral', '1e-300',
                       '--report', 'report.md', '--format', 'md'])
    assert code == EXIT_CHECK_FAILURE
    assert 'FAIL' in (workspace / 'report.md').read_text()


def test_sample_dumpview_and_replay(workspace, capsys, monkeypatch):
    dump = str(workspace / 'pc.pcbf')
    assert pcbfv.main(['sample', 'pc', dump, '--seed', '5', '--grid', '13']) == EXIT_PASS
    capsys.readouterr()

    monkeypatch.setattr(sys, 'argv', ['dumpview.py', dump, 'omega'])
    dumpview.main()
    shown = capsys.readouterr().out
    assert 'theory      pc' in shown
    assert 'seed        5' in shown
    assert 'omega' in shown

    assert pcbfv.main(['replay', dump, 'brackets:LL']) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert [r['check'] for r in report['records']] == ['LL']
    assert report['config']['grid'] == 13


def test_replay_of_missing_dump_check(workspace):
    dump = str(workspace / 'pc.pcbf')
    assert pcbfv.main(['sample', 'pc', dump, '--grid', '13']) == EXIT_PASS
    assert pcbfv.main(['replay', dump, 'kernel-dims']) == EXIT_CONFIG_ERROR


def test_dumpview_rejects_garbage(workspace, monkeypatch, capsys):
    path = workspace / 'garbage.pcbf'
    path.write_bytes(b'not a dump at all')
    monkeypatch.setattr(sys, 'argv', ['dumpview.py', str(path)])
    with pytest.raises(SystemExit) as info:
        dumpview.main()
    assert info.value.code == 1


def test_dumpview_usage(monkeypatch):
    monkeypatch.setattr(sys, 'argv', ['dumpview.py'])
    with pytest.raises(SystemExit) as info:
        dumpview.main()
    assert info.value.code == 2

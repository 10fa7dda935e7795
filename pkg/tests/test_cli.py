import json
import re

import pandas as pd
import pytest

from qaoa_conc import cli, config, graphs, reports


@pytest.fixture(autouse=True)
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(config.OUTPUT_DIR_ENV, str(tmp_path))
    return tmp_path


def run_cli(*argv):
    with pytest.raises(SystemExit) as info:
        cli.main(list(argv))
    return info.value.code


@pytest.fixture
def k4_file(out_dir, k4):
    return str(graphs.write_edge_list(k4, out_dir / 'k4.txt'))


# ---- graphs ------------------------------------------------------------------

def test_gen_graph_writes_edge_list_and_sidecar(out_dir, capsys):
    assert run_cli('gen-graph', '--n', '8', '--seed', '3', '--output', 'g8.txt') == 0
    g = graphs.read_edge_list(out_dir / 'g8.txt', degree=3)
    assert (g.n, g.m) == (8, 12)
    sidecar = reports.read_structured(out_dir / 'g8.txt.json')
    assert sidecar['config']['seed'] == 3
    assert sidecar['config']['command'] == 'gen-graph'
    assert 'Saved:' in capsys.readouterr().out


def test_gen_graph_parity_error(capsys):
    assert run_cli('gen-graph', '--n', '5') == cli.EXIT_CONFIG
    assert 'Error (parameter)' in capsys.readouterr().err


def test_gen_graph_target_out_of_reach(out_dir):
    code = run_cli('gen-graph', '--n', '4', '--maxcut', '6', '--output', 'k4.txt')
    assert code == cli.EXIT_GENERATION


def test_gen_graph_erdos_renyi(out_dir):
    code = run_cli('gen-graph', '--model', 'er', '--n', '40', '--largest-component',
                   '--output', 'er.txt')
    assert code == 0
    g = graphs.read_edge_list(out_dir / 'er.txt')
    assert g.n <= 40


def test_maxcut(k4_file, capsys):
    assert run_cli('maxcut', '--graph', k4_file) == 0
    assert 'MaxCut = 4' in capsys.readouterr().out


def test_missing_graph_file(out_dir):
    assert run_cli('maxcut', '--graph', str(out_dir / 'nope.txt')) == cli.EXIT_CONFIG


def test_census(out_dir, prism, capsys):
    path = graphs.write_edge_list(prism, out_dir / 'prism.txt')
    assert run_cli('census', '--graph', str(path), '--output', 'census') == 0
    assert 'w = (0, 6, 3)' in capsys.readouterr().out
    doc = reports.read_structured(out_dir / 'census.json')
    assert doc['result']['w_shared1'] == 6


def test_neighborhood(k4_file, capsys):
    assert run_cli('neighborhood', '--graph', k4_file, '--edge', '0', '--radius', '0') == 0
    assert '2 vertices, 1 edges' in capsys.readouterr().out


# ---- fixed angles ---------------------------------------------------------------

def test_evaluate(out_dir, k4_file, capsys):
    angles = out_dir / 'angles.json'
    angles.write_text(json.dumps({'p': 1, 'gamma': [0.0], 'beta': [0.0]}))
    assert run_cli('evaluate', '--graph', k4_file, '--angles', str(angles), '--quiet') == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out == ['F = 3.0000000000']


def test_sample(out_dir, k4_file):
    angles = out_dir / 'angles.json'
    angles.write_text(json.dumps({'p': 1, 'gamma': [0.4], 'beta': [0.3]}))
    code = run_cli('sample', '--graph', k4_file, '--angles', str(angles),
                   '--shots', '200', '--output', 'samples')
    assert code == 0
    result = reports.read_structured(out_dir / 'samples.json')['result']
    assert result['shots'] == 200
    assert result['best_cut'] <= 4


# ---- search and caps ----------------------------------------------------------------

def test_optimize_then_evaluate(out_dir, k4_file, capsys):
    assert run_cli('optimize', '--graph', k4_file, '--p', '1', '--restarts', '2',
                   '--output', 'opt') == 0
    doc = reports.read_structured(out_dir / 'opt.json')
    best = doc['result']['best_value']
    assert doc['result']['maxcut'] == 4
    capsys.readouterr()
    # the optimize report doubles as an angle file
    assert run_cli('evaluate', '--graph', k4_file, '--angles', str(out_dir / 'opt.json')) == 0
    assert f'F = {best:.10f}' in capsys.readouterr().out


def test_reports_do_not_depend_on_threads(out_dir):
    args = ['optimize', '--n', '8', '--p', '1', '--restarts', '3', '--seed', '9',
            '--output', 'same']
    assert run_cli(*args, '--threads', '1') == 0
    first = (out_dir / 'same.json').read_bytes()
    assert run_cli(*args, '--threads', '3') == 0
    assert (out_dir / 'same.json').read_bytes() == first


def test_simulator_cap(capsys):
    assert run_cli('optimize', '--n', '40', '--p', '1') == cli.EXIT_RESOURCE
    assert 'Error (resource)' in capsys.readouterr().err
    assert run_cli('optimize', '--n', '10', '--p', '1', '--max-qubits', '8') == cli.EXIT_RESOURCE


def test_landscape_csv(out_dir, k4_file):
    assert run_cli('landscape', '--graph', k4_file, '--resolution', '4',
                   '--format', 'csv', '--output', 'land') == 0
    path = out_dir / 'land.csv'
    assert path.read_text().startswith('# config=')
    frame = pd.read_csv(path, comment='#')
    assert len(frame) == 16
    assert list(frame.columns) == ['instance', 'gamma', 'beta', 'objective']


def test_bound(capsys):
    assert run_cli('bound', '--t', '0', '--L', '30', '--c', '2') == 0
    assert '<= 1' in capsys.readouterr().out
    assert run_cli('bound', '--t', '1', '--L', '30', '--c', '0') == cli.EXIT_CONFIG


# ---- saved runs --------------------------------------------------------------------

def test_run_file(out_dir, capsys):
    path = out_dir / 'run.json'
    path.write_text(json.dumps({'command': 'bound', 't': 5.0, 'L': 30, 'c': 2.0}))
    assert run_cli('run', '--file', str(path)) == 0
    assert 'P(|f - E f| >= t)' in capsys.readouterr().out


def test_run_file_rejects_unknown_fields(out_dir):
    path = out_dir / 'run.json'
    path.write_text(json.dumps({'command': 'bound', 'tee': 5.0}))
    assert run_cli('run', '--file', str(path)) == cli.EXIT_CONFIG


def test_embedded_config_reruns(out_dir):
    assert run_cli('gen-graph', '--n', '10', '--seed', '4', '--output', 'g10.txt') == 0
    first = (out_dir / 'g10.txt').read_text()
    saved = reports.read_structured(out_dir / 'g10.txt.json')['config']
    (out_dir / 'g10.txt').unlink()
    path = out_dir / 'rerun.json'
    path.write_text(json.dumps(saved))
    assert run_cli('run', '--file', str(path)) == 0
    assert (out_dir / 'g10.txt').read_text() == first


# ---- help ----------------------------------------------------------------------------

@pytest.mark.parametrize('command', cli.COMMANDS + ('run',))
def test_help_lists_every_default(command, capsys):
    assert run_cli(command, '--help') == 0
    out = capsys.readouterr().out
    options = re.findall(r'^  (--[\w-]+)', out, flags=re.MULTILINE)
    assert options
    assert out.count('(default:') == len(options)


def test_optimize_help_defaults(capsys):
    run_cli('optimize', '--help')
    out = ' '.join(capsys.readouterr().out.split())
    assert '(default: 20)' in out
    assert '(default: maximize)' in out

#
# SPDX-License-Identifier: Apache-2.0
#

import json
import os

import pytest

from plugins.module_utils.cli import run
from plugins.module_utils.document_utils import parse_catalog, parse_instance, parse_qubo, parse_sampleset
from plugins.module_utils.instance_factory import make_appendix_instance
from plugins.module_utils.utils import SEED_ENV


@pytest.fixture(autouse=True)
def no_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def instance_path(tmp_path):
    path = str(tmp_path / 'instance.json')
    assert run(['generate', '--appendix', '-o', path]) == 0
    return path


@pytest.fixture
def qubo_path(tmp_path, instance_path):
    path = str(tmp_path / 'appendix.qubo')
    assert run(['qubo', instance_path, '-o', path]) == 0
    return path


@pytest.fixture
def samples_path(tmp_path, qubo_path):
    path = str(tmp_path / 'samples.csv')
    assert run(['solve', qubo_path, '--limit', '2', '-o', path]) == 0
    return path


def read(path):
    with open(path, 'r') as file:
        return file.read()


def test_generate_writes_instance_and_manifest(instance_path):
    assert parse_instance(read(instance_path)).equals(make_appendix_instance())
    manifest = json.loads(read(f'{instance_path}.manifest.json'))
    assert manifest['command_line'] == ['railsched', 'generate', '--appendix', '-o', instance_path]
    assert manifest['seeds'] == dict(instance=0)
    assert manifest['inputs'] == []


def test_generate_to_stdout(capsys):
    assert run(['--seed', '3', 'generate', '--trains', '4', '--dmax', '2', '--disturbed']) == 0
    instance = parse_instance(capsys.readouterr().out)
    assert len(instance.trains) == 4
    assert instance.disturbed


def test_qubo_writes_catalog_sidecar(tmp_path, instance_path, qubo_path):
    catalog = parse_catalog(read(f'{qubo_path}.catalog'))
    qubo = parse_qubo(read(qubo_path), catalog)
    assert qubo.n == 18
    assert qubo.constraint_elements() == 90
    manifest = json.loads(read(f'{qubo_path}.manifest.json'))
    assert [entry['path'] for entry in manifest['inputs']] == [instance_path]


def test_qubo_writes_ising(tmp_path, instance_path):
    ising_path = str(tmp_path / 'appendix.ising')
    assert run(['qubo', instance_path, '--penalties', 'overlapping', '--ising-out', ising_path, '-o', str(tmp_path / 'q')]) == 0
    assert read(ising_path).startswith('nspins 18 offset ')


def test_solve_enumerate_limit(samples_path):
    sampleset = parse_sampleset(read(samples_path))
    assert len(sampleset) == 2
    assert [record.energy for record in sampleset.records] == pytest.approx([6.0, 6.0])
    assert sampleset.sampler_meta['backend'] == 'enumerate'
    assert sampleset.sampler_meta['truncated']


def test_solve_anneal_is_seeded(tmp_path, qubo_path):
    first, second = str(tmp_path / 'first.csv'), str(tmp_path / 'second.csv')
    for path in (first, second):
        assert run(['--seed', '5', 'solve', qubo_path, '--backend', 'anneal', '--shots', '20', '--sweeps', '20', '-o', path]) == 0
    assert read(first) == read(second)
    assert parse_sampleset(read(first)).shots() == 20


def test_analyze(tmp_path, instance_path, samples_path):
    histogram_path = str(tmp_path / 'histogram.csv')
    diagram_path = str(tmp_path / 'diagram.csv')
    output = str(tmp_path / 'analysis.json')
    assert run(['analyze', samples_path, '--instance', instance_path, '--histogram-out', histogram_path, '--diagram-out', diagram_path,
                '-o', output]) == 0
    document = json.loads(read(output))
    assert document['kind'] == 'analysis'
    assert document['feasible_fraction'] == pytest.approx(1.0)
    assert document['best_objective'] == pytest.approx(6.0)
    assert read(histogram_path) == 'bin_start,count\n14,2\n'
    assert read(diagram_path).splitlines()[1] == '1,PS,19,20,false'

    # Comparing a histogram with itself.
    assert run(['analyze', samples_path, '--instance', instance_path, '--compare', histogram_path, '-o', output]) == 0
    assert json.loads(read(output))['total_variation_distance'] == pytest.approx(0.0)


def test_ilp_solve(capsys, instance_path):
    assert run(['ilp-solve', instance_path]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['kind'] == 'ilp-solution'
    assert document['solution']['objective_value'] == pytest.approx(6.0)
    assert document['violations'] == []


def test_ilp_sweep(tmp_path, capsys):
    path = str(tmp_path / 'stochastic.json')
    assert run(['generate', '--appendix', '--disturbance-support', '0', '1', '-o', path]) == 0
    assert run(['--threads', '2', 'ilp-solve', path, '--stochastic-edge', 'MR:CS']) == 0
    sweep = json.loads(capsys.readouterr().out)['sweep']
    assert [entry['probability'] for entry in sweep] == pytest.approx([0.5, 0.5])
    assert [entry['solution']['objective_value'] for entry in sweep] == pytest.approx([6.0, 7.5])


def test_ilp_sweep_needs_a_disturbance_model(capsys, instance_path):
    assert run(['ilp-solve', instance_path, '--stochastic-edge', 'MR:CS']) == 1
    assert 'MissingDisturbanceModel' in capsys.readouterr().err


def test_spectrum(tmp_path, instance_path):
    output = str(tmp_path / 'spectrum.json')
    assert run(['spectrum', instance_path, '--bins', '20', '-o', output]) == 0
    document = json.loads(read(output))
    assert document['regime'] == 'Split'
    assert document['nvars'] == 18
    assert [level['energy'] for level in document['feasible_energies']] == pytest.approx([6.0, 6.5, 7.0, 7.5, 8.0])


def test_hybrid(capsys, instance_path):
    assert run(['hybrid', instance_path, '--zone', 'MR,CS', '--iterations', '3']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['kind'] == 'hybrid'
    assert document['best_joint_objective'] == pytest.approx(6.0)


def test_report(tmp_path, capsys, instance_path, samples_path):
    json_path = str(tmp_path / 'report.json')
    assert run(['report', samples_path, '--instance', instance_path, '--json-out', json_path]) == 0
    text = capsys.readouterr().out
    assert text.startswith('railsched report\n')
    assert 'feasible_fraction: 1.0' in text
    section = json.loads(read(json_path))['inputs'][0]
    assert section['kind'] == 'samples'
    assert section['best_objective'] == pytest.approx(6.0)


def test_domain_error_exits_with_one(capsys):
    assert run(['generate', '--trains', '3', '--dmax', '2']) == 1
    assert 'UnsupportedTrainCount' in capsys.readouterr().err


def test_missing_input_exits_with_one(tmp_path, capsys):
    assert run(['qubo', str(tmp_path / 'missing.json')]) == 1
    assert 'ParseError' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    [],
    ['transmogrify'],
    ['solve', '--backend', 'dwave'],
])
def test_usage_errors_exit_with_two(argv):
    assert run(argv) == 2


def test_unchanged_outputs_are_not_rewritten(tmp_path, instance_path):
    before = os.stat(instance_path).st_mtime_ns
    assert run(['generate', '--appendix', '-o', instance_path]) == 0
    assert os.stat(instance_path).st_mtime_ns == before


def test_report_on_empty_samples_and_spectrum(tmp_path, capsys, instance_path):
    empty = tmp_path / 'empty.csv'
    empty.write_text('')
    spectrum = str(tmp_path / 'spectrum.json')
    assert run(['spectrum', instance_path, '-o', spectrum]) == 0
    assert run(['report', str(empty), spectrum]) == 0
    text = capsys.readouterr().out
    assert 'no samples' in text
    assert 'feasible_objectives: [6.0, 6.5, 7.0, 7.5, 8.0]' in text


def test_non_numeric_penalty_override_exits_with_one(capsys, instance_path):
    assert run(['qubo', instance_path, '--penalty-override', 'passing=abc']) == 1
    assert 'InvalidPenalty' in capsys.readouterr().err


def test_zero_sweeps_are_rejected(capsys, qubo_path):
    assert run(['solve', qubo_path, '--backend', 'anneal', '--sweeps', '0']) == 1
    assert 'InvalidSweeps' in capsys.readouterr().err

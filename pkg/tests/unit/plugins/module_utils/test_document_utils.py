#
# SPDX-License-Identifier: Apache-2.0
#

import json

import pytest

from plugins.module_utils.document_utils import (load_histogram_csv, parse_catalog, parse_document, parse_instance, parse_ising, parse_qubo,
                                                 parse_sampleset, qubo_comments, write_catalog, write_document, write_instance, write_qubo,
                                                 write_sampleset, write_train_diagram)
from plugins.module_utils.errors import ParseException
from plugins.module_utils.qubo_engine import PenaltyConfig, evaluate
from plugins.module_utils.samplers import SampleRecord, SampleSet


def test_qubo_file_keeps_energies_and_counts(split_qubo, appendix_optimum):
    text = write_qubo(split_qubo, qubo_comments(split_qubo, PenaltyConfig.split()))
    assert text.startswith('# penalties Split p_sum 40 p_pair 20\n# constraint_elements 90 nonzero_elements ')
    catalog = parse_catalog(write_catalog(split_qubo.catalog))
    qubo = parse_qubo(text, catalog)
    assert qubo.n == 18
    assert qubo.constraint_elements() == 90
    assert qubo.catalog.equals(split_qubo.catalog)
    assert evaluate(qubo, catalog.encode(appendix_optimum)) == pytest.approx(6.0)


@pytest.mark.parametrize('text, line', [
    ('0 0 1.0 objective\n', 1),
    ('nvars 2 offset 0\n1 0 1.0 objective\n', 2),
    ('nvars 2 offset 0\n0 1 abc objective\n', 2),
    ('# only a comment\n\nnvars 2\n', 3),
])
def test_malformed_qubo_files(text, line):
    with pytest.raises(ParseException) as e:
        parse_qubo(text, filename='model.qubo')
    assert e.value.code == 'ParseError'
    assert e.value.line == line
    assert f'model.qubo:{line}' in str(e.value)


def test_qubo_without_header():
    with pytest.raises(ParseException) as e:
        parse_qubo('# nothing here\n')
    assert 'Missing' in e.value.message


def test_catalog_size_must_match(split_qubo):
    catalog = parse_catalog('0 PS 1 19\n')
    with pytest.raises(ParseException):
        parse_qubo(write_qubo(split_qubo), catalog)


def test_catalog_must_be_in_index_order():
    with pytest.raises(ParseException) as e:
        parse_catalog('# index station train time\n1 PS 1 19\n')
    assert e.value.line == 2


def test_ising_file_errors():
    model = parse_ising('nspins 2 offset 0.5\nh 0 -1\nJ 0 1 0.25\n')
    assert model.fields == {0: -1.0}
    assert model.couplings == {(0, 1): 0.25}
    with pytest.raises(ParseException) as e:
        parse_ising('nspins 2 offset 0\nK 0 1 1\n')
    assert e.value.line == 2


def test_instance_document(appendix):
    text = write_instance(appendix)
    data = json.loads(text)
    assert data['kind'] == 'instance'
    assert data['format_version'] == '1.0.0'
    assert parse_instance(text).equals(appendix)


def test_malformed_instance_document():
    with pytest.raises(ParseException) as e:
        parse_instance(write_document('instance', dict(trains=list())), 'broken.json')
    assert 'Malformed instance document' in e.value.message


@pytest.mark.parametrize('text, message', [
    ('{"kind": "instance"', 'Expecting'),
    ('[1, 2]', 'not a JSON object'),
    ('{"kind": "instance"}', 'no format_version'),
    ('{"kind": "instance", "format_version": "2.0.0"}', 'Unsupported format_version'),
    ('{"kind": "instance", "format_version": "latest"}', 'Invalid format_version'),
    ('{"kind": "analysis", "format_version": "1.0"}', 'Expected a instance document'),
])
def test_document_errors(text, message):
    with pytest.raises(ParseException) as e:
        parse_document(text, 'instance')
    assert message in e.value.message


def test_minor_versions_are_accepted():
    assert parse_document('{"kind": "spectrum", "format_version": "1.3"}', 'spectrum')['kind'] == 'spectrum'


def test_sample_file():
    sampleset = SampleSet([SampleRecord([0, 1], 2.5, 3), SampleRecord([1, 1], -1.0, 1)], dict(backend='anneal', seed=4))
    text = write_sampleset(sampleset)
    assert text.splitlines()[:3] == ['# backend "anneal"', '# seed 4', 'bits,energy,count']
    parsed = parse_sampleset(text)
    assert parsed.sampler_meta == dict(backend='anneal', seed=4)
    assert parsed.best().bitstring() == '11'
    assert parsed.shots() == 4


@pytest.mark.parametrize('text, line', [
    ('bits,count\n', 1),
    ('bits,energy,count\n01x,1.0,1\n', 2),
    ('bits,energy,count\n01,1.0,1\n011,1.0,1\n', 3),
    ('bits,energy,count\n01,low,1\n', 2),
    ('# seed {bad\nbits,energy,count\n', 1),
])
def test_malformed_sample_files(text, line):
    with pytest.raises(ParseException) as e:
        parse_sampleset(text)
    assert e.value.line == line


def test_histogram_csv_merges_repeated_bins():
    histogram = load_histogram_csv('bin_start,count\n14,3\n15,2\n14,1\n', edge=('MR', 'CS'))
    assert histogram.counts == {14: 4, 15: 2}
    assert histogram.edge == ('MR', 'CS')


@pytest.mark.parametrize('text', ['14,-1\n', '14\n', 'a,b\n'])
def test_malformed_histogram_csv(text):
    with pytest.raises(ParseException):
        load_histogram_csv(text)


def test_train_diagram_csv():
    text = write_train_diagram([dict(train=1, station='PS', t_in=19, t_out=20, relaxed=False)])
    assert text == 'train,station,t_in,t_out,relaxed\n1,PS,19,20,false\n'

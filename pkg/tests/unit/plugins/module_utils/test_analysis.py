#
# SPDX-License-Identifier: Apache-2.0
#

import math

import pytest

from plugins.module_utils.analysis import (LINEAR, ONE_HOT, OVERTAKE, Histogram, analyse_sampleset, check_timetable, decode,
                                           decode_sampleset, disturbance_distance, estimate_physical_qubits, export_train_diagram, feasible_fraction,
                                           find_overtakes, fit_scaling, passing_histogram, spectrum_summary, total_variation_distance)
from plugins.module_utils.errors import InfeasibleException, ParameterException
from plugins.module_utils.ilp_engine import PASSING
from plugins.module_utils.network_model import DisturbanceModel
from plugins.module_utils.qubo_engine import OVERLAPPING, SPLIT
from plugins.module_utils.samplers import ANNEAL, AnnealConfig, SampleRecord, SampleSet, enumerate_spectrum, sample_qubo


def test_decode_optimum(split_qubo, appendix, appendix_optimum):
    report = decode(split_qubo, split_qubo.catalog.encode(appendix_optimum), appendix)
    assert report.feasible_strict
    assert report.objective == pytest.approx(6.0)
    assert report.times == appendix_optimum
    assert report.passing_times[(1, ('PS', 'MR'))] == 2
    assert report.passing_times[(1, ('MR', 'CS'))] == 14
    assert report.passing_times[(2, ('CS', 'MR'))] == 14
    assert report.passing_times[(2, ('MR', 'PS'))] == 2


def test_decode_uses_the_compiled_instance(split_qubo, appendix_optimum):
    report = decode(split_qubo, split_qubo.catalog.encode(appendix_optimum))
    assert report.objective == pytest.approx(6.0)


def test_decode_broken_one_hot(split_qubo, appendix, appendix_optimum):
    bits = split_qubo.catalog.encode(appendix_optimum)
    bits[split_qubo.catalog.lookup('MR', 1, 23)] = 1
    report = decode(split_qubo, bits, appendix)
    assert not report.feasible_strict
    assert not report.feasible_relaxed
    assert [violation.code for violation in report.violations] == [ONE_HOT]
    assert report.objective is None
    assert report.times[('MR', 1)] is None


def test_passing_violation_is_relaxed_feasible(split_qubo, appendix, appendix_optimum):
    times = dict(appendix_optimum)
    times[('PS', 1)] = 21
    report = decode(split_qubo, split_qubo.catalog.encode(times), appendix)
    assert not report.feasible_strict
    assert report.feasible_relaxed
    assert [violation.code for violation in report.violations] == [PASSING]
    assert report.passing_times[(1, ('PS', 'MR'))] == 0


def test_check_timetable_skips_passing_when_relaxed(appendix, appendix_optimum):
    times = dict(appendix_optimum)
    times[('PS', 1)] = 21
    assert check_timetable(appendix, times, relaxed=True) == []


def test_overtakes(headway_instance):
    times = {('MR', 1): 29, ('MR', 3): 31, ('CS', 1): 46, ('CS', 3): 44}
    violations = find_overtakes(headway_instance, times)
    assert [violation.code for violation in violations] == [OVERTAKE]
    times[('CS', 1)] = 44
    times[('CS', 3)] = 46
    assert find_overtakes(headway_instance, times) == []


def test_split_spectrum(split_qubo, appendix):
    summary = spectrum_summary(enumerate_spectrum(split_qubo), split_qubo, appendix)
    assert summary.states == 1 << 18
    assert summary.feasible_objectives() == pytest.approx([6.0, 6.5, 7.0, 7.5, 8.0])
    assert summary.feasible_energies[6.0] == 2
    assert summary.min_feasible == pytest.approx(6.0)
    assert summary.max_feasible == pytest.approx(8.0)
    assert summary.gap > 0
    assert summary.regime == SPLIT


def test_overlapping_spectrum(overlapping_qubo, appendix):
    summary = spectrum_summary(enumerate_spectrum(overlapping_qubo), overlapping_qubo, appendix, bins=10)
    assert summary.feasible_objectives() == pytest.approx([6.0, 6.5, 7.0, 7.5, 8.0])
    assert summary.gap <= 0
    assert summary.regime == OVERLAPPING
    assert len(summary.histogram) == 10
    assert sum(row['feasible'] + row['infeasible'] for row in summary.histogram) == 1 << 18


def test_passing_histogram(split_qubo, appendix, appendix_optimum, appendix_worse):
    reports = [
        decode(split_qubo, split_qubo.catalog.encode(appendix_optimum), appendix, count=3),
        decode(split_qubo, split_qubo.catalog.encode(appendix_worse), appendix, count=1),
    ]
    histogram = passing_histogram(reports, ('MR', 'CS'))
    assert histogram.counts == {14: 3, 15: 1}
    assert histogram.mode() == 14
    assert histogram.support() == [14, 15]
    assert histogram.probabilities() == pytest.approx({14: 0.75, 15: 0.25})


def test_empty_passing_histogram(split_qubo, appendix):
    report = decode(split_qubo, [0] * 18, appendix)
    histogram = passing_histogram([report], ('MR', 'CS'))
    assert histogram.empty
    assert histogram.mode() is None
    assert histogram.to_json()['empty']


def test_total_variation_distance():
    assert total_variation_distance({14: 1, 15: 1}, {14: 1}) == pytest.approx(0.5)
    assert total_variation_distance(Histogram({3: 2}), {3: 5}) == pytest.approx(0.0)
    with pytest.raises(ParameterException) as e:
        total_variation_distance(Histogram(dict()), {3: 1})
    assert e.value.code == 'EmptyHistogram'


def test_disturbance_distance():
    histogram = Histogram({14: 1, 15: 1})
    assert disturbance_distance(histogram, 14, DisturbanceModel([0, 1])) == pytest.approx(0.0)
    assert disturbance_distance(histogram, 14, DisturbanceModel([0])) == pytest.approx(0.5)


def test_exponential_fit():
    fit = fit_scaling([(size, 2.0 ** size) for size in (2, 4, 6, 8)])
    assert fit.slope == pytest.approx(math.log(2))
    assert fit.r2 == pytest.approx(1.0)
    assert fit.predict(10) == pytest.approx(1024.0)


def test_linear_fit():
    fit = fit_scaling([(1, 3.0), (2, 5.0), (3, 7.0)], LINEAR)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)


@pytest.mark.parametrize('points, model, code', [
    ([(1, 1.0), (2, 2.0)], LINEAR, 'TooFewPoints'),
    ([(1, 1.0), (2, 0.0), (3, 1.0)], 'exponential', 'NonPositiveValue'),
    ([(1, 1.0), (2, 2.0), (3, 3.0)], 'cubic', 'UnknownScalingModel'),
])
def test_invalid_fits(points, model, code):
    with pytest.raises(ParameterException) as e:
        fit_scaling(points, model)
    assert e.value.code == code


def test_physical_qubit_estimate_reproduces_anchors():
    assert estimate_physical_qubits(42)['physical'] == pytest.approx(85.0)
    assert estimate_physical_qubits(182)['physical'] == pytest.approx(503.0)
    estimate = estimate_physical_qubits(18)
    assert estimate['reference_logical'] == 196
    assert estimate['physical'] < 85.0


def test_train_diagram(split_qubo, appendix, appendix_optimum):
    report = decode(split_qubo, split_qubo.catalog.encode(appendix_optimum), appendix)
    rows = export_train_diagram(report, appendix)
    assert len(rows) == 6
    assert rows[0] == dict(train=1, station='PS', t_in=19, t_out=20, relaxed=False)
    assert rows[-1] == dict(train=2, station='PS', t_in=59, t_out=60, relaxed=False)


def test_train_diagram_of_infeasible_report(split_qubo, appendix):
    report = decode(split_qubo, [0] * 18, appendix)
    with pytest.raises(InfeasibleException) as e:
        export_train_diagram(report, appendix)
    assert e.value.code == 'InfeasibleReport'


def test_analyse_sampleset(split_qubo, appendix, appendix_optimum):
    bits = split_qubo.catalog.encode(appendix_optimum)
    sampleset = SampleSet([SampleRecord(bits, 6.0, 3), SampleRecord([0] * 18, 240.0, 1)], dict(backend='anneal'))
    document, histogram, best = analyse_sampleset(appendix, sampleset, ('MR', 'CS'))
    assert document['nvars'] == 18
    assert document['shots'] == 4
    assert document['distinct'] == 2
    assert document['feasible_fraction'] == pytest.approx(0.75)
    assert document['relaxed_fraction'] == pytest.approx(0.75)
    assert document['best_objective'] == pytest.approx(6.0)
    assert document['sampler_meta'] == dict(backend='anneal')
    assert histogram.counts == {14: 3}
    assert best.times == appendix_optimum


def test_analyse_sampleset_length_mismatch(appendix):
    sampleset = SampleSet([SampleRecord([0] * 17, 0.0, 1)])
    with pytest.raises(ParameterException) as e:
        analyse_sampleset(appendix, sampleset, ('MR', 'CS'))
    assert e.value.code == 'LengthMismatch'


def test_feasible_fraction_of_empty_sampleset(split_qubo):
    assert feasible_fraction(SampleSet(list()), split_qubo) == 0.0


def test_quenched_samples_reach_below_the_minimum_passing_time(split_qubo, appendix):
    samples = sample_qubo(split_qubo, ANNEAL, AnnealConfig(shots=1000, sweeps=1, seed=0))
    reports = decode_sampleset(split_qubo, samples, appendix)
    strict = passing_histogram(reports, ('MR', 'CS'))
    relaxed = passing_histogram(reports, ('MR', 'CS'), relaxed=True)
    assert not strict.empty
    assert set(strict.support()) <= {14, 15, 16}
    assert min(relaxed.support()) < 14

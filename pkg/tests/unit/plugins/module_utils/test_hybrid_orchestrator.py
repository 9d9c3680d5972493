#
# SPDX-License-Identifier: Apache-2.0
#

import pytest

from plugins.module_utils.analysis import check_timetable, decode
from plugins.module_utils.errors import DecompositionException
from plugins.module_utils.hybrid_orchestrator import biased_qubo, decompose, run_hybrid, select_representatives, statistics_check
from plugins.module_utils.network_model import DisturbanceModel
from plugins.module_utils.qubo_engine import evaluate
from plugins.module_utils.samplers import ANNEAL, AnnealConfig


def test_decompose_appendix(appendix):
    decomposition = decompose(appendix, ['MR', 'CS'])
    assert decomposition.boundary == [('MR', 1), ('MR', 2)]
    assert [train.route for train in decomposition.stochastic.trains] == [('MR', 'CS'), ('CS', 'MR')]
    assert [train.route for train in decomposition.deterministic.trains] == [('PS', 'MR'), ('MR', 'PS')]
    assert decomposition.stochastic.rollingstock_pairs == {'CS': ((1, 2),)}
    assert decomposition.deterministic.rollingstock_pairs == {}


def test_sub_trains_keep_their_windows(appendix):
    decomposition = decompose(appendix, ['MR', 'CS'])
    assert decomposition.stochastic.get_train(1).initial_delay == 5
    assert decomposition.deterministic.get_train(1).initial_delay == 5
    assert decomposition.deterministic.get_train(2).initial_delay == 0
    assert decomposition.deterministic_keys(('MR', 1)) == [('MR', 1)]
    assert decomposition.original_key(('PS', 2)) == ('PS', 2)


@pytest.mark.parametrize('zone, code', [
    ([], 'EmptyZone'),
    (['PS', 'CS'], 'NonContiguousZone'),
])
def test_invalid_zones(appendix, zone, code):
    with pytest.raises(DecompositionException) as e:
        decompose(appendix, zone)
    assert e.value.code == code


def test_biased_qubo_adds_diagonal(split_qubo, appendix_optimum):
    bits = split_qubo.catalog.encode(appendix_optimum)
    index = split_qubo.catalog.lookup('MR', 1, 22)
    biased = biased_qubo(split_qubo, {index: 1.5})
    assert evaluate(biased, bits) == pytest.approx(7.5)
    assert evaluate(split_qubo, bits) == pytest.approx(6.0)


def test_representatives_have_distinct_boundaries(split_qubo, appendix, appendix_optimum, appendix_worse):
    alternative = dict(appendix_optimum)
    alternative[('PS', 2)] = 60
    reports = [
        decode(split_qubo, split_qubo.catalog.encode(times), appendix, energy)
        for times, energy in ((appendix_worse, 7.5), (appendix_optimum, 6.0), (alternative, 6.0))
    ]
    representatives = select_representatives(reports, [('MR', 1), ('MR', 2)], 3)
    assert [report.energy for report in representatives] == [6.0, 7.5]


def test_representatives_rank_by_objective_before_biased_energy(split_qubo, appendix, appendix_optimum, appendix_worse):
    # Boundary bias has made the optimum the most expensive sample.
    reports = [
        decode(split_qubo, split_qubo.catalog.encode(times), appendix, energy)
        for times, energy in ((appendix_worse, 7.5), (appendix_optimum, 9.0))
    ]
    representatives = select_representatives(reports, [('MR', 1), ('MR', 2)], 1)
    assert representatives[0].objective == pytest.approx(6.0)
    assert representatives[0].energy == pytest.approx(9.0)


def test_statistics_check_needs_a_threshold_and_a_model(appendix):
    assert statistics_check(appendix, list(), None) is None
    assert statistics_check(appendix.clone(disturbance=None), list(), 0.1) is None


def test_statistics_check(split_qubo, appendix, appendix_optimum):
    instance = appendix.clone(disturbance=DisturbanceModel([0]))
    reports = [decode(split_qubo, split_qubo.catalog.encode(appendix_optimum), appendix)]
    statistics = statistics_check(instance, reports, 0.1)
    assert statistics['accepted']
    assert all(distance == pytest.approx(0.0) for distance in statistics['distances'].values())


def test_hybrid_reaches_the_optimum(appendix, appendix_optimum):
    result = run_hybrid(appendix, ['MR', 'CS'])
    document = result.to_json()
    assert document['best_joint_objective'] == pytest.approx(6.0)
    assert document['converged']
    assert document['iterations'] == 2
    assert document['diagnostics']['boundary'] == [['MR', 1], ['MR', 2]]
    assert document['diagnostics']['nvars'] == 12
    best = result.best()
    assert best.times[('MR', 1)] == 22
    assert best.times[('CS', 2)] == 41
    assert check_timetable(appendix, best.times) == []


def test_hybrid_is_independent_of_workers(appendix):
    serial = run_hybrid(appendix, ['MR', 'CS'], budget=2)
    threaded = run_hybrid(appendix, ['MR', 'CS'], budget=2, workers=3)
    assert serial.to_json() == threaded.to_json()


def test_annealed_hybrid_portfolio_is_feasible(appendix):
    config = AnnealConfig(shots=40, sweeps=60, seed=3)
    result = run_hybrid(appendix, ['MR', 'CS'], backend=ANNEAL, budget=2, sampler_config=config)
    assert result.best().joint_objective >= 6.0 - 1e-9
    for entry in result.portfolio:
        assert check_timetable(appendix, entry.times) == []
        assert set(entry.times) == set(appendix.keys())

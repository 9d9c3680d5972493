#
# SPDX-License-Identifier: Apache-2.0
#

import numpy as np
import pytest

from plugins.module_utils.errors import ParameterException
from plugins.module_utils.network_model import compute_time_windows
from plugins.module_utils.qubo_engine import (HEADWAY, ONE_HOT, PASSING, ROLLING_STOCK, SPLIT, PenaltyConfig, assemble, build_catalog,
                                              encode_headway, evaluate, evaluate_many)


def test_appendix_catalog(split_qubo):
    assert split_qubo.n == 18
    assert split_qubo.catalog.entries[0] == ('PS', 1, 19)
    assert split_qubo.catalog.entries[-1] == ('PS', 2, 60)
    assert split_qubo.catalog.group('CS', 2) == [9, 10, 11]


def test_appendix_element_counts(split_qubo):
    assert split_qubo.element_counts[ONE_HOT] == 54
    assert split_qubo.element_counts[PASSING] == 24
    assert split_qubo.element_counts[HEADWAY] == 0
    assert split_qubo.element_counts[ROLLING_STOCK] == 12
    assert split_qubo.constraint_elements() == 90


def test_appendix_energies(split_qubo, appendix_optimum, appendix_worse):
    assert evaluate(split_qubo, split_qubo.catalog.encode(appendix_optimum)) == pytest.approx(6.0)
    assert evaluate(split_qubo, split_qubo.catalog.encode(appendix_worse)) == pytest.approx(7.5)


def test_penalties_do_not_change_feasible_energies(overlapping_qubo, appendix_optimum):
    assert evaluate(overlapping_qubo, overlapping_qubo.catalog.encode(appendix_optimum)) == pytest.approx(6.0)


def test_rolling_stock_violation_is_penalised(split_qubo, appendix_optimum):
    times = dict(appendix_optimum)
    times[('CS', 2)] = 40
    times[('MR', 2)] = 55
    times[('PS', 2)] = 58

    # Train 2 leaves before train 1 is turned around: one forbidden pair.
    assert evaluate(split_qubo, split_qubo.catalog.encode(times)) == pytest.approx(5.0 + 2 * 20.0)


def test_empty_bitstring_costs_every_one_hot_penalty(split_qubo):
    assert evaluate(split_qubo, [0] * 18) == pytest.approx(6 * 40.0)


def test_evaluate_many_matches_evaluate(split_qubo):
    rng = np.random.default_rng(11)
    bits = rng.integers(0, 2, size=(20, split_qubo.n))
    energies = evaluate_many(split_qubo, bits)
    for row, energy in zip(bits, energies):
        assert energy == pytest.approx(evaluate(split_qubo, list(row)))


def test_headway_forbids_close_pairs(headway_instance):
    windows = compute_time_windows(headway_instance)
    catalog = build_catalog(headway_instance, windows)
    terms = encode_headway(catalog, headway_instance, 1.0)
    assert len(terms) == 7
    assert terms.element_count() == 14
    times = sorted((catalog.entries[i][2], catalog.entries[j][2]) for i, j in terms.pairs())
    assert times == [(29, 29), (29, 30), (30, 29), (30, 30), (30, 31), (31, 30), (31, 31)]


def test_penalty_overrides(appendix, appendix_windows):
    penalties = PenaltyConfig(40.0, 20.0, overrides={ROLLING_STOCK: 50.0})
    qubo = assemble(appendix, appendix_windows, penalties)
    for pair in qubo.pairs_with_tag(ROLLING_STOCK):
        assert qubo.terms[pair] == 50.0
    assert qubo.element_counts[ROLLING_STOCK] == 12


def test_named_penalties():
    assert PenaltyConfig.from_name('split').regime_label == SPLIT
    assert PenaltyConfig.from_name('custom', 3.0, 1.5).p_pair == 1.5


@pytest.mark.parametrize('arguments', [
    dict(name='custom'),
    dict(name='custom', p_sum=0.0, p_pair=1.0),
    dict(name='custom', p_sum=1.0, p_pair=1.0, overrides={'turnaround': 2.0}),
    dict(name='heavy'),
])
def test_invalid_penalties(arguments):
    with pytest.raises(ParameterException) as e:
        PenaltyConfig.from_name(**arguments)
    assert e.value.code == 'InvalidPenalty'


def test_zero_delay_bound_has_no_qubo(appendix):
    instance = appendix.clone(d_max=0)
    with pytest.raises(ParameterException) as e:
        assemble(instance, compute_time_windows(instance), PenaltyConfig.split())
    assert e.value.code == 'ZeroDelayBound'


def test_length_mismatch(split_qubo):
    with pytest.raises(ParameterException) as e:
        evaluate(split_qubo, [0] * 17)
    assert e.value.code == 'LengthMismatch'

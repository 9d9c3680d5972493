#
# SPDX-License-Identifier: Apache-2.0
#

import pytest

from plugins.module_utils.errors import ParameterException
from plugins.module_utils.instance_factory import FamilySpec, count_conflicts, make_appendix_instance, make_family_instance
from plugins.module_utils.network_model import compute_time_windows, validate_instance
from plugins.module_utils.qubo_engine import build_catalog


def test_appendix_instance():
    instance = make_appendix_instance()
    assert [train.id for train in instance.trains] == [1, 2]
    assert instance.get_train(1).initial_delay == 5
    assert instance.get_train(2).initial_delay == 0
    assert instance.rollingstock_pairs == {'CS': ((1, 2),)}
    assert instance.headway_pairs == {}
    assert instance.disturbed


def test_undelayed_appendix_instance():
    instance = make_appendix_instance(initial_delay=0)
    assert not instance.disturbed


@pytest.mark.parametrize('train_count', [1, 2, 4, 6, 8, 10, 11, 12])
def test_family_instances_are_valid(train_count):
    instance = make_family_instance(FamilySpec(train_count, 2))
    assert len(instance.trains) == train_count
    assert validate_instance(instance) == []


def test_disturbed_family_is_seeded():
    first = make_family_instance(FamilySpec(6, 2, disturbed=True, seed=3))
    second = make_family_instance(FamilySpec(6, 2, disturbed=True, seed=3))
    assert first.equals(second)
    assert first.disturbed
    assert first.trains[0].initial_delay == 5


def test_disturbed_family_adds_conflicts():
    undisturbed = make_family_instance(FamilySpec(6, 2))
    disturbed = make_family_instance(FamilySpec(6, 2, disturbed=True, seed=0))
    assert count_conflicts(disturbed) >= count_conflicts(undisturbed)
    assert count_conflicts(disturbed) >= 1


def test_family_rolling_stock_turns_opposite_trains():
    instance = make_family_instance(FamilySpec(2, 2))
    assert instance.rollingstock_pairs == {'CS': ((1, 2),)}


@pytest.mark.parametrize('spec, code', [
    (FamilySpec(3, 2), 'UnsupportedTrainCount'),
    (FamilySpec(4, 3), 'UnsupportedDelayBound'),
    (FamilySpec(1, 2, disturbed=True), 'UndisturbableInstance'),
])
def test_unsupported_family_specs(spec, code):
    with pytest.raises(ParameterException) as e:
        make_family_instance(spec)
    assert e.value.code == code


@pytest.mark.parametrize('spec, nvars', [
    (FamilySpec(1, 2), 6),
    (FamilySpec(2, 2), 18),
    (FamilySpec(11, 6, disturbed=True, seed=0), 182),
    (FamilySpec(12, 6), 196),
])
def test_family_variable_counts(spec, nvars):
    instance = make_family_instance(spec)
    assert len(build_catalog(instance, compute_time_windows(instance))) == nvars

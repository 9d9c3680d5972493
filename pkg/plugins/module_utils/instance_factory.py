#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import random

from .errors import ParameterException
from .network_model import Instance, NetworkParams, Train, compute_time_windows

# Stations of the modelled line section, south to north.
BALTIMORE_LINE = ('PS', 'MR', 'CS')
BALTIMORE_OBJECTIVE_STATIONS = ('MR', 'CS')
BALTIMORE_STOCHASTIC_ZONE = ('MR', 'CS')

SUPPORTED_TRAIN_COUNTS = (1, 2, 4, 6, 8, 10, 11, 12)
SUPPORTED_D_MAX = (2, 6)

APPENDIX_DELAY = 5
EXTRA_DELAYS = (3, 4)

# Template timetable: (train, route, nominal arrival at the first station).
FAMILY_TIMETABLE = (
    (1, ('PS', 'MR', 'CS'), 14),
    (2, ('CS', 'MR', 'PS'), 40),
    (3, ('MR', 'CS'), 29),
    (4, ('CS', 'MR'), 50),
    (5, ('MR', 'CS'), 41),
    (6, ('CS', 'MR'), 62),
    (7, ('PS', 'MR', 'CS'), 50),
    (8, ('CS', 'MR', 'PS'), 74),
    (9, ('MR', 'CS'), 65),
    (10, ('CS', 'MR'), 86),
    (11, ('MR', 'CS'), 77),
    (12, ('CS', 'MR'), 98),
)

FAMILY_ROSTERS = {
    1: (3,),
    2: (1, 2),
    4: (1, 2, 3, 4),
    6: (1, 2, 3, 4, 5, 6),
    8: (1, 2, 3, 4, 5, 6, 7, 8),
    10: (1, 2, 3, 4, 5, 6, 7, 8, 9, 10),
    11: (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11),
    12: (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12),
}


def baltimore_params():
    return NetworkParams(
        headway_min=2,
        preparation_min=3,
        station_stay_min=1,
        pass_min={
            ('PS', 'MR'): 2,
            ('MR', 'PS'): 2,
            ('MR', 'CS'): 14,
            ('CS', 'MR'): 14,
        }
    )


class FamilySpec:

    def __init__(self, train_count, d_max, disturbed=False, seed=0):
        self.train_count = train_count
        self.d_max = d_max
        self.disturbed = disturbed
        self.seed = seed

    def validate(self):
        if self.train_count not in SUPPORTED_TRAIN_COUNTS:
            raise ParameterException('UnsupportedTrainCount', f'Train count {self.train_count} is not one of {list(SUPPORTED_TRAIN_COUNTS)}')
        if self.d_max not in SUPPORTED_D_MAX:
            raise ParameterException('UnsupportedDelayBound', f'd_max {self.d_max} is not one of {list(SUPPORTED_D_MAX)}')
        if self.train_count == 1 and self.disturbed:
            raise ParameterException('UndisturbableInstance', 'The single train instance has no disturbed variant')

    def conflict_target(self):
        if self.train_count >= 11:
            return 3
        if self.train_count >= 4:
            return 2
        return 1

    def to_json(self):
        return dict(
            train_count=self.train_count,
            d_max=self.d_max,
            disturbed=self.disturbed,
            seed=self.seed
        )

    @staticmethod
    def from_json(data):
        return FamilySpec(
            train_count=data['train_count'],
            d_max=data['d_max'],
            disturbed=data.get('disturbed', False),
            seed=data.get('seed', 0)
        )


def make_train(params, id, route, first_arrival, initial_delay=0):
    arrivals = {route[0]: first_arrival}
    for origin, destination in zip(route[:-1], route[1:]):
        arrivals[destination] = arrivals[origin] + params.station_stay_min + params.get_pass_min(origin, destination)
    return Train(id=id, route=route, nominal_arrivals=arrivals, initial_delay=initial_delay)


def make_appendix_instance(initial_delay=APPENDIX_DELAY, d_max=2):
    params = baltimore_params()
    trains = [
        Train(id=1, route=('PS', 'MR', 'CS'), nominal_arrivals={'PS': 14, 'MR': 17, 'CS': 32}, initial_delay=initial_delay),
        Train(id=2, route=('CS', 'MR', 'PS'), nominal_arrivals={'CS': 40, 'MR': 55, 'PS': 58}),
    ]
    return Instance(
        params=params,
        trains=trains,
        d_max=d_max,
        objective_stations=BALTIMORE_OBJECTIVE_STATIONS,
        headway_pairs=dict(),
        rollingstock_pairs={'CS': [(1, 2)]},
        disturbed=initial_delay > 0
    )


def direction(route):
    return 1 if BALTIMORE_LINE.index(route[1]) > BALTIMORE_LINE.index(route[0]) else -1


def derive_headway_pairs(trains, params, windows):
    """
    Same direction trains at a station whose admissible windows come within
    the headway of each other, ordered by nominal arrival.
    """
    pairs = dict()
    for station in BALTIMORE_LINE:
        for heading in (1, -1):
            visiting = [train for train in trains if station in train.route and direction(train.route) == heading]
            visiting.sort(key=lambda train: (train.nominal_arrivals[station], train.id))
            for index, first in enumerate(visiting):
                for second in visiting[index + 1:]:
                    first_key = (station, first.id)
                    second_key = (station, second.id)
                    if (windows.lower[second_key] - windows.upper[first_key] < params.headway_min and
                            windows.lower[first_key] - windows.upper[second_key] < params.headway_min):
                        pairs.setdefault(station, list()).append((first.id, second.id))
    return pairs


def derive_rollingstock_pairs(trains, params):
    """
    Match each terminating train to the earliest unmatched opposite direction
    train starting at the same station after preparation and stay.
    """
    turnaround = params.preparation_min + params.station_stay_min
    pairs = dict()
    for station in BALTIMORE_LINE:
        terminating = sorted([train for train in trains if train.route[-1] == station], key=lambda train: (train.nominal_arrivals[station], train.id))
        starting = sorted([train for train in trains if train.route[0] == station], key=lambda train: (train.nominal_arrivals[station], train.id))
        used = set()
        for first in terminating:
            for second in starting:
                if second.id in used or direction(second.route) == direction(first.route):
                    continue
                if second.nominal_arrivals[station] >= first.nominal_arrivals[station] + turnaround:
                    pairs.setdefault(station, list()).append((first.id, second.id))
                    used.add(second.id)
                    break
    return pairs


def build_family_instance(spec, params, rollingstock_pairs, delays):
    roster = FAMILY_ROSTERS[spec.train_count]
    trains = [
        make_train(params, id, route, first_arrival, delays.get(id, 0))
        for id, route, first_arrival in FAMILY_TIMETABLE if id in roster
    ]
    instance = Instance(
        params=params,
        trains=trains,
        d_max=spec.d_max,
        objective_stations=BALTIMORE_OBJECTIVE_STATIONS,
        rollingstock_pairs=rollingstock_pairs,
        disturbed=bool(delays)
    )
    windows = compute_time_windows(instance)
    return instance.clone(headway_pairs=derive_headway_pairs(instance.trains, params, windows))


def count_conflicts(instance):
    """
    Number of distinct train pairs in conflict when every train runs at the
    earliest time of its window.
    """
    windows = compute_time_windows(instance)
    params = instance.params
    conflicts = set()
    for station, pairs in instance.headway_pairs.items():
        for first, second in pairs:
            if abs(windows.lower[(station, first)] - windows.lower[(station, second)]) < params.headway_min:
                conflicts.add(frozenset((first, second)))
    turnaround = params.preparation_min + params.station_stay_min
    for station, pairs in instance.rollingstock_pairs.items():
        for first, second in pairs:
            if windows.lower[(station, second)] < windows.lower[(station, first)] + turnaround:
                conflicts.add(frozenset((first, second)))
    return len(conflicts)


def make_family_instance(spec, log=None):
    spec.validate()
    params = baltimore_params()
    roster = FAMILY_ROSTERS[spec.train_count]
    nominal = [make_train(params, id, route, first_arrival) for id, route, first_arrival in FAMILY_TIMETABLE if id in roster]
    rollingstock_pairs = derive_rollingstock_pairs(nominal, params)
    if not spec.disturbed:
        return build_family_instance(spec, params, rollingstock_pairs, dict())

    # Delay the first southbound train, then add seeded delays while they add conflicts.
    rng = random.Random(spec.seed)
    delays = {roster[0]: APPENDIX_DELAY}
    instance = build_family_instance(spec, params, rollingstock_pairs, delays)
    conflicts = count_conflicts(instance)
    candidates = list(roster[1:])
    rng.shuffle(candidates)
    target = spec.conflict_target()
    for id in candidates:
        if conflicts >= target:
            break
        trial_delays = dict(delays)
        trial_delays[id] = rng.choice(EXTRA_DELAYS)
        trial = build_family_instance(spec, params, rollingstock_pairs, trial_delays)
        trial_conflicts = count_conflicts(trial)
        if trial_conflicts > conflicts:
            delays, instance, conflicts = trial_delays, trial, trial_conflicts
    if log is not None:
        log.json_log({
            'msg': 'generated disturbed family instance',
            'spec': spec.to_json(),
            'delays': delays,
            'conflicts': conflicts
        })
    return instance

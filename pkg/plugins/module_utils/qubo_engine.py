#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import math

from .errors import ParameterException
from .log_utils import get_logger

try:
    import numpy as np
except ImportError:
    # Missing dependencies are handled elsewhere.
    pass

ONE_HOT = 'onehot'
PASSING = 'passing'
HEADWAY = 'headway'
ROLLING_STOCK = 'rollingstock'
OBJECTIVE = 'objective'

CONSTRAINT_FAMILIES = (ONE_HOT, PASSING, HEADWAY, ROLLING_STOCK)
PAIR_FAMILIES = (PASSING, HEADWAY, ROLLING_STOCK)

OVERLAPPING = 'Overlapping'
SPLIT = 'Split'
CUSTOM = 'Custom'

logger = get_logger('railsched.qubo_engine')


class VarCatalog:

    def __init__(self, entries):
        self.entries = [tuple(entry) for entry in entries]
        self.index = {entry: position for position, entry in enumerate(self.entries)}
        self.groups = dict()
        for position, (station, train, time) in enumerate(self.entries):
            self.groups.setdefault((station, train), list()).append(position)

    def __len__(self):
        return len(self.entries)

    def group(self, station, train):
        return self.groups.get((station, train), list())

    def lookup(self, station, train, time):
        return self.index.get((station, train, time), None)

    def encode(self, times):
        """
        One-hot bitstring of a complete timetable.
        """
        bits = [0] * len(self.entries)
        for (station, train), time in times.items():
            position = self.lookup(station, train, time)
            if position is None:
                raise ParameterException('TimeOutsideWindow', f'Time {time} of train {train} at {station} is outside its window')
            bits[position] = 1
        return bits

    def equals(self, other):
        return self.entries == other.entries

    def to_json(self):
        return [dict(index=position, station=station, train=train, time=time) for position, (station, train, time) in enumerate(self.entries)]

    @staticmethod
    def from_json(data):
        data = sorted(data, key=lambda entry: entry['index'])
        return VarCatalog([(entry['station'], entry['train'], entry['time']) for entry in data])


class PenaltyConfig:

    def __init__(self, p_sum, p_pair, regime_label=CUSTOM, overrides=None):
        self.p_sum = p_sum
        self.p_pair = p_pair
        self.regime_label = regime_label
        self.overrides = dict(overrides or dict())
        self.validate()

    def validate(self):
        if not self.p_sum > 0:
            raise ParameterException('InvalidPenalty', f'p_sum must be positive, got {self.p_sum}')
        if not self.p_pair > 0:
            raise ParameterException('InvalidPenalty', f'p_pair must be positive, got {self.p_pair}')
        for family, value in self.overrides.items():
            if family not in PAIR_FAMILIES:
                raise ParameterException('InvalidPenalty', f'Unknown penalty family {family}, expected one of {list(PAIR_FAMILIES)}')
            if not value > 0:
                raise ParameterException('InvalidPenalty', f'Penalty for {family} must be positive, got {value}')

    def pair_penalty(self, family):
        return self.overrides.get(family, self.p_pair)

    def scaled(self, factor):
        return PenaltyConfig(
            p_sum=self.p_sum * factor,
            p_pair=self.p_pair * factor,
            regime_label=CUSTOM,
            overrides={family: value * factor for family, value in self.overrides.items()}
        )

    def to_json(self):
        return dict(
            p_sum=self.p_sum,
            p_pair=self.p_pair,
            regime_label=self.regime_label,
            overrides=dict(self.overrides)
        )

    @staticmethod
    def from_json(data):
        return PenaltyConfig(
            p_sum=data['p_sum'],
            p_pair=data['p_pair'],
            regime_label=data.get('regime_label', CUSTOM),
            overrides=data.get('overrides', None)
        )

    @staticmethod
    def overlapping():
        return PenaltyConfig(4.0, 2.0, OVERLAPPING)

    @staticmethod
    def split():
        return PenaltyConfig(40.0, 20.0, SPLIT)

    @staticmethod
    def from_name(name, p_sum=None, p_pair=None, overrides=None):
        if name == 'overlapping':
            return PenaltyConfig.overlapping()
        elif name == 'split':
            return PenaltyConfig.split()
        elif name == 'custom':
            if p_sum is None or p_pair is None:
                raise ParameterException('InvalidPenalty', 'Custom penalties need both p_sum and p_pair')
            return PenaltyConfig(p_sum, p_pair, CUSTOM, overrides)
        raise ParameterException('InvalidPenalty', f'Unknown penalty regime {name}, expected overlapping, split or custom')


class QuboTerms:
    """
    Matrix elements contributed by one encoder.

    Off-diagonal entries are stored once with i < j and stand for both
    symmetric matrix elements.
    """

    def __init__(self, tag, entries=None, offset=0.0):
        self.tag = tag
        self.entries = list(entries or list())
        self.offset = offset

    def add(self, i, j, coefficient):
        if j < i:
            i, j = j, i
        self.entries.append((i, j, coefficient))

    def pairs(self):
        return [(i, j) for i, j, coefficient in self.entries]

    def element_count(self):
        return sum(1 if i == j else 2 for i, j, coefficient in self.entries)

    def __len__(self):
        return len(self.entries)


class Qubo:

    def __init__(self, n, terms, catalog=None, provenance=None, offset=0.0, element_counts=None, instance=None, penalties=None):
        self.n = n
        self.terms = dict(terms)
        self.catalog = catalog
        self.provenance = dict(provenance or dict())
        self.offset = offset
        self.element_counts = dict(element_counts or dict())
        self.instance = instance
        self.penalties = penalties
        for pair, coefficient in self.terms.items():
            if not math.isfinite(coefficient):
                raise ParameterException('NonFiniteCoefficient', f'Coefficient of element {pair} is not finite')

    def constraint_elements(self):
        return sum(self.element_counts.get(family, 0) for family in CONSTRAINT_FAMILIES)

    def nonzero_elements(self):
        return sum(1 if i == j else 2 for (i, j), coefficient in self.terms.items() if coefficient != 0)

    def pairs_with_tag(self, tag):
        return sorted(pair for pair, tags in self.provenance.items() if tag in tags and pair[0] != pair[1])

    def dense(self):
        matrix = np.zeros((self.n, self.n))
        for (i, j), coefficient in self.terms.items():
            matrix[i, j] = coefficient
            matrix[j, i] = coefficient
        return matrix

    def summary(self):
        return dict(
            nvars=self.n,
            constraint_elements=self.constraint_elements(),
            elements_by_family={family: self.element_counts.get(family, 0) for family in CONSTRAINT_FAMILIES},
            nonzero_elements=self.nonzero_elements(),
            offset=self.offset,
            penalties=self.penalties.to_json() if self.penalties is not None else None
        )


def build_catalog(instance, windows):
    entries = list()
    for train in instance.trains:
        for station in train.route:
            for time in windows.window(station, train.id):
                entries.append((station, train.id, time))
    return VarCatalog(entries)


def encode_one_hot(catalog, p_sum):
    terms = QuboTerms(ONE_HOT)
    for (station, train), group in catalog.groups.items():
        for position, i in enumerate(group):
            terms.add(i, i, -p_sum)
            for j in group[position + 1:]:
                terms.add(i, j, p_sum)
        terms.offset += p_sum
    return terms


def forbidden_pairs(first_group, second_group, catalog, violated):
    result = list()
    for i in first_group:
        for j in second_group:
            if violated(catalog.entries[i][2], catalog.entries[j][2]):
                result.append((i, j))
    return result


def encode_passing(catalog, instance, p_pair):
    params = instance.params
    terms = QuboTerms(PASSING)
    for train in instance.trains:
        for origin, destination in train.edges():
            minimum = params.station_stay_min + params.get_pass_min(origin, destination)
            pairs = forbidden_pairs(
                catalog.group(origin, train.id), catalog.group(destination, train.id), catalog,
                lambda time, other: other < time + minimum)
            for i, j in pairs:
                terms.add(i, j, p_pair)
    return terms


def encode_headway(catalog, instance, p_pair):
    headway = instance.params.headway_min
    terms = QuboTerms(HEADWAY)
    for station, pairs in sorted(instance.headway_pairs.items()):
        for first, second in pairs:
            forbidden = forbidden_pairs(
                catalog.group(station, first), catalog.group(station, second), catalog,
                lambda time, other: time - headway < other < time + headway)
            for i, j in forbidden:
                terms.add(i, j, p_pair)
    return terms


def encode_rollingstock(catalog, instance, p_pair):
    turnaround = instance.params.preparation_min + instance.params.station_stay_min
    terms = QuboTerms(ROLLING_STOCK)
    for station, pairs in sorted(instance.rollingstock_pairs.items()):
        for first, second in pairs:
            forbidden = forbidden_pairs(
                catalog.group(station, first), catalog.group(station, second), catalog,
                lambda time, other: other < time + turnaround)
            for i, j in forbidden:
                terms.add(i, j, p_pair)
    return terms


def encode_objective(catalog, instance):
    if instance.d_max <= 0:
        raise ParameterException('ZeroDelayBound', 'The QUBO objective needs d_max > 0; instances with d_max = 0 can only be solved as an ILP')
    terms = QuboTerms(OBJECTIVE)
    for position, (station, train, time) in enumerate(catalog.entries):
        if station not in instance.objective_stations:
            continue
        coefficient = (time - instance.get_train(train).nominal_arrivals[station]) / instance.d_max
        if coefficient != 0:
            terms.add(position, position, coefficient)
    return terms


def assemble(instance, windows, penalties, log=None):
    log = log or logger
    catalog = build_catalog(instance, windows)
    encoded = [
        encode_one_hot(catalog, penalties.p_sum),
        encode_passing(catalog, instance, penalties.pair_penalty(PASSING)),
        encode_headway(catalog, instance, penalties.pair_penalty(HEADWAY)),
        encode_rollingstock(catalog, instance, penalties.pair_penalty(ROLLING_STOCK)),
        encode_objective(catalog, instance),
    ]

    # Merge the encoders; shared elements keep the sum and every source tag.
    terms = dict()
    provenance = dict()
    offset = 0.0
    element_counts = dict()
    for family in encoded:
        for i, j, coefficient in family.entries:
            terms[(i, j)] = terms.get((i, j), 0.0) + coefficient
            tags = provenance.setdefault((i, j), list())
            if family.tag not in tags:
                tags.append(family.tag)
        offset += family.offset
        element_counts[family.tag] = family.element_count()
    provenance = {pair: tuple(tags) for pair, tags in provenance.items()}
    qubo = Qubo(
        n=len(catalog),
        terms=dict(sorted(terms.items())),
        catalog=catalog,
        provenance=provenance,
        offset=offset,
        element_counts=element_counts,
        instance=instance,
        penalties=penalties
    )
    log.json_log({'msg': 'assembled qubo', 'summary': qubo.summary()})
    return qubo


def check_length(qubo, bits):
    if len(bits) != qubo.n:
        raise ParameterException('LengthMismatch', f'Bitstring has {len(bits)} entries, the QUBO has {qubo.n} variables')


def evaluate(qubo, bits):
    check_length(qubo, bits)
    energy = qubo.offset
    for (i, j), coefficient in qubo.terms.items():
        if bits[i] and bits[j]:
            energy += coefficient if i == j else 2 * coefficient
    return energy


def evaluate_many(qubo, bits, matrix=None):
    """
    Energies of a (samples, n) array of bitstrings.
    """
    bits = np.asarray(bits, dtype=float)
    if bits.ndim != 2 or bits.shape[1] != qubo.n:
        raise ParameterException('LengthMismatch', f'Bitstrings have shape {bits.shape}, the QUBO has {qubo.n} variables')
    if matrix is None:
        matrix = qubo.dense()
    return ((bits @ matrix) * bits).sum(axis=1) + qubo.offset

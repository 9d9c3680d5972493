#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from numbers import Integral

from .errors import ConfigurationException


def is_minutes(value):
    return isinstance(value, Integral) and not isinstance(value, bool) and value >= 0


class Violation:

    def __init__(self, code, message, keys=None):
        self.code = code
        self.message = message
        self.keys = keys or list()

    def equals(self, other):
        return self.code == other.code and self.message == other.message and self.keys == other.keys

    def to_json(self):
        return dict(
            code=self.code,
            message=self.message,
            keys=[list(key) for key in self.keys]
        )

    @staticmethod
    def from_json(data):
        return Violation(
            code=data['code'],
            message=data['message'],
            keys=[tuple(key) for key in data.get('keys', list())]
        )


class NetworkParams:

    def __init__(self, headway_min, preparation_min, station_stay_min, pass_min):
        self.headway_min = headway_min
        self.preparation_min = preparation_min
        self.station_stay_min = station_stay_min
        self.pass_min = dict(pass_min)

    def get_pass_min(self, origin, destination):
        minutes = self.pass_min.get((origin, destination), None)
        if minutes is None:
            raise ConfigurationException('MissingPassTime', f'No minimal passing time defined for edge {origin}->{destination}')
        return minutes

    def clone(self):
        return NetworkParams(
            headway_min=self.headway_min,
            preparation_min=self.preparation_min,
            station_stay_min=self.station_stay_min,
            pass_min=dict(self.pass_min)
        )

    def equals(self, other):
        return (
            self.headway_min == other.headway_min and
            self.preparation_min == other.preparation_min and
            self.station_stay_min == other.station_stay_min and
            self.pass_min == other.pass_min
        )

    def to_json(self):
        return dict(
            headway_min=self.headway_min,
            preparation_min=self.preparation_min,
            station_stay_min=self.station_stay_min,
            pass_min=[
                {'from': origin, 'to': destination, 'minutes': minutes}
                for (origin, destination), minutes in sorted(self.pass_min.items())
            ]
        )

    @staticmethod
    def from_json(data):
        return NetworkParams(
            headway_min=data['headway_min'],
            preparation_min=data['preparation_min'],
            station_stay_min=data['station_stay_min'],
            pass_min={(edge['from'], edge['to']): edge['minutes'] for edge in data['pass_min']}
        )


class Train:

    def __init__(self, id, route, nominal_arrivals, initial_delay=0):
        self.id = id
        self.route = tuple(route)
        self.nominal_arrivals = dict(nominal_arrivals)
        self.initial_delay = initial_delay

    def edges(self):
        return list(zip(self.route[:-1], self.route[1:]))

    def position(self, station):
        return self.route.index(station)

    def clone(self, initial_delay=None):
        return Train(
            id=self.id,
            route=self.route,
            nominal_arrivals=self.nominal_arrivals,
            initial_delay=self.initial_delay if initial_delay is None else initial_delay
        )

    def equals(self, other):
        return (
            self.id == other.id and
            self.route == other.route and
            self.nominal_arrivals == other.nominal_arrivals and
            self.initial_delay == other.initial_delay
        )

    def to_json(self):
        return dict(
            id=self.id,
            route=list(self.route),
            nominal_arrivals=dict(self.nominal_arrivals),
            initial_delay=self.initial_delay
        )

    @staticmethod
    def from_json(data):
        return Train(
            id=data['id'],
            route=data['route'],
            nominal_arrivals=data['nominal_arrivals'],
            initial_delay=data.get('initial_delay', 0)
        )


class DisturbanceModel:
    """
    Finite distribution of the extra delay on a stochastic edge.

    Without weights the support is treated as uniform.
    """

    def __init__(self, support, weights=None):
        self.support = tuple(sorted(support))
        self.weights = dict(weights) if weights is not None else None

    def probability(self, delay):
        if delay not in self.support:
            return 0.0
        if self.weights is None:
            return 1.0 / len(self.support)
        return self.weights.get(delay, 0.0)

    def distribution(self):
        return {delay: self.probability(delay) for delay in self.support}

    def validate(self):
        violations = list()
        if not self.support:
            violations.append(Violation('InvalidDisturbanceModel', 'Disturbance support is empty'))
        for delay in self.support:
            if not is_minutes(delay):
                violations.append(Violation('InvalidDisturbanceModel', f'Disturbance delay {delay} is not a non-negative integer'))
        if self.weights is not None:
            unknown = sorted(set(self.weights) - set(self.support))
            if unknown:
                violations.append(Violation('InvalidDisturbanceModel', f'Weights given for delays {unknown} outside the support'))
            if any(weight < 0 for weight in self.weights.values()):
                violations.append(Violation('InvalidDisturbanceModel', 'Disturbance weights must be non-negative'))
            total = sum(self.weights.values())
            if abs(total - 1.0) > 1e-9:
                violations.append(Violation('InvalidDisturbanceModel', f'Disturbance weights sum to {total}, expected 1'))
        return violations

    def equals(self, other):
        return self.support == other.support and self.weights == other.weights

    def to_json(self):
        result = dict(support=list(self.support))
        if self.weights is not None:
            result['weights'] = {str(delay): weight for delay, weight in sorted(self.weights.items())}
        return result

    @staticmethod
    def from_json(data):
        weights = data.get('weights', None)
        if weights is not None:
            weights = {int(delay): weight for delay, weight in weights.items()}
        return DisturbanceModel(support=data['support'], weights=weights)


def canonical_pairs(pairs):
    result = dict()
    for station, station_pairs in pairs.items():
        station_pairs = sorted(set((first, second) for first, second in station_pairs))
        if station_pairs:
            result[station] = tuple(station_pairs)
    return result


class Instance:

    def __init__(self, params, trains, d_max, objective_stations, headway_pairs=None, rollingstock_pairs=None, disturbed=False, disturbance=None):
        self.params = params
        self.trains = sorted(trains, key=lambda train: train.id)
        self.d_max = d_max
        self.objective_stations = frozenset(objective_stations)
        self.headway_pairs = canonical_pairs(headway_pairs or dict())
        self.rollingstock_pairs = canonical_pairs(rollingstock_pairs or dict())
        self.disturbed = disturbed
        self.disturbance = disturbance
        self.trains_by_id = {train.id: train for train in self.trains}

    def get_train(self, id):
        return self.trains_by_id[id]

    def stations(self):
        result = list()
        for train in self.trains:
            for station in train.route:
                if station not in result:
                    result.append(station)
        return result

    def keys(self):
        """
        All (station, train) pairs in train order, then route order.
        """
        return [(station, train.id) for train in self.trains for station in train.route]

    def undisturbed(self):
        return Instance(
            params=self.params.clone(),
            trains=[train.clone(initial_delay=0) for train in self.trains],
            d_max=self.d_max,
            objective_stations=self.objective_stations,
            headway_pairs=self.headway_pairs,
            rollingstock_pairs=self.rollingstock_pairs,
            disturbed=False,
            disturbance=self.disturbance
        )

    def clone(self, **changes):
        fields = dict(
            params=self.params.clone(),
            trains=[train.clone() for train in self.trains],
            d_max=self.d_max,
            objective_stations=self.objective_stations,
            headway_pairs=self.headway_pairs,
            rollingstock_pairs=self.rollingstock_pairs,
            disturbed=self.disturbed,
            disturbance=self.disturbance
        )
        fields.update(changes)
        return Instance(**fields)

    def equals(self, other):
        return self.to_json() == other.to_json()

    def to_json(self):
        result = dict(
            params=self.params.to_json(),
            trains=[train.to_json() for train in self.trains],
            d_max=self.d_max,
            objective_stations=sorted(self.objective_stations),
            headway_pairs={station: [list(pair) for pair in pairs] for station, pairs in self.headway_pairs.items()},
            rollingstock_pairs={station: [list(pair) for pair in pairs] for station, pairs in self.rollingstock_pairs.items()},
            disturbed=self.disturbed
        )
        if self.disturbance is not None:
            result['disturbance'] = self.disturbance.to_json()
        return result

    @staticmethod
    def from_json(data):
        disturbance = data.get('disturbance', None)
        return Instance(
            params=NetworkParams.from_json(data['params']),
            trains=[Train.from_json(train) for train in data['trains']],
            d_max=data['d_max'],
            objective_stations=data['objective_stations'],
            headway_pairs={station: [tuple(pair) for pair in pairs] for station, pairs in data['headway_pairs'].items()},
            rollingstock_pairs={station: [tuple(pair) for pair in pairs] for station, pairs in data['rollingstock_pairs'].items()},
            disturbed=data.get('disturbed', False),
            disturbance=DisturbanceModel.from_json(disturbance) if disturbance is not None else None
        )


class TimeWindows:

    def __init__(self, lower, upper):
        self.lower = dict(lower)
        self.upper = dict(upper)

    def keys(self):
        return list(self.lower.keys())

    def window(self, station, train):
        return range(self.lower[(station, train)], self.upper[(station, train)] + 1)

    def size(self, station, train):
        return self.upper[(station, train)] - self.lower[(station, train)] + 1

    def equals(self, other):
        return self.lower == other.lower and self.upper == other.upper

    def to_json(self):
        return [
            dict(station=station, train=train, lower=self.lower[(station, train)], upper=self.upper[(station, train)])
            for (station, train) in self.keys()
        ]


def compute_time_windows(instance):
    params = instance.params
    lower = dict()
    upper = dict()
    for train in instance.trains:
        previous = None
        for station in train.route:
            nominal = train.nominal_arrivals[station]
            if previous is None:
                earliest = nominal + train.initial_delay
            else:
                minimum = params.station_stay_min + params.get_pass_min(previous, station)
                earliest = max(nominal, lower[(previous, train.id)] + minimum)
            lower[(station, train.id)] = earliest
            upper[(station, train.id)] = earliest + instance.d_max
            previous = station
    return TimeWindows(lower, upper)


def validate_instance(instance):
    violations = list()
    params = instance.params

    # Check the network parameters.
    if not isinstance(instance.d_max, Integral) or instance.d_max < 0:
        violations.append(Violation('NegativeDelayBound', f'd_max must be a non-negative integer, got {instance.d_max}'))
    for name in ['headway_min', 'preparation_min', 'station_stay_min']:
        value = getattr(params, name)
        if not is_minutes(value):
            violations.append(Violation('InvalidDuration', f'{name} must be a non-negative integer, got {value}'))
    for (origin, destination), minutes in sorted(params.pass_min.items()):
        if not is_minutes(minutes):
            violations.append(Violation('InvalidDuration', f'pass_min for edge {origin}->{destination} must be a non-negative integer, got {minutes}'))

    # Check every train.
    seen = set()
    for train in instance.trains:
        if train.id in seen:
            violations.append(Violation('DuplicateTrain', f'Train {train.id} is defined more than once'))
        seen.add(train.id)
        if len(set(train.route)) != len(train.route):
            violations.append(Violation('RepeatedStation', f'Train {train.id} visits a station more than once'))
        if set(train.nominal_arrivals) != set(train.route):
            violations.append(Violation('NominalArrivalMismatch', f'Nominal arrivals of train {train.id} are not defined exactly on its route'))
            continue
        arrivals = [train.nominal_arrivals[station] for station in train.route]
        if any(not is_minutes(arrival) for arrival in arrivals):
            violations.append(Violation('InvalidDuration', f'Nominal arrivals of train {train.id} must be non-negative integers'))
        elif any(later <= earlier for earlier, later in zip(arrivals[:-1], arrivals[1:])):
            violations.append(Violation('NonMonotoneTimetable', f'Nominal arrivals of train {train.id} do not strictly increase along its route'))
        if not is_minutes(train.initial_delay):
            violations.append(Violation('NegativeInitialDelay', f'Initial delay of train {train.id} must be a non-negative integer, got {train.initial_delay}'))
        for origin, destination in train.edges():
            if (origin, destination) not in params.pass_min:
                violations.append(Violation('MissingPassTime', f'No minimal passing time defined for edge {origin}->{destination}', [(origin, destination)]))

    # Check the train pairs reference trains visiting the station.
    for family, pairs in [('headway', instance.headway_pairs), ('rolling stock', instance.rollingstock_pairs)]:
        for station, station_pairs in sorted(pairs.items()):
            for pair in station_pairs:
                for id in pair:
                    train = instance.trains_by_id.get(id, None)
                    if train is None or station not in train.route:
                        violations.append(Violation('InvalidTrainPair', f'The {family} pair {pair} at {station} references train {id} which does not visit {station}', [(station, id)]))

    # Check the objective stations.
    stations = set(instance.stations())
    for station in sorted(instance.objective_stations - stations):
        violations.append(Violation('UnknownObjectiveStation', f'Objective station {station} does not appear in any route'))

    # Check the disturbance model, if any.
    if instance.disturbance is not None:
        violations.extend(instance.disturbance.validate())
    return violations

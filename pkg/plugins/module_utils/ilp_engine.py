#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import itertools
from concurrent.futures import ThreadPoolExecutor

from .errors import ParameterException
from .log_utils import get_logger

OPTIMAL = 'Optimal'
INFEASIBLE = 'Infeasible'

PASSING = 'Passing'
STOCHASTIC_PASSING = 'StochasticPassing'
HEADWAY = 'Headway'
ROLLING_STOCK = 'RollingStock'

logger = get_logger('railsched.ilp_engine')


class IlpConstraint:
    """
    Separation constraint between two time variables.

    A plain constraint requires t[after] - t[before] >= minimum. A disjunctive
    constraint requires |t[after] - t[before]| >= minimum, choosing the order
    through the order variable y[station, before, after].
    """

    def __init__(self, tag, before, after, minimum, disjunctive=False):
        self.tag = tag
        self.before = before
        self.after = after
        self.minimum = minimum
        self.disjunctive = disjunctive

    def keys(self):
        return (self.before, self.after)

    def satisfied(self, times):
        difference = times[self.after] - times[self.before]
        if self.disjunctive:
            return abs(difference) >= self.minimum
        return difference >= self.minimum

    def order_key(self):
        if not self.disjunctive:
            return None
        return (self.before[0], self.before[1], self.after[1])

    def describe(self):
        (station, train), (other_station, other_train) = self.before, self.after
        left = f't[{other_station},{other_train}] - t[{station},{train}]'
        if self.disjunctive:
            left = f'|{left}|'
        return f'{self.tag}: {left} >= {self.minimum}'

    def to_json(self):
        return dict(
            tag=self.tag,
            before=list(self.before),
            after=list(self.after),
            minimum=self.minimum,
            disjunctive=self.disjunctive
        )


class IlpModel:

    def __init__(self, time_vars, order_vars, constraints, objective, nominal, divisor):
        self.time_vars = dict(time_vars)
        self.order_vars = list(order_vars)
        self.constraints = list(constraints)
        self.objective = dict(objective)
        self.nominal = dict(nominal)
        self.divisor = divisor

    def constraints_by_tag(self, tag):
        return [constraint for constraint in self.constraints if constraint.tag == tag]

    def objective_value(self, times):
        return self.delay_units(times) / self.divisor

    def delay_units(self, times):
        return sum(times[key] - self.nominal[key] for key in self.objective)

    def fix(self, times):
        """
        Return a copy with the given variables restricted to single values.
        """
        time_vars = dict(self.time_vars)
        for key, value in times.items():
            if key in time_vars:
                lower, upper = time_vars[key]
                if lower <= value <= upper:
                    time_vars[key] = (value, value)
                else:
                    time_vars[key] = (value, value - 1)
        return IlpModel(time_vars, self.order_vars, self.constraints, self.objective, self.nominal, self.divisor)

    def to_json(self):
        return dict(
            time_vars=[dict(station=key[0], train=key[1], lower=lower, upper=upper) for key, (lower, upper) in self.time_vars.items()],
            order_vars=[list(key) for key in self.order_vars],
            constraints=[constraint.to_json() for constraint in self.constraints],
            objective=[dict(station=key[0], train=key[1], coefficient=coefficient / self.divisor) for key, coefficient in self.objective.items()]
        )


class IlpSolution:

    def __init__(self, times, objective_value, status):
        self.times = dict(times)
        self.objective_value = objective_value
        self.status = status

    def is_optimal(self):
        return self.status == OPTIMAL

    def to_json(self):
        return dict(
            status=self.status,
            objective_value=self.objective_value,
            times=[dict(station=station, train=train, time=time) for (station, train), time in sorted(self.times.items(), key=lambda item: (item[0][1], item[0][0]))]
        )

    @staticmethod
    def from_json(data):
        return IlpSolution(
            times={(entry['station'], entry['train']): entry['time'] for entry in data['times']},
            objective_value=data['objective_value'],
            status=data['status']
        )


def build_constraints(instance, w_realization=None):
    """
    Tagged separation constraints of an instance, independent of windows.
    """
    w_realization = dict(w_realization or dict())
    for edge, delay in w_realization.items():
        if delay < 0:
            raise ParameterException('NegativeDisturbance', f'Disturbance {delay} on edge {edge[0]}->{edge[1]} is negative')
    params = instance.params
    constraints = list()

    # Passing between consecutive stations; departure is arrival plus the stay.
    for train in instance.trains:
        for origin, destination in train.edges():
            minimum = params.station_stay_min + params.get_pass_min(origin, destination)
            tag = PASSING
            if (origin, destination) in w_realization:
                minimum += w_realization[(origin, destination)]
                tag = STOCHASTIC_PASSING
            constraints.append(IlpConstraint(tag, (origin, train.id), (destination, train.id), minimum))

    # Headway between trains heading the same way.
    for station, pairs in sorted(instance.headway_pairs.items()):
        for first, second in pairs:
            constraints.append(IlpConstraint(HEADWAY, (station, first), (station, second), params.headway_min, disjunctive=True))

    # Rolling stock turnaround.
    for station, pairs in sorted(instance.rollingstock_pairs.items()):
        for first, second in pairs:
            constraints.append(IlpConstraint(ROLLING_STOCK, (station, first), (station, second), params.preparation_min + params.station_stay_min))
    return constraints


def build_ilp(instance, windows, w_realization=None):
    constraints = build_constraints(instance, w_realization)

    # Time variables in train order, then route order.
    time_vars = dict()
    nominal = dict()
    for train in instance.trains:
        for station in train.route:
            time_vars[(station, train.id)] = (windows.lower[(station, train.id)], windows.upper[(station, train.id)])
            nominal[(station, train.id)] = train.nominal_arrivals[station]

    order_vars = [constraint.order_key() for constraint in constraints if constraint.disjunctive]
    objective = {key: 1 for key in time_vars if key[0] in instance.objective_stations}
    return IlpModel(time_vars, order_vars, constraints, objective, nominal, max(instance.d_max, 1))


def connected_components(model):
    parent = {key: key for key in model.time_vars}

    def find(key):
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    for constraint in model.constraints:
        first, second = find(constraint.before), find(constraint.after)
        if first != second:
            parent[second] = first
    components = dict()
    for key in model.time_vars:
        components.setdefault(find(key), list()).append(key)
    return list(components.values())


class BranchAndBound:
    """
    Depth first branch and bound over one connected component.

    Variables are branched in the model order with smaller times first, and
    only strictly better incumbents are accepted, so the solution found is
    the lexicographically smallest optimum.
    """

    def __init__(self, model, keys):
        self.model = model
        self.keys = keys
        self.constraints = dict((key, list()) for key in keys)
        for constraint in model.constraints:
            if constraint.before in self.constraints:
                self.constraints[constraint.before].append(constraint)
                self.constraints[constraint.after].append(constraint)
        self.best = None
        self.best_units = None
        self.nodes = 0

    def units(self, key, value):
        if key not in self.model.objective:
            return 0
        return value - self.model.nominal[key]

    def bound(self, depth, domains):
        return sum(self.units(key, domains[key][0]) for key in self.keys[depth:])

    def solve(self):
        domains = dict()
        for key in self.keys:
            lower, upper = self.model.time_vars[key]
            domains[key] = list(range(lower, upper + 1))
            if not domains[key]:
                return None
        self.search(0, dict(), domains, 0)
        return self.best

    def search(self, depth, times, domains, units):
        self.nodes += 1
        if depth == len(self.keys):
            if self.best_units is None or units < self.best_units:
                self.best = dict(times)
                self.best_units = units
            return
        key = self.keys[depth]
        for value in domains[key]:
            value_units = units + self.units(key, value)
            times[key] = value
            pruned = self.forward_check(key, times, domains)
            if pruned is not None:
                if self.best_units is None or value_units + self.bound(depth + 1, pruned) < self.best_units:
                    self.search(depth + 1, times, pruned, value_units)
            del times[key]

    def forward_check(self, key, times, domains):
        """
        Filter the domains of unassigned neighbours; None when one empties.
        """
        result = domains
        for constraint in self.constraints[key]:
            other = constraint.after if constraint.before == key else constraint.before
            if other in times:
                if not constraint.satisfied(times):
                    return None
                continue
            if result is domains:
                result = dict(domains)
            filtered = list()
            for value in result[other]:
                times[other] = value
                if constraint.satisfied(times):
                    filtered.append(value)
            del times[other]
            if not filtered:
                return None
            result[other] = filtered
        return result


def solve_exact(model, log=None):
    log = log or logger
    for key, (lower, upper) in model.time_vars.items():
        if upper < lower:
            log.json_log({'msg': 'empty time variable domain', 'key': list(key)})
            return IlpSolution(dict(), None, INFEASIBLE)

    # The objective is separable, so independent components are solved apart.
    order = {key: index for index, key in enumerate(model.time_vars)}
    times = dict()
    nodes = 0
    for component in connected_components(model):
        component.sort(key=lambda key: order[key])
        search = BranchAndBound(model, component)
        best = search.solve()
        nodes += search.nodes
        if best is None:
            log.json_log({'msg': 'component infeasible', 'component': [list(key) for key in component], 'nodes': nodes})
            return IlpSolution(dict(), None, INFEASIBLE)
        times.update(best)
    times = {key: times[key] for key in model.time_vars}
    objective_value = model.objective_value(times)
    log.json_log({'msg': 'solved ilp', 'objective_value': objective_value, 'nodes': nodes})
    return IlpSolution(times, objective_value, OPTIMAL)


def realizations(model, edges):
    edges = sorted(edges)
    for values in itertools.product(model.support, repeat=len(edges)):
        yield dict(zip(edges, values))


def sweep_stochastic(instance, windows, model, edges, workers=1, log=None):
    realization_list = list(realizations(model, edges))

    def solve(realization):
        return (realization, solve_exact(build_ilp(instance, windows, realization), log=log))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(solve, realization_list))
    return [solve(realization) for realization in realization_list]


def realization_probability(model, realization):
    result = 1.0
    for w in realization.values():
        result *= model.probability(w)
    return result


def sweep_to_json(model, sweep):
    return [
        dict(
            realization=[{'from': edge[0], 'to': edge[1], 'w': w} for edge, w in sorted(realization.items())],
            probability=realization_probability(model, realization),
            solution=result.to_json()
        )
        for realization, result in sweep
    ]

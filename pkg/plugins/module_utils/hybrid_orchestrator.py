#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from concurrent.futures import ThreadPoolExecutor

from .analysis import check_timetable, disturbance_distance, decode, feasibility_mask, passing_histogram, timetable_objective
from .errors import DecompositionException, InfeasibleException
from .ilp_engine import build_ilp, solve_exact
from .log_utils import get_logger
from .network_model import Instance, Train, compute_time_windows
from .qubo_engine import PenaltyConfig, Qubo, assemble
from .samplers import ENUMERATE, make_config, sample_qubo

logger = get_logger('railsched.hybrid_orchestrator')


class Decomposition:

    def __init__(self, stochastic, deterministic, boundary, segments, zone):
        self.stochastic = stochastic
        self.deterministic = deterministic
        self.boundary = list(boundary)
        self.segments = dict(segments)
        self.zone = frozenset(zone)

    def deterministic_keys(self, key):
        """
        Keys of the deterministic component standing for an original key.
        """
        station, train = key
        return [
            (station, segment)
            for segment, original in sorted(self.segments.items())
            if original == train and station in self.deterministic.get_train(segment).route
        ]

    def original_key(self, key):
        station, segment = key
        return (station, self.segments[segment])

    def to_json(self):
        return dict(
            zone=sorted(self.zone),
            stochastic=self.stochastic.to_json(),
            deterministic=self.deterministic.to_json(),
            boundary=[list(key) for key in self.boundary],
            segments=[dict(segment=segment, train=train) for segment, train in sorted(self.segments.items())]
        )


def is_contiguous(route, zone):
    positions = [position for position, station in enumerate(route) if station in zone]
    return positions == list(range(positions[0], positions[-1] + 1)) if positions else True


def outer_segments(route, zone):
    """
    Maximal runs of stations outside the zone, each extended by the adjacent
    zone station that joins it to the stochastic component.
    """
    segments = list()
    current = list()
    for position, station in enumerate(route):
        if station in zone:
            if current:
                current.append(station)
                segments.append(current)
                current = list()
            continue
        if not current and position > 0 and route[position - 1] in zone:
            current.append(route[position - 1])
        current.append(station)
    if current:
        segments.append(current)
    return segments


def sub_train(train, id, route, windows):
    return Train(
        id=id,
        route=route,
        nominal_arrivals={station: train.nominal_arrivals[station] for station in route},
        initial_delay=windows.lower[(route[0], train.id)] - train.nominal_arrivals[route[0]]
    )


def split_pairs(pairs, stations, ids):
    result = dict()
    for station, station_pairs in pairs.items():
        if station not in stations:
            continue
        for first, second in station_pairs:
            result.setdefault(station, list()).append((ids[(station, first)], ids[(station, second)]))
    return result


def decompose(instance, stochastic_stations):
    zone = frozenset(stochastic_stations)
    if not zone:
        raise DecompositionException('EmptyZone', 'The stochastic zone must contain at least one station')
    windows = compute_time_windows(instance)

    # Split every train into its zone segment and the outer segments.
    stochastic_trains = list()
    deterministic_trains = list()
    segments = dict()
    stochastic_ids = dict()
    deterministic_ids = dict()
    boundary = list()
    next_id = max([train.id for train in instance.trains] + [0]) + 1
    for train in instance.trains:
        inside = [station for station in train.route if station in zone]
        if not is_contiguous(train.route, zone):
            raise DecompositionException('NonContiguousZone', f'The route of train {train.id} leaves and re-enters the stochastic zone')
        if inside:
            stochastic_trains.append(sub_train(train, train.id, inside, windows))
            for station in inside:
                stochastic_ids[(station, train.id)] = train.id
        for index, route in enumerate(outer_segments(train.route, zone)):
            id = train.id
            if index > 0:
                id, next_id = next_id, next_id + 1
            deterministic_trains.append(sub_train(train, id, route, windows))
            segments[id] = train.id
            for station in route:
                if station in zone:
                    if (station, train.id) not in boundary:
                        boundary.append((station, train.id))
                else:
                    deterministic_ids[(station, train.id)] = id

    stochastic = Instance(
        params=instance.params.clone(),
        trains=stochastic_trains,
        d_max=instance.d_max,
        objective_stations=instance.objective_stations & zone,
        headway_pairs=split_pairs(instance.headway_pairs, zone, stochastic_ids),
        rollingstock_pairs=split_pairs(instance.rollingstock_pairs, zone, stochastic_ids),
        disturbed=instance.disturbed,
        disturbance=instance.disturbance
    )
    outside = frozenset(instance.stations()) - zone
    deterministic = Instance(
        params=instance.params.clone(),
        trains=deterministic_trains,
        d_max=instance.d_max,
        objective_stations=instance.objective_stations - zone,
        headway_pairs=split_pairs(instance.headway_pairs, outside, deterministic_ids),
        rollingstock_pairs=split_pairs(instance.rollingstock_pairs, outside, deterministic_ids),
        disturbed=instance.disturbed
    )
    return Decomposition(stochastic, deterministic, boundary, segments, zone)


class PortfolioEntry:

    def __init__(self, stochastic_times, deterministic, times, stochastic_objective, joint_objective, iteration):
        self.stochastic_times = dict(stochastic_times)
        self.deterministic = deterministic
        self.times = dict(times)
        self.stochastic_objective = stochastic_objective
        self.joint_objective = joint_objective
        self.iteration = iteration

    def to_json(self):
        return dict(
            iteration=self.iteration,
            joint_objective=self.joint_objective,
            stochastic_objective=self.stochastic_objective,
            deterministic_objective=self.deterministic.objective_value,
            times=[
                dict(station=station, train=train, time=time)
                for (station, train), time in sorted(self.times.items(), key=lambda item: (item[0][1], item[0][0]))
            ]
        )


class HybridResult:

    def __init__(self, portfolio, iterations, converged, history, diagnostics=None):
        self.portfolio = sorted(portfolio, key=lambda entry: (entry.joint_objective, entry.iteration))
        self.iterations = iterations
        self.converged = converged
        self.history = list(history)
        self.diagnostics = dict(diagnostics or dict())

    def best(self):
        return self.portfolio[0] if self.portfolio else None

    def to_json(self):
        return dict(
            iterations=self.iterations,
            converged=self.converged,
            best_joint_objective=self.best().joint_objective if self.portfolio else None,
            portfolio=[entry.to_json() for entry in self.portfolio],
            history=self.history,
            diagnostics=self.diagnostics
        )


def biased_qubo(qubo, bias):
    terms = dict(qubo.terms)
    for i, value in bias.items():
        terms[(i, i)] = terms.get((i, i), 0.0) + value
    return Qubo(qubo.n, dict(sorted(terms.items())), qubo.catalog, qubo.provenance, qubo.offset, qubo.element_counts, qubo.instance, qubo.penalties)


def select_representatives(reports, boundary, k):
    """
    Best sub-solutions by stochastic objective with distinct boundary times;
    the biased sampled energy breaks ties.
    """
    seen = set()
    result = list()
    ranked = sorted(reports, key=lambda report: (
        report.objective, report.energy if report.energy is not None else 0.0, [report.times[key] for key in boundary]
    ))
    for report in ranked:
        boundary_times = tuple(report.times[key] for key in boundary)
        if boundary_times in seen:
            continue
        seen.add(boundary_times)
        result.append(report)
        if len(result) == k:
            break
    return result


def feasible_reports(qubo, sampleset, instance):
    if not len(sampleset):
        return list()
    mask = feasibility_mask(qubo, sampleset.bit_matrix(), instance=instance)
    return [
        decode(qubo, record.bits, instance, record.energy, record.count)
        for record, feasible in zip(sampleset.records, mask) if feasible
    ]


def sample_feasible(qubo, backend, config, instance, log):
    sampleset = sample_qubo(qubo, backend, config, log=log)
    reports = feasible_reports(qubo, sampleset, instance)
    if reports or backend == ENUMERATE:
        return sampleset, reports, False

    # Retry once with doubled shots.
    log.json_log({'msg': 'no feasible sub-solutions, retrying with doubled shots', 'shots': config.shots})
    sampleset = sample_qubo(qubo, backend, config.with_shots(2 * config.shots), log=log)
    return sampleset, feasible_reports(qubo, sampleset, instance), True


def statistics_check(instance, reports, threshold):
    if threshold is None or instance.disturbance is None:
        return None
    distances = dict()
    for train in instance.trains:
        for edge in train.edges():
            if f'{edge[0]}->{edge[1]}' in distances:
                continue
            histogram = passing_histogram(reports, edge)
            if histogram.empty:
                continue
            minimum = instance.params.get_pass_min(*edge)
            distances[f'{edge[0]}->{edge[1]}'] = disturbance_distance(histogram, minimum, instance.disturbance)
    accepted = all(distance <= threshold for distance in distances.values())
    return dict(distances=distances, threshold=threshold, accepted=accepted)


def run_hybrid(
        instance, zone, backend=ENUMERATE, budget=5, k_representatives=3, penalties=None,
        sampler_config=None, disturbance_threshold=None, workers=1, log=None):
    log = log or logger
    decomposition = decompose(instance, zone)
    boundary = decomposition.boundary
    penalties = penalties or PenaltyConfig.split()
    if sampler_config is None and backend != ENUMERATE:
        sampler_config = make_config(backend)

    # Compile the stochastic component once; feedback only adds diagonal bias.
    stochastic = decomposition.stochastic
    qubo = assemble(stochastic, compute_time_windows(stochastic), penalties, log=log)
    deterministic = decomposition.deterministic
    deterministic_model = build_ilp(deterministic, compute_time_windows(deterministic))
    log.json_log({'msg': 'decomposed instance', 'zone': sorted(decomposition.zone), 'boundary': boundary, 'nvars': qubo.n})

    portfolio = list()
    history = list()
    bias = dict()
    best = None
    converged = False
    iteration = 0
    while iteration < budget:
        iteration += 1
        config = sampler_config.with_seed(sampler_config.seed + iteration - 1) if sampler_config is not None else None
        sampleset, reports, retried = sample_feasible(biased_qubo(qubo, bias), backend, config, stochastic, log)
        if not reports:
            diagnostic = dict(iteration=iteration, samples=sampleset.shots(), retried=retried, backend=backend)
            log.json_log({'msg': 'aborting hybrid loop', 'diagnostic': diagnostic})
            if not portfolio:
                raise InfeasibleException('NoFeasibleSubSolutions', f'No feasible stochastic sub-solution in iteration {iteration} after retrying with doubled shots')
            history.append(dict(iteration=iteration, accepted=False, aborted=True, diagnostic=diagnostic))
            break
        statistics = statistics_check(stochastic, reports, disturbance_threshold)

        # Solve the deterministic side with the boundary of each representative fixed.
        representatives = select_representatives(reports, boundary, k_representatives)

        def solve(report):
            fixed = dict()
            for key in boundary:
                for deterministic_key in decomposition.deterministic_keys(key):
                    fixed[deterministic_key] = report.times[key]
            return (report, solve_exact(deterministic_model.fix(fixed), log=log))

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                solved = list(executor.map(solve, representatives))
        else:
            solved = [solve(report) for report in representatives]

        # Recombine and keep the jointly conflict-free entries.
        entries = list()
        costs = list()
        for report, solution in solved:
            if not solution.is_optimal():
                costs.append((report, None))
                continue
            times = dict(report.times)
            for key, time in solution.times.items():
                times[decomposition.original_key(key)] = time
            if set(times) != set(instance.keys()) or check_timetable(instance, times):
                costs.append((report, None))
                continue
            costs.append((report, solution.objective_value))
            entries.append(PortfolioEntry(report.times, solution, times, report.objective, timetable_objective(instance, times), iteration))

        iteration_best = min([entry.joint_objective for entry in entries], default=None)
        if statistics is not None and not statistics['accepted']:
            iteration_best = None
        accepted = iteration_best is not None and (best is None or iteration_best < best)
        history.append(dict(
            iteration=iteration,
            samples=sampleset.shots(),
            feasible=sum(report.count for report in reports),
            representatives=len(representatives),
            entries=len(entries),
            best_joint_objective=iteration_best,
            accepted=accepted,
            retried=retried,
            statistics=statistics
        ))
        log.json_log({'msg': 'hybrid iteration', 'history': history[-1]})
        if accepted:
            best = iteration_best
            portfolio.extend(entries)
            if best <= 0:
                converged = True
                break
        elif best is not None:
            converged = True
            break

        # Feed the observed deterministic cost back onto the boundary variables.
        known = [cost for report, cost in costs if cost is not None]
        floor = min(known) if known else 0.0
        for report, cost in costs:
            excess = penalties.p_pair if cost is None else cost - floor
            for key in boundary:
                index = qubo.catalog.lookup(key[0], key[1], report.times[key])
                bias[index] = max(bias.get(index, 0.0), excess)

    if not portfolio:
        raise InfeasibleException('EmptyPortfolio', f'No jointly feasible timetable found in {iteration} iterations')
    return HybridResult(portfolio, iteration, converged, history, dict(zone=sorted(decomposition.zone), boundary=[list(key) for key in boundary], nvars=qubo.n))

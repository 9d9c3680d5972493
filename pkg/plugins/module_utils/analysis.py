#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from .errors import InfeasibleException, ParameterException
from .ilp_engine import PASSING, build_constraints
from .log_utils import get_logger
from .network_model import Violation, compute_time_windows
from .qubo_engine import HEADWAY as HEADWAY_TAG
from .qubo_engine import PASSING as PASSING_TAG
from .qubo_engine import ROLLING_STOCK as ROLLING_STOCK_TAG
from .qubo_engine import OVERLAPPING, SPLIT, PenaltyConfig, assemble, check_length

try:
    import numpy as np
except ImportError:
    # Missing dependencies are handled elsewhere.
    pass

ONE_HOT = 'OneHot'
OVERTAKE = 'Overtake'

LINEAR = 'linear'
EXPONENTIAL = 'exponential'

# (logical, physical) qubit counts of two published embeddings.
EMBEDDING_ANCHORS = ((42, 85), (182, 503))
EMBEDDING_REFERENCE_SIZE = 196

MASK_CHUNK = 1 << 14

logger = get_logger('railsched.analysis')


class SolutionReport:

    def __init__(self, times, violations, objective, passing_times, energy=None, count=1, bits=None):
        self.times = dict(times)
        self.violations = list(violations)
        self.objective = objective
        self.passing_times = dict(passing_times)
        self.energy = energy
        self.count = count
        self.bits = bits

    @property
    def feasible_strict(self):
        return not self.violations

    @property
    def feasible_relaxed(self):
        return all(violation.code == PASSING for violation in self.violations)

    def violations_with_tag(self, tag):
        return [violation for violation in self.violations if violation.code == tag]

    def to_json(self):
        result = dict(
            times=[
                dict(station=station, train=train, time=time)
                for (station, train), time in self.times.items()
            ],
            feasible_strict=self.feasible_strict,
            feasible_relaxed=self.feasible_relaxed,
            violations=[violation.to_json() for violation in self.violations],
            objective=self.objective,
            passing_times=[
                {'train': train, 'from': origin, 'to': destination, 'minutes': minutes}
                for (train, (origin, destination)), minutes in sorted(self.passing_times.items())
            ],
            count=self.count
        )
        if self.energy is not None:
            result['energy'] = self.energy
        if self.bits is not None:
            result['bits'] = ''.join(str(bit) for bit in self.bits)
        return result


def find_overtakes(instance, times):
    """
    Same direction order reversals between consecutive shared stations.
    """
    violations = list()
    for index, train in enumerate(instance.trains):
        for other in instance.trains[index + 1:]:
            for origin, destination in train.edges():
                if (origin, destination) not in other.edges():
                    continue
                keys = [(origin, train.id), (origin, other.id), (destination, train.id), (destination, other.id)]
                if any(times.get(key, None) is None for key in keys):
                    continue
                before = times[keys[0]] - times[keys[1]]
                after = times[keys[2]] - times[keys[3]]
                if before * after < 0:
                    violations.append(Violation(OVERTAKE, f'Trains {train.id} and {other.id} swap order between {origin} and {destination}', keys))
    return violations


def check_timetable(instance, times, relaxed=False):
    """
    Constraint violations of a timetable; keys missing from times are skipped.
    """
    violations = list()
    for constraint in build_constraints(instance):
        if relaxed and constraint.tag == PASSING:
            continue
        if times.get(constraint.before, None) is None or times.get(constraint.after, None) is None:
            continue
        if not constraint.satisfied(times):
            violations.append(Violation(constraint.tag, f'Violated {constraint.describe()}', [constraint.before, constraint.after]))
    violations.extend(find_overtakes(instance, times))
    return violations


def compute_passing_times(instance, times):
    result = dict()
    stay = instance.params.station_stay_min
    for train in instance.trains:
        for origin, destination in train.edges():
            arrival = times.get((origin, train.id), None)
            next_arrival = times.get((destination, train.id), None)
            if arrival is not None and next_arrival is not None:
                result[(train.id, (origin, destination))] = next_arrival - arrival - stay
    return result


def timetable_objective(instance, times):
    if instance.d_max <= 0:
        raise ParameterException('ZeroDelayBound', 'The objective of a sampled timetable needs d_max > 0')
    total = 0
    for train in instance.trains:
        for station in train.route:
            if station in instance.objective_stations:
                total += times[(station, train.id)] - train.nominal_arrivals[station]
    return total / instance.d_max


def get_instance(qubo, instance):
    instance = instance or qubo.instance
    if instance is None:
        raise ParameterException('MissingInstance', 'Decoding needs the instance the QUBO was compiled from')
    return instance


def decode(qubo, bits, instance=None, energy=None, count=1):
    check_length(qubo, bits)
    instance = get_instance(qubo, instance)
    catalog = qubo.catalog

    # Read one time per (station, train) group.
    times = dict()
    violations = list()
    for key in instance.keys():
        selected = [catalog.entries[i][2] for i in catalog.group(*key) if bits[i]]
        if len(selected) == 1:
            times[key] = selected[0]
        else:
            times[key] = None
            violations.append(Violation(ONE_HOT, f'{len(selected)} times selected for train {key[1]} at {key[0]}', [key]))

    # Check the pairwise families among the defined times.
    violations.extend(check_timetable(instance, times))
    objective = None
    if not any(violation.code == ONE_HOT for violation in violations):
        objective = timetable_objective(instance, times)
    return SolutionReport(
        times=times,
        violations=violations,
        objective=objective,
        passing_times=compute_passing_times(instance, times),
        energy=energy,
        count=count,
        bits=tuple(int(bit) for bit in bits)
    )


def decode_sampleset(qubo, sampleset, instance=None):
    return [decode(qubo, record.bits, instance, record.energy, record.count) for record in sampleset.records]


class Histogram:

    def __init__(self, counts, edge=None, relaxed=False):
        self.counts = dict(sorted(counts.items()))
        self.edge = edge
        self.relaxed = relaxed

    @property
    def empty(self):
        return self.total() == 0

    def total(self):
        return sum(self.counts.values())

    def mode(self):
        if self.empty:
            return None
        return max(self.counts.items(), key=lambda item: (item[1], -item[0]))[0]

    def probabilities(self):
        total = self.total()
        return {bin_start: count / total for bin_start, count in self.counts.items()}

    def support(self):
        return sorted(bin_start for bin_start, count in self.counts.items() if count > 0)

    def to_json(self):
        return dict(
            edge=list(self.edge) if self.edge is not None else None,
            relaxed=self.relaxed,
            empty=self.empty,
            counts=[dict(bin_start=bin_start, count=count) for bin_start, count in self.counts.items()]
        )


def passing_histogram(reports, edge, relaxed=False):
    edge = tuple(edge)
    counts = dict()
    for report in reports:
        if not (report.feasible_relaxed if relaxed else report.feasible_strict):
            continue
        for (train, report_edge), minutes in report.passing_times.items():
            if report_edge == edge:
                counts[minutes] = counts.get(minutes, 0) + report.count
    histogram = Histogram(counts, edge, relaxed)
    if histogram.empty:
        logger.json_log({'msg': 'empty passing histogram', 'edge': list(edge), 'relaxed': relaxed})
    return histogram


def constraint_pair_arrays(qubo, relaxed=False):
    tags = [HEADWAY_TAG, ROLLING_STOCK_TAG] if relaxed else [PASSING_TAG, HEADWAY_TAG, ROLLING_STOCK_TAG]
    pairs = sorted(set(pair for tag in tags for pair in qubo.pairs_with_tag(tag)))
    first = np.array([i for i, j in pairs], dtype=np.int64)
    second = np.array([j for i, j in pairs], dtype=np.int64)
    return first, second


def group_matrix(qubo):
    groups = list(qubo.catalog.groups.values()) if qubo.catalog is not None else list()
    matrix = np.zeros((qubo.n, len(groups)), dtype=np.int64)
    for column, group in enumerate(groups):
        matrix[group, column] = 1
    return matrix


def feasibility_mask(qubo, bits, relaxed=False, instance=None, groups=None, pairs=None):
    """
    Feasibility of a (samples, n) bit array.

    One-hot groups and QUBO constraint pairs are checked with array operations,
    and only the surviving rows are decoded to look for overtakes.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if groups is None:
        groups = group_matrix(qubo)
    if pairs is None:
        pairs = constraint_pair_arrays(qubo, relaxed)
    first, second = pairs
    mask = np.all(bits @ groups == 1, axis=1)
    if first.size:
        mask &= ~np.any(bits[:, first] & bits[:, second], axis=1)
    instance = instance or qubo.instance
    if instance is not None:
        for row in np.flatnonzero(mask):
            report = decode(qubo, bits[row], instance)
            if not (report.feasible_relaxed if relaxed else report.feasible_strict):
                mask[row] = False
    return mask


class SpectrumSummary:

    def __init__(self, min_feasible, max_feasible, min_infeasible, feasible_energies, histogram, states):
        self.min_feasible = min_feasible
        self.max_feasible = max_feasible
        self.min_infeasible = min_infeasible
        self.feasible_energies = dict(feasible_energies)
        self.histogram = list(histogram)
        self.states = states

    @property
    def gap(self):
        if self.min_infeasible is None or self.max_feasible is None:
            return None
        return self.min_infeasible - self.max_feasible

    @property
    def regime(self):
        if self.min_infeasible is None:
            return SPLIT
        if self.max_feasible is None:
            return OVERLAPPING
        return SPLIT if self.gap > 0 else OVERLAPPING

    def feasible_objectives(self):
        return sorted(self.feasible_energies)

    def to_json(self):
        return dict(
            states=self.states,
            min_feasible=self.min_feasible,
            max_feasible=self.max_feasible,
            min_infeasible=self.min_infeasible,
            gap=self.gap,
            regime=self.regime,
            feasible_energies=[dict(energy=energy, multiplicity=count) for energy, count in sorted(self.feasible_energies.items())],
            histogram=self.histogram
        )


def spectrum_summary(spectrum, qubo, instance=None, bins=50, log=None):
    log = log or logger
    groups = group_matrix(qubo)
    pairs = constraint_pair_arrays(qubo)
    feasible = np.zeros(len(spectrum), dtype=bool)
    for start in range(0, len(spectrum), MASK_CHUNK):
        stop = min(start + MASK_CHUNK, len(spectrum))
        feasible[start:stop] = feasibility_mask(qubo, spectrum.bit_matrix(start, stop), instance=instance, groups=groups, pairs=pairs)

    energies = np.asarray(spectrum.energies, dtype=float)
    feasible_energies = energies[feasible]
    infeasible_energies = energies[~feasible]
    levels, multiplicity = np.unique(np.round(feasible_energies, 9), return_counts=True)

    # Energy histogram of both sets over a shared binning.
    histogram = list()
    if energies.size:
        edges = np.histogram_bin_edges(energies, bins=bins)
        feasible_counts, _ = np.histogram(feasible_energies, bins=edges)
        infeasible_counts, _ = np.histogram(infeasible_energies, bins=edges)
        histogram = [
            dict(bin_start=float(start), bin_end=float(end), feasible=int(good), infeasible=int(bad))
            for start, end, good, bad in zip(edges[:-1], edges[1:], feasible_counts, infeasible_counts)
        ]

    summary = SpectrumSummary(
        min_feasible=float(feasible_energies.min()) if feasible_energies.size else None,
        max_feasible=float(feasible_energies.max()) if feasible_energies.size else None,
        min_infeasible=float(infeasible_energies.min()) if infeasible_energies.size else None,
        feasible_energies={float(level): int(count) for level, count in zip(levels, multiplicity)},
        histogram=histogram,
        states=len(spectrum)
    )
    log.json_log({'msg': 'summarised spectrum', 'states': len(spectrum), 'gap': summary.gap, 'regime': summary.regime})
    return summary


def feasible_fraction(sampleset, qubo, instance=None, relaxed=False):
    shots = sampleset.shots()
    if shots == 0:
        return 0.0
    mask = feasibility_mask(qubo, sampleset.bit_matrix(), relaxed=relaxed, instance=instance)
    return float(np.sum(sampleset.counts()[mask]) / shots)


class ScalingFit:

    def __init__(self, model, slope, intercept, r2, points):
        self.model = model
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.points = [tuple(point) for point in points]

    def predict(self, size):
        value = self.slope * size + self.intercept
        if self.model == EXPONENTIAL:
            return float(np.exp(value))
        return float(value)

    def to_json(self):
        return dict(
            model=self.model,
            slope=self.slope,
            intercept=self.intercept,
            r2=self.r2,
            points=[list(point) for point in self.points]
        )


def fit_scaling(points, model=EXPONENTIAL, min_points=3):
    if model not in (LINEAR, EXPONENTIAL):
        raise ParameterException('UnknownScalingModel', f'Unknown scaling model {model}, expected {LINEAR} or {EXPONENTIAL}')
    if len(points) < min_points:
        raise ParameterException('TooFewPoints', f'A scaling fit needs at least {min_points} points, got {len(points)}')
    sizes = np.array([size for size, value in points], dtype=float)
    values = np.array([value for size, value in points], dtype=float)
    if model == EXPONENTIAL:
        if np.any(values <= 0):
            raise ParameterException('NonPositiveValue', 'Exponential fits need strictly positive values')
        values = np.log(values)
    slope, intercept = np.polyfit(sizes, values, 1)
    residual = values - (slope * sizes + intercept)
    total = np.sum((values - values.mean()) ** 2)
    r2 = 1.0 if total == 0 else float(1.0 - np.sum(residual ** 2) / total)
    return ScalingFit(model, float(slope), float(intercept), r2, points)


def estimate_physical_qubits(logical, fit=None):
    if fit is None:
        fit = fit_scaling(EMBEDDING_ANCHORS, LINEAR, min_points=2)
    return dict(
        logical=logical,
        physical=fit.predict(logical),
        reference_logical=EMBEDDING_REFERENCE_SIZE,
        reference_physical=fit.predict(EMBEDDING_REFERENCE_SIZE),
        fit=fit.to_json()
    )


def export_train_diagram(report, instance):
    if not report.feasible_relaxed:
        raise InfeasibleException('InfeasibleReport', 'Only strict or relaxed feasible reports can be drawn', report.violations)
    relaxed = not report.feasible_strict
    stay = instance.params.station_stay_min
    rows = list()
    for train in instance.trains:
        for station in train.route:
            arrival = report.times[(station, train.id)]
            rows.append(dict(train=train.id, station=station, t_in=arrival, t_out=arrival + stay, relaxed=relaxed))
    return rows


def total_variation_distance(first, second):
    """
    Half the L1 distance between two normalised histograms or distributions.
    """
    first = histogram_probabilities(first)
    second = histogram_probabilities(second)
    support = set(first) | set(second)
    return 0.5 * sum(abs(first.get(key, 0.0) - second.get(key, 0.0)) for key in support)


def histogram_probabilities(value):
    if isinstance(value, Histogram):
        if value.empty:
            raise ParameterException('EmptyHistogram', 'Cannot compare an empty histogram')
        return value.probabilities()
    total = sum(value.values())
    if total <= 0:
        raise ParameterException('EmptyHistogram', 'Cannot compare an empty distribution')
    return {key: weight / total for key, weight in value.items()}


def excess_distribution(histogram, minimum):
    """
    Distribution of passing time above a minimum passing time.
    """
    return {bin_start - minimum: probability for bin_start, probability in histogram.probabilities().items()}


def disturbance_distance(histogram, minimum, model):
    return total_variation_distance(excess_distribution(histogram, minimum), model.distribution())


def analyse_sampleset(instance, sampleset, edge, relaxed=False):
    """
    Decode a sample set against the instance it was compiled from and
    summarise feasibility, the best timetable and the passing-time
    histogram at the given edge.
    """
    qubo = assemble(instance, compute_time_windows(instance), PenaltyConfig.split())
    if len(sampleset) and len(sampleset.records[0].bits) != qubo.n:
        raise ParameterException('LengthMismatch', f'Samples have {len(sampleset.records[0].bits)} bits, the instance compiles to {qubo.n} variables')
    reports = decode_sampleset(qubo, sampleset, instance)
    histogram = passing_histogram(reports, edge, relaxed)
    feasible = [report for report in reports if report.feasible_strict]
    best = min(feasible, key=lambda report: (report.objective, report.bits)) if feasible else None
    document = dict(
        nvars=qubo.n,
        trains=len(instance.trains),
        shots=sampleset.shots(),
        distinct=len(sampleset),
        sampler_meta=sampleset.sampler_meta,
        feasible_fraction=feasible_fraction(sampleset, qubo, instance),
        relaxed_fraction=feasible_fraction(sampleset, qubo, instance, relaxed=True),
        best_objective=best.objective if best is not None else None,
        best=best.to_json() if best is not None else None,
        histogram=histogram.to_json()
    )
    return document, histogram, best

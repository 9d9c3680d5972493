#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import math

from .errors import CapacityException, ParameterException
from .ising_engine import ising_energies, to_ising
from .log_utils import get_logger
from .qubo_engine import evaluate_many

try:
    import numpy as np
except ImportError:
    # Missing dependencies are handled elsewhere.
    pass

ENUMERATE = 'enumerate'
ANNEAL = 'anneal'
QAOA = 'qaoa'
BACKENDS = (ENUMERATE, ANNEAL, QAOA)

SPECTRUM_CAP = 24
STATEVECTOR_CAP = 20
ENUMERATION_CHUNK = 1 << 16
TWO_QUBIT_ERROR = 0.0425

logger = get_logger('railsched.samplers')


class SampleRecord:

    def __init__(self, bits, energy, count):
        self.bits = tuple(int(bit) for bit in bits)
        self.energy = float(energy)
        self.count = int(count)

    def bitstring(self):
        return ''.join(str(bit) for bit in self.bits)

    def to_json(self):
        return dict(bits=self.bitstring(), energy=self.energy, count=self.count)


class SampleSet:

    def __init__(self, records, sampler_meta=None):
        self.records = sorted(records, key=lambda record: (record.energy, record.bits))
        self.sampler_meta = dict(sampler_meta or dict())

    def __len__(self):
        return len(self.records)

    def shots(self):
        return sum(record.count for record in self.records)

    def best(self):
        return self.records[0] if self.records else None

    def mean_energy(self):
        shots = self.shots()
        if shots == 0:
            return None
        return sum(record.energy * record.count for record in self.records) / shots

    def bit_matrix(self):
        return np.array([record.bits for record in self.records], dtype=np.int8).reshape(len(self.records), -1)

    def counts(self):
        return np.array([record.count for record in self.records], dtype=np.int64)

    def to_json(self):
        return dict(
            sampler_meta=dict(self.sampler_meta),
            samples=[record.to_json() for record in self.records]
        )

    @staticmethod
    def from_arrays(bits, energies, sampler_meta=None):
        """
        Aggregate repeated bitstrings of a (shots, n) array into records.
        """
        bits = np.asarray(bits, dtype=np.int8)
        if bits.shape[0] == 0:
            return SampleSet(list(), sampler_meta)
        unique_bits, first_index, counts = np.unique(bits, axis=0, return_index=True, return_counts=True)
        energies = np.asarray(energies, dtype=float)
        records = [
            SampleRecord(row, energies[index], count)
            for row, index, count in zip(unique_bits, first_index, counts)
        ]
        return SampleSet(records, sampler_meta)


class Spectrum:
    """
    Every assignment of an n variable QUBO, sorted by energy.

    State k sets variable i when bit i of k is set.
    """

    def __init__(self, n, states, energies):
        self.n = n
        self.states = states
        self.energies = energies

    def __len__(self):
        return len(self.states)

    def bits(self, position):
        state = int(self.states[position])
        return tuple((state >> i) & 1 for i in range(self.n))

    def bit_matrix(self, start=0, stop=None):
        states = self.states[start:stop]
        return ((states[:, None] >> np.arange(self.n)) & 1).astype(np.int8)

    def __iter__(self):
        for position in range(len(self.states)):
            yield (self.bits(position), float(self.energies[position]))

    def to_sampleset(self, limit=None):
        stop = len(self.states) if limit is None else min(limit, len(self.states))
        records = [SampleRecord(self.bits(position), self.energies[position], 1) for position in range(stop)]
        return SampleSet(records, dict(backend=ENUMERATE, shots=stop, states=len(self.states), truncated=stop < len(self.states)))


class AnnealConfig:

    def __init__(self, shots=1000, sweeps=1000, beta_min=0.1, beta_max=10.0, seed=0, pair_moves=True):
        self.shots = shots
        self.sweeps = sweeps
        self.beta_min = beta_min
        self.beta_max = beta_max
        self.seed = seed
        self.pair_moves = pair_moves
        self.validate()

    def validate(self):
        if self.shots < 1:
            raise ParameterException('InvalidShots', f'shots must be at least 1, got {self.shots}')
        if self.sweeps < 1:
            raise ParameterException('InvalidSweeps', f'sweeps must be at least 1, got {self.sweeps}')
        if not 0 < self.beta_min < self.beta_max:
            raise ParameterException('InvalidBetaSchedule', f'Need 0 < beta_min < beta_max, got {self.beta_min} and {self.beta_max}')

    def betas(self):
        if self.sweeps == 1:
            return np.array([self.beta_max])
        return np.geomspace(self.beta_min, self.beta_max, self.sweeps)

    def with_shots(self, shots):
        return AnnealConfig(shots, self.sweeps, self.beta_min, self.beta_max, self.seed, self.pair_moves)

    def with_seed(self, seed):
        return AnnealConfig(self.shots, self.sweeps, self.beta_min, self.beta_max, seed, self.pair_moves)

    def to_json(self):
        return dict(
            shots=self.shots,
            sweeps=self.sweeps,
            beta_min=self.beta_min,
            beta_max=self.beta_max,
            seed=self.seed,
            pair_moves=self.pair_moves
        )

    @staticmethod
    def from_json(data):
        return AnnealConfig(**data)


class QaoaConfig:

    def __init__(self, layers=1, shots=1024, max_evaluations=50, noise_lambda=0.0, seed=0, tolerance=1e-3):
        self.layers = layers
        self.shots = shots
        self.max_evaluations = max_evaluations
        self.noise_lambda = noise_lambda
        self.seed = seed
        self.tolerance = tolerance
        self.validate()

    def validate(self):
        if self.layers < 1:
            raise ParameterException('InvalidLayers', f'layers must be at least 1, got {self.layers}')
        if self.shots < 1:
            raise ParameterException('InvalidShots', f'shots must be at least 1, got {self.shots}')
        if self.max_evaluations < 1:
            raise ParameterException('InvalidEvaluations', f'max_evaluations must be at least 1, got {self.max_evaluations}')
        if not 0 <= self.noise_lambda <= 1:
            raise ParameterException('InvalidNoise', f'noise_lambda must lie in [0, 1], got {self.noise_lambda}')

    def optimizer(self):
        return dict(method='pattern-search', max_evaluations=self.max_evaluations, tolerance=self.tolerance)

    def with_shots(self, shots):
        return QaoaConfig(self.layers, shots, self.max_evaluations, self.noise_lambda, self.seed, self.tolerance)

    def with_seed(self, seed):
        return QaoaConfig(self.layers, self.shots, self.max_evaluations, self.noise_lambda, seed, self.tolerance)

    def to_json(self):
        return dict(
            layers=self.layers,
            shots=self.shots,
            max_evaluations=self.max_evaluations,
            noise_lambda=self.noise_lambda,
            seed=self.seed,
            tolerance=self.tolerance
        )

    @staticmethod
    def from_json(data):
        return QaoaConfig(**data)


def enumerate_spectrum(qubo, cap=SPECTRUM_CAP, log=None):
    log = log or logger
    if qubo.n > cap:
        raise CapacityException('SpectrumCapacity', f'Enumerating {qubo.n} variables exceeds the cap of {cap}; use the anneal or qaoa backends instead')
    total = 1 << qubo.n
    matrix = qubo.dense()
    shifts = np.arange(qubo.n)
    energies = np.empty(total)
    for start in range(0, total, ENUMERATION_CHUNK):
        stop = min(start + ENUMERATION_CHUNK, total)
        states = np.arange(start, stop, dtype=np.int64)
        bits = (states[:, None] >> shifts) & 1
        energies[start:stop] = evaluate_many(qubo, bits, matrix)
    order = np.argsort(energies, kind='stable')
    log.json_log({'msg': 'enumerated spectrum', 'nvars': qubo.n, 'states': total, 'ground_energy': float(energies[order[0]])})
    return Spectrum(qubo.n, order.astype(np.int64), energies[order])


def simulated_anneal(ising, config, log=None):
    log = log or logger
    rng = np.random.default_rng(config.seed)
    shots, n = config.shots, ising.n
    fields = ising.field_vector()
    couplings = ising.coupling_matrix()
    pairs = ising.nonzero_couplings() if config.pair_moves else list()
    spins = rng.choice(np.array([-1.0, 1.0]), size=(shots, n))
    local = spins @ couplings + fields

    def flip(rows, i):
        old = spins[rows, i]
        spins[rows, i] = -old
        local[rows] -= 2.0 * old[:, None] * couplings[i]

    def accept(delta, beta):
        return (delta <= 0) | (rng.random(shots) < np.exp(-beta * np.maximum(delta, 0.0)))

    for beta in config.betas():

        # Single spin flips.
        for i in range(n):
            delta = -2.0 * spins[:, i] * local[:, i]
            rows = accept(delta, beta)
            if rows.any():
                flip(rows, i)

        # Joint flips of coupled pairs.
        for i, j in pairs:
            delta = -2.0 * spins[:, i] * local[:, i] - 2.0 * spins[:, j] * local[:, j] + 4.0 * couplings[i, j] * spins[:, i] * spins[:, j]
            rows = accept(delta, beta)
            if rows.any():
                flip(rows, i)
                flip(rows, j)

    energies = ising_energies(ising, spins, fields, couplings)
    bits = ((spins + 1) / 2).astype(np.int8)
    meta = dict(backend=ANNEAL, seed=config.seed, shots=shots, parameters=config.to_json())
    result = SampleSet.from_arrays(bits, energies, meta)
    log.json_log({'msg': 'annealed', 'parameters': config.to_json(), 'best_energy': result.best().energy, 'mean_energy': result.mean_energy()})
    return result


def qaoa_gate_counts(ising, layers):
    return dict(
        single_qubit=ising.n + layers * (len(ising.nonzero_fields()) + ising.n),
        two_qubit=layers * len(ising.nonzero_couplings())
    )


def calibrated_noise(ising, layers, two_qubit_error=TWO_QUBIT_ERROR):
    two_qubit = qaoa_gate_counts(ising, layers)['two_qubit']
    return 1.0 - (1.0 - two_qubit_error) ** two_qubit


def check_statevector(ising):
    if ising.n > STATEVECTOR_CAP:
        raise CapacityException('StatevectorCapacity', f'Simulating {ising.n} qubits exceeds the statevector cap of {STATEVECTOR_CAP}')


def cost_diagonal(ising):
    """
    Energy of every computational basis state; qubit i holds bit i.
    """
    states = np.arange(1 << ising.n, dtype=np.int64)
    spins = [(2 * ((states >> i) & 1) - 1).astype(float) for i in range(ising.n)]
    diagonal = np.full(1 << ising.n, float(ising.offset))
    for i, value in ising.fields.items():
        diagonal += value * spins[i]
    for (i, j), value in ising.couplings.items():
        diagonal += value * spins[i] * spins[j]
    return diagonal


def apply_mixer(state, n, beta):
    cos, sin = math.cos(beta), -1j * math.sin(beta)
    for qubit in range(n):
        view = state.reshape(-1, 2, 1 << qubit)
        low = view[:, 0, :].copy()
        high = view[:, 1, :].copy()
        view[:, 0, :] = cos * low + sin * high
        view[:, 1, :] = sin * low + cos * high
    return state


def qaoa_state(diagonal, n, betas, gammas):
    if len(betas) != len(gammas):
        raise ParameterException('AngleMismatch', f'Got {len(betas)} betas and {len(gammas)} gammas')
    state = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
    for beta, gamma in zip(betas, gammas):
        state *= np.exp(-1j * gamma * diagonal)
        state = apply_mixer(state, n, beta)
    return state


def qaoa_expectation(ising, betas, gammas, diagonal=None):
    check_statevector(ising)
    if diagonal is None:
        diagonal = cost_diagonal(ising)
    state = qaoa_state(diagonal, ising.n, betas, gammas)
    return float(np.sum(np.abs(state) ** 2 * diagonal))


def qaoa_probabilities(ising, betas, gammas, noise_lambda=0.0, diagonal=None):
    check_statevector(ising)
    if diagonal is None:
        diagonal = cost_diagonal(ising)
    state = qaoa_state(diagonal, ising.n, betas, gammas)
    probabilities = (1.0 - noise_lambda) * np.abs(state) ** 2 + noise_lambda / (1 << ising.n)
    return probabilities / probabilities.sum()


class PatternSearch:
    """
    Coordinate pattern search with step halving and random restarts.
    """

    def __init__(self, steps, max_evaluations=50, tolerance=1e-3):
        self.steps = np.asarray(steps, dtype=float)
        self.max_evaluations = max_evaluations
        self.tolerance = tolerance
        self.evaluations = 0

    def evaluate(self, function, point):
        self.evaluations += 1
        return function(point)

    def minimize(self, function, start, restart):
        best_point, best_value = None, None
        exhausted = True
        point = np.asarray(start, dtype=float)
        while self.evaluations < self.max_evaluations:
            value = self.evaluate(function, point)
            steps = self.steps.copy()
            converged = False
            while self.evaluations < self.max_evaluations:
                changed = False
                for index in range(point.size):
                    for sign in (-1.0, 1.0):
                        if self.evaluations >= self.max_evaluations:
                            break
                        candidate = point.copy()
                        candidate[index] += sign * steps[index]
                        candidate_value = self.evaluate(function, candidate)
                        if candidate_value < value:
                            point, value = candidate, candidate_value
                            changed = True
                if not changed:
                    steps /= 2
                    if steps.max() < self.tolerance:
                        converged = True
                        break
            if best_value is None or value < best_value:
                best_point, best_value = point, value
            if not converged:
                break
            exhausted = False
            point = np.asarray(restart(), dtype=float)
        return best_point, best_value, exhausted


def qaoa_optimize_and_sample(ising, config, log=None):
    log = log or logger
    check_statevector(ising)
    rng = np.random.default_rng(config.seed)
    n, layers = ising.n, config.layers
    diagonal = cost_diagonal(ising)

    # Angles are (gamma_1..gamma_p, beta_1..beta_p); gamma scales with the energy spread.
    scale = max([abs(value) for value in ising.fields.values()] + [abs(value) for value in ising.couplings.values()] + [1e-9])
    gamma_step = math.pi / (4.0 * scale)
    beta_step = math.pi / 8.0

    def objective(angles):
        return qaoa_expectation(ising, angles[layers:], angles[:layers], diagonal)

    def restart():
        return np.concatenate([rng.uniform(-4 * gamma_step, 4 * gamma_step, layers), rng.uniform(0.0, math.pi, layers)])

    start = np.concatenate([rng.uniform(-gamma_step / 2, gamma_step / 2, layers), rng.uniform(math.pi / 16, 3 * math.pi / 16, layers)])
    search = PatternSearch([gamma_step] * layers + [beta_step] * layers, config.max_evaluations, config.tolerance)
    angles, expectation, exhausted = search.minimize(objective, start, restart)
    gammas, betas = angles[:layers], angles[layers:]

    # Sample the noisy final distribution.
    probabilities = qaoa_probabilities(ising, betas, gammas, config.noise_lambda, diagonal)
    states = rng.choice(1 << n, size=config.shots, p=probabilities)
    bits = ((states[:, None] >> np.arange(n)) & 1).astype(np.int8)
    meta = dict(
        backend=QAOA,
        seed=config.seed,
        shots=config.shots,
        parameters=config.to_json(),
        optimizer=config.optimizer(),
        evaluations=search.evaluations,
        expectation=expectation,
        gammas=[float(gamma) for gamma in gammas],
        betas=[float(beta) for beta in betas],
        gate_counts=qaoa_gate_counts(ising, layers),
        optimizer_exhausted=exhausted
    )
    result = SampleSet.from_arrays(bits, diagonal[states], meta)
    log.json_log({'msg': 'qaoa sampled', 'meta': meta})
    return result


def make_config(backend, options=None):
    options = dict(options or dict())
    if backend == ANNEAL:
        return AnnealConfig(**options)
    elif backend == QAOA:
        return QaoaConfig(**options)
    elif backend == ENUMERATE:
        return None
    raise ParameterException('UnknownBackend', f'Unknown backend {backend}, expected one of {list(BACKENDS)}')


def sample_qubo(qubo, backend, config=None, limit=None, log=None):
    """
    Sample a QUBO with one backend; energies are re-evaluated on the QUBO.
    """
    if backend == ENUMERATE:
        return enumerate_spectrum(qubo, log=log).to_sampleset(limit)
    elif backend == ANNEAL:
        result = simulated_anneal(to_ising(qubo), config or AnnealConfig(), log=log)
    elif backend == QAOA:
        result = qaoa_optimize_and_sample(to_ising(qubo), config or QaoaConfig(), log=log)
    else:
        raise ParameterException('UnknownBackend', f'Unknown backend {backend}, expected one of {list(BACKENDS)}')
    if not len(result):
        return result
    energies = evaluate_many(qubo, result.bit_matrix())
    records = [SampleRecord(record.bits, energy, record.count) for record, energy in zip(result.records, energies)]
    return SampleSet(records, result.sampler_meta)

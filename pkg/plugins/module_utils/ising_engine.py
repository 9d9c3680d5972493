#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

from .errors import ParameterException

try:
    import numpy as np
except ImportError:
    # Missing dependencies are handled elsewhere.
    pass


class IsingModel:

    def __init__(self, n, couplings, fields, offset=0.0):
        self.n = n
        self.couplings = dict(couplings)
        self.fields = dict(fields)
        self.offset = offset

    def field_vector(self):
        vector = np.zeros(self.n)
        for i, value in self.fields.items():
            vector[i] = value
        return vector

    def coupling_matrix(self):
        """
        Symmetric coupling matrix with zero diagonal; each J appears twice.
        """
        matrix = np.zeros((self.n, self.n))
        for (i, j), value in self.couplings.items():
            matrix[i, j] = value
            matrix[j, i] = value
        return matrix

    def nonzero_couplings(self):
        return sorted(pair for pair, value in self.couplings.items() if value != 0)

    def nonzero_fields(self):
        return sorted(i for i, value in self.fields.items() if value != 0)

    def equals(self, other):
        return (
            self.n == other.n and
            self.couplings == other.couplings and
            self.fields == other.fields and
            self.offset == other.offset
        )

    def to_json(self):
        return dict(
            n=self.n,
            couplings=[dict(i=i, j=j, value=value) for (i, j), value in sorted(self.couplings.items())],
            fields=[dict(i=i, value=value) for i, value in sorted(self.fields.items())],
            offset=self.offset
        )

    @staticmethod
    def from_json(data):
        return IsingModel(
            n=data['n'],
            couplings={(entry['i'], entry['j']): entry['value'] for entry in data['couplings']},
            fields={entry['i']: entry['value'] for entry in data['fields']},
            offset=data.get('offset', 0.0)
        )


def to_ising(qubo):
    # x = (1 + s) / 2
    couplings = dict()
    fields = dict()
    offset = qubo.offset
    for (i, j), coefficient in qubo.terms.items():
        if i == j:
            fields[i] = fields.get(i, 0.0) + coefficient / 2
            offset += coefficient / 2
        else:
            couplings[(i, j)] = couplings.get((i, j), 0.0) + coefficient / 2
            fields[i] = fields.get(i, 0.0) + coefficient / 2
            fields[j] = fields.get(j, 0.0) + coefficient / 2
            offset += coefficient / 2
    return IsingModel(qubo.n, couplings, fields, offset)


def to_qubo_terms(model):
    """
    Map back to upper triangular QUBO terms and offset via s = 2x - 1.
    """
    terms = dict()
    offset = model.offset
    for i, value in model.fields.items():
        terms[(i, i)] = terms.get((i, i), 0.0) + 2 * value
        offset -= value
    for (i, j), value in model.couplings.items():
        terms[(i, j)] = terms.get((i, j), 0.0) + 2 * value
        terms[(i, i)] = terms.get((i, i), 0.0) - 2 * value
        terms[(j, j)] = terms.get((j, j), 0.0) - 2 * value
        offset += value
    return terms, offset


def check_spins(model, spins):
    if len(spins) != model.n:
        raise ParameterException('LengthMismatch', f'Spin vector has {len(spins)} entries, the model has {model.n} spins')
    for position, spin in enumerate(spins):
        if spin not in (-1, 1):
            raise ParameterException('InvalidSpin', f'Spin {position} has value {spin}, expected -1 or +1')


def ising_energy(model, spins):
    check_spins(model, spins)
    energy = model.offset
    for i, value in model.fields.items():
        energy += value * spins[i]
    for (i, j), value in model.couplings.items():
        energy += value * spins[i] * spins[j]
    return energy


def ising_energies(model, spins, fields=None, couplings=None):
    """
    Energies of a (samples, n) array of spins.
    """
    spins = np.asarray(spins, dtype=float)
    if fields is None:
        fields = model.field_vector()
    if couplings is None:
        couplings = model.coupling_matrix()
    return 0.5 * ((spins @ couplings) * spins).sum(axis=1) + spins @ fields + model.offset


def bits_to_spins(bits):
    return [2 * bit - 1 for bit in bits]


def spins_to_bits(spins):
    return [(spin + 1) // 2 for spin in spins]

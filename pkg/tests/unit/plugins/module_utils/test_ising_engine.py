#
# SPDX-License-Identifier: Apache-2.0
#

import numpy as np
import pytest

from plugins.module_utils.errors import ParameterException
from plugins.module_utils.ising_engine import (IsingModel, bits_to_spins, check_spins, ising_energies, ising_energy, spins_to_bits, to_ising,
                                               to_qubo_terms)
from plugins.module_utils.instance_factory import FamilySpec, make_family_instance
from plugins.module_utils.network_model import compute_time_windows
from plugins.module_utils.qubo_engine import PenaltyConfig, assemble, evaluate, evaluate_many


def test_ising_matches_qubo_energies(split_qubo):
    model = to_ising(split_qubo)
    rng = np.random.default_rng(5)
    for bits in rng.integers(0, 2, size=(25, split_qubo.n)):
        bits = [int(bit) for bit in bits]
        assert ising_energy(model, bits_to_spins(bits)) == pytest.approx(evaluate(split_qubo, bits))


def test_vectorised_ising_energies(split_qubo):
    model = to_ising(split_qubo)
    rng = np.random.default_rng(6)
    spins = rng.choice([-1, 1], size=(10, model.n))
    energies = ising_energies(model, spins)
    for row, energy in zip(spins, energies):
        assert energy == pytest.approx(ising_energy(model, [int(spin) for spin in row]))


def test_optimum_keeps_its_energy(split_qubo, appendix_optimum):
    bits = split_qubo.catalog.encode(appendix_optimum)
    assert ising_energy(to_ising(split_qubo), bits_to_spins(bits)) == pytest.approx(6.0)


def test_back_to_qubo_terms(split_qubo):
    terms, offset = to_qubo_terms(to_ising(split_qubo))
    assert offset == pytest.approx(split_qubo.offset)
    for pair, coefficient in split_qubo.terms.items():
        assert terms[pair] == pytest.approx(coefficient)


def test_spin_conversion():
    assert bits_to_spins([0, 1, 1]) == [-1, 1, 1]
    assert spins_to_bits([-1, 1, -1]) == [0, 1, 0]


def test_couplings_and_fields():
    model = IsingModel(3, {(0, 1): 1.5, (1, 2): 0.0}, {2: -1.0}, 0.25)
    assert model.nonzero_couplings() == [(0, 1)]
    assert model.nonzero_fields() == [2]
    assert ising_energy(model, [1, 1, 1]) == pytest.approx(0.75)


@pytest.mark.parametrize('spins, code', [
    ([1, 1], 'LengthMismatch'),
    ([1, 0, 1], 'InvalidSpin'),
])
def test_invalid_spins(spins, code):
    model = IsingModel(3, dict(), dict())
    with pytest.raises(ParameterException) as e:
        check_spins(model, spins)
    assert e.value.code == code


def family_qubo(spec):
    instance = make_family_instance(spec)
    return assemble(instance, compute_time_windows(instance), PenaltyConfig.overlapping())


def test_ising_matches_qubo_on_every_state():
    qubo = family_qubo(FamilySpec(1, 6))
    assert qubo.n <= 16
    states = np.arange(1 << qubo.n, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(qubo.n)) & 1).astype(np.int8)
    difference = evaluate_many(qubo, bits) - ising_energies(to_ising(qubo), 2.0 * bits - 1.0)
    assert np.abs(difference).max() <= 1e-9


def test_ising_matches_qubo_on_the_largest_family():
    qubo = family_qubo(FamilySpec(12, 6))
    assert qubo.n == 196
    bits = np.random.default_rng(7).integers(0, 2, size=(10000, qubo.n)).astype(np.int8)
    difference = evaluate_many(qubo, bits) - ising_energies(to_ising(qubo), 2.0 * bits - 1.0)
    assert np.abs(difference).max() <= 1e-9

#
# SPDX-License-Identifier: Apache-2.0
#

import pytest

from plugins.module_utils.errors import ParameterException
from plugins.module_utils.samplers import ANNEAL, ENUMERATE, QAOA
from plugins.module_utils.utils import get_sampler_config_by_params


def test_missing_sampler_parameters_use_defaults():
    config = get_sampler_config_by_params(ANNEAL, dict(seed=1, shots=None, sweeps=None))
    assert (config.shots, config.sweeps, config.beta_min, config.beta_max) == (1000, 1000, 0.1, 10.0)
    assert config.pair_moves
    assert get_sampler_config_by_params(ENUMERATE, dict()) is None


def test_explicit_qaoa_parameters_are_kept():
    config = get_sampler_config_by_params(QAOA, dict(seed=1, layers=2, noise=0.0, shots=10, max_evaluations=5))
    assert (config.layers, config.noise_lambda, config.shots, config.max_evaluations) == (2, 0.0, 10, 5)


@pytest.mark.parametrize('backend, params, code', [
    (ANNEAL, dict(sweeps=0), 'InvalidSweeps'),
    (ANNEAL, dict(shots=0), 'InvalidShots'),
    (ANNEAL, dict(beta_min=0.0), 'InvalidBetaSchedule'),
    (QAOA, dict(layers=0), 'InvalidLayers'),
    (QAOA, dict(max_evaluations=0), 'InvalidEvaluations'),
])
def test_explicit_zeros_are_validated(backend, params, code):
    params['seed'] = 1
    with pytest.raises(ParameterException) as e:
        get_sampler_config_by_params(backend, params)
    assert e.value.code == code


def test_pair_moves_can_be_switched_off():
    assert not get_sampler_config_by_params(ANNEAL, dict(seed=1, pair_moves=False)).pair_moves

#!/usr/bin/python
#
# SPDX-License-Identifier: Apache-2.0
#

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import os

from .document_utils import parse_catalog, parse_instance, parse_qubo, parse_sampleset
from .errors import ParameterException
from .file_utils import read_text
from .instance_factory import APPENDIX_DELAY, FamilySpec, make_appendix_instance, make_family_instance
from .network_model import DisturbanceModel, Instance
from .qubo_engine import PenaltyConfig
from .samplers import ANNEAL, QAOA, TWO_QUBIT_ERROR, AnnealConfig, QaoaConfig, calibrated_noise

SEED_ENV = 'RAILSCHED_SEED'


def get_seed(seed=None):
    if seed is not None:
        return seed
    value = os.environ.get(SEED_ENV, None)
    if value is None or value == '':
        return 0
    try:
        return int(value)
    except ValueError:
        raise ParameterException('InvalidSeed', f'{SEED_ENV} must be an integer, got {value}')


def get_instance_by_params(params, log=None):
    """
    Build an instance from the appendix flag or a family description.
    """
    if params.get('appendix', False):
        initial_delay = params.get('initial_delay', None)
        d_max = params.get('d_max', None)
        instance = make_appendix_instance(
            initial_delay=APPENDIX_DELAY if initial_delay is None else initial_delay,
            d_max=2 if d_max is None else d_max
        )
    else:
        if params.get('trains', None) is None or params.get('d_max', None) is None:
            raise ParameterException('MissingArgument', 'A family instance needs both a train count and d_max')
        spec = FamilySpec(
            train_count=params['trains'],
            d_max=params['d_max'],
            disturbed=params.get('disturbed', False),
            seed=get_seed(params.get('seed', None))
        )
        instance = make_family_instance(spec, log=log)

    # Attach the disturbance model of the stochastic zone, if one is given.
    support = params.get('disturbance_support', None)
    if support:
        weights = params.get('disturbance_weights', None)
        if weights is not None:
            if len(weights) != len(support):
                raise ParameterException('InvalidDisturbanceModel', 'Give one disturbance weight per support value')
            weights = dict(zip(support, weights))
        instance = instance.clone(disturbance=DisturbanceModel(support, weights))
    return instance


def get_penalties_by_params(params):
    overrides = dict(params.get('penalty_overrides', None) or dict())
    return PenaltyConfig.from_name(
        params.get('penalties', None) or 'split',
        params.get('p_sum', None),
        params.get('p_pair', None),
        overrides
    )


def get_param(params, name, default):
    value = params.get(name, None)
    return default if value is None else value


def get_sampler_config_by_params(backend, params, ising=None):
    seed = get_seed(params.get('seed', None))
    if backend == ANNEAL:
        return AnnealConfig(
            shots=get_param(params, 'shots', 1000),
            sweeps=get_param(params, 'sweeps', 1000),
            beta_min=get_param(params, 'beta_min', 0.1),
            beta_max=get_param(params, 'beta_max', 10.0),
            seed=seed,
            pair_moves=get_param(params, 'pair_moves', True)
        )
    elif backend == QAOA:
        layers = get_param(params, 'layers', 1)
        noise = get_param(params, 'noise', 0.0)
        if params.get('calibrated_noise', False):
            if ising is None:
                raise ParameterException('MissingModel', 'Calibrated noise needs the Ising model to count two-qubit gates')
            noise = calibrated_noise(ising, layers, get_param(params, 'two_qubit_error', TWO_QUBIT_ERROR))
        return QaoaConfig(
            layers=layers,
            shots=get_param(params, 'shots', 1024),
            max_evaluations=get_param(params, 'max_evaluations', 50),
            noise_lambda=noise,
            seed=seed
        )
    return None


def parse_edge(value):
    origin, separator, destination = value.partition(':')
    if not separator or not origin or not destination:
        raise ParameterException('InvalidEdge', f'Edge {value} must be given as FROM:TO')
    return (origin, destination)


def catalog_path(qubo_path):
    return f'{qubo_path}.catalog'


def read_instance(path):
    return parse_instance(read_text(path), path)


def read_qubo(path, instance=None):
    """
    Read a QUBO file with its catalog sidecar, when there is one.
    """
    catalog = None
    sidecar = catalog_path(path)
    if os.path.isfile(sidecar):
        catalog = parse_catalog(read_text(sidecar), sidecar)
    qubo = parse_qubo(read_text(path), catalog, path)
    qubo.instance = instance
    return qubo


def read_sampleset(path):
    return parse_sampleset(read_text(path), path)


def get_instance_by_module(module, parameter_name='instance'):

    # If the instance is a dictionary, then we assume that it matches the
    # instance returned by the rail_instance module.
    instance = module.params[parameter_name]
    if isinstance(instance, dict):
        return Instance.from_json(instance)

    # Otherwise, it is the path of an instance document.
    if not os.path.isfile(instance):
        raise ParameterException('MissingInstance', f'The instance document {instance} does not exist')
    return read_instance(instance)

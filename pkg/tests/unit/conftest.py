#
# SPDX-License-Identifier: Apache-2.0
#

import pytest

from plugins.module_utils.instance_factory import baltimore_params, make_appendix_instance
from plugins.module_utils.network_model import Instance, Train, compute_time_windows
from plugins.module_utils.qubo_engine import PenaltyConfig, assemble

# Optimal timetable of the reference instance.
APPENDIX_OPTIMUM = {
    ('PS', 1): 19, ('MR', 1): 22, ('CS', 1): 37,
    ('CS', 2): 41, ('MR', 2): 56, ('PS', 2): 59,
}

# A feasible timetable one and a half delay units worse.
APPENDIX_WORSE = {
    ('PS', 1): 19, ('MR', 1): 22, ('CS', 1): 38,
    ('CS', 2): 42, ('MR', 2): 57, ('PS', 2): 60,
}


@pytest.fixture
def appendix():
    return make_appendix_instance()


@pytest.fixture
def appendix_windows(appendix):
    return compute_time_windows(appendix)


@pytest.fixture
def split_qubo(appendix, appendix_windows):
    return assemble(appendix, appendix_windows, PenaltyConfig.split())


@pytest.fixture
def overlapping_qubo(appendix, appendix_windows):
    return assemble(appendix, appendix_windows, PenaltyConfig.overlapping())


@pytest.fixture
def headway_instance():
    """
    Two northbound trains with identical windows sharing a headway pair at MR.
    """
    params = baltimore_params()
    trains = [
        Train(id=1, route=('MR', 'CS'), nominal_arrivals={'MR': 29, 'CS': 44}),
        Train(id=3, route=('MR', 'CS'), nominal_arrivals={'MR': 29, 'CS': 44}),
    ]
    return Instance(
        params=params,
        trains=trains,
        d_max=2,
        objective_stations=('MR', 'CS'),
        headway_pairs={'MR': [(1, 3)]}
    )


@pytest.fixture
def appendix_optimum():
    return dict(APPENDIX_OPTIMUM)


@pytest.fixture
def appendix_worse():
    return dict(APPENDIX_WORSE)

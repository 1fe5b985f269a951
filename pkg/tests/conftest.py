import math

import pytest

from qszilard import EngineConfig, PotentialModel, Statistics

LN2 = math.log(2.0)
WELL = PotentialModel.infinite_well()
LADDER = PotentialModel.ladder(1.0, 10.0)


def two_particle(stat, tau, model=WELL):
    return EngineConfig(model=model, statistics=stat, n_particles=2, insertion_position=0.5, tau=tau)


@pytest.fixture
def well():
    return WELL


@pytest.fixture(params=[Statistics.BOSON, Statistics.FERMION])
def quantum_stat(request):
    return request.param

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.realpath(__file__))), 'pcbfv'))

from engine.framelin import Coframe  # noqa: E402
from engine.fields import TorusGrid, sample_config  # noqa: E402
from engine.galg import FormSampler, InternalAlgebra  # noqa: E402

SMALL_GRID = 8


@pytest.fixture
def algebra():
    return InternalAlgebra(4, form_dim=3)


@pytest.fixture
def exact_sampler():
    return FormSampler(np.random.default_rng(11), exact=True)


@pytest.fixture
def float_sampler():
    return FormSampler(np.random.default_rng(12), exact=False)


@pytest.fixture
def frames(algebra):
    """A batch of 20 random nondegenerate boundary coframes."""
    sampler = FormSampler(np.random.default_rng(13), exact=False)
    pairs = [sampler.boundary_frame(algebra) for _ in range(20)]
    coframe = Coframe(np.stack([f for f, _ in pairs]), np.stack([n for _, n in pairs]), algebra=algebra)
    coframe.check()
    return coframe


@pytest.fixture
def small_grid():
    return TorusGrid(SMALL_GRID)


@pytest.fixture(params=['pc', 'scalar', 'ym', 'spinor'])
def theory(request):
    return request.param


@pytest.fixture
def point_factory(small_grid):
    def factory(theory, seed=3, **kwargs):
        kwargs.setdefault('grid', small_grid)
        kwargs.setdefault('K', 1)
        return sample_config(theory, seed, **kwargs)
    return factory

"""
Shared fixtures for all tests
"""
import os

import numpy as np
import pytest

# Keep tests fast/stable when running without Docker services.
os.environ.setdefault("VM_RKDG_DISABLE_ELASTIC_LOGS", "1")
os.environ.setdefault("VM_RKDG_THREADS", "2")

# Prevent tests from making real network calls to Elasticsearch.
# The production logger writes to Elasticsearch, but in unit/integration tests
# we replace the module-level client with an in-memory stub.
from ..harness import logging_config


class _FakeElasticsearch:
    def __init__(self):
        self.calls = []

    def index(self, *, index, document):
        self.calls.append((index, document))


logging_config.es = _FakeElasticsearch()

from ..Models.field_model import DistributionField, EMField
from ..solver.mesh import make_mesh
from ..solver.phase_space import phase_space


@pytest.fixture
def rng():
    """Seeded generator so every randomized test is reproducible"""
    return np.random.default_rng(20240607)


@pytest.fixture
def space_1d1v():
    mesh = make_mesh((0.0, 2.0), [(-1.5, 1.5)], 3, [4])
    return phase_space(mesh, 1)


@pytest.fixture
def space_1d2v():
    mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0), (-1.2, 1.2)], 2, [3, 3])
    return phase_space(mesh, 1)


@pytest.fixture
def random_f(rng):
    def build(space):
        return DistributionField(space, rng.standard_normal(space.shape + (space.n_modes,)))
    return build


@pytest.fixture
def random_em(rng):
    def build(space, active):
        em = EMField(space, active)
        em.coefficients[...] = rng.standard_normal(em.coefficients.shape)
        return em
    return build


@pytest.fixture
def fake_es(monkeypatch):
    fake = _FakeElasticsearch()
    monkeypatch.setattr(logging_config, "es", fake)
    monkeypatch.setenv("VM_RKDG_DISABLE_ELASTIC_LOGS", "0")
    return fake

import json

import numpy as np
import pytest

from config import TestingConfig
from eigenbound import create_app
from eigenbound.noise import GroundSpec, NoiseSpec, low_rank_ground, wigner
from eigenbound.spectral import SymmetricMatrix, spectral_decompose


@pytest.fixture
def app():
    return create_app(TestingConfig)


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def write_config(tmp_path):
    """Write a version-1 config for `command` and return its path."""
    def write(command, **body):
        path = tmp_path / f'{command}.json'
        path.write_text(json.dumps({'version': 1, 'command': command, **body}))
        return path
    return write


@pytest.fixture
def diagonal():
    def build(*values):
        A = SymmetricMatrix(np.diag(np.asarray(values, dtype=float)))
        return A, spectral_decompose(A)
    return build


@pytest.fixture
def moderate_instance():
    """λ = (100, 90, 40) at n = 50 with Wigner noise of scale 0.05.

    δ₁ = 10 sits inside 4‖E‖ <= δ₁ <= |λ₁|/4 for every seed used in the tests.
    """
    def build(seed):
        A, d = low_rank_ground(GroundSpec(n=50, rank=3, spectrum=(100.0, 90.0, 40.0), seed=seed))
        E = wigner(NoiseSpec(kind='wigner', n=50, seed=seed, scale=0.05))
        return A, d, E
    return build

import json

import numpy as np
import pytest

from eigenbound.errors import ConfigError
from eigenbound.experiment_config import load_config
from eigenbound.matrix_io import write_matrix
from eigenbound.spectral import SymmetricMatrix

DEFAULTS = {
    'CONFIG_SCHEMA_VERSION': 1,
    'DEFAULT_TRIALS': 7,
    'DEFAULT_SEED_BASE': 0,
    'DEFAULT_WORKERS': 2,
    'DEFAULT_OUTPUT_FORMAT': 'csv',
    'QUADRATURE_NODES': 256,
}
GROUND = {'kind': 'low-rank', 'n': 50, 'spectrum': [100, 90, 40]}


def test_file_values_and_app_defaults(write_config):
    path = write_config('bound-compare', ground=GROUND, noise={'scale': 0.05}, p=1)
    cfg = load_config('bound-compare', path, defaults=DEFAULTS)
    assert cfg.trials == 7
    assert cfg.workers == 2
    assert cfg.ground.spectrum == (100.0, 90.0, 40.0)
    assert cfg.noise.kind == 'wigner'
    assert cfg.noise.scale == 0.05
    assert cfg.trial_seeds == tuple(range(7))
    assert cfg.source == str(path)


def test_flags_override_the_file(write_config):
    path = write_config('bound-compare', ground=GROUND, trials=100, seed_base=5)
    cfg = load_config('bound-compare', path, overrides={'trials': 3, 'seed_base': None},
                      defaults=DEFAULTS)
    assert cfg.trials == 3
    assert cfg.trial_seeds == (5, 6, 7)


def test_explicit_seed_list(write_config):
    path = write_config('bound-compare', ground=GROUND, seeds=[4, 1, 9], trials=100)
    cfg = load_config('bound-compare', path, defaults=DEFAULTS)
    assert cfg.trials == 3
    assert cfg.trial_seeds == (4, 1, 9)


def test_noise_default_depends_on_the_command():
    overrides = {'ground': GROUND}
    assert load_config('sparsify-power', overrides=overrides).noise.kind == 'sparsify'
    assert load_config('contour-verify', overrides=overrides).noise.kind == 'wigner'


def test_unknown_keys_are_rejected(write_config):
    with pytest.raises(ConfigError, match='trails'):
        load_config('bound-compare', write_config('bound-compare', ground=GROUND, trails=3))
    with pytest.raises(ConfigError, match='ground'):
        load_config('bound-compare', write_config('bound-compare', ground=dict(GROUND, rnak=2)))


def test_version_and_command_must_match(tmp_path, write_config):
    path = tmp_path / 'old.json'
    path.write_text(json.dumps({'version': 2, 'ground': GROUND}))
    with pytest.raises(ConfigError, match='version'):
        load_config('bound-compare', path)
    with pytest.raises(ConfigError, match='contour-verify'):
        load_config('bound-compare', write_config('contour-verify', ground=GROUND))


def test_malformed_files(tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"version": 1,')
    with pytest.raises(ConfigError, match='not valid JSON'):
        load_config('bound-compare', broken)
    with pytest.raises(ConfigError, match='does not exist'):
        load_config('bound-compare', tmp_path / 'missing.json')


def test_ground_is_required():
    with pytest.raises(ConfigError, match='no ground matrix'):
        load_config('bound-compare')


def test_rectangular_ground_needs_m():
    with pytest.raises(ConfigError, match='needs m'):
        load_config('singular-rect', overrides={'ground': {'kind': 'rectangular', 'n': 4}})
    cfg = load_config('singular-rect',
                      overrides={'ground': {'kind': 'rectangular', 'n': 4, 'm': 6, 'spectrum': [3]}})
    assert cfg.mode == 'rectangular'


def test_diagonal_ground_takes_n_from_the_spectrum():
    cfg = load_config('singular-rect', overrides={'ground': {'kind': 'diagonal',
                                                             'spectrum': [10, 8, 0, -8, -10]}})
    assert cfg.ground.n == 5
    assert cfg.mode == 'singular'


def test_regime_ratios_must_exceed_two():
    with pytest.raises(ConfigError, match='regime_ratios'):
        load_config('bound-compare', overrides={'ground': GROUND, 'regime_ratios': [8, 2]})


def test_power_section_validation():
    overrides = {'ground': GROUND}
    cfg = load_config('sparsify-power', overrides=dict(overrides, power={'rho': 0.5}))
    assert cfg.power.rho == (0.5,)
    assert cfg.power.early_stop is False
    with pytest.raises(ConfigError):
        load_config('sparsify-power', overrides=dict(overrides, power={'rho': [0.5, 1.5]}))
    with pytest.raises(ConfigError):
        load_config('sparsify-power', overrides=dict(overrides, power={'early_stop': 'yes'}))


def test_bad_values():
    overrides = {'ground': GROUND}
    with pytest.raises(ConfigError, match='trials'):
        load_config('bound-compare', overrides=dict(overrides, trials=0))
    with pytest.raises(ConfigError, match='format'):
        load_config('bound-compare', overrides=dict(overrides, format='xml'))
    with pytest.raises(ConfigError, match='noise.kind'):
        load_config('bound-compare', overrides=dict(overrides, noise={'kind': 'cauchy'}))
    with pytest.raises(ConfigError, match='rho'):
        load_config('bound-compare', overrides=dict(overrides, noise={'kind': 'sparsify', 'rho': 0}))


def test_matrix_and_noise_flags(tmp_path):
    M = SymmetricMatrix(np.eye(3))
    matrix = write_matrix(tmp_path / 'a.mtx', M)
    noise = write_matrix(tmp_path / 'e.mtx', M)
    cfg = load_config('bound-compare', overrides={'matrix': str(matrix), 'noise_path': str(noise)})
    assert cfg.ground.kind == 'file'
    assert cfg.ground.path == str(matrix)
    assert cfg.noise.kind == 'custom-file'
    with pytest.raises(ConfigError, match='does not exist'):
        load_config('bound-compare', overrides={'matrix': str(tmp_path / 'none.mtx')})

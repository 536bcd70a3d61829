"""
eigenbound/experiment_config.py — Per-run JSON config files for the experiment commands

A config file looks like:

    {
      "version": 1,
      "trials": 100,
      "seed_base": 0,
      "p": 2,
      "ground": {"kind": "low-rank", "n": 50, "spectrum": [100, 90, 40]},
      "noise": {"kind": "wigner", "scale": 0.05}
    }

Every key is checked against the schema below; an unknown key anywhere is a
ConfigError rather than a silently ignored typo. Command-line flags win over
values in the file, and values missing from both come from the Flask app
config (DEFAULT_TRIALS and friends).

Public functions:
  load_config(command, path, overrides, defaults) — build an ExperimentConfig
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from eigenbound.errors import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ('bound-compare', 'contour-verify', 'sparsify-power', 'singular-rect')
OUTPUT_FORMATS = ('csv', 'json')
GROUND_KINDS = ('low-rank', 'diagonal', 'file', 'rectangular')
NOISE_KINDS = ('wigner', 'sparsify', 'custom-file', 'zero')
MODES = ('singular', 'rectangular')

TOP_LEVEL_KEYS = {
    'version', 'command', 'trials', 'seed_base', 'seeds', 'workers', 'out', 'format',
    'nodes_per_segment', 'ground', 'noise', 'p', 'k', 'subset', 'mode', 'power',
    'regime_ratios',
}
GROUND_KEYS = {'kind', 'n', 'm', 'spectrum', 'path', 'seed', 'scale'}
NOISE_KEYS = {'kind', 'scale', 'rho', 'subgaussian', 'path'}
POWER_KEYS = {'rho', 'iterations', 'stop_tol', 'early_stop'}


@dataclass(frozen=True)
class GroundConfig:
    kind: str = 'low-rank'
    n: int = None
    m: int = None
    spectrum: tuple = ()
    path: str = None
    # Fixed ground seed; None means "use the trial seed"
    seed: int = None
    # Spectrum scale for regime families (λ_p of every member)
    scale: float = 100.0


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = 'wigner'
    scale: float = 1.0
    rho: float = 1.0
    subgaussian: str = 'gaussian'
    path: str = None


@dataclass(frozen=True)
class PowerSection:
    rho: tuple = (1.0,)
    iterations: int = 100
    stop_tol: float = 1e-12
    early_stop: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    trials: int
    seed_base: int
    seeds: tuple
    workers: int
    out: str
    output_format: str
    nodes_per_segment: int
    ground: GroundConfig
    noise: NoiseConfig
    p: int = 1
    k: int = None
    subset: tuple = None
    mode: str = 'singular'
    power: PowerSection = field(default_factory=PowerSection)
    regime_ratios: tuple = ()
    source: str = None

    @property
    def trial_seeds(self):
        """Seeds in output order: the explicit list, or seed_base .. seed_base + trials − 1."""
        if self.seeds:
            return self.seeds
        return tuple(range(self.seed_base, self.seed_base + self.trials))


def _reject_unknown(section, allowed, where):
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f'unknown key(s) in {where}: {", ".join(unknown)}')


def _int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f'{name} must be an integer (got {value!r})')
    if minimum is not None and value < minimum:
        raise ConfigError(f'{name} must be at least {minimum} (got {value})')
    return value


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'{name} must be a number (got {value!r})')
    return float(value)


def _numbers(values, name):
    if not isinstance(values, list):
        raise ConfigError(f'{name} must be a list of numbers')
    return tuple(_number(v, name) for v in values)


def _existing(path, name):
    if path is None:
        return None
    if not Path(path).is_file():
        raise ConfigError(f'{name} does not exist: {path}')
    return str(path)


def _read_file(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f'config file does not exist: {path}')
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path} is not valid JSON: {e}')
    if not isinstance(data, dict):
        raise ConfigError(f'{path}: top level must be a JSON object')
    return data


def _ground(section, matrix_path):
    if not isinstance(section, dict):
        raise ConfigError('ground must be an object')
    _reject_unknown(section, GROUND_KEYS, 'ground')
    kind = section.get('kind', 'file' if section.get('path') else 'low-rank')
    if matrix_path:
        kind, section = 'file', dict(section, path=matrix_path)
    if kind not in GROUND_KINDS:
        raise ConfigError(f'ground.kind must be one of {GROUND_KINDS} (got {kind!r})')
    spectrum = _numbers(section.get('spectrum', []), 'ground.spectrum')
    n = section.get('n')
    m = section.get('m')
    if kind == 'diagonal':
        if not spectrum:
            raise ConfigError('diagonal ground needs a spectrum')
        n = len(spectrum)
    elif kind in ('low-rank', 'rectangular'):
        if n is None:
            raise ConfigError(f'{kind} ground needs n')
        _int(n, 'ground.n', 1)
        if kind == 'rectangular':
            if m is None:
                raise ConfigError('rectangular ground needs m')
            _int(m, 'ground.m', 1)
        if len(spectrum) > n:
            raise ConfigError(f'ground.spectrum has {len(spectrum)} values for n = {n}')
    elif not section.get('path'):
        raise ConfigError('file ground needs a path (or pass --matrix)')
    seed = section.get('seed')
    if seed is not None:
        _int(seed, 'ground.seed', 0)
    return GroundConfig(
        kind=kind,
        n=n,
        m=m,
        spectrum=spectrum,
        path=_existing(section.get('path'), 'ground matrix file'),
        seed=seed,
        scale=_number(section.get('scale', GroundConfig.scale), 'ground.scale'),
    )


def _noise(section, noise_path, default_kind='wigner'):
    if not isinstance(section, dict):
        raise ConfigError('noise must be an object')
    _reject_unknown(section, NOISE_KEYS, 'noise')
    if noise_path:
        section = dict(section, kind='custom-file', path=noise_path)
    kind = section.get('kind', default_kind)
    if kind not in NOISE_KINDS:
        raise ConfigError(f'noise.kind must be one of {NOISE_KINDS} (got {kind!r})')
    rho = _number(section.get('rho', 1.0), 'noise.rho')
    if not 0 < rho <= 1:
        raise ConfigError(f'noise.rho must lie in (0, 1] (got {rho})')
    subgaussian = section.get('subgaussian', 'gaussian')
    if subgaussian not in ('gaussian', 'rademacher'):
        raise ConfigError(f'noise.subgaussian must be gaussian or rademacher (got {subgaussian!r})')
    if kind == 'custom-file' and not section.get('path'):
        raise ConfigError('custom-file noise needs a path (or pass --noise)')
    return NoiseConfig(
        kind=kind,
        scale=_number(section.get('scale', 1.0), 'noise.scale'),
        rho=rho,
        subgaussian=subgaussian,
        path=_existing(section.get('path'), 'noise matrix file'),
    )


def _power(section):
    if not isinstance(section, dict):
        raise ConfigError('power must be an object')
    _reject_unknown(section, POWER_KEYS, 'power')
    rho = section.get('rho', [1.0])
    rho = _numbers(rho if isinstance(rho, list) else [rho], 'power.rho')
    if not rho or any(not 0 < r <= 1 for r in rho):
        raise ConfigError(f'power.rho values must lie in (0, 1] (got {list(rho)})')
    stop_tol = _number(section.get('stop_tol', PowerSection.stop_tol), 'power.stop_tol')
    if not stop_tol > 0:
        raise ConfigError('power.stop_tol must be positive')
    early_stop = section.get('early_stop', PowerSection.early_stop)
    if not isinstance(early_stop, bool):
        raise ConfigError('power.early_stop must be true or false')
    return PowerSection(
        rho=rho,
        iterations=_int(section.get('iterations', PowerSection.iterations), 'power.iterations', 1),
        stop_tol=stop_tol,
        early_stop=early_stop,
    )


def load_config(command, path=None, overrides=None, defaults=None):
    """Read, validate and merge one experiment configuration.

    Args:
        command: the subcommand name, one of COMMANDS.
        path: JSON config file, or None to run from flags alone.
        overrides: flag values keyed like the file (None entries are ignored);
            'matrix' and 'noise_path' carry --matrix / --noise.
        defaults: mapping with the DEFAULT_* and CONFIG_SCHEMA_VERSION keys,
            normally the Flask app config.

    Raises:
        ConfigError: for anything malformed, missing or unknown.
    """
    if command not in COMMANDS:
        raise ConfigError(f'unknown command {command!r}')
    defaults = defaults or {}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    schema_version = defaults.get('CONFIG_SCHEMA_VERSION', 1)

    data = {}
    if path is not None:
        data = _read_file(path)
        _reject_unknown(data, TOP_LEVEL_KEYS, 'config')
        if data.get('version') != schema_version:
            raise ConfigError(f'{path}: config version must be {schema_version} (got {data.get("version")!r})')
        if data.get('command', command) != command:
            raise ConfigError(f'{path} is a {data["command"]} config, not {command}')

    matrix_path = overrides.pop('matrix', None)
    noise_path = overrides.pop('noise_path', None)
    merged = dict(data, **overrides)

    if 'ground' not in merged and not matrix_path:
        raise ConfigError('no ground matrix: give a "ground" section or pass --matrix')
    ground = _ground(merged.get('ground', {}), matrix_path)
    default_noise = 'sparsify' if command == 'sparsify-power' else 'wigner'
    noise = _noise(merged.get('noise', {}), noise_path, default_noise)

    trials = _int(merged.get('trials', defaults.get('DEFAULT_TRIALS', 10)), 'trials', 1)
    seeds = merged.get('seeds')
    if seeds is not None:
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError('seeds must be a non-empty list of integers')
        seeds = tuple(_int(s, 'seeds', 0) for s in seeds)
        trials = len(seeds)
    output_format = merged.get('format', defaults.get('DEFAULT_OUTPUT_FORMAT', 'csv'))
    if output_format not in OUTPUT_FORMATS:
        raise ConfigError(f'format must be one of {OUTPUT_FORMATS} (got {output_format!r})')
    subset = merged.get('subset')
    if subset is not None:
        if not isinstance(subset, list) or not subset:
            raise ConfigError('subset must be a non-empty list of indices')
        subset = tuple(_int(i, 'subset', 1) for i in subset)
    k = merged.get('k')
    if k is not None:
        _int(k, 'k', 0)
    mode = merged.get('mode', 'rectangular' if ground.kind == 'rectangular' else 'singular')
    if mode not in MODES:
        raise ConfigError(f'mode must be one of {MODES} (got {mode!r})')
    ratios = _numbers(merged.get('regime_ratios', []), 'regime_ratios')
    if any(r <= 2 for r in ratios):
        raise ConfigError('regime_ratios must exceed 2')

    cfg = ExperimentConfig(
        command=command,
        trials=trials,
        seed_base=_int(merged.get('seed_base', defaults.get('DEFAULT_SEED_BASE', 0)), 'seed_base', 0),
        seeds=seeds,
        workers=_int(merged.get('workers', defaults.get('DEFAULT_WORKERS', 1)), 'workers', 1),
        out=merged.get('out'),
        output_format=output_format,
        nodes_per_segment=_int(merged.get('nodes_per_segment', defaults.get('QUADRATURE_NODES', 256)),
                               'nodes_per_segment', 8),
        ground=ground,
        noise=noise,
        p=_int(merged.get('p', 1), 'p', 1),
        k=k,
        subset=subset,
        mode=mode,
        power=_power(merged.get('power', {})),
        regime_ratios=ratios,
        source=str(path) if path else None,
    )
    logger.debug('loaded %s config: %d trials from seed %d', command, cfg.trials, cfg.seed_base)
    return cfg

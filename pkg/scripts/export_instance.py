#!/usr/bin/env python3
"""Write a seeded ground matrix and its Wigner noise as MatrixMarket files.

The files feed straight back into the experiment commands, e.g. to rerun
one instance under different flags or to hand it to another tool:

    python3 scripts/export_instance.py --n 50 --spectrum 100,90,40 --seed 7 out/
    flask bound-compare --matrix out/ground.mtx --noise out/noise.mtx --trials 1

The noise file holds E at scale 1; the commands multiply custom-file noise
by the config's noise.scale.
"""

import os
import sys

import click

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from eigenbound.errors import ArgumentError  # noqa: E402
from eigenbound.matrix_io import write_matrix  # noqa: E402
from eigenbound.noise import GroundSpec, NoiseSpec, low_rank_ground, wigner  # noqa: E402


def parse_spectrum(text):
    try:
        return tuple(float(v) for v in text.split(',') if v.strip())
    except ValueError:
        raise click.BadParameter(f'expected comma-separated numbers, got {text!r}')


@click.command()
@click.argument('out_dir', type=click.Path(file_okay=False))
@click.option('--n', type=int, required=True, help='Matrix dimension')
@click.option('--spectrum', required=True, help='Nonzero eigenvalues, comma separated')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--subgaussian', type=click.Choice(['gaussian', 'rademacher']), default='gaussian')
def main(out_dir, n, spectrum, seed, subgaussian):
    """Export ground.mtx and noise.mtx for one seed."""
    values = parse_spectrum(spectrum)
    try:
        A, d = low_rank_ground(GroundSpec(n=n, rank=len(values), spectrum=values, seed=seed))
        E = wigner(NoiseSpec(kind='wigner', n=n, seed=seed, subgaussian=subgaussian))
    except ArgumentError as e:
        click.echo(f'ERROR: {e}', err=True)
        sys.exit(1)

    ground = write_matrix(os.path.join(out_dir, 'ground.mtx'), A,
                          comment=f'low-rank ground, seed {seed}, spectrum {spectrum}')
    noise = write_matrix(os.path.join(out_dir, 'noise.mtx'), E,
                         comment=f'{subgaussian} Wigner noise, seed {seed}')
    click.echo(f'Wrote {ground} (lambda_1 = {d.eigenvalue(1):.6g})')
    click.echo(f'Wrote {noise}')


if __name__ == '__main__':
    main()

"""
eigenbound/matrix_io.py — Read and write dense matrices in MatrixMarket array format

Ground matrices (`--matrix`) and custom noise (`--noise`) come in as
MatrixMarket `array real` files, either `symmetric` or `general`. Values are
written with 17 significant digits so a file written here reads back to the
same doubles.
"""

import logging
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse

from eigenbound.errors import ArgumentError
from eigenbound.spectral import SymmetricMatrix

logger = logging.getLogger(__name__)

PRECISION = 17


def read_matrix(path):
    """Read a dense real matrix. Returns a float ndarray (m×n).

    Raises:
        FileNotFoundError: if the file is missing.
        ArgumentError: for coordinate (sparse) files or non-real fields.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'Matrix file does not exist: {path}')
    info = scipy.io.mminfo(str(path))
    fmt, field = info[3], info[4]
    if fmt != 'array':
        raise ArgumentError(f'{path}: expected MatrixMarket array format, found {fmt}')
    if field not in ('real', 'integer'):
        raise ArgumentError(f'{path}: expected a real matrix, found field {field}')
    data = scipy.io.mmread(str(path))
    if scipy.sparse.issparse(data):
        data = data.toarray()
    logger.debug('read %s matrix %s from %s', info[5], data.shape, path)
    return np.asarray(data, dtype=float)


def read_symmetric(path):
    """Read a file and return it as a SymmetricMatrix (symmetrizing `general` input)."""
    return SymmetricMatrix.from_array(read_matrix(path))


def write_matrix(path, matrix, comment=''):
    """Write a SymmetricMatrix (as `symmetric`) or any 2-D array (as `general`)."""
    if isinstance(matrix, SymmetricMatrix):
        data, symmetry = matrix.entries, 'symmetric'
    else:
        data, symmetry = np.asarray(matrix, dtype=float), 'general'
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # Hand mmwrite an open file so it cannot tack '.mtx' onto the name
    with open(path, 'wb') as fh:
        scipy.io.mmwrite(fh, data, comment=comment, field='real',
                         precision=PRECISION, symmetry=symmetry)
    return path

"""Result files written by the commands.

Every file is written in full on each run, so rerunning a command from its
manifest reproduces the same bytes.
"""
import json
import logging
import os

import numpy as np
import pandas as pd
from django.conf import settings

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.json'
ERROR = 'error.json'


def _plain(value):
    # json cannot encode numpy scalars and arrays
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"cannot write {type(value).__name__} to JSON")


def output_directory(path=None):
    path = str(path or settings.RESULTS_DIRECTORY)
    if not os.path.exists(path):
        os.makedirs(path)
    return path


def write_json(folder, name, data):
    filename = os.path.join(output_directory(folder), name)
    with open(filename, 'w') as result_file:
        json.dump(data, result_file, indent=2, default=_plain)
        result_file.write('\n')
    logger.info("wrote %s", filename)
    return filename


def write_csv(folder, name, frame):
    filename = os.path.join(output_directory(folder), name)
    frame.to_csv(filename, index=False)
    logger.info("wrote %s", filename)
    return filename


def write_records(folder, name, records, columns):
    return write_csv(folder, name, pd.DataFrame.from_records(list(records), columns=columns))


def write_matrix(folder, name, matrix, column_axis, row_axis):
    ''' gnuplot "nonuniform matrix" file.

    The first row holds the column count and the column coordinates; every
    following row starts with its row coordinate.
    '''
    matrix = np.asarray(matrix, dtype=float)
    header = np.concatenate([[len(column_axis)], column_axis])
    body = np.column_stack([row_axis, matrix])
    filename = os.path.join(output_directory(folder), name)
    with open(filename, 'w') as matrix_file:
        np.savetxt(matrix_file, header[None, :], fmt='%g')
        np.savetxt(matrix_file, body, fmt='%g')
    logger.info("wrote %s", filename)
    return filename


def write_manifest(folder, command, config, options):
    return write_json(folder, MANIFEST, {
        'tool_version': settings.TOOL_VERSION,
        'command': command,
        'seed': config.simulation.seed,
        'options': options,
        'scenario': config.to_sections(),
    })


def write_error(folder, command, kind, message):
    return write_json(folder, ERROR, {'command': command, 'kind': kind, 'message': message})

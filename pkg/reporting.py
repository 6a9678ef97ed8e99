"""
JSON and CSV writers for command results.

Output is byte-for-byte reproducible: dictionaries keep insertion order,
floats are written with '%.12e' and complex numbers as [re, im].
"""

import io
import csv
import json
import math
import logging

import numpy as np

logger = logging.getLogger("reporting")

FLOAT_FORMAT = '%.12e'


def format_float(value):
    value = float(value)
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return FLOAT_FORMAT % value


def _encode(value, indent, level):
    pad = ' ' * (indent * (level + 1))
    closing = ' ' * (indent * level)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(str(key))}: {_encode(item, indent, level + 1)}" for key, item in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + closing + '}'
    if isinstance(value, (list, tuple)):
        if not value:
            return '[]'
        if all(not isinstance(item, (dict, list, tuple)) for item in value):
            return '[' + ', '.join(_encode(item, indent, level + 1) for item in value) + ']'
        items = [pad + _encode(item, indent, level + 1) for item in value]
        return '[\n' + ',\n'.join(items) + '\n' + closing + ']'
    if isinstance(value, (bool, np.bool_)) or value is None:
        return json.dumps(bool(value) if value is not None else None)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return f"[{format_float(value.real)}, {format_float(value.imag)}]"
    return json.dumps(str(value))


def dumps(payload, indent=2):
    """Serialise a payload with fixed float formatting."""
    return _encode(payload, indent, 0) + '\n'


def rows_to_csv(rows, header=None):
    """
    CSV text with one line per row; columns follow the first row's keys.

    A header payload is written first as '# '-prefixed JSON lines.
    """
    buffer = io.StringIO()
    if header is not None:
        for line in dumps(header).splitlines():
            buffer.write(f"# {line}\n")
    if not rows:
        return buffer.getvalue()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow({key: (FLOAT_FORMAT % value if isinstance(value, float) else value)
                         for key, value in row.items()})
    return buffer.getvalue()


def write_output(text, path=None, stream=None):
    """Write text to path, or to stream when no path is given."""
    if path:
        with open(path, 'w') as f:
            f.write(text)
        logger.info(f"Wrote {len(text)} bytes to {path}")
    elif stream is not None:
        stream.write(text)

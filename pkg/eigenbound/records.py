"""
eigenbound/records.py — Trial records, summaries, and the CSV/JSON writers

The data file holds only values that depend on the config and seeds, so two
runs of the same config produce identical bytes. Anything tied to the
moment of the run (timestamps, wall times) goes to a sidecar
`<out>.meta.json`.
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from eigenbound import APP_VERSION

LEAD_COLUMNS = ('seed',)
TAIL_COLUMNS = ('status', 'failures')
STATUSES = ('ok', 'skipped', 'failed', 'error')


@dataclass(frozen=True, eq=False)
class TrialRecord:
    """One trial: its seed, the command's columns, and what went wrong.

    status is 'ok', 'skipped' (hypotheses not met, nothing asserted),
    'failed' (an assertion failed) or 'error' (the trial raised).
    """
    seed: int
    values: dict
    failures: tuple = ()
    status: str = 'ok'
    wall_time: float = 0.0

    def row(self, columns):
        return ([self.seed] + [self.values.get(c) for c in columns]
                + [self.status, '; '.join(self.failures)])


def header(columns):
    return list(LEAD_COLUMNS) + list(columns) + list(TAIL_COLUMNS)


def format_value(value, digits=17):
    """CSV text for one cell. Floats get `digits` significant digits."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, f'.{digits}g')
    if isinstance(value, (tuple, list)):
        return ' '.join(format_value(v, digits) for v in value)
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def summarize(records, coverage_columns=()):
    """Counts per status plus, for each coverage column, how many trials had a value."""
    counts = {status: 0 for status in STATUSES}
    for record in records:
        counts[record.status] += 1
    total = len(records)
    coverage = {}
    for column in coverage_columns:
        covered = sum(1 for r in records if r.values.get(column) is not None)
        coverage[column] = {'count': covered, 'rate': covered / total if total else 0.0}
    return {
        'trials': total,
        **counts,
        'assertion_failures': sum(len(r.failures) for r in records if r.status == 'failed'),
        'coverage': coverage,
    }


def render_csv(columns, records, digits=17):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header(columns))
    for record in records:
        writer.writerow([format_value(v, digits) for v in record.row(columns)])
    return buffer.getvalue()


def render_json(command, columns, records, summary):
    names = header(columns)
    payload = {
        'command': command,
        'columns': names,
        'records': [dict(zip(names, (_jsonable(v) for v in r.row(columns)))) for r in records],
        'summary': summary,
    }
    return json.dumps(payload, indent=2) + '\n'


def write_records(path, output_format, command, columns, records, summary, digits=17):
    """Write the data file. Returns the text written."""
    if output_format == 'json':
        text = render_json(command, columns, records, summary)
    else:
        text = render_csv(columns, records, digits)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


def meta_path(path):
    path = Path(path)
    return path.with_name(path.name + '.meta.json')


def write_meta(path, command, records, summary, config_source=None):
    """Sidecar with the run's timestamp, wall times and summary."""
    meta = {
        'command': command,
        'version': APP_VERSION,
        'config': config_source,
        'generated_at': datetime.now(timezone.utc).isoformat(),
        'wall_time_total': sum(r.wall_time for r in records),
        'wall_times': [{'seed': r.seed, 'seconds': r.wall_time} for r in records],
        'summary': summary,
    }
    target = meta_path(path)
    target.write_text(json.dumps(meta, indent=2) + '\n')
    return target

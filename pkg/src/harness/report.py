"""
Experiment report rows, CSV files and aggregation
"""
import csv
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from utils.errors import ParseError

REPORT_COLUMNS = ('instance_id', 'problem', 'n', 'kappa', 'fold', 'base_evals', 'biased_evals',
                  'base_time_ms', 'biased_time_ms', 'speedup_evals', 'speedup_time', 'improved')
SUMMARY_COLUMNS = ('problem', 'kappa', 'instances', 'median_speedup_evals', 'mean_speedup_evals',
                   'median_speedup_time', 'improved_fraction')


@dataclass(frozen=True)
class ReportRow:
    """One instance under one kappa; times are None when timing is off"""

    instance_id: str
    problem: str
    n: int
    kappa: float
    fold: int
    base_evals: float
    biased_evals: float
    base_time_ms: Optional[float]
    biased_time_ms: Optional[float]
    speedup_evals: float
    speedup_time: Optional[float]
    improved: bool

    def without_timing(self):
        return ReportRow(self.instance_id, self.problem, self.n, self.kappa, self.fold,
                         self.base_evals, self.biased_evals, None, None, self.speedup_evals, None,
                         self.improved)


def make_row(problem, kappa, fold, base, biased, speedup):
    """ReportRow from a pair of RunResults; improved means strictly fewer evaluations"""
    return ReportRow(problem.instance_id, problem.family, problem.n, float(kappa), int(fold),
                     base.evaluations, biased.evaluations, base.wall_time * 1000.0,
                     biased.wall_time * 1000.0, speedup.evaluations, speedup.time,
                     biased.evaluations < base.evaluations)


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(rows, path, timing=True):
    """
    Write rows as CSV with REPORT_COLUMNS

    With timing off the wall-clock columns are left empty, so repeated runs
    write identical files.
    """
    path = Path(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            row = row if timing else row.without_timing()
            writer.writerow([_cell(getattr(row, name)) for name in REPORT_COLUMNS])
    return path


def read_report(path):
    """
    Raises:
        ParseError: wrong header or malformed cell, with its line number
    """
    converters = {f.name: f.type for f in fields(ReportRow)}
    rows = []
    with open(path, newline='') as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != REPORT_COLUMNS:
            raise ParseError('unexpected report header', path=path, line=1)
        for record in reader:
            number = reader.line_num
            if len(record) != len(REPORT_COLUMNS):
                raise ParseError(f'expected {len(REPORT_COLUMNS)} columns', path=path, line=number)
            values = {}
            try:
                for name, cell in zip(REPORT_COLUMNS, record):
                    kind = converters[name]
                    if cell == '':
                        if kind != Optional[float]:
                            raise ValueError(name)
                        values[name] = None
                    elif kind is bool:
                        values[name] = cell == '1'
                    elif kind is str:
                        values[name] = cell
                    elif kind is int:
                        values[name] = int(cell)
                    else:
                        values[name] = float(cell)
            except ValueError:
                raise ParseError(f'malformed cell {record!r}', path=path, line=number) from None
            rows.append(ReportRow(**values))
    return rows


def aggregate(rows):
    """
    Median and mean speedups and the strictly-improved fraction per (problem, kappa)

    Returns:
        List of dicts keyed by SUMMARY_COLUMNS, sorted by problem then kappa
    """
    groups = {}
    for row in rows:
        groups.setdefault((row.problem, row.kappa), []).append(row)
    summary = []
    for (problem, kappa), group in sorted(groups.items()):
        evals = np.array([r.speedup_evals for r in group])
        times = [r.speedup_time for r in group if r.speedup_time is not None]
        summary.append({
            'problem': problem,
            'kappa': kappa,
            'instances': len(group),
            'median_speedup_evals': float(np.median(evals)),
            'mean_speedup_evals': float(np.mean(evals)),
            'median_speedup_time': float(np.median(times)) if times else None,
            'improved_fraction': sum(r.improved for r in group) / len(group),
        })
    return summary


def write_summary(summary, path):
    path = Path(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(SUMMARY_COLUMNS)
        for entry in summary:
            writer.writerow([_cell(entry[name]) for name in SUMMARY_COLUMNS])
    return path

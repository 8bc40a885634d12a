"""Run reports: line-oriented JSON records describing one solver run.

A report file holds, one JSON object per line, each tagged with a ``record`` field:

* ``header`` - schema name and version, seed, distance mode, dataset, sizes and the
  full configuration echo;
* ``iteration`` - one per outer iteration: residual, mu, view weights, label changes;
* ``metrics`` - ACC, NMI and purity, present exactly when ground truth was available;
* ``timing`` - wall-clock seconds of graph construction and of the solver.
"""
import dataclasses as dc
import json
import os
import typing as ty
from dataclasses import dataclass
from pathlib import Path

import dacite

from .config import SolverConfig
from .exceptions import ParseError
from .metrics import Scores
from .solver import SolverState

STRICT = dacite.Config(strict=True)

SCHEMA = 'cfmvc.run-report'
SCHEMA_VERSION = 1


@dataclass(kw_only=True)
class Header:
    """First record: schema, run identity and the full solver configuration."""
    schema: str
    version: int
    seed: int
    distance: str
    dataset: str
    n: int
    c: int
    views: int
    config: dict[str, ty.Any]


@dataclass(kw_only=True)
class IterationRecord:
    """State after one outer iteration."""
    iteration: int
    residual: float
    mu: float
    alpha: list[float]
    changes: list[int]


@dataclass(kw_only=True)
class MetricsRecord:
    """Scores against ground truth, written only when the dataset has labels."""
    acc: float
    nmi: float
    purity: float


@dataclass(kw_only=True)
class TimingRecord:
    """Last record: wall-clock seconds of graph construction and of the solver."""
    graph_seconds: float
    solver_seconds: float


@dataclass(kw_only=True)
class RunReport:
    """A parsed run report."""
    header: Header
    iterations: list[IterationRecord]
    timing: TimingRecord
    metrics: MetricsRecord | None = None

    @property
    def residuals(self) -> list[float]:
        """The residual trace."""
        return [rec.residual for rec in self.iterations]

    @staticmethod
    def from_run(state: SolverState, config: SolverConfig, dataset: str | os.PathLike, n: int,
                 c: int, scores: Scores | None = None) -> 'RunReport':
        """Assemble the report of a finished solver run."""
        return RunReport(
            header=Header(schema=SCHEMA, version=SCHEMA_VERSION, seed=config.seed,
                          distance=config.distance, dataset=str(dataset), n=n, c=c,
                          views=len(state.labels), config=config.model_dump(mode='json')),
            iterations=[IterationRecord(iteration=i, residual=res, mu=mu, alpha=alpha, changes=ch)
                        for i, (res, mu, alpha, ch) in enumerate(
                            zip(state.residual_trace, state.mu_trace, state.alpha_trace,
                                state.changes_trace),
                            start=1)],
            timing=TimingRecord(graph_seconds=state.graph_seconds + state.init_seconds,
                                solver_seconds=state.solver_seconds),
            metrics=MetricsRecord(**dc.asdict(scores)) if scores is not None else None)

    def validate(self) -> None:
        """Check the schema tag and the consistency of the records.

        Raises:
            ParseError: On an unknown schema or version, non-consecutive iterations, or
                per-iteration vectors whose length is not the number of views.
        """
        h = self.header
        if (h.schema, h.version) != (SCHEMA, SCHEMA_VERSION):
            raise ParseError(f'Unsupported report schema {h.schema!r} version {h.version}')
        for i, rec in enumerate(self.iterations, start=1):
            if rec.iteration != i:
                raise ParseError(f'Iteration record {i} is numbered {rec.iteration}')
            if len(rec.alpha) != h.views or len(rec.changes) != h.views:
                raise ParseError(f'Iteration {i} does not hold one entry per view')


def write_report(report: RunReport, path: str | os.PathLike) -> None:
    """Write a report as JSON lines."""
    lines = [{'record': 'header', **dc.asdict(report.header)}]
    lines += [{'record': 'iteration', **dc.asdict(rec)} for rec in report.iterations]
    if report.metrics is not None:
        lines.append({'record': 'metrics', **dc.asdict(report.metrics)})
    lines.append({'record': 'timing', **dc.asdict(report.timing)})
    Path(path).write_text(''.join(json.dumps(line) + '\n' for line in lines))


def read_report(path: str | os.PathLike) -> RunReport:
    """Parse and validate a report file.

    Raises:
        ParseError: If a line is not a JSON object of a known record type, a record has
            missing or unexpected fields, or the report is inconsistent.
    """
    path = Path(path)
    records: dict[str, list[dict]] = {'header': [], 'iteration': [], 'metrics': [], 'timing': []}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            kind = obj.pop('record')
            records[kind].append(obj)
        except (json.JSONDecodeError, AttributeError, KeyError, TypeError) as e:
            raise ParseError(f'{path}, line {lineno}: not a report record ({e})') from e
    for kind in ('header', 'timing'):
        if len(records[kind]) != 1:
            raise ParseError(f'{path}: expected one {kind} record, found {len(records[kind])}')
    if len(records['metrics']) > 1:
        raise ParseError(f'{path}: more than one metrics record')

    try:
        report = RunReport(
            header=dacite.from_dict(Header, records['header'][0], config=STRICT),
            iterations=[dacite.from_dict(IterationRecord, rec, config=STRICT)
                        for rec in records['iteration']],
            timing=dacite.from_dict(TimingRecord, records['timing'][0], config=STRICT),
            metrics=(dacite.from_dict(MetricsRecord, records['metrics'][0], config=STRICT)
                     if records['metrics'] else None))
    except dacite.DaciteError as e:
        raise ParseError(f'{path}: {e}') from e
    report.validate()
    return report

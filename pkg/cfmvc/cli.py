"""Command-line front end.

Subcommands::

    cfmvc generate {two-moon,three-ring,blobs} --out DIR [...]
    cfmvc cluster DATASET [--report FILE] [--labels FILE] [solver flags]
    cfmvc eval PRED TRUTH
    cfmvc sweep DATASET --out DIR [--lambda ...] [--r ...] [--p ...] [--omega ...]
    cfmvc import SOURCE --out DIR [--labels FILE] [--c C]

Solver flags default to ``CFMVC_``-prefixed environment variables, then to the built-in
defaults.  Exit status is 0 on success, 1 on a runtime error and 2 on a usage error.
"""
import argparse
import logging
import sys
import typing as ty
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import numpy as np
import pandas as pd
import pydantic as pyd
from tqdm import tqdm

from .config import SolverConfig, SolverSettings, SweepGrid
from .config.sweep import SWEPT_FIELDS
from .data import import_csv_views, import_mat, load_dataset, read_labels, save_dataset, write_labels
from .exceptions import ClusteringError
from .metrics import Scores, evaluate
from .report import RunReport, write_report
from .solver import solve
from .toys import gen_blobs, gen_three_ring, gen_two_moon
from .util import label_ids

logger = logging.getLogger(__name__)

SOLVER_FLAGS = {
    # flag: (SolverConfig field, type)
    '--lambda': ('lam', float),
    '--r': ('r', float),
    '--p': ('p', float),
    '--omega': ('omega', float),
    '--anchors': ('anchors', None),
    '--knn': ('k_nn', int),
    '--rho': ('rho', float),
    '--mu0': ('mu0', float),
    '--mu-max': ('mu_max', float),
    '--max-iter': ('max_iter', int),
    '--tol': ('tol', float),
    '--seed': ('seed', int),
    '--sweeps': ('sweeps', int),
    '--imag-tol': ('imag_tol', float),
}


def _anchors(text: str) -> int | float:
    """An anchor count ("100") or a ratio of N ("0.5")."""
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f'invalid anchor count or ratio: {text!r}') from None


def _grid_values(text: str) -> list[float]:
    """A value ("0.5") or an inclusive range "start:stop:step"."""
    try:
        parts = [float(part) for part in text.split(':')]
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid value or range: {text!r}') from None
    if len(parts) == 1:
        return parts
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise argparse.ArgumentTypeError(f'ranges are start:stop:step with start <= stop, step > 0: {text!r}')
    start, stop, step = parts
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12).tolist()


def _add_solver_flags(parser: argparse.ArgumentParser, grid: bool = False) -> None:
    group = parser.add_argument_group('solver')
    for flag, (dest, kind) in SOLVER_FLAGS.items():
        if grid and dest in SWEPT_FIELDS:
            group.add_argument(flag, dest=dest, type=_grid_values, nargs='+', metavar='V',
                               help='values or start:stop:step ranges to sweep')
        else:
            group.add_argument(flag, dest=dest, type=kind or _anchors)
    group.add_argument('--distance', choices=['butterworth', 'euclidean'])
    group.add_argument('--init', choices=['kmeans', 'spectral'])
    if not grid:
        group.add_argument('--workers', type=int, help='threads for per-view work')


def build_parser() -> argparse.ArgumentParser:
    """The argument parser of the ``cfmvc`` command."""
    common = argparse.ArgumentParser(add_help=False)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='log every iteration')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='log warnings and errors only')

    parser = argparse.ArgumentParser(prog='cfmvc', description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', parents=[common], help='write a synthetic dataset')
    gen.add_argument('kind', choices=['two-moon', 'three-ring', 'blobs'])
    gen.add_argument('--out', type=Path, required=True)
    gen.add_argument('--n', type=int, default=200)
    gen.add_argument('--noise', type=float, default=0.05)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--c', type=int, default=3, help='blobs: number of clusters')
    gen.add_argument('--dims', type=int, default=2, help='blobs: feature dimension')
    gen.add_argument('--separation', type=float, default=10.0, help='blobs: distance of centres from the origin')
    gen.add_argument('--imbalance', type=float, default=1.0, help='blobs: largest/smallest cluster size')
    gen.add_argument('--views', type=int, default=2, help='blobs: number of views')
    gen.add_argument('--view-noise', type=float, default=0.1, help='blobs: noise added to derived views')

    clu = sub.add_parser('cluster', parents=[common], help='cluster a dataset')
    clu.add_argument('dataset', type=Path)
    clu.add_argument('--report', type=Path, default=Path('report.jsonl'))
    clu.add_argument('--labels', type=Path, default=Path('labels.csv'))
    clu.add_argument('--c', type=int, help='number of clusters (default: from the manifest)')
    _add_solver_flags(clu)

    ev = sub.add_parser('eval', parents=[common], help='score predicted labels against ground truth')
    ev.add_argument('pred', type=Path)
    ev.add_argument('truth', type=Path)

    sw = sub.add_parser('sweep', parents=[common], help='cluster over a hyperparameter grid')
    sw.add_argument('dataset', type=Path)
    sw.add_argument('--out', type=Path, required=True)
    sw.add_argument('--c', type=int)
    sw.add_argument('--workers', type=int, default=1, help='grid points run in parallel')
    _add_solver_flags(sw, grid=True)

    imp = sub.add_parser('import', parents=[common], help='convert a .mat file or a directory of CSV views')
    imp.add_argument('source', type=Path)
    imp.add_argument('--out', type=Path, required=True)
    imp.add_argument('--labels', type=Path, help='CSV import: label file')
    imp.add_argument('--c', type=int, help='CSV import: number of clusters when there are no labels')
    return parser


def _overrides(args: argparse.Namespace, fields: ty.Iterable[str]) -> dict[str, ty.Any]:
    return {f: getattr(args, f) for f in fields if getattr(args, f, None) is not None}


def _solver_fields() -> list[str]:
    return [dest for dest, _ in SOLVER_FLAGS.values()] + ['distance', 'init', 'workers']


def run_clustering(dataset: Path, config: SolverConfig, report_path: Path, labels_path: Path,
                   c: int | None = None) -> RunReport:
    """Cluster a dataset directory, writing the report and the predicted labels."""
    ds = load_dataset(dataset)
    c = c or ds.c
    labels, state = solve(ds.views, c, config)
    ids = label_ids(labels)
    scores = evaluate(ids, ds.truth) if ds.truth is not None else None
    report = RunReport.from_run(state, config, dataset, ds.n, c, scores)
    report_path.parent.mkdir(parents=True, exist_ok=True)
    labels_path.parent.mkdir(parents=True, exist_ok=True)
    write_report(report, report_path)
    write_labels(ids, labels_path)
    return report


def _print_scores(scores: Scores) -> None:
    print(f'ACC     {scores.acc:.6f}')
    print(f'NMI     {scores.nmi:.6f}')
    print(f'Purity  {scores.purity:.6f}')


def cmd_generate(args: argparse.Namespace) -> int:
    match args.kind:
        case 'two-moon':
            ds = gen_two_moon(args.n, args.noise, args.seed)
        case 'three-ring':
            ds = gen_three_ring(args.n, args.noise, args.seed)
        case 'blobs':
            ds = gen_blobs(args.n, args.c, args.dims, args.separation, args.imbalance, args.views,
                           args.seed, args.view_noise)
    save_dataset(ds, args.out)
    logger.info('Wrote %s dataset (N = %d, %d view(s)) to %s', args.kind, ds.n, len(ds.views), args.out)
    return 0


def cmd_cluster(args: argparse.Namespace, config: SolverConfig) -> int:
    report = run_clustering(args.dataset, config, args.report, args.labels, args.c)
    logger.info('%d iteration(s), final residual %.3e; graph %.2f s, solver %.2f s',
                len(report.iterations), report.residuals[-1] if report.iterations else float('nan'),
                report.timing.graph_seconds, report.timing.solver_seconds)
    if report.metrics is not None:
        _print_scores(Scores(report.metrics.acc, report.metrics.nmi, report.metrics.purity))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    _print_scores(evaluate(read_labels(args.pred), read_labels(args.truth)))
    return 0


def _sweep_point(index: int, dataset: Path, config: dict[str, ty.Any], point: dict[str, float],
                 out: Path, c: int | None) -> dict[str, ty.Any]:
    """Run one grid point; never raises, failures are reported in the returned row."""
    row: dict[str, ty.Any] = {'index': index, **point}
    try:
        cfg = SolverConfig.model_validate({**config, **point})
        report = run_clustering(dataset, cfg, out / f'report_{index}.jsonl',
                                out / f'labels_{index}.csv', c)
    except (ClusteringError, pyd.ValidationError) as e:
        return row | {'status': f'failed: {type(e).__name__}: {e}'.splitlines()[0]}
    row |= {'status': 'ok', 'iterations': len(report.iterations),
            'residual': report.residuals[-1] if report.iterations else None}
    if report.metrics is not None:
        row |= {'acc': report.metrics.acc, 'nmi': report.metrics.nmi, 'purity': report.metrics.purity}
    return row


def cmd_sweep(args: argparse.Namespace, config: SolverConfig, grid: SweepGrid) -> int:
    points = grid.points()
    args.out.mkdir(parents=True, exist_ok=True)
    base = config.model_dump() | {'workers': 1}
    jobs = [(i, args.dataset, base, point, args.out, args.c) for i, point in enumerate(points)]
    progress = dict(total=len(jobs), desc='Grid points', disable=args.quiet)

    if args.workers <= 1:
        rows = [_sweep_point(*job) for job in tqdm(jobs, **progress)]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [pool.submit(_sweep_point, *job) for job in jobs]
            rows = [f.result() for f in tqdm(as_completed(futures), **progress)]

    summary = pd.DataFrame(rows).sort_values(grid.swept + ['index'], kind='stable')
    summary.to_csv(args.out / 'summary.csv', index=False)
    failed = summary[summary['status'] != 'ok']
    for _, row in failed.iterrows():
        logger.error('Grid point %d %s', row['index'], row['status'])
    logger.info('%d of %d grid point(s) succeeded', len(summary) - len(failed), len(summary))
    return 1 if len(failed) else 0


def cmd_import(args: argparse.Namespace) -> int:
    if args.source.is_dir():
        ds = import_csv_views(args.source, args.out, args.labels, args.c)
    else:
        ds = import_mat(args.source, args.out)
    logger.info('Imported %s: N = %d, C = %d, %d view(s)', args.source, ds.n, ds.c, len(ds.views))
    return 0


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s', force=True)
    logging.captureWarnings(True)


def main(argv: ty.Sequence[str] | None = None) -> int:
    """Entry point of the ``cfmvc`` command; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    config, grid = None, None
    if args.command == 'sweep' and all(getattr(args, f) is None for f in SWEPT_FIELDS):
        parser.error('empty grid: give at least one of --lambda, --r, --p, --omega')
    if args.command in ('cluster', 'sweep'):
        fields = _solver_fields() if args.command == 'cluster' else \
            [f for f in _solver_fields() if f not in SWEPT_FIELDS and f != 'workers']
        try:
            config = SolverSettings(**_overrides(args, fields)).to_config()
            if args.command == 'sweep':
                grid = SweepGrid.model_validate(
                    {f: [v for values in getattr(args, f) for v in values]
                     for f in SWEPT_FIELDS if getattr(args, f) is not None})
        except pyd.ValidationError as e:
            parser.error(str(e))

    try:
        match args.command:
            case 'generate':
                return cmd_generate(args)
            case 'cluster':
                return cmd_cluster(args, config)
            case 'eval':
                return cmd_eval(args)
            case 'sweep':
                return cmd_sweep(args, config, grid)
            case 'import':
                return cmd_import(args)
    except ClusteringError as e:
        print(f'{type(e).__name__}: {e}', file=sys.stderr)
        return 1
    except OSError as e:
        print(f'{type(e).__name__}: {e}', file=sys.stderr)
        return 1
    return 2


if __name__ == '__main__':
    sys.exit(main())

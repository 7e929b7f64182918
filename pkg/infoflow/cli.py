"""Command-line interface to `infoflow`.

Subcommands:

    compute   transfer entropy and asymmetry matrices, flows and regression
    evolve    market-wide averages per analysis window
    scan-q    market-wide averages over a range of bin counts
    synth     generate a coupled-process price panel
    flows     flows and rankings from a saved transfer entropy matrix
    regress   outflow-on-inflow regression from a saved matrix

Every run writes `run_manifest.json` next to its artifacts. On failure, the
artifacts written so far are removed and the exit status is 1; usage errors
exit with status 2.

"""

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import pandas as pd

from infoflow import __version__
from infoflow.entropy import (
    EstimatorConfig,
    asymmetry_matrix,
    read_matrix_csv,
    te_matrix,
    write_matrix_csv,
)
from infoflow.errors import InfoFlowError
from infoflow.evolution import (
    BINNING_MODES,
    DEFAULT_Q_RANGE,
    PER_WINDOW,
    WindowSpec,
    mean_abs_asymmetry,
    mean_te_of_matrix,
    scan_q,
    validate_q_range,
    windowed_te,
)
from infoflow.flows import (
    flow_summary,
    ols_outflow_on_inflow,
    rank_by_activity,
    rank_by_net_flow,
)
from infoflow.panel import (
    ALIGNMENT_KINDS,
    AlignmentPolicy,
    PanelFormat,
    align_panel,
    compute_log_returns,
    load_price_panel,
    write_price_panel,
)
from infoflow.sectors import display_name, short_label
from infoflow.symbolic import DEFAULT_Q, symbolize_panel
from infoflow.synthetic import (
    GENERATOR,
    PROCESS_KINDS,
    CoupledProcessSpec,
    analytic_te,
    generate_price_panel,
)
from infoflow.utils import FLOAT_FORMAT, file_digest

logger = logging.getLogger(__name__)

EMIT_CHOICES = ('matrices', 'flows', 'regression', 'heatmap', 'symbols')
DEFAULT_EMIT = ('matrices', 'flows', 'regression')
MANIFEST_FILE = 'run_manifest.json'


@dataclass(frozen=True)
class RunConfig:
    """All parameters of one CLI run."""
    command: str
    output_dir: Path
    input_path: Path = None
    matrix_path: Path = None
    panel_format: PanelFormat = field(default_factory=PanelFormat)
    alignment: AlignmentPolicy = field(default_factory=AlignmentPolicy)
    q: int = DEFAULT_Q
    binning: str = PER_WINDOW
    window: WindowSpec = field(default_factory=WindowSpec)
    q_range: tuple = DEFAULT_Q_RANGE
    emit: tuple = None
    emit_window_matrices: bool = False
    process: CoupledProcessSpec = None
    start: str = '2000-01-03'
    n_workers: int = 1

    @property
    def estimator(self):
        return EstimatorConfig(q=self.q)

    def parameters(self):
        """JSON-serialisable parameters, for the run manifest."""
        params = asdict(self)
        for key in ('output_dir', 'input_path', 'matrix_path'):
            if params[key] is not None:
                params[key] = str(params[key])
        return params


class _Artifacts:
    """Tracks the files written by a run so that they can be discarded."""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.written = []

    def path(self, name):
        path = self.output_dir / name
        self.written.append(path)
        return path

    def write_frame(self, frame, name):
        frame.to_csv(self.path(name), index=False, float_format=FLOAT_FORMAT,
                     lineterminator='\n', encoding='utf-8')

    def write_json(self, obj, name):
        with open(self.path(name), 'w', encoding='utf-8', newline='\n') as handle:
            json.dump(_round_floats(obj), handle, indent=2, sort_keys=True)
            handle.write('\n')

    def discard(self):
        for path in self.written:
            if path.exists():
                path.unlink()
        if self.written:
            logger.warning('Removed %d partial output file(s).', len(self.written))


def _round_floats(obj):
    """Round every float in a JSON-like object to 12 significant digits."""
    if isinstance(obj, float):
        return float(FLOAT_FORMAT % obj)
    if isinstance(obj, dict):
        return {key: _round_floats(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(i) for i in obj]
    return obj


def _write_manifest(config, artifacts, extra=None):

    manifest = {
        'tool': 'infoflow',
        'version': __version__,
        'command': config.command,
        'parameters': config.parameters(),
        'created': datetime.now(timezone.utc).isoformat(timespec='seconds'),
        'outputs': sorted(p.name for p in artifacts.written),
    }
    for key, path in (('input', config.input_path), ('matrix', config.matrix_path)):
        if path is not None:
            manifest[key] = {'path': str(path), 'sha256': file_digest(path)}
    manifest.update(extra or {})

    artifacts.write_json(manifest, MANIFEST_FILE)


def _load_returns(config):

    path = config.input_path
    if not path.is_file():
        raise FileNotFoundError('Input file not found: {}'.format(path))

    prices = align_panel(load_price_panel(path, config.panel_format),
                         config.alignment)

    return compute_log_returns(prices)


def _flow_frames(summary):

    flows = summary.to_frame()
    net_rank = {lab: idx + 1 for idx, (lab, _) in enumerate(rank_by_net_flow(summary))}
    act_rank = {lab: idx + 1 for idx, (lab, _) in enumerate(rank_by_activity(summary))}
    flows['net_rank'] = [net_rank[i] for i in summary.labels]
    flows['activity_rank'] = [act_rank[i] for i in summary.labels]

    ranking = pd.DataFrame(rank_by_net_flow(summary), columns=['label', 'delta_f'])
    ranking.insert(0, 'rank', range(1, len(ranking) + 1))
    ranking['name'] = [display_name(i) for i in ranking['label']]

    return flows, ranking


def _regression(summary, artifacts, required):

    if summary.n < 3 and not required:
        logger.warning('Skipping regression: %d nodes, at least 3 needed.',
                       summary.n)
        return None

    result = ols_outflow_on_inflow(summary)
    artifacts.write_json(result.to_dict(), 'regression.json')

    return result


def cmd_compute(config, artifacts):
    """Compute the full-sample matrices, flows and regression."""

    returns = _load_returns(config)
    series = symbolize_panel(returns, config.q)
    te = te_matrix(series, config.estimator, n_workers=config.n_workers)
    dte = asymmetry_matrix(te)
    emit = config.emit or DEFAULT_EMIT

    if 'matrices' in emit:
        write_matrix_csv(te, artifacts.path('te_matrix.csv'))
        write_matrix_csv(dte, artifacts.path('asymmetry_matrix.csv'))

    summary = flow_summary(te)
    if 'flows' in emit:
        artifacts.write_frame(_flow_frames(summary)[0], 'flows.csv')

    if 'regression' in emit:
        _regression(summary, artifacts, required=config.emit is not None)

    if 'heatmap' in emit:
        artifacts.write_frame(pd.DataFrame({
            'index': range(te.n),
            'label': list(te.labels),
            'short': [short_label(i) for i in te.labels],
            'name': [display_name(i) for i in te.labels],
        }), 'heatmap_labels.csv')

    if 'symbols' in emit:
        symbols = pd.DataFrame({s.label: s.symbols for s in series})
        symbols.insert(0, 'date', returns.dates.astype(str))
        artifacts.write_frame(symbols, 'symbols.csv')

    results = {
        'n_labels': te.n,
        'n_observations': returns.n_observations,
        'mean_te': mean_te_of_matrix(te),
        'mean_abs_asymmetry': mean_abs_asymmetry(dte),
        'source': summary.source,
        'sink': summary.sink,
    }
    _write_manifest(config, artifacts, {'results': results,
                                        'panel': returns.meta})

    print('mean_te={} mean_abs_asymmetry={}'.format(
        FLOAT_FORMAT % results['mean_te'],
        FLOAT_FORMAT % results['mean_abs_asymmetry']))


def cmd_evolve(config, artifacts):
    """Compute market-wide averages for each analysis window."""

    returns = _load_returns(config)
    evolution = windowed_te(returns, config.window, config.estimator,
                            binning=config.binning,
                            retain_matrices=config.emit_window_matrices,
                            n_workers=config.n_workers)

    artifacts.write_frame(evolution.to_frame(), 'evolution.csv')

    if config.emit_window_matrices:
        for label, (te, dte) in zip(evolution.window_labels,
                                    evolution.per_window_matrices):
            write_matrix_csv(te, artifacts.path('window_{}_te.csv'.format(label)))
            write_matrix_csv(dte, artifacts.path(
                'window_{}_asymmetry.csv'.format(label)))

    _write_manifest(config, artifacts, {
        'panel': returns.meta,
        'skipped_windows': [asdict(i) for i in evolution.skipped],
    })


def cmd_scan_q(config, artifacts):
    """Compute full-sample averages over a range of bin counts."""

    returns = _load_returns(config)
    table = scan_q(returns, config.q_range, config.estimator,
                   n_workers=config.n_workers)
    artifacts.write_frame(table, 'qscan.csv')
    _write_manifest(config, artifacts, {'panel': returns.meta})


def cmd_synth(config, artifacts):
    """Generate a coupled-process price panel."""

    spec = config.process
    panel = generate_price_panel(spec, start=config.start)
    write_price_panel(panel, artifacts.path('prices.csv'))

    te_xy, te_yx = analytic_te(spec)
    _write_manifest(config, artifacts, {
        'generator': GENERATOR,
        'analytic_te': {'x_to_y': te_xy, 'y_to_x': te_yx},
    })


def cmd_flows(config, artifacts):
    """Compute flows and rankings from a saved transfer entropy matrix."""

    summary = flow_summary(read_matrix_csv(config.matrix_path))
    flows, ranking = _flow_frames(summary)
    artifacts.write_frame(flows, 'flows.csv')
    artifacts.write_frame(ranking, 'ranking.csv')
    _write_manifest(config, artifacts)


def cmd_regress(config, artifacts):
    """Regress outflow on inflow from a saved transfer entropy matrix."""

    summary = flow_summary(read_matrix_csv(config.matrix_path))
    _regression(summary, artifacts, required=True)
    _write_manifest(config, artifacts)


COMMANDS = {
    'compute': cmd_compute,
    'evolve': cmd_evolve,
    'scan-q': cmd_scan_q,
    'synth': cmd_synth,
    'flows': cmd_flows,
    'regress': cmd_regress,
}


def build_parser():

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default='.', help='Output directory.')
    common.add_argument('--workers', type=int, default=1,
                        help='Number of worker threads.')
    common.add_argument('--verbose', action='store_true')
    common.add_argument('--debug', action='store_true')

    panel = argparse.ArgumentParser(add_help=False)
    panel.add_argument('--input', required=True, help='Price panel file.')
    panel.add_argument('--delimiter', default=',')
    panel.add_argument('--date-column', default='date')
    panel.add_argument('--date-format', default='%Y-%m-%d')
    panel.add_argument('--align', choices=ALIGNMENT_KINDS, default='drop',
                       help='Missing-data policy.')
    panel.add_argument('--max-gap', type=int, default=1,
                       help='Longest gap filled by --align ffill.')
    panel.add_argument('--q', type=int, default=DEFAULT_Q,
                       help='Number of equal-width bins.')

    matrix = argparse.ArgumentParser(add_help=False)
    matrix.add_argument('--matrix', required=True,
                        help='Transfer entropy matrix written by "compute".')

    parser = argparse.ArgumentParser(
        prog='infoflow',
        description='Directed information flow between the components of a '
                    'multivariate time-series panel.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s {}'.format(__version__))
    subparsers = parser.add_subparsers(dest='command', required=True)

    compute = subparsers.add_parser('compute', parents=[common, panel],
                                    help=cmd_compute.__doc__)
    compute.add_argument('--emit', help='Comma-separated artifacts: {}.'.format(
        ','.join(EMIT_CHOICES)))

    evolve = subparsers.add_parser('evolve', parents=[common, panel],
                                   help=cmd_evolve.__doc__)
    evolve.add_argument('--window', default='calendar-year',
                        help='"calendar-year" or "fixed:w,s".')
    evolve.add_argument('--min-observations', type=int, default=50)
    evolve.add_argument('--binning', choices=BINNING_MODES, default=PER_WINDOW)
    evolve.add_argument('--emit-window-matrices', action='store_true')

    scan = subparsers.add_parser('scan-q', parents=[common, panel],
                                 help=cmd_scan_q.__doc__)
    scan.add_argument('--q-min', type=int, default=DEFAULT_Q_RANGE[0])
    scan.add_argument('--q-max', type=int, default=DEFAULT_Q_RANGE[1])

    synth = subparsers.add_parser('synth', parents=[common],
                                  help=cmd_synth.__doc__)
    synth.add_argument('--kind', choices=PROCESS_KINDS, default='coupled-binary')
    synth.add_argument('--epsilon', type=float, default=0.1)
    synth.add_argument('--alphabet', type=int, default=2)
    synth.add_argument('--length', type=int, default=10000)
    synth.add_argument('--seed', type=int, default=0)
    synth.add_argument('--start', default='2000-01-03',
                       help='Date of the first price.')

    subparsers.add_parser('flows', parents=[common, matrix],
                          help=cmd_flows.__doc__)
    subparsers.add_parser('regress', parents=[common, matrix],
                          help=cmd_regress.__doc__)

    return parser


def config_from_args(args, parser):
    """Build a `RunConfig`, reporting invalid arguments as usage errors."""

    kwargs = {
        'command': args.command,
        'output_dir': Path(args.out),
        'n_workers': args.workers,
    }
    if args.workers < 1:
        parser.error('--workers must be at least 1.')

    try:
        if hasattr(args, 'input'):
            if args.q < 2:
                parser.error('--q must be at least 2, but is {}.'.format(args.q))
            kwargs.update(
                input_path=Path(args.input),
                q=args.q,
                panel_format=PanelFormat(args.date_column, args.date_format,
                                         args.delimiter),
                alignment=AlignmentPolicy(args.align, args.max_gap),
            )

        if args.command == 'compute' and args.emit:
            emit = tuple(i.strip() for i in args.emit.split(',') if i.strip())
            unknown = sorted(set(emit) - set(EMIT_CHOICES))
            if unknown:
                parser.error('Unknown --emit value(s): {}.'.format(unknown))
            kwargs['emit'] = emit

        if args.command == 'evolve':
            kwargs.update(
                window=WindowSpec.parse(args.window, args.min_observations),
                binning=args.binning,
                emit_window_matrices=args.emit_window_matrices,
            )

        if args.command == 'scan-q':
            kwargs['q_range'] = validate_q_range((args.q_min, args.q_max))

        if args.command in ('flows', 'regress'):
            kwargs['matrix_path'] = Path(args.matrix)

    except InfoFlowError as exc:
        parser.error(str(exc))

    if args.command == 'synth':
        kwargs.update(
            process=CoupledProcessSpec(args.kind, args.length, args.seed,
                                       epsilon=args.epsilon,
                                       alphabet=args.alphabet),
            start=args.start,
        )

    return RunConfig(**kwargs)


def _configure_logging(args):
    level = logging.WARNING
    if getattr(args, 'verbose', False):
        level = logging.INFO
    if getattr(args, 'debug', False):
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv=None):
    """Run the command line interface.

    Returns
    -------
    int
        Exit status: 0 if every requested artifact was written, 1 on any
        failure (2 for usage errors, raised by `argparse`).

    """

    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    artifacts = _Artifacts(args.out)
    try:
        config = config_from_args(args, parser)
        os.makedirs(config.output_dir, exist_ok=True)
        if not os.access(config.output_dir, os.W_OK):
            raise PermissionError('Output directory is not writable: {}'.format(
                config.output_dir))
        logger.info('Running "%s" (infoflow %s).', config.command, __version__)
        COMMANDS[config.command](config, artifacts)

    # Every InfoFlowError is a ValueError.
    except (ValueError, OSError) as exc:
        artifacts.discard()
        print('error: {}'.format(exc), file=sys.stderr)
        return 1

    return 0


if __name__ == '__main__':
    sys.exit(main())

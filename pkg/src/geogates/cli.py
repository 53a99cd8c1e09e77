"""Command-line entry point.

Each subcommand builds a :class:`geogates.config.Scenario` and hands it
to :func:`run`, which writes the artifacts of the scenario to its output
directory and returns the exit status.
"""

import argparse
import dataclasses
import logging
import os
import sys
import typing
import warnings
from geogates import config
from geogates import evolve
from geogates import harness
from geogates import ionmodel
from geogates import planner
from geogates import report
from geogates import synth
from geogates import errors
from geogates.paths.curve import ParamCurve
from geogates.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_CURVE = 3
EXIT_SYNTH = 4
EXIT_EVOLUTION = 5
EXIT_PLANNING = 6
EXIT_ION = 7
EXIT_VERIFICATION = 8

EXIT_CODES: typing.Tuple[typing.Tuple[typing.Tuple[type, ...], int], ...] = (
    ((errors.ConfigError, ), EXIT_CONFIG),
    ((errors.OpenCurveError, errors.DiscontinuousCurveError,
      errors.CurveDomainError), EXIT_CURVE),
    ((errors.FrameNotOrthonormalError, errors.NonCyclicFrameError,
      errors.ComplexEnvelopeError), EXIT_SYNTH),
    ((errors.UnitarityLostError, errors.NonCyclicError,
      errors.BlockStructureError, errors.DimensionMismatchError),
     EXIT_EVOLUTION),
    ((errors.SweepTooLargeError, ), EXIT_PLANNING),
    ((errors.CutoffTooSmallError, errors.DetuningTooSmallError,
      errors.LambDickeError), EXIT_ION),
    ((errors.VerificationError, ), EXIT_VERIFICATION),
)

TRAJECTORY_RECORDS = 512


def set_default_logging():
    logformatter = logging.Formatter('%(name)s: %(message)s')
    loghandler = logging.StreamHandler()
    loghandler.setFormatter(logformatter)
    package_logger = logging.getLogger('geogates')
    if not any(getattr(h, '_geogates_default', False)
               for h in package_logger.handlers):
        loghandler._geogates_default = True  # type: ignore
        package_logger.addHandler(loghandler)


def exit_code_for(err: BaseException) -> int:
    for classes, code in EXIT_CODES:
        if isinstance(err, classes):
            return code
    return EXIT_UNEXPECTED


def _curve_files(directory: str) -> str:
    return report.ensure_directory(os.path.join(directory, 'curves'))


def _provenance(scenario: config.Scenario) -> dict:
    return {'version': __version__, 'scenario': scenario.to_dict()}


def _propagator(scenario: config.Scenario) -> evolve.PropagatorConfig:
    return dataclasses.replace(scenario.propagator, amp_cap=scenario.amp_cap)


def _build_plan(scenario: config.Scenario) -> planner.PathPlan:
    spec = scenario.target
    if scenario.plan == 'orange-slice':
        return planner.plan_orange_slice(spec, scenario.amp_cap)
    if scenario.plan == 'three-segment':
        return planner.plan_three_segment(spec, scenario.theta_mid[0],
                                          scenario.amp_cap)
    return planner.plan_min_circle(spec, scenario.amp_cap)


def _load_curve(path: str) -> ParamCurve:
    try:
        return ParamCurve.load(path)
    except errors.GeoGatesError:
        raise
    except (OSError, KeyError, TypeError, ValueError) as err:
        raise errors.ConfigError('Cannot load the curve %s: %s' % (path, err))


def run_simulate(scenario: config.Scenario, out: str) -> None:
    if scenario.curve is not None:
        curve = _load_curve(scenario.curve)
        target = scenario.target or evolve.curve_gate_spec(curve)
    else:
        curve = _build_plan(scenario).curve
        target = scenario.target
    cfg = _propagator(scenario)
    result = evolve.run_geometric_gate(curve, scenario.which, target, cfg)
    if scenario.which == 'one-qubit':
        schedule = synth.onequbit_hamiltonian(curve)
        frame: synth.AuxiliaryFrame = synth.BlochFrame(curve)
    else:
        schedule = synth.twoqubit_hamiltonian(curve)
        frame = synth.ExchangeFrame(curve)
    payload = _provenance(scenario)
    payload.update({'target': target.to_dict(), 'curve': curve.to_dict(),
                    'report': result.to_dict()})
    report.write_json(os.path.join(out, 'report.json'), payload)
    report.write_text(os.path.join(out, 'summary.txt'),
                      report.render_evolution(result, __version__,
                                              scenario.amp_cap))
    synth.write_schedule_csv(schedule, os.path.join(out, 'schedule.csv'))
    if scenario.trajectory:
        trajectory = evolve.propagate_trajectory(
            schedule, frame.basis_states(0.0), cfg,
            record_every=max(1, cfg.n_steps // TRAJECTORY_RECORDS))
        report.write_frame(os.path.join(out, 'trajectory.csv'), trajectory)


def run_plan(scenario: config.Scenario, out: str) -> None:
    spec = scenario.target
    plans = planner.compare_plans(spec, scenario.theta_mid, scenario.amp_cap,
                                  _propagator(scenario), scenario.workers)
    frame = planner.plans_to_frame(plans)
    report.write_frame(os.path.join(out, 'plans.csv'), frame)
    curves = _curve_files(out)
    for i, plan in enumerate(plans):
        plan.curve.save(os.path.join(curves, '%02i-%s.json'
                                     % (i, plan.family.value)))
    payload = _provenance(scenario)
    payload['plans'] = [plan.to_dict() for plan in plans]
    report.write_json(os.path.join(out, 'report.json'), payload)
    report.write_text(os.path.join(out, 'summary.txt'),
                      report.render_plans(frame, __version__,
                                          spec.half_angle, scenario.amp_cap))


def error_grid(scenario: config.Scenario) -> typing.List[harness.ErrorModel]:
    grid = [harness.ErrorModel.amplitude_scale(e)
            for e in scenario.amplitudes]
    grid.extend(harness.ErrorModel.detuning_offset(d)
                for d in scenario.detunings)
    grid.extend(harness.random_time_warps(scenario.warps, scenario.seed))
    return grid


def run_sweep(scenario: config.Scenario, out: str) -> None:
    spec = scenario.target
    plans = planner.build_plans(spec, scenario.theta_mid, scenario.amp_cap)
    grid = error_grid(scenario)
    frame = harness.fidelity_sweep(spec, plans, grid, _propagator(scenario),
                                   scenario.workers)
    report.write_frame(os.path.join(out, 'sweep.csv'), frame)
    payload = _provenance(scenario)
    payload.update({'errors': [err.to_dict() for err in grid],
                    'rows': report.records(frame),
                    'warp_spread': harness.warp_spread(frame)})
    report.write_json(os.path.join(out, 'report.json'), payload)
    report.write_text(os.path.join(out, 'summary.txt'),
                      report.render_sweep(frame, __version__))


def run_ion_check(scenario: config.Scenario, out: str) -> None:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', errors.LambDickeWarning)
        frame = ionmodel.reduction_sweep(
            scenario.eta, scenario.ratios, scenario.n_max, scenario.shape,
            scenario.area, max_workers=scenario.workers)
    for message in sorted({str(w.message) for w in caught}):
        logger.warning('%s', message)
    slope = None
    if len(frame) > 1:
        try:
            slope = ionmodel.infidelity_slope(frame)
        except ValueError as ve:
            logger.warning('no infidelity slope: %s', ve)
    report.write_frame(os.path.join(out, 'ion_check.csv'), frame)
    payload = _provenance(scenario)
    payload.update({'rows': report.records(frame), 'slope': slope})
    report.write_json(os.path.join(out, 'report.json'), payload)
    report.write_text(os.path.join(out, 'summary.txt'),
                      report.render_ion(frame, __version__, scenario.eta,
                                        scenario.n_max, slope))


_PIPELINES = {
    'simulate': run_simulate,
    'plan': run_plan,
    'sweep': run_sweep,
    'ion-check': run_ion_check,
}


def _report_failure(err: BaseException, out: typing.Optional[str]) -> int:
    code = exit_code_for(err)
    payload = {'error': type(err).__name__, 'message': str(err),
               'exit_code': code}
    print(report.dumps(payload))
    if code == EXIT_UNEXPECTED:
        logger.exception('unexpected failure')
    if out is not None:
        try:
            report.ensure_directory(out)
            report.write_json(os.path.join(out, 'error.json'), payload)
        except OSError as ose:
            logger.warning('cannot write error.json: %s', ose)
    return code


def run(scenario: config.Scenario) -> int:
    """Execute a scenario and write its artifacts.

    :return: the exit status (0 on success).
    """
    out = scenario.output_dir
    try:
        report.ensure_directory(out)
        logger.info('running %s into %s', scenario.mode, out)
        _PIPELINES[scenario.mode](scenario, out)
    except Exception as err:
        return _report_failure(err, out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser,
                output_default: typing.Optional[str] = config.DEFAULT_OUTPUT_DIR
                ) -> None:
    parser.add_argument('-o', '--output-dir',
                        default=output_default,
                        help='Directory for the artifacts (default: %(default)s)')
    parser.add_argument('-v', '--verbose',
                        choices=('ERROR', 'WARNING', 'INFO', 'DEBUG'),
                        default='WARNING',
                        help=('Verbosity level. Options are given by '
                              'increasing order of verbosity '
                              '(default: %(default)s)'))


def _add_propagation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--n-steps', type=int, default=4096,
                        help='Time steps per propagation (default: %(default)s)')
    parser.add_argument('--method', choices=[m.value for m in evolve.Method],
                        default=evolve.Method.MIDPOINT.value,
                        help='Propagation method (default: %(default)s)')
    parser.add_argument('--cap', type=float, default=1.0,
                        help='Drive amplitude cap (default: %(default)s)')


def _add_target(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--axis', default='z',
                        help='Gate axis: x, y, z, -x, ... or "nx,ny,nz" '
                        '(default: %(default)s)')
    parser.add_argument('--gamma', default='pi/8',
                        help='Half rotation angle, e.g. pi/8 '
                        '(default: %(default)s)')
    parser.add_argument('--theta-mid', action='append',
                        help='Arc latitude of three-segment paths; '
                        'repeatable (default: pi/3)')
    parser.add_argument('--workers', type=int, default=None,
                        help='Worker threads (default: automatic)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        'geogates',
        description='Nonadiabatic geometric gates: Hamiltonian synthesis, '
        'simulation, path planning and robustness checks.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)

    simulate = sub.add_parser('simulate', help='Simulate a gate along a curve.')
    source = simulate.add_mutually_exclusive_group(required=True)
    source.add_argument('--curve', help='Curve JSON file.')
    source.add_argument('--plan', choices=config.PLAN_FAMILIES,
                        help='Plan the curve for --target instead.')
    simulate.add_argument('--target',
                          help='Target gate AXIS:ANGLE, e.g. z:pi/8. With '
                          '--curve it defaults to the gate of the curve.')
    simulate.add_argument('--which', choices=('one-qubit', 'two-qubit'),
                          default='one-qubit',
                          help='Single qubit or exchange block '
                          '(default: %(default)s)')
    simulate.add_argument('--theta-mid', default='pi/3',
                          help='Arc latitude for --plan three-segment '
                          '(default: %(default)s)')
    simulate.add_argument('--trajectory', action='store_true',
                          help='Also write trajectory.csv.')
    _add_propagation(simulate)
    _add_common(simulate)

    plan = sub.add_parser('plan', help='Compare candidate paths for a gate.')
    _add_target(plan)
    _add_propagation(plan)
    _add_common(plan)

    sweep = sub.add_parser('sweep', help='Gate fidelity under control errors.')
    _add_target(sweep)
    sweep.add_argument('--amplitude', action='append', type=float, default=[],
                       help='Relative amplitude error; repeatable.')
    sweep.add_argument('--detuning', action='append', type=float, default=[],
                       help='Detuning offset in units of pi/tau; repeatable.')
    sweep.add_argument('--warps', type=int, default=0,
                       help='Number of random time warps (default: %(default)s)')
    sweep.add_argument('--seed', type=int, default=0,
                       help='Seed of the random warps (default: %(default)s)')
    _add_propagation(sweep)
    _add_common(sweep)

    ion = sub.add_parser('ion-check',
                         help='Compare the trapped-ion model with its '
                         'effective exchange model.')
    ion.add_argument('--eta', type=float, default=0.05,
                     help='Lamb-Dicke parameter (default: %(default)s)')
    ion.add_argument('--ratio', action='append', type=float,
                     help='delta / (eta Omega); repeatable '
                     '(default: 10, 20, 40)')
    ion.add_argument('--n-max', type=int, default=5,
                     help='Fock cutoff (default: %(default)s)')
    ion.add_argument('--shape', choices=config.SHAPES,
                     default='sine_squared',
                     help='Pulse shape (default: %(default)s)')
    ion.add_argument('--area', default='pi/4',
                     help='Exchange pulse area (default: %(default)s)')
    ion.add_argument('--workers', type=int, default=None,
                     help='Worker threads (default: automatic)')
    _add_common(ion)

    scenario = sub.add_parser('run', help='Run a scenario JSON file.')
    scenario.add_argument('scenario', help='Scenario file.')
    _add_common(scenario, output_default=None)
    return parser


def scenario_from_args(args: argparse.Namespace) -> config.Scenario:
    """Scenario described by parsed command-line arguments.

    :raises ConfigError: for invalid values.
    """
    if args.command == 'run':
        scenario = config.load_scenario(args.scenario)
        if args.output_dir is not None:
            scenario = dataclasses.replace(scenario,
                                           output_dir=args.output_dir)
        return scenario
    kwargs: typing.Dict[str, typing.Any] = {
        'mode': args.command, 'output_dir': args.output_dir}
    if args.command == 'ion-check':
        kwargs.update(eta=args.eta, n_max=args.n_max, shape=args.shape,
                      area=config.parse_angle(args.area),
                      workers=args.workers)
        if args.ratio:
            kwargs['ratios'] = tuple(args.ratio)
        return config.Scenario(**kwargs)
    kwargs['propagator'] = evolve.PropagatorConfig(n_steps=args.n_steps,
                                                   method=args.method)
    kwargs['amp_cap'] = args.cap
    if args.command == 'simulate':
        kwargs.update(curve=args.curve, plan=args.plan, which=args.which,
                      theta_mid=(config.parse_angle(args.theta_mid), ),
                      trajectory=args.trajectory)
        if args.target is not None:
            kwargs['target'] = config.parse_target(args.target)
        return config.Scenario(**kwargs)
    kwargs['target'] = config.parse_target('%s:%s' % (args.axis, args.gamma))
    kwargs['workers'] = args.workers
    if args.theta_mid:
        kwargs['theta_mid'] = tuple(config.parse_angle(v)
                                    for v in args.theta_mid)
    if args.command == 'sweep':
        kwargs.update(amplitudes=tuple(args.amplitude),
                      detunings=tuple(args.detuning), warps=args.warps,
                      seed=args.seed)
    return config.Scenario(**kwargs)


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.getLogger('geogates').setLevel(getattr(logging, args.verbose))
    set_default_logging()
    try:
        scenario = scenario_from_args(args)
    except Exception as err:
        return _report_failure(err, getattr(args, 'output_dir', None))
    return run(scenario)


if __name__ == '__main__':
    sys.exit(main())

"""Robustness probes and convergence studies.

Control errors are applied to a schedule and the perturbed gate is
compared with the ideal one. A time warp only changes the speed along the
path and leaves the gate unchanged; amplitude and detuning errors move
the path.
"""

import concurrent.futures
import dataclasses
import enum
import json
import logging
import math
import typing
import numpy
import pandas
import scipy.optimize
from geogates import evolve
from geogates import planner
from geogates import qcore
from geogates import synth
from geogates.errors import DimensionMismatchError
from geogates.errors import VerificationError
from geogates.paths.curve import ParamCurve
from geogates.paths.rate import RateProfile
from geogates.paths.rate import random_sine_warp

logger = logging.getLogger(__name__)

MAX_MAGNITUDE = 0.2
SANITY_FIDELITY = 1 - 1e-6


class ErrorKind(enum.Enum):
    NONE = 'none'
    AMPLITUDE_SCALE = 'amplitude-scale'
    DETUNING_OFFSET = 'detuning-offset'
    TIME_WARP = 'time-warp'

    @property
    def path_preserving(self) -> bool:
        return self in (ErrorKind.NONE, ErrorKind.TIME_WARP)


@dataclasses.dataclass(frozen=True)
class ErrorModel:
    """A deterministic control error.

    :param magnitude: epsilon for an amplitude scale, d (in units of
      pi / tau) for a detuning offset; unused by a time warp.
    :param profile: rate profile of a time warp.
    :param seed: seed the warp was drawn with, if any.
    """

    kind: ErrorKind
    magnitude: float = 0.0
    profile: typing.Optional[RateProfile] = None
    seed: typing.Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', ErrorKind(self.kind))
        if not math.isfinite(self.magnitude):
            raise ValueError('The error magnitude must be finite.')
        if abs(self.magnitude) > MAX_MAGNITUDE:
            raise ValueError('Error magnitudes are limited to |%g|.'
                             % MAX_MAGNITUDE)
        if self.kind is ErrorKind.TIME_WARP:
            if self.profile is None:
                raise ValueError('A time warp needs a rate profile.')
            self.profile.check_monotone()

    @classmethod
    def none(cls) -> 'ErrorModel':
        return cls(ErrorKind.NONE)

    @classmethod
    def amplitude_scale(cls, epsilon: float) -> 'ErrorModel':
        return cls(ErrorKind.AMPLITUDE_SCALE, float(epsilon))

    @classmethod
    def detuning_offset(cls, d: float) -> 'ErrorModel':
        return cls(ErrorKind.DETUNING_OFFSET, float(d))

    @classmethod
    def time_warp(cls, profile: RateProfile,
                  seed: typing.Optional[int] = None) -> 'ErrorModel':
        return cls(ErrorKind.TIME_WARP, 0.0, profile, seed)

    @property
    def path_preserving(self) -> bool:
        return self.kind.path_preserving

    def to_dict(self) -> dict:
        return {'kind': self.kind.value, 'magnitude': self.magnitude,
                'profile': (None if self.profile is None
                            else self.profile.to_dict()),
                'seed': self.seed}


def _scaled_controls(controls, factor):
    def wrapped(times):
        return controls(times).scaled(factor)
    return wrapped


def _amplitude_scale(schedule: synth.HamiltonianSchedule,
                     epsilon: float) -> synth.HamiltonianSchedule:
    factor = 1 + epsilon

    def evaluator(times):
        h = schedule.matrices(times)
        diagonal = numpy.einsum('nii->ni', h)
        res = factor * h
        idx = numpy.arange(schedule.dim)
        res[:, idx, idx] = diagonal
        return res

    controls = (_scaled_controls(schedule.controls, factor)
                if schedule.has_controls else None)
    return synth.HamiltonianSchedule(schedule.dim, schedule.duration,
                                     evaluator, controls,
                                     schedule.breakpoints(),
                                     label=schedule.label + '+amplitude')


def _detuning_offset(schedule: synth.HamiltonianSchedule,
                     d: float) -> synth.HamiltonianSchedule:
    rate = d * math.pi / schedule.duration
    if schedule.dim == 2:
        term = rate * qcore.SIGMA_Z / 2
        # Delta multiplies |1><1| - |0><0| = -sigma_z.
        offset = -rate / 2
    elif schedule.dim == 4:
        term = rate * qcore.R_Z
        offset = rate
    else:
        raise DimensionMismatchError(
            'A detuning offset needs a one- or two-qubit schedule, not '
            'dimension %i.' % schedule.dim)

    def evaluator(times):
        return schedule.matrices(times) + term

    controls = None
    if schedule.has_controls:
        def controls(times):
            return schedule.controls(times).shifted(offset)

    return synth.HamiltonianSchedule(schedule.dim, schedule.duration,
                                     evaluator, controls,
                                     schedule.breakpoints(),
                                     label=schedule.label + '+detuning')


def _warp_inverse(profile: RateProfile, y: float) -> float:
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    return float(scipy.optimize.brentq(lambda x: float(profile(x)) - y,
                                       0.0, 1.0, xtol=1e-15))


def _time_warp(schedule: synth.HamiltonianSchedule,
               profile: RateProfile) -> synth.HamiltonianSchedule:
    tau = schedule.duration

    def warp(times):
        x = times / tau
        return tau * profile(x), profile.derivative(x)

    def evaluator(times):
        inner, speed = warp(times)
        return speed[:, None, None] * schedule.matrices(inner)

    controls = None
    if schedule.has_controls:
        def controls(times):
            inner, speed = warp(times)
            ctrl = schedule.controls(inner)
            changes = {f.name: getattr(ctrl, f.name) * speed
                       for f in dataclasses.fields(ctrl) if f.name != 'times'}
            return dataclasses.replace(ctrl, times=times, **changes)

    breakpoints = [tau * _warp_inverse(profile, b / tau)
                   for b in schedule.breakpoints()]
    return synth.HamiltonianSchedule(schedule.dim, tau, evaluator, controls,
                                     breakpoints,
                                     label=schedule.label + '+warp')


def apply_error(schedule: synth.HamiltonianSchedule,
                err: ErrorModel) -> synth.HamiltonianSchedule:
    """Perturbed copy of a schedule.

    A zero error returns the schedule itself.
    """
    if err.kind is ErrorKind.NONE:
        return schedule
    if err.kind is ErrorKind.TIME_WARP:
        return _time_warp(schedule, err.profile)
    if err.magnitude == 0:
        return schedule
    if err.kind is ErrorKind.AMPLITUDE_SCALE:
        return _amplitude_scale(schedule, err.magnitude)
    return _detuning_offset(schedule, err.magnitude)


def random_time_warps(n: int, seed: int = 0) -> typing.List[ErrorModel]:
    """n smooth random warps drawn from a seeded generator."""
    rng = numpy.random.default_rng(seed)
    return [ErrorModel.time_warp(random_sine_warp(rng), seed=seed)
            for _ in range(n)]


def _axis_label(axis) -> str:
    return ','.join('%.17g' % v for v in axis)


def fidelity_sweep(spec: qcore.GateSpec,
                   plans: typing.Sequence[planner.PathPlan],
                   err_grid: typing.Sequence[ErrorModel],
                   cfg: typing.Optional[evolve.PropagatorConfig] = None,
                   max_workers: typing.Optional[int] = None,
                   min_fidelity: float = SANITY_FIDELITY
                   ) -> pandas.DataFrame:
    """Gate fidelity of each plan under each error.

    Each plan gets a zero-error sanity row first, then one row per error in
    err_grid order.

    :raises VerificationError: when a sanity row is below min_fidelity.
    """
    if not plans or not err_grid:
        raise ValueError('fidelity_sweep needs at least one plan and one '
                         'error model.')
    cfg = cfg or evolve.PropagatorConfig()
    target = qcore.gate_from_spec(spec)
    jobs = []
    for plan in plans:
        schedule = synth.onequbit_hamiltonian(plan.curve)
        for err in [ErrorModel.none()] + list(err_grid):
            jobs.append((plan, schedule, err))

    def one(job):
        plan, schedule, err = job
        u = evolve.propagate(apply_error(schedule, err), cfg)
        return {'plan_family': plan.family.value,
                'theta_mid': (math.nan if plan.theta_mid is None
                              else plan.theta_mid),
                'gamma': spec.half_angle,
                'axis': _axis_label(spec.axis),
                'error_kind': err.kind.value,
                'magnitude': err.magnitude,
                'path_preserving': err.path_preserving,
                'profile': ('' if err.profile is None
                            else json.dumps(err.profile.to_dict(),
                                            sort_keys=True)),
                'fidelity': qcore.gate_fidelity(u, target)}

    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        rows = list(executor.map(one, jobs))
    frame = pandas.DataFrame(rows)
    sanity = frame[frame['error_kind'] == ErrorKind.NONE.value]
    worst = sanity['fidelity'].min()
    if worst < min_fidelity:
        failed = sanity.loc[sanity['fidelity'].idxmin(), 'plan_family']
        raise VerificationError(
            'The zero-error fidelity of the %s plan is %.15f < %.15f.'
            % (failed, worst, min_fidelity))
    logger.info('fidelity sweep: %i rows over %i plans', len(frame),
                len(plans))
    return frame


def warp_spread(frame: pandas.DataFrame) -> float:
    """Largest fidelity spread among the time-warp rows of each plan."""
    warps = frame[frame['error_kind'] == ErrorKind.TIME_WARP.value]
    if warps.empty:
        return 0.0
    grouped = warps.groupby(['plan_family', 'theta_mid'], dropna=False)
    spread = grouped['fidelity'].max() - grouped['fidelity'].min()
    return float(spread.max())


def rotating_field_schedule(omega: float, rotation: float, detuning: float,
                            duration: float) -> synth.HamiltonianSchedule:
    """H = (omega/2)(cos(W t) sigma_x + sin(W t) sigma_y) + (Delta/2) sigma_z
    with W = rotation and Delta = detuning.
    """
    def evaluator(times):
        c = numpy.cos(rotation * times)[:, None, None]
        s = numpy.sin(rotation * times)[:, None, None]
        return (omega / 2 * (c * qcore.SIGMA_X + s * qcore.SIGMA_Y)
                + detuning / 2 * qcore.SIGMA_Z)

    return synth.HamiltonianSchedule(2, duration, evaluator,
                                     label='rotating-field')


def rotating_field_unitary(omega: float, rotation: float, detuning: float,
                           t: float) -> qcore.UnitaryMatrix:
    """Exact propagator of rotating_field_schedule at time t."""
    frame = qcore.expm_hermitian(rotation / 2 * qcore.SIGMA_Z, t)
    inner = qcore.expm_hermitian(
        (omega * qcore.SIGMA_X + (detuning - rotation) * qcore.SIGMA_Z) / 2, t)
    return qcore.UnitaryMatrix(frame @ inner)


class ConvergenceStudy(typing.NamedTuple):
    steps: typing.Tuple[float, ...]
    errors: typing.Tuple[float, ...]
    slope: float


def _loglog_slope(x, y) -> float:
    slope, _ = numpy.polyfit(numpy.log(numpy.asarray(x, dtype=float)),
                             numpy.log(numpy.asarray(y, dtype=float)), 1)
    return float(slope)


def convergence_order(schedule: synth.HamiltonianSchedule,
                      reference: qcore.UnitaryMatrix,
                      n_steps: typing.Sequence[int],
                      method: evolve.Method = evolve.Method.MIDPOINT
                      ) -> ConvergenceStudy:
    """Global error of the propagator against an exact reference.

    The slope is d log(error) / d log(dt), about 2 for the midpoint rule.
    """
    errors = []
    for n in n_steps:
        cfg = evolve.PropagatorConfig(n_steps=n, method=method)
        u = evolve.propagate(schedule, cfg)
        errors.append(float(numpy.max(numpy.abs(u.entries
                                                - reference.entries))))
    dts = [schedule.duration / n for n in n_steps]
    study = ConvergenceStudy(tuple(dts), tuple(errors),
                             _loglog_slope(dts, errors))
    logger.debug('convergence: errors %s, slope %.4f', study.errors,
                 study.slope)
    return study


def frame_convergence(frame: synth.AuxiliaryFrame,
                      reference: synth.HamiltonianSchedule,
                      fd_steps: typing.Sequence[float],
                      times) -> ConvergenceStudy:
    """Error of the finite-difference Hamiltonian against a closed form.

    The times should stay further than the largest step from the
    breakpoints of the frame.
    """
    times = numpy.asarray(times, dtype=float)
    exact = reference.matrices(times)
    errors = [float(numpy.max(numpy.abs(
        frame.hamiltonian_matrices(times, step=h) - exact)))
        for h in fd_steps]
    return ConvergenceStudy(tuple(float(h) for h in fd_steps), tuple(errors),
                            _loglog_slope(fd_steps, errors))


def area_equivalent_pair(gamma: float, theta_mid: float = math.pi / 3
                         ) -> typing.Tuple[ParamCurve, ParamCurve]:
    """A lune and a latitude-arc loop that both enclose 2 gamma."""
    spec = qcore.GateSpec((0.0, 0.0, 1.0), gamma)
    return (planner.plan_orange_slice(spec).curve,
            planner.plan_three_segment(spec, theta_mid).curve)

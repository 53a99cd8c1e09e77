"""Candidate paths for a target rotation and their cost under a drive cap.

Every family is built in the chart of the gate axis, starting from the
chart's north pole, so the first frame vector there is the +1 eigenstate
of n.sigma. Segment durations saturate the cap: a segment with pulse
area A runs for |A| / cap. No segment runs shorter than a small idle
share of the driven time, so pole turns and arcs on or near the equator,
whose drive is mostly detuning, still follow their azimuth sweep.
"""

import concurrent.futures
import dataclasses
import enum
import logging
import math
import typing
import numpy
import pandas
from geogates import evolve
from geogates import qcore
from geogates import synth
from geogates.errors import CurveDomainError
from geogates.errors import SweepTooLargeError
from geogates.errors import VerificationError
from geogates.paths.curve import ParamCurve
from geogates.paths.curve import chart_axis_for
from geogates.paths.curve import min_circle_curve
from geogates.paths.curve import path_lengths
from geogates.paths.curve import rabi_magnitude_area
from geogates.paths.curve import solid_angle_phase
from geogates.paths.segments import LatitudeArc
from geogates.paths.segments import Meridian
from geogates.paths.segments import Segment

logger = logging.getLogger(__name__)

IDLE_FRACTION = 0.05
AREA_TOL = 1e-12
MIN_FIDELITY = 1 - 1e-6
STEPS_PER_PERIOD = 256


class PlanFamily(enum.Enum):
    ORANGE_SLICE = 'orange-slice'
    THREE_SEGMENT = 'three-segment'
    MIN_CIRCLE = 'min-circle'


@dataclasses.dataclass(frozen=True)
class PathPlan:
    """A candidate path and its predicted cost.

    :param pulse_areas: signed areas of the driven segments, in the chart
      of the gate axis. A minimal circle has a single entry, the integral
      of the drive modulus.
    :param time_estimate: duration at the drive cap amp_cap.
    :param fidelity: simulated gate fidelity, once verified.
    """

    curve: ParamCurve
    family: PlanFamily
    spec: qcore.GateSpec
    predicted_gamma: float
    lengths: typing.Dict[str, float]
    time_estimate: float
    pulse_areas: typing.Tuple[float, ...]
    amp_cap: float = 1.0
    theta_mid: typing.Optional[float] = None
    fidelity: typing.Optional[float] = None

    @property
    def time_times_cap(self) -> float:
        return self.time_estimate * self.amp_cap

    def to_dict(self) -> dict:
        return {
            'family': self.family.value,
            'spec': self.spec.to_dict(),
            'theta_mid': self.theta_mid,
            'predicted_gamma': self.predicted_gamma,
            'lengths': dict(self.lengths),
            'time_estimate': self.time_estimate,
            'amp_cap': self.amp_cap,
            'pulse_areas': list(self.pulse_areas),
            'fidelity': self.fidelity,
            'curve': self.curve.to_dict()
        }


def _check_cap(amp_cap: float) -> float:
    amp_cap = float(amp_cap)
    if not amp_cap > 0:
        raise ValueError('The amplitude cap must be positive.')
    return amp_cap


def _segment_area(seg: Segment) -> float:
    # Signed chart-frame area: theta change / 2 on meridians,
    # -sin(theta) cos(theta) phi change / 2 on latitude arcs.
    if isinstance(seg, Meridian):
        return 0.5 * (seg.theta_to - seg.theta_from)
    if isinstance(seg, LatitudeArc):
        if seg.is_pole_turn:
            return 0.0
        return (-0.5 * math.sin(seg.theta) * math.cos(seg.theta)
                * (seg.phi_to - seg.phi_from))
    raise TypeError('No closed-form area for %r.' % seg)


def _timed_curve(shapes: typing.Sequence[typing.Tuple[type, tuple]],
                 spec: qcore.GateSpec, amp_cap: float,
                 idle_fraction: float) -> ParamCurve:
    """Assemble segments with cap-saturating durations.

    Every segment lasts at least idle_fraction of the driven time.
    """
    protos = [cls(*args) for cls, args in shapes]
    driven = [abs(_segment_area(seg)) / amp_cap for seg in protos]
    total_driven = sum(driven)
    if total_driven == 0.0:
        durations = [1.0] * len(protos)
    else:
        idle = idle_fraction * total_driven
        durations = [max(d, idle) for d in driven]
    total = sum(durations)
    segments = tuple(cls(*args, duration_fraction=d / total)
                     for (cls, args), d in zip(shapes, durations))
    return ParamCurve(segments, total_time=total if total_driven else 1.0,
                      chart_axis=chart_axis_for(spec))


def _windows_areas(curve: ParamCurve) -> typing.Tuple[float, ...]:
    schedule = synth.onequbit_hamiltonian(curve)
    # Equatorial arcs carry detuning only.
    return tuple(synth.pulse_area(schedule, lo, hi)
                 if abs(_segment_area(seg)) > AREA_TOL else 0.0
                 for lo, hi, seg in curve.segment_windows()
                 if not seg.is_pole_turn)


def _finish(curve: ParamCurve, family: PlanFamily, spec: qcore.GateSpec,
            amp_cap: float, areas: typing.Tuple[float, ...],
            theta_mid: typing.Optional[float] = None) -> PathPlan:
    plan = PathPlan(curve=curve, family=family, spec=spec,
                    predicted_gamma=solid_angle_phase(curve),
                    lengths=path_lengths(curve),
                    time_estimate=0.0, pulse_areas=areas, amp_cap=amp_cap,
                    theta_mid=theta_mid)
    plan = dataclasses.replace(plan,
                               time_estimate=time_estimate(plan, amp_cap))
    logger.debug('%s plan: gamma %.12g, time*cap %.12g', family.value,
                 plan.predicted_gamma, plan.time_times_cap)
    return plan


def plan_orange_slice(spec: qcore.GateSpec, amp_cap: float = 1.0,
                      phi0: float = 0.0,
                      idle_fraction: float = IDLE_FRACTION) -> PathPlan:
    """Two meridians joined by a turn of gamma at the south pole.

    A zero angle gives a lune of zero width, drawn as two meridians of
    zero length.
    """
    amp_cap = _check_cap(amp_cap)
    gamma = spec.half_angle
    bottom = math.pi if gamma != 0.0 else 0.0
    shapes = [(Meridian, (phi0, 0.0, bottom)),
              (LatitudeArc, (bottom, phi0, phi0 + gamma)),
              (Meridian, (phi0 + gamma, bottom, 0.0))]
    curve = _timed_curve(shapes, spec, amp_cap, idle_fraction)
    return _finish(curve, PlanFamily.ORANGE_SLICE, spec, amp_cap,
                   _windows_areas(curve))


def arc_sweep(gamma: float, theta_mid: float) -> float:
    """Azimuth sweep of the arc at theta_mid that encloses 2 gamma."""
    return 2 * gamma / (1 - math.cos(theta_mid))


def plan_three_segment(spec: qcore.GateSpec, theta_mid: float,
                       amp_cap: float = 1.0, phi0: float = 0.0,
                       idle_fraction: float = IDLE_FRACTION) -> PathPlan:
    """Meridian down to theta_mid, latitude arc, meridian back up.

    The arc sweeps 2 gamma / (1 - cos(theta_mid)). At theta_mid = pi the
    arc is a pole turn and the plan is an orange slice.

    :raises SweepTooLargeError: when the sweep would exceed 2 pi.
    """
    amp_cap = _check_cap(amp_cap)
    theta_mid = float(theta_mid)
    if not 0.0 < theta_mid <= math.pi:
        raise ValueError('theta_mid must be in (0, pi].')
    gamma = spec.half_angle
    if abs(gamma) > math.pi * (1 - math.cos(theta_mid)) * (1 + 1e-12):
        raise SweepTooLargeError(
            'gamma = %.12g needs an arc sweep above 2 pi at theta_mid = %.12g.'
            % (gamma, theta_mid))
    sweep = arc_sweep(gamma, theta_mid)
    shapes = [(Meridian, (phi0, 0.0, theta_mid)),
              (LatitudeArc, (theta_mid, phi0, phi0 + sweep)),
              (Meridian, (phi0 + sweep, theta_mid, 0.0))]
    curve = _timed_curve(shapes, spec, amp_cap, idle_fraction)
    return _finish(curve, PlanFamily.THREE_SEGMENT, spec, amp_cap,
                   _windows_areas(curve), theta_mid=theta_mid)


def plan_min_circle(spec: qcore.GateSpec, amp_cap: float = 1.0) -> PathPlan:
    """Shortest closed path enclosing 2 gamma.

    The drive modulus varies along the circle; its integral is the single
    pulse-area entry and the duration makes the average modulus equal to
    the cap.

    :raises CurveDomainError: for gamma = 0.
    """
    amp_cap = _check_cap(amp_cap)
    curve = min_circle_curve(spec)
    area = rabi_magnitude_area(curve)
    curve = curve.with_total_time(area / amp_cap)
    return _finish(curve, PlanFamily.MIN_CIRCLE, spec, amp_cap, (area, ))


def time_estimate(plan: PathPlan, amp_cap: float) -> float:
    """Evolution time at the cap: sum of |pulse areas| / cap."""
    amp_cap = _check_cap(amp_cap)
    return float(sum(abs(a) for a in plan.pulse_areas)) / amp_cap


def build_plans(spec: qcore.GateSpec, theta_mid_grid: typing.Sequence[float],
                amp_cap: float = 1.0) -> typing.List[PathPlan]:
    """Every family that can realize spec, in a fixed order.

    Families that cannot be built (for example a minimal circle for a zero
    angle, or an arc sweep above 2 pi) are skipped with a warning.
    """
    builders: typing.List[typing.Tuple[str, typing.Callable[[], PathPlan]]]
    builders = [('orange-slice', lambda: plan_orange_slice(spec, amp_cap))]
    for theta_mid in theta_mid_grid:
        builders.append(
            ('three-segment(%.6g)' % theta_mid,
             lambda theta_mid=theta_mid: plan_three_segment(spec, theta_mid,
                                                            amp_cap)))
    builders.append(('min-circle', lambda: plan_min_circle(spec, amp_cap)))
    plans = []
    for name, build in builders:
        try:
            plans.append(build())
        except (CurveDomainError, SweepTooLargeError) as err:
            logger.warning('skipping %s: %s', name, err)
    return plans


def verify_plan(plan: PathPlan,
                cfg: typing.Optional[evolve.PropagatorConfig] = None
                ) -> PathPlan:
    """Simulate the plan and record its gate fidelity.

    The step count is raised above cfg.n_steps when the plan's peak
    frequency needs more than STEPS_PER_PERIOD steps per period.
    """
    cfg = cfg or evolve.PropagatorConfig(amp_cap=plan.amp_cap)
    schedule = synth.onequbit_hamiltonian(plan.curve)
    needed = evolve.step_count_for(schedule.duration,
                                   evolve.peak_frequency(schedule),
                                   STEPS_PER_PERIOD)
    if needed > cfg.n_steps:
        logger.debug('%s plan (theta_mid=%r): %i steps instead of %i',
                     plan.family.value, plan.theta_mid, needed, cfg.n_steps)
        cfg = dataclasses.replace(cfg, n_steps=needed)
    report = evolve.run_geometric_gate(plan.curve, evolve.Which.ONE_QUBIT,
                                       plan.spec, cfg)
    return dataclasses.replace(plan, fidelity=report.fidelity_vs_target)


def compare_plans(spec: qcore.GateSpec,
                  theta_mid_grid: typing.Sequence[float],
                  amp_cap: float = 1.0,
                  cfg: typing.Optional[evolve.PropagatorConfig] = None,
                  max_workers: typing.Optional[int] = None,
                  min_fidelity: float = MIN_FIDELITY) -> typing.List[PathPlan]:
    """Build, verify and rank all families for spec.

    Plans are simulated concurrently; a plan below min_fidelity is
    dropped with a warning. The result is sorted by time estimate, ties
    keeping the build order.

    :raises VerificationError: when no plan survives.
    """
    if len(theta_mid_grid) == 0:
        raise ValueError('The theta_mid grid must not be empty.')
    cfg = cfg or evolve.PropagatorConfig(amp_cap=amp_cap)
    plans = build_plans(spec, theta_mid_grid, amp_cap)
    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        verified = list(executor.map(lambda p: verify_plan(p, cfg), plans))
    kept = []
    for plan in verified:
        assert plan.fidelity is not None
        if plan.fidelity < min_fidelity:
            logger.warning('dropping %s plan (theta_mid=%r): fidelity %.12g '
                           '< %.12g', plan.family.value, plan.theta_mid,
                           plan.fidelity, min_fidelity)
            continue
        logger.info('verified %s plan: fidelity %.15f', plan.family.value,
                    plan.fidelity)
        kept.append(plan)
    if not kept:
        raise VerificationError('No plan reached fidelity %.12g.'
                                % min_fidelity)
    return sorted(kept, key=lambda p: p.time_estimate)


def plans_to_frame(plans: typing.Sequence[PathPlan]) -> pandas.DataFrame:
    """Comparison table, one row per plan."""
    rows = []
    for plan in plans:
        rows.append({
            'family': plan.family.value,
            'theta_mid': (numpy.nan if plan.theta_mid is None
                          else plan.theta_mid),
            'gamma': plan.predicted_gamma,
            'length_spherical': plan.lengths['spherical'],
            'length_paramsum': plan.lengths['param_sum'],
            'time_times_cap': plan.time_times_cap,
            'fidelity': (numpy.nan if plan.fidelity is None
                         else plan.fidelity)
        })
    return pandas.DataFrame(rows, columns=['family', 'theta_mid', 'gamma',
                                           'length_spherical',
                                           'length_paramsum',
                                           'time_times_cap', 'fidelity'])

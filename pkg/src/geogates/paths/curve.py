"""Closed parameter curves and their geometric functionals."""

import dataclasses
import enum
import json
import logging
import math
import typing
import numpy
import scipy.optimize
from geogates import quadrature
from geogates.errors import CurveDomainError
from geogates.errors import DiscontinuousCurveError
from geogates.errors import OpenCurveError
from geogates.paths.rate import ComposedRate
from geogates.paths.rate import RateProfile
from geogates.paths.rate import rate_from_dict
from geogates.paths.segments import Segment
from geogates.paths.segments import TiltedCircle
from geogates.paths.segments import segment_from_dict
from geogates.qcore import GateSpec

logger = logging.getLogger(__name__)

CHAIN_TOL = 1e-10
FRACTION_TOL = 1e-9


class LengthConvention(enum.Enum):
    """How path length is measured.

    SPHERICAL is the arc length on the unit sphere. PARAM_SUM adds the
    total variations of theta and phi, segment by segment.
    """
    SPHERICAL = 'spherical'
    PARAM_SUM = 'param_sum'


class CurvePoint(typing.NamedTuple):
    t: float
    theta: float
    phi: float
    dtheta: float
    dphi: float


class CurveSamples(typing.NamedTuple):
    """Vectorized evaluation of a curve; derivatives are per unit time."""
    t: numpy.ndarray
    theta: numpy.ndarray
    phi: numpy.ndarray
    dtheta: numpy.ndarray
    dphi: numpy.ndarray
    segment: numpy.ndarray


def _unit_axis(axis) -> typing.Optional[typing.Tuple[float, float, float]]:
    if axis is None:
        return None
    vec = numpy.asarray(axis, dtype=float).reshape(-1)
    if vec.size != 3 or abs(float(numpy.linalg.norm(vec)) - 1.0) > 1e-12:
        raise ValueError('chart_axis must be a unit 3-vector.')
    return (float(vec[0]), float(vec[1]), float(vec[2]))


@dataclasses.dataclass(frozen=True)
class ParamCurve:
    """Piecewise-smooth path t -> (theta(t), phi(t)) on the unit sphere.

    :param segments: ordered segments; their duration fractions add to 1.
    :param total_time: nominal duration tau.
    :param rate_profile: optional monotone reparameterization of t / tau.
    :param chart_axis: optional unit vector. The segments are drawn in a
      chart whose north pole is this axis (see
      :func:`geogates.qcore.chart_rotation`).
    """

    segments: typing.Tuple[Segment, ...]
    total_time: float = 1.0
    rate_profile: typing.Optional[RateProfile] = None
    chart_axis: typing.Optional[typing.Tuple[float, float, float]] = None
    _edges: numpy.ndarray = dataclasses.field(init=False, repr=False,
                                              compare=False)

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValueError('A curve needs at least one segment.')
        total_time = float(self.total_time)
        if not total_time > 0:
            raise ValueError('total_time must be positive.')
        fractions = numpy.array([seg.duration_fraction for seg in segments])
        if abs(float(numpy.sum(fractions)) - 1.0) > FRACTION_TOL:
            raise ValueError('Segment duration fractions add up to %r, '
                             'not 1.' % float(numpy.sum(fractions)))
        for i, (prev, nxt) in enumerate(zip(segments[:-1], segments[1:])):
            gap = float(numpy.linalg.norm(prev.end_point - nxt.start_point))
            if gap > CHAIN_TOL:
                raise DiscontinuousCurveError(
                    'Segment %i ends %g away from the start of segment %i.'
                    % (i, gap, i + 1))
        if self.rate_profile is not None:
            self.rate_profile.check_monotone()
        edges = numpy.concatenate(([0.0], numpy.cumsum(fractions)))
        edges[-1] = 1.0
        object.__setattr__(self, 'segments', segments)
        object.__setattr__(self, 'total_time', total_time)
        object.__setattr__(self, 'chart_axis', _unit_axis(self.chart_axis))
        object.__setattr__(self, '_edges', edges)

    @property
    def fractions(self) -> numpy.ndarray:
        return numpy.diff(self._edges)

    def _progress(self, times) -> typing.Tuple[numpy.ndarray, numpy.ndarray]:
        x = numpy.clip(numpy.asarray(times, dtype=float) / self.total_time,
                       0.0, 1.0)
        if self.rate_profile is None:
            return x, numpy.ones(x.shape)
        return self.rate_profile(x), self.rate_profile.derivative(x)

    def _locate(self, progress: numpy.ndarray
                ) -> typing.Tuple[numpy.ndarray, numpy.ndarray]:
        idx = numpy.searchsorted(self._edges, progress, side='right') - 1
        idx = numpy.clip(idx, 0, len(self.segments) - 1)
        frac = self.fractions[idx]
        s = numpy.clip((progress - self._edges[idx]) / frac, 0.0, 1.0)
        return idx, s

    def _per_segment(self, times, method: str):
        # Evaluate a segment method on the local parameters of all times;
        # returns the per-segment results and d(s)/dt.
        t = numpy.asarray(times, dtype=float)
        progress, dprogress = self._progress(t)
        idx, s = self._locate(progress)
        scale = dprogress / (self.total_time * self.fractions[idx])
        results = {}
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if numpy.any(mask):
                results[i] = (mask, getattr(seg, method)(s[mask]))
        return t, idx, scale, results

    def evaluate(self, times) -> CurveSamples:
        """theta, phi and their time derivatives at the given times."""
        t, idx, scale, results = self._per_segment(times, 'evaluate')
        theta = numpy.empty(t.shape)
        phi = numpy.empty(t.shape)
        dtheta = numpy.empty(t.shape)
        dphi = numpy.empty(t.shape)
        for mask, sample in results.values():
            theta[mask] = sample.theta
            phi[mask] = sample.phi
            dtheta[mask] = sample.dtheta
            dphi[mask] = sample.dphi
        return CurveSamples(t, theta, phi, dtheta * scale, dphi * scale, idx)

    def solid_angle_rate(self, times) -> numpy.ndarray:
        """(1 - cos(theta)) dphi/dt, in a form regular at the north pole."""
        t, idx, scale, results = self._per_segment(times,
                                                   'solid_angle_density')
        res = numpy.empty(t.shape)
        for mask, values in results.values():
            res[mask] = values
        return res * scale

    def points(self, times) -> numpy.ndarray:
        """Chart-frame Cartesian points (n, 3)."""
        t, idx, scale, results = self._per_segment(times, 'point')
        res = numpy.empty(t.shape + (3, ))
        for mask, values in results.values():
            res[mask] = values
        return res

    def _progress_to_time(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        if u >= 1.0:
            return self.total_time
        if self.rate_profile is None:
            return u * self.total_time
        profile = self.rate_profile
        x = scipy.optimize.brentq(lambda x: float(profile(x)) - u, 0.0, 1.0,
                                  xtol=1e-15, rtol=4 * numpy.finfo(float).eps)
        return float(x) * self.total_time

    def segment_windows(self) -> typing.List[typing.Tuple[float, float,
                                                          Segment]]:
        """(t_start, t_end, segment) for each segment, in order."""
        times = [self._progress_to_time(float(u)) for u in self._edges]
        return [(times[i], times[i + 1], seg)
                for i, seg in enumerate(self.segments)]

    def breakpoints(self) -> typing.List[float]:
        """Times at which the curve may fail to be smooth."""
        return [self._progress_to_time(float(u)) for u in self._edges]

    @property
    def start_point(self) -> numpy.ndarray:
        return self.segments[0].start_point

    @property
    def end_point(self) -> numpy.ndarray:
        return self.segments[-1].end_point

    def closure_gap(self) -> float:
        return float(numpy.linalg.norm(self.end_point - self.start_point))

    def is_closed(self, tol: float = CHAIN_TOL) -> bool:
        return self.closure_gap() <= tol

    def require_closed(self, tol: float = CHAIN_TOL) -> None:
        gap = self.closure_gap()
        if gap > tol:
            raise OpenCurveError('The curve ends %g away from its starting '
                                 'point.' % gap)

    def with_rate_profile(self, profile: RateProfile) -> 'ParamCurve':
        """Same path, with profile applied to normalized time first."""
        if self.rate_profile is not None:
            profile = ComposedRate(self.rate_profile, profile)
        return dataclasses.replace(self, rate_profile=profile)

    def with_total_time(self, total_time: float) -> 'ParamCurve':
        return dataclasses.replace(self, total_time=total_time)

    def reversed(self) -> 'ParamCurve':
        """The same path traversed backwards, at uniform rate."""
        return ParamCurve(tuple(seg.reversed()
                                for seg in reversed(self.segments)),
                          self.total_time, None, self.chart_axis)

    def to_dict(self) -> dict:
        return {
            'segments': [seg.to_dict() for seg in self.segments],
            'tau': self.total_time,
            'rate_profile': (None if self.rate_profile is None
                             else self.rate_profile.to_dict()),
            'chart_axis': (None if self.chart_axis is None
                           else list(self.chart_axis))
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ParamCurve':
        if not isinstance(data, dict) or 'segments' not in data:
            raise ValueError('A curve document needs a "segments" list.')
        profile = data.get('rate_profile')
        return cls(tuple(segment_from_dict(seg) for seg in data['segments']),
                   total_time=data.get('tau', 1.0),
                   rate_profile=(None if profile is None
                                 else rate_from_dict(profile)),
                   chart_axis=data.get('chart_axis'))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> 'ParamCurve':
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, 'w') as fh:
            fh.write(self.to_json())
            fh.write('\n')

    @classmethod
    def load(cls, path) -> 'ParamCurve':
        with open(path) as fh:
            return cls.from_json(fh.read())


def solid_angle_phase(curve: ParamCurve,
                      tol: float = quadrature.DEFAULT_TOL) -> float:
    """Half the signed solid angle, 1/2 of the loop integral of
    (1 - cos(theta)) dphi.

    The value is continuous (not reduced modulo 2 pi). Pole turns at
    theta = pi contribute their full phi sweep, and pole turns at
    theta = 0 contribute nothing.

    :raises OpenCurveError: if the curve is not closed.
    """
    curve.require_closed()
    seg_tol = tol / len(curve.segments)
    return 0.5 * sum(seg.solid_angle_integral(seg_tol)
                     for seg in curve.segments)


def path_length(curve: ParamCurve,
                convention: typing.Union[LengthConvention, str]
                = LengthConvention.SPHERICAL) -> float:
    """Length of the path under the given convention.

    Pole turns contribute nothing to either convention.
    """
    convention = LengthConvention(convention)
    if convention is LengthConvention.SPHERICAL:
        return float(sum(seg.spherical_length() for seg in curve.segments))
    return float(sum(seg.param_variation() for seg in curve.segments))


def path_lengths(curve: ParamCurve) -> typing.Dict[str, float]:
    return {conv.value: path_length(curve, conv) for conv in LengthConvention}


def rabi_magnitude_area(curve: ParamCurve) -> float:
    """Integral of the single-qubit drive modulus |Omega(t)| along the curve.

    It does not depend on the rate profile or the total time.
    """
    return float(sum(seg.rabi_magnitude_integral() for seg in curve.segments))


def min_circle_curve(spec: GateSpec, total_time: float = 1.0) -> ParamCurve:
    """Shortest closed path from the gate's start point enclosing 2 gamma.

    The circle has angular radius rho with 2 pi (1 - cos(rho)) = |2 gamma|
    and is traversed so that the signed solid angle is 2 gamma. It is built
    in the chart of the gate axis, starting from the chart's north pole.

    :raises CurveDomainError: unless 0 < |2 gamma| < 4 pi.
    """
    gamma = spec.half_angle
    if not 0.0 < abs(2 * gamma) < 4 * math.pi:
        raise CurveDomainError('A minimal circle needs 0 < |2 gamma| < 4 pi '
                               '(got gamma=%r).' % gamma)
    cos_rho = 1.0 - abs(gamma) / math.pi
    rho = math.acos(cos_rho)
    center = (math.sin(rho), 0.0, cos_rho)
    circle = TiltedCircle(center, rho, 0.0, math.copysign(2 * math.pi, gamma))
    return ParamCurve((circle, ), total_time=total_time,
                      chart_axis=chart_axis_for(spec))


def chart_axis_for(spec: GateSpec
                   ) -> typing.Optional[typing.Tuple[float, float, float]]:
    """The chart axis of a spec, or None when it is the z axis."""
    if spec.axis == (0.0, 0.0, 1.0):
        return None
    return spec.axis


def sample(curve: ParamCurve, n_steps: int) -> typing.List[CurvePoint]:
    """Uniform samples (t, theta, phi, dtheta/dt, dphi/dt) over [0, tau]."""
    if n_steps < 2:
        raise ValueError('n_steps must be at least 2.')
    values = curve.evaluate(numpy.linspace(0.0, curve.total_time, n_steps))
    return [CurvePoint(float(t), float(th), float(ph), float(dth), float(dph))
            for t, th, ph, dth, dph in zip(values.t, values.theta, values.phi,
                                           values.dtheta, values.dphi)]

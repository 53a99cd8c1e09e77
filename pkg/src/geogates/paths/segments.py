"""Smooth pieces of parameter curves (theta, phi) on the unit sphere.

A segment is parameterized by a local progress s in [0, 1]. All evaluation
methods are vectorized over s and return derivatives with respect to s;
the owning curve rescales them to physical time.
"""

import abc
import enum
import logging
import math
import typing
import numpy
import scipy.interpolate
from geogates import quadrature
from geogates.errors import CurveDomainError

logger = logging.getLogger(__name__)

# Below this distance from a pole, angle derivatives come from the
# Cartesian tangent rather than from atan2 of the coordinates.
POLE_GUARD = 1e-8
POLE_TOL = 1e-12
VARIATION_SAMPLES = 8193


class SegmentKind(enum.Enum):
    MERIDIAN = 'meridian'
    LATITUDE_ARC = 'latitude_arc'
    TILTED_CIRCLE = 'tilted_circle'
    CUSTOM = 'custom'


class SegmentSample(typing.NamedTuple):
    theta: numpy.ndarray
    phi: numpy.ndarray
    dtheta: numpy.ndarray
    dphi: numpy.ndarray


def to_cartesian(theta, phi) -> numpy.ndarray:
    """Unit vectors (..., 3) for polar angle theta and azimuth phi."""
    theta = numpy.asarray(theta, dtype=float)
    phi = numpy.asarray(phi, dtype=float)
    st = numpy.sin(theta)
    return numpy.stack((st * numpy.cos(phi),
                        st * numpy.sin(phi),
                        numpy.cos(theta)), axis=-1)


def _check_theta(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= math.pi:
        raise ValueError('%s must be in [0, pi] (got %r).' % (name, value))
    return value


def _sampled_variation(seg: 'Segment') -> float:
    s = numpy.linspace(0.0, 1.0, VARIATION_SAMPLES)
    sample = seg.evaluate(s)
    dtheta = numpy.abs(numpy.diff(sample.theta))
    dphi = numpy.abs(numpy.diff(numpy.unwrap(sample.phi)))
    # phi is undefined at a pole; a pass through one is not a phi variation.
    near_pole = numpy.sin(sample.theta) < 1e-6
    dphi[near_pole[:-1] | near_pole[1:]] = 0.0
    return float(numpy.sum(dtheta) + numpy.sum(dphi))


class Segment(abc.ABC):
    """One smooth piece of a curve.

    :param duration_fraction: share of the curve's progress spent on
      this segment, in (0, 1].
    """

    kind: typing.ClassVar[SegmentKind]

    def __init__(self, duration_fraction: float = 1.0):
        duration_fraction = float(duration_fraction)
        if not 0.0 < duration_fraction <= 1.0:
            raise ValueError('duration_fraction must be in (0, 1] '
                             '(got %r).' % duration_fraction)
        self.duration_fraction = duration_fraction

    @abc.abstractmethod
    def evaluate(self, s) -> SegmentSample:
        pass

    @abc.abstractmethod
    def params(self) -> dict:
        """Kind-specific parameters, as stored in JSON documents."""
        pass

    @abc.abstractmethod
    def reversed(self) -> 'Segment':
        pass

    def point(self, s) -> numpy.ndarray:
        sample = self.evaluate(s)
        return to_cartesian(sample.theta, sample.phi)

    @property
    def start_point(self) -> numpy.ndarray:
        return self.point(numpy.array([0.0]))[0]

    @property
    def end_point(self) -> numpy.ndarray:
        return self.point(numpy.array([1.0]))[0]

    @property
    def is_pole_turn(self) -> bool:
        return False

    def solid_angle_density(self, s) -> numpy.ndarray:
        """(1 - cos(theta)) dphi/ds."""
        sample = self.evaluate(s)
        return (1.0 - numpy.cos(sample.theta)) * sample.dphi

    def solid_angle_integral(self, tol: float = quadrature.DEFAULT_TOL
                             ) -> float:
        """Integral of (1 - cos(theta)) dphi over the segment."""
        return float(quadrature.adaptive_gauss_legendre(
            self.solid_angle_density, 0.0, 1.0, tol=tol))

    def speed(self, s) -> numpy.ndarray:
        """Spherical speed |dr/ds|."""
        sample = self.evaluate(s)
        return numpy.hypot(sample.dtheta,
                           numpy.sin(sample.theta) * sample.dphi)

    def spherical_length(self) -> float:
        return float(quadrature.adaptive_gauss_legendre(self.speed, 0.0, 1.0))

    def param_variation(self) -> float:
        """Total variation of theta plus that of phi."""
        return _sampled_variation(self)

    def rabi_density(self, s) -> numpy.ndarray:
        """Drive modulus per unit progress, |Omega| dt/ds."""
        sample = self.evaluate(s)
        st = numpy.sin(sample.theta)
        return 0.5 * numpy.hypot(sample.dtheta,
                                 sample.dphi * st * numpy.cos(sample.theta))

    def rabi_magnitude_integral(self) -> float:
        if self.is_pole_turn:
            return 0.0
        return float(quadrature.adaptive_gauss_legendre(
            self.rabi_density, 0.0, 1.0))

    def to_dict(self) -> dict:
        res = {'kind': self.kind.value,
               'duration_fraction': self.duration_fraction}
        res.update(self.params())
        return res

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        args = ', '.join('%s=%r' % kv for kv in self.params().items())
        return '%s(%s, duration_fraction=%r)' % (
            type(self).__name__, args, self.duration_fraction)


class Meridian(Segment):
    """Constant phi, theta moving linearly from theta_from to theta_to."""

    kind = SegmentKind.MERIDIAN

    def __init__(self, phi: float, theta_from: float, theta_to: float,
                 duration_fraction: float = 1.0):
        super().__init__(duration_fraction)
        self.phi = float(phi)
        self.theta_from = _check_theta(theta_from, 'theta_from')
        self.theta_to = _check_theta(theta_to, 'theta_to')

    def evaluate(self, s) -> SegmentSample:
        s = numpy.asarray(s, dtype=float)
        delta = self.theta_to - self.theta_from
        return SegmentSample(self.theta_from + delta * s,
                             numpy.full(s.shape, self.phi),
                             numpy.full(s.shape, delta),
                             numpy.zeros(s.shape))

    def params(self) -> dict:
        return {'phi': self.phi, 'theta_from': self.theta_from,
                'theta_to': self.theta_to}

    def reversed(self) -> 'Meridian':
        return Meridian(self.phi, self.theta_to, self.theta_from,
                        self.duration_fraction)

    def spherical_length(self) -> float:
        return abs(self.theta_to - self.theta_from)

    def param_variation(self) -> float:
        return abs(self.theta_to - self.theta_from)


class LatitudeArc(Segment):
    """Constant theta, phi moving linearly from phi_from to phi_to.

    At theta = 0 or pi the arc is a pole turn: the point does not move but
    the azimuth, and with it the auxiliary frame, is relabelled.
    """

    kind = SegmentKind.LATITUDE_ARC

    def __init__(self, theta: float, phi_from: float, phi_to: float,
                 duration_fraction: float = 1.0):
        super().__init__(duration_fraction)
        self.theta = _check_theta(theta, 'theta')
        self.phi_from = float(phi_from)
        self.phi_to = float(phi_to)

    @property
    def is_pole_turn(self) -> bool:
        return abs(math.sin(self.theta)) < POLE_TOL

    def evaluate(self, s) -> SegmentSample:
        s = numpy.asarray(s, dtype=float)
        delta = self.phi_to - self.phi_from
        return SegmentSample(numpy.full(s.shape, self.theta),
                             self.phi_from + delta * s,
                             numpy.zeros(s.shape),
                             numpy.full(s.shape, delta))

    def point(self, s) -> numpy.ndarray:
        if self.is_pole_turn:
            s = numpy.asarray(s, dtype=float)
            pole = numpy.array([0.0, 0.0, math.cos(self.theta)])
            return numpy.broadcast_to(pole, s.shape + (3, )).copy()
        return super().point(s)

    def params(self) -> dict:
        return {'theta': self.theta, 'phi_from': self.phi_from,
                'phi_to': self.phi_to}

    def reversed(self) -> 'LatitudeArc':
        return LatitudeArc(self.theta, self.phi_to, self.phi_from,
                           self.duration_fraction)

    def spherical_length(self) -> float:
        if self.is_pole_turn:
            return 0.0
        return math.sin(self.theta) * abs(self.phi_to - self.phi_from)

    def param_variation(self) -> float:
        if self.is_pole_turn:
            return 0.0
        return abs(self.phi_to - self.phi_from)


class TiltedCircle(Segment):
    """Arc of a circle of angular radius rho around an arbitrary axis c.

    With (alpha, beta) the polar angles of c, the in-plane basis is
    e1 = (-cos(alpha) cos(beta), -cos(alpha) sin(beta), sin(alpha)) and
    e2 = c x e1, and the arc is
    r(psi) = cos(rho) c + sin(rho) (cos(psi) e1 + sin(psi) e2)
    for psi from start_angle to start_angle + sweep. psi = 0 is the point
    of the circle closest to the north pole; a positive sweep turns
    counter-clockwise about c.
    """

    kind = SegmentKind.TILTED_CIRCLE

    def __init__(self, axis, radius: float, start_angle: float, sweep: float,
                 duration_fraction: float = 1.0):
        super().__init__(duration_fraction)
        axis = numpy.asarray(axis, dtype=float).reshape(-1)
        norm = float(numpy.linalg.norm(axis))
        if axis.size != 3 or abs(norm - 1.0) > 1e-12:
            raise ValueError('The circle axis must be a unit 3-vector.')
        self.axis = tuple(float(x) for x in axis)
        self.radius = _check_theta(radius, 'radius')
        self.start_angle = float(start_angle)
        self.sweep = float(sweep)
        alpha = math.atan2(math.hypot(axis[0], axis[1]), axis[2])
        beta = math.atan2(axis[1], axis[0])
        self._c = axis
        self._e1 = numpy.array([-math.cos(alpha) * math.cos(beta),
                                -math.cos(alpha) * math.sin(beta),
                                math.sin(alpha)])
        self._e2 = numpy.cross(self._c, self._e1)
        self._alpha = alpha

    def _frame(self, s):
        s = numpy.asarray(s, dtype=float)
        psi = self.start_angle + self.sweep * s
        cp = numpy.cos(psi)[..., None]
        sp = numpy.sin(psi)[..., None]
        sr = math.sin(self.radius)
        pos = (math.cos(self.radius) * self._c
               + sr * (cp * self._e1 + sp * self._e2))
        tangent = self.sweep * sr * (-sp * self._e1 + cp * self._e2)
        return pos, tangent

    def point(self, s) -> numpy.ndarray:
        return self._frame(s)[0]

    def evaluate(self, s) -> SegmentSample:
        pos, tangent = self._frame(s)
        x, y, z = pos[..., 0], pos[..., 1], pos[..., 2]
        vx, vy, vz = tangent[..., 0], tangent[..., 1], tangent[..., 2]
        rho_xy = numpy.hypot(x, y)
        theta = numpy.arctan2(rho_xy, z)
        phi = numpy.arctan2(y, x)
        near = rho_xy < POLE_GUARD
        safe = numpy.where(near, 1.0, rho_xy)
        dtheta = (z * (x * vx + y * vy) / safe - rho_xy * vz)
        dphi = (x * vy - y * vx) / (safe * safe)
        if numpy.any(near):
            # At a pole theta moves at the full speed along the direction
            # of travel; phi is that direction (reversed at the south pole).
            south = z < 0
            sign = numpy.where(south, -1.0, 1.0)
            theta = numpy.where(near, numpy.where(south, math.pi, 0.0), theta)
            phi = numpy.where(near, numpy.arctan2(sign * vy, sign * vx), phi)
            dtheta = numpy.where(near, numpy.linalg.norm(tangent, axis=-1),
                                 dtheta)
            dphi = numpy.where(near, 0.0, dphi)
        return SegmentSample(theta, phi, dtheta, dphi)

    def solid_angle_density(self, s) -> numpy.ndarray:
        # (1 - cos(theta)) dphi = (x dy - y dx) / (1 + z), regular at the
        # north pole.
        pos, tangent = self._frame(s)
        num = pos[..., 0] * tangent[..., 1] - pos[..., 1] * tangent[..., 0]
        return num / (1.0 + pos[..., 2])

    def south_pole_distance(self) -> float:
        """Angular distance between the full circle and the south pole."""
        return abs(math.pi - self._alpha - self.radius)

    def covers_full_turn(self) -> bool:
        return abs(self.sweep) >= 2 * math.pi - 1e-12

    def passes_south_pole(self) -> bool:
        if self.south_pole_distance() >= POLE_GUARD:
            return False
        if self.covers_full_turn():
            return True
        # psi = pi is the point closest to the south pole.
        lo = min(self.start_angle, self.start_angle + self.sweep)
        hi = max(self.start_angle, self.start_angle + self.sweep)
        k = math.ceil((lo - math.pi) / (2 * math.pi))
        return math.pi + 2 * math.pi * k <= hi

    def solid_angle_integral(self, tol: float = quadrature.DEFAULT_TOL
                             ) -> float:
        if self.passes_south_pole():
            if not self.covers_full_turn():
                raise CurveDomainError(
                    'A partial circle through the south pole has no '
                    'well-defined solid angle in this chart.')
            # The circle's own chart: it bounds a cap of area
            # 2 pi (1 - cos(rho)) per turn.
            logger.debug('circle through the south pole; using the cap area')
            return (1.0 - math.cos(self.radius)) * self.sweep
        return super().solid_angle_integral(tol)

    def speed(self, s) -> numpy.ndarray:
        s = numpy.asarray(s, dtype=float)
        return numpy.full(s.shape, abs(self.sweep) * math.sin(self.radius))

    def spherical_length(self) -> float:
        return math.sin(self.radius) * abs(self.sweep)

    def params(self) -> dict:
        return {'axis': list(self.axis), 'radius': self.radius,
                'start_angle': self.start_angle, 'sweep': self.sweep}

    def reversed(self) -> 'TiltedCircle':
        return TiltedCircle(self.axis, self.radius,
                            self.start_angle + self.sweep, -self.sweep,
                            self.duration_fraction)


class Custom(Segment):
    """Sampled (theta, phi) table, interpolated with cubic splines.

    Derivatives are those of the interpolant.

    :param theta: polar angles, in [0, pi].
    :param phi: azimuths, continuous along the table (no 2 pi jumps).
    :param grid: strictly increasing local progress values from 0 to 1
      (uniform when omitted).
    """

    kind = SegmentKind.CUSTOM

    def __init__(self, theta, phi, grid=None,
                 duration_fraction: float = 1.0):
        super().__init__(duration_fraction)
        theta = numpy.asarray(theta, dtype=float).reshape(-1)
        phi = numpy.asarray(phi, dtype=float).reshape(-1)
        if theta.size < 2 or theta.size != phi.size:
            raise ValueError('A custom segment needs at least two '
                             '(theta, phi) samples of matching length.')
        if numpy.any(theta < 0) or numpy.any(theta > math.pi):
            raise ValueError('Custom theta samples must be in [0, pi].')
        if grid is None:
            grid = numpy.linspace(0.0, 1.0, theta.size)
        grid = numpy.asarray(grid, dtype=float).reshape(-1)
        if (grid.size != theta.size or grid[0] != 0.0 or grid[-1] != 1.0
                or numpy.any(numpy.diff(grid) <= 0)):
            raise ValueError('The custom time grid must increase strictly '
                             'from 0 to 1.')
        self.theta = theta
        self.phi = phi
        self.grid = grid
        self._theta_spline = scipy.interpolate.CubicSpline(grid, theta)
        self._phi_spline = scipy.interpolate.CubicSpline(grid, phi)
        self._dtheta = self._theta_spline.derivative()
        self._dphi = self._phi_spline.derivative()

    def evaluate(self, s) -> SegmentSample:
        s = numpy.asarray(s, dtype=float)
        theta = numpy.clip(self._theta_spline(s), 0.0, math.pi)
        phi = self._phi_spline(s)
        return SegmentSample(theta, phi, self._dtheta(s), self._dphi(s))

    def params(self) -> dict:
        return {'theta': self.theta.tolist(), 'phi': self.phi.tolist(),
                'grid': self.grid.tolist()}

    def reversed(self) -> 'Custom':
        return Custom(self.theta[::-1], self.phi[::-1],
                      1.0 - self.grid[::-1], self.duration_fraction)


_SEGMENT_TYPES: typing.Dict[str, typing.Type[Segment]] = {
    cls.kind.value: cls
    for cls in (Meridian, LatitudeArc, TiltedCircle, Custom)
}


def segment_from_dict(data: dict) -> Segment:
    """Build a segment from its JSON mapping."""
    data = dict(data)
    try:
        cls = _SEGMENT_TYPES[data.pop('kind')]
    except KeyError as ke:
        raise ValueError('Unknown or missing segment kind: %s' % ke)
    return cls(**data)

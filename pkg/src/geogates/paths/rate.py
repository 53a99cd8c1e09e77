"""Monotone reparameterizations of normalized time.

A rate profile w maps [0, 1] onto itself with w(0) = 0 and w(1) = 1. A
curve with profile w reaches progress w(t / tau) at time t, so the image
of the path is unchanged and only the speed along it varies.
"""

import abc
import logging
import math
import typing
import numpy
import scipy.interpolate

logger = logging.getLogger(__name__)


class RateProfile(abc.ABC):

    name: typing.ClassVar[str]

    @abc.abstractmethod
    def __call__(self, x) -> numpy.ndarray:
        pass

    @abc.abstractmethod
    def derivative(self, x) -> numpy.ndarray:
        pass

    @abc.abstractmethod
    def params(self) -> dict:
        pass

    def to_dict(self) -> dict:
        res = {'kind': self.name}
        res.update(self.params())
        return res

    def check_monotone(self, n: int = 1025) -> None:
        """Raise a ValueError unless the profile is strictly increasing."""
        x = numpy.linspace(0.0, 1.0, n)
        w = self(x)
        if abs(float(w[0])) > 1e-12 or abs(float(w[-1]) - 1.0) > 1e-12:
            raise ValueError('A rate profile must map 0 to 0 and 1 to 1.')
        if numpy.any(numpy.diff(w) <= 0) or numpy.any(self.derivative(x) < 0):
            raise ValueError('The rate profile is not strictly increasing.')

    def __eq__(self, other):
        if not isinstance(other, RateProfile):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__,
                           ', '.join('%s=%r' % kv
                                     for kv in self.params().items()))


def _unit_interval(x) -> numpy.ndarray:
    return numpy.clip(numpy.asarray(x, dtype=float), 0.0, 1.0)


class IdentityRate(RateProfile):

    name = 'identity'

    def __call__(self, x):
        return _unit_interval(x)

    def derivative(self, x):
        return numpy.ones(numpy.shape(x))

    def params(self):
        return {}


class PowerRate(RateProfile):
    """w(x) = x ** power, with power >= 1."""

    name = 'power'

    def __init__(self, power: float):
        power = float(power)
        if not power >= 1.0:
            raise ValueError('The power of a rate profile must be >= 1.')
        self.power = power

    def __call__(self, x):
        return _unit_interval(x) ** self.power

    def derivative(self, x):
        return self.power * _unit_interval(x) ** (self.power - 1.0)

    def params(self):
        return {'power': self.power}


class SineRate(RateProfile):
    """w(x) = x - a sin(2 pi k x) / (2 pi k), with |a| < 1 and k >= 1."""

    name = 'sine'

    def __init__(self, amplitude: float, cycles: int = 1):
        amplitude = float(amplitude)
        if not abs(amplitude) < 1.0:
            raise ValueError('The sine warp amplitude must satisfy |a| < 1.')
        if int(cycles) != cycles or cycles < 1:
            raise ValueError('The number of sine warp cycles must be a '
                             'positive integer.')
        self.amplitude = amplitude
        self.cycles = int(cycles)

    def __call__(self, x):
        x = _unit_interval(x)
        omega = 2 * math.pi * self.cycles
        return x - self.amplitude * numpy.sin(omega * x) / omega

    def derivative(self, x):
        omega = 2 * math.pi * self.cycles
        return 1.0 - self.amplitude * numpy.cos(omega * _unit_interval(x))

    def params(self):
        return {'amplitude': self.amplitude, 'cycles': self.cycles}


class KnotRate(RateProfile):
    """Monotone cubic (PCHIP) interpolation through increasing knots."""

    name = 'knots'

    def __init__(self, xs, ys):
        xs = numpy.asarray(xs, dtype=float).reshape(-1)
        ys = numpy.asarray(ys, dtype=float).reshape(-1)
        if (xs.size < 2 or xs.size != ys.size
                or xs[0] != 0.0 or xs[-1] != 1.0
                or ys[0] != 0.0 or ys[-1] != 1.0):
            raise ValueError('Knots must run from (0, 0) to (1, 1).')
        if numpy.any(numpy.diff(xs) <= 0) or numpy.any(numpy.diff(ys) <= 0):
            raise ValueError('Knot coordinates must increase strictly.')
        self.xs = xs
        self.ys = ys
        self._interp = scipy.interpolate.PchipInterpolator(xs, ys)
        self._deriv = self._interp.derivative()

    def __call__(self, x):
        return self._interp(_unit_interval(x))

    def derivative(self, x):
        return self._deriv(_unit_interval(x))

    def params(self):
        return {'xs': self.xs.tolist(), 'ys': self.ys.tolist()}


class ComposedRate(RateProfile):
    """w(x) = outer(inner(x))."""

    name = 'composed'

    def __init__(self, outer: RateProfile, inner: RateProfile):
        self.outer = outer
        self.inner = inner

    def __call__(self, x):
        return self.outer(self.inner(x))

    def derivative(self, x):
        return self.outer.derivative(self.inner(x)) * self.inner.derivative(x)

    def params(self):
        return {'outer': self.outer.to_dict(), 'inner': self.inner.to_dict()}


_RATE_TYPES: typing.Dict[str, typing.Type[RateProfile]] = {
    cls.name: cls
    for cls in (IdentityRate, PowerRate, SineRate, KnotRate, ComposedRate)
}


def rate_from_dict(data: dict) -> RateProfile:
    data = dict(data)
    try:
        cls = _RATE_TYPES[data.pop('kind')]
    except KeyError as ke:
        raise ValueError('Unknown or missing rate profile kind: %s' % ke)
    if cls is ComposedRate:
        return ComposedRate(rate_from_dict(data['outer']),
                            rate_from_dict(data['inner']))
    return cls(**data)


def random_sine_warp(rng: numpy.random.Generator,
                     max_amplitude: float = 0.6,
                     max_cycles: int = 3) -> SineRate:
    """Draw a smooth random warp from a seeded generator."""
    return SineRate(float(rng.uniform(-max_amplitude, max_amplitude)),
                    int(rng.integers(1, max_cycles + 1)))

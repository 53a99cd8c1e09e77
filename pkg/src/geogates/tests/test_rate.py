import json
import numpy
import pytest
from geogates.paths import rate


def test_identity():
    profile = rate.IdentityRate()
    x = numpy.linspace(0, 1, 11)
    assert numpy.array_equal(profile(x), x)
    assert numpy.array_equal(profile.derivative(x), numpy.ones(11))
    profile.check_monotone()


def test_power_validation():
    with pytest.raises(ValueError):
        rate.PowerRate(0.5)
    rate.PowerRate(2).check_monotone()


@pytest.mark.parametrize('amplitude,cycles',
                         [(1.0, 1), (-1.5, 1), (0.2, 0), (0.2, 1.5)])
def test_sine_validation(amplitude, cycles):
    with pytest.raises(ValueError):
        rate.SineRate(amplitude, cycles)


def test_sine_endpoints():
    profile = rate.SineRate(0.5, 3)
    assert profile(0.0) == 0.0
    assert profile(1.0) == pytest.approx(1.0, abs=1e-15)
    profile.check_monotone()


def test_knot_validation():
    with pytest.raises(ValueError):
        rate.KnotRate([0, 0.5, 1], [0, 0.7])
    with pytest.raises(ValueError):
        rate.KnotRate([0, 0.5, 1], [0, 0.7, 0.6])
    with pytest.raises(ValueError):
        rate.KnotRate([0.1, 0.5, 1], [0, 0.7, 1])
    profile = rate.KnotRate([0, 0.25, 1], [0, 0.6, 1])
    assert float(profile(0.25)) == pytest.approx(0.6)
    profile.check_monotone()


def test_composed_chain_rule():
    outer = rate.PowerRate(2)
    inner = rate.SineRate(0.3, 2)
    profile = rate.ComposedRate(outer, inner)
    x = numpy.linspace(0.05, 0.95, 19)
    assert numpy.allclose(profile(x), inner(x) ** 2)
    h = 1e-6
    numeric = (profile(x + h) - profile(x - h)) / (2 * h)
    assert numpy.allclose(profile.derivative(x), numeric, atol=1e-7)


def test_not_monotone():

    class Backwards(rate.RateProfile):
        name = 'backwards'

        def __call__(self, x):
            x = numpy.asarray(x, dtype=float)
            return x + 0.3 * numpy.sin(2 * numpy.pi * x)

        def derivative(self, x):
            return 1 + 0.6 * numpy.pi * numpy.cos(2 * numpy.pi * x)

        def params(self):
            return {}

    with pytest.raises(ValueError):
        Backwards().check_monotone()


@pytest.mark.parametrize('profile',
                         [rate.IdentityRate(),
                          rate.PowerRate(3),
                          rate.SineRate(-0.4, 2),
                          rate.KnotRate([0, 0.5, 1], [0, 0.2, 1]),
                          rate.ComposedRate(rate.PowerRate(2),
                                            rate.SineRate(0.1))])
def test_dict_roundtrip(profile):
    data = json.loads(json.dumps(profile.to_dict()))
    assert rate.rate_from_dict(data) == profile


def test_unknown_kind():
    with pytest.raises(ValueError):
        rate.rate_from_dict({'kind': 'cubic'})


def test_random_sine_warp_seeded():
    first = [rate.random_sine_warp(numpy.random.default_rng(4))
             for _ in range(3)]
    second = [rate.random_sine_warp(numpy.random.default_rng(4))
              for _ in range(3)]
    assert first == second
    for profile in first:
        assert abs(profile.amplitude) < 0.6
        assert 1 <= profile.cycles <= 3

import math
import numpy
import pytest
from geogates import qcore
from geogates import quadrature
from geogates.errors import CurveDomainError
from geogates.errors import DiscontinuousCurveError
from geogates.errors import OpenCurveError
from geogates.paths import curve as curves
from geogates.paths import rate
from geogates.paths import segments
from . import utils


def test_orange_slice_solid_angle():
    curve = utils.orange_slice_curve(math.pi / 8)
    assert curves.solid_angle_phase(curve) == pytest.approx(math.pi / 8,
                                                            abs=1e-12)


def test_degenerate_loop():
    curve = curves.ParamCurve((segments.Meridian(0.0, 0.0, 1.0, 0.5),
                               segments.Meridian(0.0, 1.0, 0.0, 0.5)))
    assert curves.solid_angle_phase(curve) == pytest.approx(0.0, abs=1e-15)


def test_latitude_circle():
    curve = curves.ParamCurve((segments.LatitudeArc(math.pi / 3, 0.0,
                                                    2 * math.pi), ))
    assert curve.is_closed()
    assert curves.solid_angle_phase(curve) == pytest.approx(math.pi / 2,
                                                            abs=1e-12)


def test_three_segment_solid_angle():
    curve = utils.three_segment_curve()
    assert curves.solid_angle_phase(curve) == pytest.approx(math.pi / 8,
                                                            abs=1e-12)


def test_reversed_negates_phase():
    curve = utils.three_segment_curve(1.1, 2.0)
    forward = curves.solid_angle_phase(curve)
    backward = curves.solid_angle_phase(curve.reversed())
    assert backward == pytest.approx(-forward, abs=1e-12)


def test_lengths_orange_slice():
    lengths = curves.path_lengths(utils.orange_slice_curve())
    assert lengths['spherical'] == pytest.approx(2 * math.pi, abs=1e-12)
    assert lengths['param_sum'] == pytest.approx(2 * math.pi, abs=1e-12)


def test_lengths_three_segment():
    curve = utils.three_segment_curve()
    assert curves.path_length(curve, 'param_sum') == pytest.approx(
        7 * math.pi / 6, abs=1e-9)
    assert curves.path_length(curve) == pytest.approx(
        2 * math.pi / 3 + math.sqrt(3) * math.pi / 4, abs=1e-12)


@pytest.mark.parametrize('gamma,expected',
                         [(math.pi / 8, math.sqrt(15) * math.pi / 4),
                          (math.pi / 2, math.pi * math.sqrt(3))])
def test_min_circle(gamma, expected):
    spec = qcore.GateSpec((0.0, 0.0, 1.0), gamma)
    curve = curves.min_circle_curve(spec)
    assert curve.is_closed()
    assert curve.chart_axis is None
    assert curves.path_length(curve) == pytest.approx(expected, abs=1e-12)
    assert curves.solid_angle_phase(curve) == pytest.approx(gamma, abs=1e-10)


def test_min_circle_negative_and_tilted():
    spec = qcore.GateSpec((1.0, 0.0, 0.0), -math.pi / 8)
    curve = curves.min_circle_curve(spec)
    assert curve.chart_axis == (1.0, 0.0, 0.0)
    assert curves.solid_angle_phase(curve) == pytest.approx(-math.pi / 8,
                                                            abs=1e-10)


def test_min_circle_zero_angle():
    with pytest.raises(CurveDomainError):
        curves.min_circle_curve(qcore.GateSpec((0.0, 0.0, 1.0), 0.0))


def test_chart_axis_for():
    assert curves.chart_axis_for(qcore.GateSpec((0.0, 0.0, 1.0), 0.1)) is None
    spec = qcore.GateSpec.from_vector((1.0, 1.0, 0.0), 0.1)
    assert curves.chart_axis_for(spec) == spec.axis


def test_spherical_not_longer_than_param_sum():
    for curve in (utils.orange_slice_curve(0.7),
                  utils.three_segment_curve(0.4, 2.5),
                  utils.three_segment_curve(2.8, 0.3)):
        lengths = curves.path_lengths(curve)
        assert lengths['spherical'] <= lengths['param_sum'] + 1e-12


def test_rabi_magnitude_area():
    curve = utils.orange_slice_curve()
    assert curves.rabi_magnitude_area(curve) == pytest.approx(math.pi,
                                                              abs=1e-12)
    warped = curve.with_rate_profile(rate.PowerRate(2)).with_total_time(3.0)
    assert curves.rabi_magnitude_area(warped) == pytest.approx(math.pi,
                                                               abs=1e-12)


def test_sample():
    points = curves.sample(utils.orange_slice_curve(total_time=2.0), 5)
    assert len(points) == 5
    assert points[0].t == 0.0
    assert points[-1].t == 2.0
    assert points[0].theta == 0.0
    assert points[1].dtheta == pytest.approx(math.pi / 0.9)
    with pytest.raises(ValueError):
        curves.sample(utils.orange_slice_curve(), 1)


def test_evaluate_rescales_derivatives():
    curve = utils.three_segment_curve(total_time=3.0)
    values = curve.evaluate(numpy.array([0.5, 1.5, 2.5]))
    assert list(values.segment) == [0, 1, 2]
    assert values.dtheta[0] == pytest.approx(math.pi / 3)
    assert values.dphi[1] == pytest.approx(math.pi / 2)
    assert values.dtheta[2] == pytest.approx(-math.pi / 3)


def test_warped_time_integral():
    curve = utils.three_segment_curve().with_rate_profile(rate.PowerRate(2))
    assert curve.breakpoints() == pytest.approx(
        [0.0, math.sqrt(1 / 3), math.sqrt(2 / 3), 1.0], abs=1e-12)
    res = quadrature.integrate_windows(curve.solid_angle_rate,
                                       curve.breakpoints())
    assert res / 2 == pytest.approx(math.pi / 8, abs=1e-9)


def test_with_rate_profile_composes():
    curve = utils.orange_slice_curve().with_rate_profile(rate.PowerRate(2))
    again = curve.with_rate_profile(rate.SineRate(0.2))
    assert isinstance(again.rate_profile, rate.ComposedRate)


def test_tilted_circle_matches_polygon():
    alpha, beta = 0.9, 0.4
    axis = (math.sin(alpha) * math.cos(beta), math.sin(alpha) * math.sin(beta),
            math.cos(alpha))
    circle = segments.TiltedCircle(axis, 0.5, 0.3, 2 * math.pi)
    points = circle.point(numpy.linspace(0.0, 1.0, 20001)[:-1])
    expected = utils.polygon_solid_angle(points)
    assert expected == pytest.approx(2 * math.pi * (1 - math.cos(0.5)),
                                     abs=1e-6)
    assert circle.solid_angle_integral() == pytest.approx(expected, abs=1e-6)


def test_tilted_circle_coordinates():
    circle = segments.TiltedCircle((0.0, 0.6, 0.8), 0.4, 0.0, 1.5)
    s = numpy.linspace(0.0, 1.0, 9)
    sample = circle.evaluate(s)
    numpy.testing.assert_allclose(
        segments.to_cartesian(sample.theta, sample.phi), circle.point(s),
        atol=1e-14)
    h = 1e-6
    ahead = circle.evaluate(s[1:-1] + h)
    behind = circle.evaluate(s[1:-1] - h)
    numpy.testing.assert_allclose(sample.dtheta[1:-1],
                                  (ahead.theta - behind.theta) / (2 * h),
                                  atol=1e-7)
    numpy.testing.assert_allclose(sample.dphi[1:-1],
                                  (ahead.phi - behind.phi) / (2 * h),
                                  atol=1e-7)


def test_tilted_circle_through_south_pole():
    partial = segments.TiltedCircle((1.0, 0.0, 0.0), math.pi / 2, 0.0,
                                    1.5 * math.pi)
    assert partial.passes_south_pole()
    with pytest.raises(CurveDomainError):
        partial.solid_angle_integral()
    full = segments.TiltedCircle((1.0, 0.0, 0.0), math.pi / 2, 0.0,
                                 2 * math.pi)
    assert full.solid_angle_integral() == pytest.approx(2 * math.pi)


def test_custom_loop_matches_polygon():
    s = numpy.linspace(0.0, 1.0, 2001)
    theta = 1.0 + 0.3 * numpy.cos(2 * math.pi * s)
    phi = 0.5 * numpy.sin(2 * math.pi * s)
    loop = segments.Custom(theta, phi)
    curve = curves.ParamCurve((loop, ))
    assert curve.is_closed()
    points = segments.to_cartesian(theta[:-1], phi[:-1])
    expected = utils.polygon_solid_angle(points)
    assert abs(expected) > 0.1
    assert 2 * curves.solid_angle_phase(curve) == pytest.approx(expected,
                                                                abs=1e-6)


def test_custom_validation():
    with pytest.raises(ValueError):
        segments.Custom([0.1], [0.0])
    with pytest.raises(ValueError):
        segments.Custom([0.1, 4.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        segments.Custom([0.1, 0.2, 0.3], [0.0, 0.0, 0.0], grid=[0, 0.7, 0.5])


def test_segment_validation():
    with pytest.raises(ValueError):
        segments.Meridian(0.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        segments.LatitudeArc(1.0, 0.0, 1.0, duration_fraction=0.0)
    with pytest.raises(ValueError):
        segments.TiltedCircle((1.0, 1.0, 0.0), 0.3, 0.0, 1.0)
    with pytest.raises(ValueError):
        segments.segment_from_dict({'kind': 'spiral'})


def test_pole_turn():
    turn = segments.LatitudeArc(math.pi, 0.0, 1.0)
    assert turn.is_pole_turn
    numpy.testing.assert_array_equal(turn.start_point, [0.0, 0.0, -1.0])
    assert turn.spherical_length() == 0.0
    assert turn.param_variation() == 0.0
    assert turn.solid_angle_integral() == pytest.approx(2.0)


def test_open_curve():
    curve = curves.ParamCurve((segments.Meridian(0.0, 0.0, 1.0), ))
    assert not curve.is_closed()
    assert curve.closure_gap() > 0.9
    with pytest.raises(OpenCurveError):
        curves.solid_angle_phase(curve)


def test_discontinuous_curve():
    with pytest.raises(DiscontinuousCurveError):
        curves.ParamCurve((segments.Meridian(0.0, 0.0, 1.0, 0.5),
                           segments.Meridian(0.0, 1.2, 0.0, 0.5)))


def test_fractions_must_add_up():
    with pytest.raises(ValueError):
        curves.ParamCurve((segments.Meridian(0.0, 0.0, 1.0, 0.5),
                           segments.Meridian(0.0, 1.0, 0.0, 0.4)))


def test_curve_validation():
    seg = segments.LatitudeArc(1.0, 0.0, 2 * math.pi)
    with pytest.raises(ValueError):
        curves.ParamCurve((seg, ), total_time=0.0)
    with pytest.raises(ValueError):
        curves.ParamCurve((seg, ), chart_axis=(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        curves.ParamCurve(())


def test_json_save_load(tmp_path):
    curve = curves.ParamCurve(
        (segments.Meridian(0.0, 0.0, 1.0, 0.25),
         segments.LatitudeArc(1.0, 0.0, 2.0, 0.5),
         segments.Meridian(2.0, 1.0, 0.0, 0.25)),
        total_time=2.5,
        rate_profile=rate.SineRate(0.3, 2),
        chart_axis=(0.0, 1.0, 0.0))
    path = tmp_path / 'curve.json'
    curve.save(path)
    loaded = curves.ParamCurve.load(path)
    assert loaded == curve
    assert loaded.to_dict()['tau'] == 2.5


def test_from_dict_requires_segments():
    with pytest.raises(ValueError):
        curves.ParamCurve.from_dict({'tau': 1.0})

import math
import numpy
from geogates.paths.curve import ParamCurve
from geogates.paths.segments import LatitudeArc
from geogates.paths.segments import Meridian


def orange_slice_curve(gamma: float = math.pi / 8,
                       total_time: float = 1.0) -> ParamCurve:
    """Two pole-to-pole meridians joined by a turn of gamma at the south
    pole.
    """
    return ParamCurve((Meridian(0.0, 0.0, math.pi, 0.45),
                       LatitudeArc(math.pi, 0.0, gamma, 0.1),
                       Meridian(gamma, math.pi, 0.0, 0.45)),
                      total_time=total_time)


def three_segment_curve(theta_mid: float = math.pi / 3,
                        sweep: float = math.pi / 2,
                        total_time: float = 1.0) -> ParamCurve:
    return ParamCurve((Meridian(0.0, 0.0, theta_mid, 1 / 3),
                       LatitudeArc(theta_mid, 0.0, sweep, 1 / 3),
                       Meridian(sweep, theta_mid, 0.0, 1 / 3)),
                      total_time=total_time)


def polygon_solid_angle(points: numpy.ndarray) -> float:
    """Signed area enclosed between a closed polyline and the north pole.

    Sum of the signed solid angles of the triangles (N, a, b) over the
    edges (a, b). The polyline must not pass through the north pole.
    """
    a = points
    b = numpy.roll(points, -1, axis=0)
    north = numpy.array([0.0, 0.0, 1.0])
    num = numpy.cross(a, b) @ north
    den = 1.0 + a @ north + b @ north + numpy.einsum('ij,ij->i', a, b)
    return float(numpy.sum(2 * numpy.arctan2(num, den)))


def assert_matrix_close(a, b, atol: float) -> None:
    a = numpy.asarray(getattr(a, 'entries', a))
    b = numpy.asarray(getattr(b, 'entries', b))
    assert a.shape == b.shape
    assert numpy.max(numpy.abs(a - b), initial=0.0) <= atol


def interior_times(curve: ParamCurve, n: int = 17,
                   margin: float = 1e-3) -> numpy.ndarray:
    """Times at least margin away from the breakpoints of curve."""
    res = []
    for lo, hi in zip(curve.breakpoints()[:-1], curve.breakpoints()[1:]):
        if hi - lo > 2 * margin:
            res.append(numpy.linspace(lo + margin, hi - margin, n))
    return numpy.concatenate(res)

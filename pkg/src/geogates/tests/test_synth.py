import math
import numpy
import pandas
import pytest
from geogates import qcore
from geogates import synth
from geogates.errors import ComplexEnvelopeError
from geogates.errors import FrameNotOrthonormalError
from geogates.errors import NonCyclicFrameError
from geogates.paths import curve as curves
from geogates.paths import rate
from . import utils


def _rotated_curve():
    return curves.ParamCurve(utils.three_segment_curve(0.9, 1.7).segments,
                             chart_axis=(0.6, 0.0, 0.8))


def test_meridian_hamiltonian():
    schedule = synth.onequbit_hamiltonian(utils.orange_slice_curve())
    h = schedule(0.2)
    utils.assert_matrix_close(h, math.pi / 0.9 * qcore.SIGMA_Y, 1e-12)
    ctrl = schedule.controls([0.2])
    assert ctrl.envelope[0] == pytest.approx(1j * math.pi / 0.9)
    assert ctrl.detuning[0] == 0


def test_latitude_arc_controls():
    schedule = synth.onequbit_hamiltonian(utils.three_segment_curve())
    dphi = 3 * math.pi / 2
    ctrl = schedule.controls(numpy.array([0.4, 0.5, 0.6]))
    numpy.testing.assert_allclose(ctrl.envelope, -math.sqrt(3) * dphi / 8,
                                  atol=1e-12)
    numpy.testing.assert_allclose(ctrl.detuning, -3 * dphi / 8, atol=1e-12)
    h = schedule.matrices([0.5])[0]
    assert h[0, 0].real == pytest.approx(3 * dphi / 8)


@pytest.mark.parametrize('curve',
                         [utils.orange_slice_curve(),
                          utils.three_segment_curve(),
                          _rotated_curve()])
def test_drive_controls_reconstruct(curve):
    schedule = synth.onequbit_hamiltonian(curve)
    times = utils.interior_times(curve)
    utils.assert_matrix_close(schedule.controls(times).reconstruct(),
                              schedule.matrices(times), 1e-12)


def test_rotated_chart_keeps_envelope():
    rotated = _rotated_curve()
    plain = utils.three_segment_curve(0.9, 1.7)
    times = utils.interior_times(plain)
    numpy.testing.assert_allclose(
        synth.onequbit_hamiltonian(rotated).controls(times).envelope,
        synth.onequbit_hamiltonian(plain).controls(times).envelope,
        atol=1e-12)


def test_twoqubit_hamiltonian():
    curve = utils.three_segment_curve(1.2, 0.8)
    times = utils.interior_times(curve)
    two = synth.twoqubit_hamiltonian(curve)
    one = synth.onequbit_hamiltonian(curve)
    mats = two.matrices(times)
    assert not numpy.any(mats[:, :, 0])
    assert not numpy.any(mats[:, :, 3])
    assert qcore.is_exchange_structured(mats)
    utils.assert_matrix_close(mats[:, 1:3, 1:3], one.matrices(times), 1e-15)
    ctrl = two.controls(times)
    utils.assert_matrix_close(ctrl.reconstruct(), mats, 1e-12)
    numpy.testing.assert_allclose(ctrl.exchange, mats[:, 1, 2], atol=1e-12)


@pytest.mark.parametrize('curve',
                         [utils.orange_slice_curve(),
                          utils.three_segment_curve(),
                          _rotated_curve()])
def test_frame_matches_closed_form(curve):
    times = utils.interior_times(curve)
    closed = synth.onequbit_hamiltonian(curve).matrices(times)
    analytic = synth.frame_to_hamiltonian(synth.BlochFrame(curve))
    utils.assert_matrix_close(analytic.matrices(times), closed, 1e-12)
    numeric = synth.frame_to_hamiltonian(synth.BlochFrame(curve,
                                                          analytic=False))
    utils.assert_matrix_close(numeric.matrices(times), closed, 1e-8)


def test_exchange_frame_matches_closed_form():
    curve = utils.three_segment_curve(1.2, 0.8)
    times = utils.interior_times(curve)
    frame = synth.ExchangeFrame(curve)
    utils.assert_matrix_close(
        synth.frame_to_hamiltonian(frame).matrices(times),
        synth.twoqubit_hamiltonian(curve).matrices(times), 1e-12)
    assert frame.connection_integral(0) == 0.0
    assert frame.connection_integral(2) == pytest.approx(
        -frame.connection_integral(3))


def test_parallel_transport_diagonal():
    curve = utils.three_segment_curve().with_rate_profile(rate.SineRate(0.4))
    frame = synth.BlochFrame(curve)
    times = utils.interior_times(curve)
    vecs = frame.vectors(times)
    h = synth.onequbit_hamiltonian(curve).matrices(times)
    projected = qcore.dagger(vecs) @ h @ vecs
    assert numpy.max(numpy.abs(projected[:, [0, 1], [0, 1]])) <= 1e-12


def test_frame_connection():
    curve = utils.orange_slice_curve()
    frame = synth.BlochFrame(curve)
    assert frame.connection_integral(0) == pytest.approx(-math.pi / 8,
                                                         abs=1e-12)
    numeric = synth.BlochFrame(curve, analytic=False)
    assert numeric.connection_integral(0, tol=1e-8) == pytest.approx(
        -math.pi / 8, abs=1e-7)


def test_constant_frame():
    frame = synth.AuxiliaryFrame(
        2, lambda t: numpy.broadcast_to(numpy.eye(2), t.shape + (2, 2)),
        1.0, derivatives=lambda t: numpy.zeros(t.shape + (2, 2)))
    schedule = synth.frame_to_hamiltonian(frame)
    assert not numpy.any(schedule.matrices(numpy.linspace(0, 1, 5)))


def test_frame_not_orthonormal():
    skew = numpy.array([[1.0, 1.0], [0.0, 1.0]])
    frame = synth.AuxiliaryFrame(
        2, lambda t: numpy.broadcast_to(skew, t.shape + (2, 2)), 1.0)
    with pytest.raises(FrameNotOrthonormalError):
        synth.frame_to_hamiltonian(frame)


def test_frame_not_cyclic():

    def rotation(t):
        c = numpy.cos(t)
        s = numpy.sin(t)
        return numpy.stack((numpy.stack((c, -s), axis=-1),
                            numpy.stack((s, c), axis=-1)), axis=-2)

    frame = synth.AuxiliaryFrame(2, rotation, 1.0)
    with pytest.raises(NonCyclicFrameError):
        synth.frame_to_hamiltonian(frame)


def test_fd_consistency():
    frame = synth.BlochFrame(utils.three_segment_curve(), analytic=False)
    assert frame.fd_consistency(numpy.array([0.2, 0.5, 0.8])) < 1e-7


def test_pulse_area_orange_slice():
    curve = utils.orange_slice_curve()
    schedule = synth.onequbit_hamiltonian(curve)
    windows = curve.segment_windows()
    first = synth.pulse_area(schedule, windows[0][0], windows[0][1])
    last = synth.pulse_area(schedule, windows[2][0], windows[2][1])
    assert first == pytest.approx(math.pi / 2, abs=1e-10)
    assert last == pytest.approx(-math.pi / 2, abs=1e-10)


def test_pulse_area_three_segment():
    curve = utils.three_segment_curve()
    schedule = synth.onequbit_hamiltonian(curve)
    areas = [synth.pulse_area(schedule, lo, hi)
             for lo, hi, _ in curve.segment_windows()]
    assert areas == pytest.approx([math.pi / 6,
                                   -math.sqrt(3) * math.pi / 16,
                                   -math.pi / 6], abs=1e-10)


def test_pulse_area_errors():
    schedule = synth.onequbit_hamiltonian(utils.three_segment_curve())
    assert synth.pulse_area(schedule, 0.3, 0.3) == 0.0
    with pytest.raises(ValueError):
        synth.pulse_area(schedule, 0.5, 0.2)
    with pytest.raises(ComplexEnvelopeError):
        synth.pulse_area(schedule, 0.0, 1.0)


def test_rabi_magnitude_area():
    schedule = synth.onequbit_hamiltonian(utils.orange_slice_curve())
    assert synth.rabi_magnitude_area(schedule) == pytest.approx(math.pi,
                                                                abs=1e-9)


def test_schedule_columns(tmp_path):
    one = synth.schedule_to_frame(
        synth.onequbit_hamiltonian(utils.orange_slice_curve()), 33)
    assert list(one.columns) == ['t', 're_h00', 'im_h00', 're_h01', 'im_h01',
                                 're_h11', 'im_h11', 'delta', 'rabi_re',
                                 'rabi_im']
    assert len(one) == 33
    two = synth.twoqubit_hamiltonian(utils.orange_slice_curve())
    path = tmp_path / 'schedule.csv'
    synth.write_schedule_csv(two, path, 17)
    frame = pandas.read_csv(path)
    assert len(frame) == 17
    assert list(frame.columns[-3:]) == ['cx', 'cy', 'cz']
    with pytest.raises(ValueError):
        synth.schedule_to_frame(two, 1)


def test_schedule_validation():
    with pytest.raises(ValueError):
        synth.HamiltonianSchedule(2, 0.0, lambda t: None)
    schedule = synth.HamiltonianSchedule(
        2, 2.0, lambda t: numpy.zeros(t.shape + (2, 2)),
        breakpoints=[0.5, 3.0])
    assert schedule.breakpoints() == [0.0, 0.5, 2.0]
    assert schedule.windows() == [(0.0, 0.5), (0.5, 2.0)]
    assert not schedule.has_controls
    with pytest.raises(ValueError):
        schedule.controls([0.0])


def test_controls_scaled_and_shifted():
    schedule = synth.onequbit_hamiltonian(utils.three_segment_curve())
    ctrl = schedule.controls(numpy.array([0.5]))
    scaled = ctrl.scaled(1.1)
    assert scaled.rabi[0] == pytest.approx(1.1 * ctrl.rabi[0])
    assert scaled.detuning[0] == ctrl.detuning[0]
    shifted = ctrl.shifted(0.2)
    assert shifted.detuning[0] == pytest.approx(ctrl.detuning[0] + 0.2)

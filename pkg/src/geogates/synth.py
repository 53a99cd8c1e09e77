"""Inverse engineering of driving Hamiltonians from auxiliary frames.

For an orthonormal frame {|nu_k(t)>} that returns to itself at t = tau,

    H(t) = i sum_{l != k} <nu_l|d nu_k/dt> |nu_l><nu_k|

drives every |nu_k(0)> along |nu_k(t)> up to a phase, with no dynamical
phase. The single-qubit frame is

    |nu_1> = cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>
    |nu_2> = sin(theta/2) e^{-i phi}|0> - cos(theta/2)|1>

and the two-qubit frame uses the same pair on the |01>, |10> block, with
|00> and |11> kept fixed.

Control signals follow the reconstruction identity

    H = Delta (|1><1| - |0><0|) + Omega |1><0| + Omega^* |0><1|

so that Delta = -phi' sin^2(theta)/2 and
Omega = (i theta'/2 - phi' sin(theta) cos(theta)/2) e^{i phi}.
"""

import dataclasses
import logging
import math
import typing
import numpy
import pandas
from geogates import quadrature
from geogates import qcore
from geogates import report
from geogates.errors import ComplexEnvelopeError
from geogates.errors import FrameNotOrthonormalError
from geogates.errors import NonCyclicFrameError
from geogates.paths.curve import ParamCurve

logger = logging.getLogger(__name__)

FRAME_TOL = 1e-10
FRAME_CHECK_POINTS = 257
ANTIHERMITIAN_TOL = 1e-10
ENVELOPE_PHASE_TOL = 1e-9
ENVELOPE_PROBE_POINTS = 257
DEFAULT_FD_SCALE = 1e-6


@dataclasses.dataclass(frozen=True)
class DriveControls:
    """Single-qubit control signals sampled at times.

    :param detuning: Delta(t), real.
    :param rabi: Omega(t), complex, in the physical frame.
    :param envelope: Omega(t) e^{-i phi(t)} in the chart of the curve; it
      is i theta'/2 on meridians and real on latitude arcs.
    """
    times: numpy.ndarray
    detuning: numpy.ndarray
    rabi: numpy.ndarray
    envelope: numpy.ndarray

    def reconstruct(self) -> numpy.ndarray:
        """Delta (|1><1| - |0><0|) + Omega |1><0| + h.c., shape (n, 2, 2)."""
        res = numpy.zeros(self.times.shape + (2, 2), dtype=complex)
        res[..., 0, 0] = -self.detuning
        res[..., 1, 1] = self.detuning
        res[..., 1, 0] = self.rabi
        res[..., 0, 1] = numpy.conj(self.rabi)
        return res

    def scaled(self, factor: float) -> 'DriveControls':
        return dataclasses.replace(self, rabi=self.rabi * factor,
                                   envelope=self.envelope * factor)

    def shifted(self, offset: float) -> 'DriveControls':
        return dataclasses.replace(self, detuning=self.detuning + offset)


@dataclasses.dataclass(frozen=True)
class ExchangeControls:
    """Coefficients of R^x, R^y and R^z sampled at times."""
    times: numpy.ndarray
    cx: numpy.ndarray
    cy: numpy.ndarray
    cz: numpy.ndarray
    envelope: numpy.ndarray

    @property
    def exchange(self) -> numpy.ndarray:
        """<01|H|10> = c_x + i c_y."""
        return self.cx + 1j * self.cy

    def reconstruct(self) -> numpy.ndarray:
        return (self.cx[..., None, None] * qcore.R_X
                + self.cy[..., None, None] * qcore.R_Y
                + self.cz[..., None, None] * qcore.R_Z)

    def scaled(self, factor: float) -> 'ExchangeControls':
        return dataclasses.replace(self, cx=self.cx * factor,
                                   cy=self.cy * factor,
                                   envelope=self.envelope * factor)

    def shifted(self, offset: float) -> 'ExchangeControls':
        return dataclasses.replace(self, cz=self.cz + offset)


ControlSignals = typing.Union[DriveControls, ExchangeControls]


class HamiltonianSchedule(object):
    """Time-dependent Hermitian matrix on [0, duration].

    :param dim: dimension of the Hilbert space.
    :param duration: total time.
    :param evaluator: vectorized function mapping an array of times to
      an array (n, dim, dim) of Hermitian matrices.
    :param controls: optional vectorized function mapping times to
      control signals.
    :param breakpoints: times between which the schedule is smooth,
      including 0 and duration.
    """

    def __init__(self, dim: int, duration: float,
                 evaluator: typing.Callable[[numpy.ndarray], numpy.ndarray],
                 controls: typing.Optional[
                     typing.Callable[[numpy.ndarray], ControlSignals]] = None,
                 breakpoints: typing.Optional[typing.Sequence[float]] = None,
                 label: str = ''):
        if not duration > 0:
            raise ValueError('The duration of a schedule must be positive.')
        self.dim = int(dim)
        self.duration = float(duration)
        self._evaluator = evaluator
        self._controls = controls
        edges = set([0.0, self.duration])
        edges.update(float(t) for t in (() if breakpoints is None else breakpoints)
                     if 0.0 <= t <= self.duration)
        self._breakpoints = tuple(sorted(edges))
        self.label = label

    @property
    def has_controls(self) -> bool:
        return self._controls is not None

    def matrices(self, times) -> numpy.ndarray:
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        return numpy.asarray(self._evaluator(times), dtype=complex)

    def __call__(self, t: float) -> qcore.HermitianMatrix:
        return qcore.HermitianMatrix(self.matrices(numpy.array([t]))[0])

    def controls(self, times) -> ControlSignals:
        if self._controls is None:
            raise ValueError('The schedule %r carries no control signals.'
                             % self.label)
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        return self._controls(times)

    def breakpoints(self) -> typing.List[float]:
        return list(self._breakpoints)

    def windows(self) -> typing.List[typing.Tuple[float, float]]:
        """Consecutive smooth windows of positive length."""
        edges = self._breakpoints
        return [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]

    def __repr__(self):
        return '%s(dim=%i, duration=%r, label=%r)' % (
            type(self).__name__, self.dim, self.duration, self.label)


class AuxiliaryFrame(object):
    """Orthonormal, cyclic, time-dependent basis.

    :param dim: dimension N of the space.
    :param vectors: vectorized function of times returning (n, N, N)
      arrays whose columns are |nu_k(t)>.
    :param duration: tau.
    :param derivatives: same shape as vectors, for d|nu_k>/dt. When None
      the derivatives are central differences with step fd_step.
    :param fd_step: finite-difference step (default tau * 1e-6).
    :param breakpoints: times at which the frame may fail to be smooth.
    """

    def __init__(self, dim: int,
                 vectors: typing.Callable[[numpy.ndarray], numpy.ndarray],
                 duration: float,
                 derivatives: typing.Optional[
                     typing.Callable[[numpy.ndarray], numpy.ndarray]] = None,
                 fd_step: typing.Optional[float] = None,
                 breakpoints: typing.Sequence[float] = ()):
        if not duration > 0:
            raise ValueError('The duration of a frame must be positive.')
        self.dim = int(dim)
        self.duration = float(duration)
        self._vectors = vectors
        self._derivatives = derivatives
        if fd_step is None:
            fd_step = DEFAULT_FD_SCALE * self.duration
        if not fd_step > 0:
            raise ValueError('fd_step must be positive.')
        self.fd_step = float(fd_step)
        edges = sorted(set([0.0, self.duration] +
                           [float(t) for t in breakpoints]))
        self._breakpoints = tuple(edges)

    @property
    def analytic_derivative(self) -> bool:
        return self._derivatives is not None

    def vectors(self, times) -> numpy.ndarray:
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        return numpy.asarray(self._vectors(times), dtype=complex)

    def derivatives(self, times, step: typing.Optional[float] = None
                    ) -> numpy.ndarray:
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        if self._derivatives is not None and step is None:
            return numpy.asarray(self._derivatives(times), dtype=complex)
        h = self.fd_step if step is None else step
        return (self.vectors(times + h) - self.vectors(times - h)) / (2 * h)

    def breakpoints(self) -> typing.List[float]:
        return list(self._breakpoints)

    def basis_states(self, t: float = 0.0) -> typing.List[qcore.StateVector]:
        vecs = self.vectors(numpy.array([t]))[0]
        return [qcore.StateVector(vecs[:, k], tol=FRAME_TOL)
                for k in range(self.dim)]

    def check(self, n_points: int = FRAME_CHECK_POINTS,
              tol: float = FRAME_TOL) -> None:
        """Check orthonormality on a uniform grid and cyclicity at tau.

        :raises FrameNotOrthonormalError: if <nu_i|nu_j> deviates from
          delta_ij by more than tol.
        :raises NonCyclicFrameError: if nu_k(tau) differs from nu_k(0).
        """
        times = numpy.linspace(0.0, self.duration, n_points)
        vecs = self.vectors(times)
        gram = qcore.dagger(vecs) @ vecs
        defect = float(numpy.max(numpy.abs(gram - numpy.eye(self.dim))))
        if defect > tol:
            raise FrameNotOrthonormalError(
                'The frame is not orthonormal: max|<nu_i|nu_j> - delta_ij| '
                '= %g > %g' % (defect, tol))
        gap = float(numpy.max(numpy.abs(vecs[-1] - vecs[0])))
        if gap > tol:
            raise NonCyclicFrameError(
                'The frame does not return to itself: max|nu(tau) - nu(0)| '
                '= %g > %g' % (gap, tol))

    def connection(self, times, k: int) -> numpy.ndarray:
        """i <nu_k|d nu_k/dt>, real for a normalized vector."""
        vecs = self.vectors(times)
        ders = self.derivatives(times)
        return numpy.real(1j * numpy.einsum('ni,ni->n',
                                            numpy.conj(vecs[:, :, k]),
                                            ders[:, :, k]))

    def connection_integral(self, k: int,
                            tol: float = quadrature.DEFAULT_TOL) -> float:
        """Continuous phase i * integral of <nu_k|d nu_k/dt> over [0, tau]."""
        return float(quadrature.integrate_windows(
            lambda t: self.connection(t, k), self._breakpoints, tol=tol))

    def hamiltonian_matrices(self, times, step: typing.Optional[float] = None,
                             check: bool = False) -> numpy.ndarray:
        vecs = self.vectors(times)
        ders = self.derivatives(times, step)
        coupling = qcore.dagger(vecs) @ ders
        idx = numpy.arange(self.dim)
        coupling[:, idx, idx] = 0
        h = 1j * vecs @ coupling @ qcore.dagger(vecs)
        if check:
            residual = float(numpy.max(numpy.abs(h - qcore.dagger(h)),
                                       initial=0.0)) / 2
            scale = max(1.0, float(numpy.max(numpy.abs(h), initial=0.0)))
            if residual > ANTIHERMITIAN_TOL * scale:
                raise FrameNotOrthonormalError(
                    'The frame derivatives are inconsistent with an '
                    'orthonormal frame (anti-Hermitian residual %g).'
                    % residual)
        return (h + qcore.dagger(h)) / 2

    def fd_consistency(self, times) -> float:
        """Richardson check of the numeric derivative: the largest change
        in H(t) when the step is halved.
        """
        full = self.hamiltonian_matrices(times, step=self.fd_step)
        half = self.hamiltonian_matrices(times, step=self.fd_step / 2)
        return float(numpy.max(numpy.abs(full - half)))


def _bloch_columns(theta: numpy.ndarray, phi: numpy.ndarray) -> numpy.ndarray:
    c = numpy.cos(theta / 2)
    s = numpy.sin(theta / 2)
    e = numpy.exp(1j * phi)
    res = numpy.empty(theta.shape + (2, 2), dtype=complex)
    res[..., 0, 0] = c
    res[..., 1, 0] = s * e
    res[..., 0, 1] = s * numpy.conj(e)
    res[..., 1, 1] = -c
    return res


def _bloch_derivative_columns(theta, phi, dtheta, dphi) -> numpy.ndarray:
    c = numpy.cos(theta / 2)
    s = numpy.sin(theta / 2)
    e = numpy.exp(1j * phi)
    res = numpy.empty(theta.shape + (2, 2), dtype=complex)
    res[..., 0, 0] = -s * dtheta / 2
    res[..., 1, 0] = (c * dtheta / 2 + 1j * s * dphi) * e
    res[..., 0, 1] = (c * dtheta / 2 - 1j * s * dphi) * numpy.conj(e)
    res[..., 1, 1] = s * dtheta / 2
    return res


class BlochFrame(AuxiliaryFrame):
    """Single-qubit frame following a curve, in the curve's chart.

    The physical frame vectors are R nu_k, with R the chart rotation of
    the curve (the identity when the curve has no chart axis).
    """

    def __init__(self, curve: ParamCurve, analytic: bool = True,
                 fd_step: typing.Optional[float] = None):
        self.curve = curve
        self.chart = (numpy.eye(2, dtype=complex) if curve.chart_axis is None
                      else qcore.chart_rotation(curve.chart_axis))
        super().__init__(2, self._frame_vectors, curve.total_time,
                         derivatives=(self._frame_derivatives if analytic
                                      else None),
                         fd_step=fd_step, breakpoints=curve.breakpoints())

    def _frame_vectors(self, times):
        values = self.curve.evaluate(times)
        return self.chart @ _bloch_columns(values.theta, values.phi)

    def _frame_derivatives(self, times):
        values = self.curve.evaluate(times)
        return self.chart @ _bloch_derivative_columns(
            values.theta, values.phi, values.dtheta, values.dphi)

    def connection(self, times, k: int) -> numpy.ndarray:
        if not self.analytic_derivative:
            return super().connection(times, k)
        # i<nu_1|nu_1'> = -(1 - cos(theta)) phi'/2; nu_2 has the opposite sign.
        sign = -0.5 if k == 0 else 0.5
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        return sign * self.curve.solid_angle_rate(times)

    def connection_integral(self, k: int,
                            tol: float = quadrature.DEFAULT_TOL) -> float:
        if not self.analytic_derivative:
            return super().connection_integral(k, tol)
        # Per-segment solid angles; a full circle through the south pole
        # takes its own-chart value there.
        seg_tol = tol / len(self.curve.segments)
        total = sum(seg.solid_angle_integral(seg_tol)
                    for seg in self.curve.segments)
        return (-0.5 if k == 0 else 0.5) * float(total)


class ExchangeFrame(AuxiliaryFrame):
    """Two-qubit frame: |00>, |11>, then the Bloch pair on the |01>, |10>
    block with the curve read as (alpha, beta).
    """

    def __init__(self, curve: ParamCurve, analytic: bool = True,
                 fd_step: typing.Optional[float] = None):
        self.curve = curve
        self.chart = (numpy.eye(2, dtype=complex) if curve.chart_axis is None
                      else qcore.chart_rotation(curve.chart_axis))
        super().__init__(4, self._frame_vectors, curve.total_time,
                         derivatives=(self._frame_derivatives if analytic
                                      else None),
                         fd_step=fd_step, breakpoints=curve.breakpoints())

    @staticmethod
    def _embed(block: numpy.ndarray, fixed: float) -> numpy.ndarray:
        res = numpy.zeros(block.shape[:-2] + (4, 4), dtype=complex)
        res[..., 0, 0] = fixed
        res[..., 3, 1] = fixed
        res[..., 1:3, 2:4] = block
        return res

    def _frame_vectors(self, times):
        values = self.curve.evaluate(times)
        return self._embed(self.chart @ _bloch_columns(values.theta,
                                                       values.phi), 1.0)

    def _frame_derivatives(self, times):
        values = self.curve.evaluate(times)
        return self._embed(self.chart @ _bloch_derivative_columns(
            values.theta, values.phi, values.dtheta, values.dphi), 0.0)

    def connection(self, times, k: int) -> numpy.ndarray:
        if not self.analytic_derivative:
            return super().connection(times, k)
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        if k in (0, 1):
            return numpy.zeros(times.shape)
        sign = -0.5 if k == 2 else 0.5
        return sign * self.curve.solid_angle_rate(times)

    def connection_integral(self, k: int,
                            tol: float = quadrature.DEFAULT_TOL) -> float:
        if not self.analytic_derivative:
            return super().connection_integral(k, tol)
        if k in (0, 1):
            return 0.0
        seg_tol = tol / len(self.curve.segments)
        total = sum(seg.solid_angle_integral(seg_tol)
                    for seg in self.curve.segments)
        return (-0.5 if k == 2 else 0.5) * float(total)


def frame_to_hamiltonian(frame: AuxiliaryFrame) -> HamiltonianSchedule:
    """Driving Hamiltonian of a generic frame.

    The frame is checked for orthonormality and cyclicity on a uniform
    grid. With analytic derivatives the anti-Hermitian part of the raw
    matrix must stay below 1e-10 at every evaluation.

    :raises FrameNotOrthonormalError: see :meth:`AuxiliaryFrame.check`.
    :raises NonCyclicFrameError: see :meth:`AuxiliaryFrame.check`.
    """
    frame.check()
    check = frame.analytic_derivative

    def evaluator(times):
        return frame.hamiltonian_matrices(times, check=check)

    return HamiltonianSchedule(frame.dim, frame.duration, evaluator,
                               breakpoints=frame.breakpoints(),
                               label='frame')


def _pauli_coefficients(curve: ParamCurve, times: numpy.ndarray):
    values = curve.evaluate(times)
    st = numpy.sin(values.theta)
    ct = numpy.cos(values.theta)
    sp = numpy.sin(values.phi)
    cp = numpy.cos(values.phi)
    hx = -0.5 * (values.dtheta * sp + values.dphi * st * ct * cp)
    hy = 0.5 * (values.dtheta * cp - values.dphi * st * ct * sp)
    hz = 0.5 * values.dphi * st * st
    return values, hx, hy, hz


def _chart_block(curve: ParamCurve, times: numpy.ndarray):
    # The 2x2 Hamiltonian in the physical frame and the chart envelope.
    values, hx, hy, hz = _pauli_coefficients(curve, times)
    block = numpy.empty(times.shape + (2, 2), dtype=complex)
    block[..., 0, 0] = hz
    block[..., 1, 1] = -hz
    block[..., 1, 0] = hx + 1j * hy
    block[..., 0, 1] = hx - 1j * hy
    envelope = (hx + 1j * hy) * numpy.exp(-1j * values.phi)
    if curve.chart_axis is not None:
        rot = qcore.chart_rotation(curve.chart_axis)
        block = rot @ block @ qcore.dagger(rot)
    return block, envelope


def onequbit_hamiltonian(curve: ParamCurve) -> HamiltonianSchedule:
    """Closed-form single-qubit Hamiltonian along a curve.

    In the chart of the curve,
    H = h_x sigma_x + h_y sigma_y + h_z sigma_z with
    h_x = -(theta' sin(phi) + phi' sin(theta) cos(theta) cos(phi))/2,
    h_y = (theta' cos(phi) - phi' sin(theta) cos(theta) sin(phi))/2 and
    h_z = phi' sin^2(theta)/2.
    """

    def evaluator(times):
        return _chart_block(curve, times)[0]

    def controls(times):
        block, envelope = _chart_block(curve, times)
        return DriveControls(times, -block[..., 0, 0].real,
                             block[..., 1, 0], envelope)

    return HamiltonianSchedule(2, curve.total_time, evaluator, controls,
                               breakpoints=curve.breakpoints(),
                               label='one-qubit')


def twoqubit_hamiltonian(curve: ParamCurve) -> HamiltonianSchedule:
    """Exchange Hamiltonian c_x R^x + c_y R^y + c_z R^z along a curve.

    The curve is read as (alpha(t), beta(t)). On the |01>, |10> block this
    is the single-qubit Hamiltonian of the same curve, so c_x = h_x,
    c_y = -h_y and c_z = h_z; |00> and |11> are annihilated.
    """

    def evaluator(times):
        return qcore.embed_exchange_block(_chart_block(curve, times)[0])

    def controls(times):
        block, envelope = _chart_block(curve, times)
        hx = block[..., 1, 0].real
        hy = block[..., 1, 0].imag
        return ExchangeControls(times, hx, -hy, block[..., 0, 0].real,
                                envelope)

    return HamiltonianSchedule(4, curve.total_time, evaluator, controls,
                               breakpoints=curve.breakpoints(),
                               label='two-qubit')


def pulse_area(schedule: HamiltonianSchedule, t_from: float, t_to: float,
               tol: float = quadrature.DEFAULT_TOL) -> float:
    """Integral of the drive envelope over [t_from, t_to].

    The envelope must keep a constant phase chi on the window; the area is
    the integral of Re(E e^{-i chi}) with chi chosen in (-pi/2, pi/2], so
    that theta'/2 on meridians and the real arc envelope keep their signs.

    :raises ComplexEnvelopeError: if the envelope phase varies.
    """
    if t_to < t_from:
        raise ValueError('t_to must not precede t_from.')
    if t_to == t_from:
        return 0.0

    def envelope(times):
        return schedule.controls(times).envelope

    # Interior points only: at a breakpoint the next segment is evaluated.
    offsets = (numpy.arange(ENVELOPE_PROBE_POINTS) + 0.5) / ENVELOPE_PROBE_POINTS
    probe = envelope(t_from + (t_to - t_from) * offsets)
    magnitude = numpy.abs(probe)
    peak = float(numpy.max(magnitude))
    if peak == 0.0:
        return 0.0
    chi = float(numpy.angle(probe[int(numpy.argmax(magnitude))])) % math.pi
    if chi > math.pi / 2:
        chi -= math.pi
    rotation = complex(math.cos(chi), -math.sin(chi))
    residual = float(numpy.max(numpy.abs((probe * rotation).imag)))
    if residual > ENVELOPE_PHASE_TOL * peak:
        raise ComplexEnvelopeError(
            'The envelope phase is not constant on [%g, %g] (imaginary '
            'residual %g).' % (t_from, t_to, residual))
    edges = [t_from] + [t for t in schedule.breakpoints()
                        if t_from < t < t_to] + [t_to]
    return float(quadrature.integrate_windows(
        lambda t: (envelope(t) * rotation).real, edges, tol=tol))


def rabi_magnitude_area(schedule: HamiltonianSchedule,
                        tol: float = quadrature.DEFAULT_TOL) -> float:
    """Integral of |Omega(t)| (or |Omega_eff(t)|) over the schedule."""
    return float(quadrature.integrate_windows(
        lambda t: numpy.abs(schedule.controls(t).envelope),
        schedule.breakpoints(), tol=tol))


def schedule_to_frame(schedule: HamiltonianSchedule,
                      n_samples: int = 1025) -> pandas.DataFrame:
    """Sampled schedule as a table.

    Columns are t, then re_hij and im_hij for the upper triangle i <= j,
    then the control signals (delta, rabi_re, rabi_im for one qubit or
    cx, cy, cz for the exchange block) when the schedule carries them.
    """
    if n_samples < 2:
        raise ValueError('n_samples must be at least 2.')
    times = numpy.linspace(0.0, schedule.duration, n_samples)
    mats = schedule.matrices(times)
    columns: typing.Dict[str, numpy.ndarray] = {'t': times}
    for i in range(schedule.dim):
        for j in range(i, schedule.dim):
            columns['re_h%i%i' % (i, j)] = mats[:, i, j].real
            columns['im_h%i%i' % (i, j)] = mats[:, i, j].imag
    if schedule.has_controls:
        ctrl = schedule.controls(times)
        if isinstance(ctrl, DriveControls):
            columns['delta'] = ctrl.detuning
            columns['rabi_re'] = ctrl.rabi.real
            columns['rabi_im'] = ctrl.rabi.imag
        else:
            columns['cx'] = ctrl.cx
            columns['cy'] = ctrl.cy
            columns['cz'] = ctrl.cz
    return pandas.DataFrame(columns)


def write_schedule_csv(schedule: HamiltonianSchedule, path,
                       n_samples: int = 1025) -> None:
    report.write_frame(path, schedule_to_frame(schedule, n_samples))

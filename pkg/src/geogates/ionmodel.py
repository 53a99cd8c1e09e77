"""Two trapped ions sharing a vibrational mode.

The full model couples each ion to the mode on the blue sideband,

    H(t) = A(t) e^{-i delta t} + h.c.,
    A(t) = i eta a^dagger (Omega_1(t) sigma_1^+ + Omega_2(t) sigma_2^+),

with sigma^+ = |1><0|, on ion 1 x ion 2 x mode, the mode truncated to
n_max + 1 Fock states. For delta >> eta |Omega_j| the mode can be
eliminated, leaving the exchange Hamiltonian

    H_eff(t) = Omega_eff(t) |01><10| + h.c.,
    Omega_eff = eta^2 Omega_1^* Omega_2 / delta.

The elimination also produces single-ion Stark shifts
eta^2 |Omega_j|^2 / delta on |0>_j. They are left out of H_eff and show
up in reduction checks as a phase error.
"""

import abc
import concurrent.futures
import dataclasses
import logging
import math
import typing
import warnings
import numpy
import pandas
from geogates import evolve
from geogates import qcore
from geogates import synth
from geogates.errors import ConfigError
from geogates.errors import CutoffTooSmallError
from geogates.errors import DetuningTooSmallError
from geogates.errors import LambDickeError
from geogates.errors import LambDickeWarning
from geogates.paths.curve import ParamCurve

logger = logging.getLogger(__name__)

LAMB_DICKE_WARN = 0.1
LAMB_DICKE_MAX = 0.5
DEFAULT_RATIO = 20.0
RATIO_SLACK = 1e-9
EXCHANGE_GRID = 4097

SIGMA_PLUS = numpy.array([[0, 0], [1, 0]], dtype=complex)


class Drive(abc.ABC):
    """Complex Rabi amplitude Omega(t) of one ion."""

    @abc.abstractmethod
    def __call__(self, times: numpy.ndarray) -> numpy.ndarray:
        pass

    @property
    @abc.abstractmethod
    def peak(self) -> float:
        """max |Omega(t)|."""
        pass

    def breakpoints(self) -> typing.Tuple[float, ...]:
        return ()


class ConstantDrive(Drive):

    def __init__(self, amplitude: complex):
        self.amplitude = complex(amplitude)

    def __call__(self, times):
        return numpy.full(numpy.shape(times), self.amplitude)

    @property
    def peak(self):
        return abs(self.amplitude)


class SineSquaredDrive(Drive):
    """Omega(t) = peak sin^2(pi t / duration) on [0, duration], 0 outside."""

    def __init__(self, peak: complex, duration: float):
        if not duration > 0:
            raise ValueError('The pulse duration must be positive.')
        self.amplitude = complex(peak)
        self.duration = float(duration)

    def __call__(self, times):
        times = numpy.asarray(times, dtype=float)
        inside = (times >= 0) & (times <= self.duration)
        shape = numpy.sin(math.pi * times / self.duration) ** 2
        return numpy.where(inside, self.amplitude * shape, 0.0)

    @property
    def peak(self):
        return abs(self.amplitude)


class SampledDrive(Drive):
    """Linear interpolation of a sampled amplitude."""

    def __init__(self, times, values):
        times = numpy.asarray(times, dtype=float).reshape(-1)
        values = numpy.asarray(values, dtype=complex).reshape(-1)
        if times.size < 2 or times.size != values.size:
            raise ValueError('A sampled drive needs at least two samples '
                             'of matching length.')
        if numpy.any(numpy.diff(times) <= 0):
            raise ValueError('Sample times must increase strictly.')
        self.times = times
        self.values = values

    def __call__(self, times):
        times = numpy.asarray(times, dtype=float)
        return (numpy.interp(times, self.times, self.values.real)
                + 1j * numpy.interp(times, self.times, self.values.imag))

    @property
    def peak(self):
        return float(numpy.max(numpy.abs(self.values)))


class _ExchangeDrive(Drive):
    # Amplitude of one ion realizing the exchange coefficient of a schedule.

    def __init__(self, schedule: synth.HamiltonianSchedule, eta: float,
                 delta: float, second: bool):
        self.schedule = schedule
        self.scale = delta / eta ** 2
        self.second = second
        grid = numpy.linspace(0.0, schedule.duration, EXCHANGE_GRID)
        self._peak = float(numpy.max(numpy.abs(self(grid))))

    def __call__(self, times):
        times = numpy.asarray(times, dtype=float)
        exchange = self.schedule.controls(times.reshape(-1)).exchange
        amplitude = numpy.sqrt(self.scale * numpy.abs(exchange))
        if self.second:
            amplitude = amplitude * numpy.exp(1j * numpy.angle(exchange))
        return amplitude.reshape(times.shape).astype(complex)

    @property
    def peak(self):
        return self._peak

    def breakpoints(self):
        return tuple(self.schedule.breakpoints())


def lamb_dicke_factor(eta: float, n_max: int) -> float:
    return eta ** 2 * (n_max + 1)


@dataclasses.dataclass
class IonModel:
    """Two-ion blue-sideband model.

    :param eta: Lamb-Dicke parameter.
    :param delta: detuning of the sideband drive (angular frequency).
    :param drive1: Omega_1(t).
    :param drive2: Omega_2(t).
    :param n_max: highest Fock state kept (>= 2).
    :param z_field: optional coefficient c_z(t) of R^z, applied to both
      models.
    :param initial_fock: Fock state of the mode at t = 0.
    :param min_ratio: required delta / (eta max|Omega_j|) for the
      effective model.
    """

    eta: float
    delta: float
    drive1: Drive
    drive2: Drive
    n_max: int = 5
    z_field: typing.Optional[typing.Callable[[numpy.ndarray],
                                             numpy.ndarray]] = None
    initial_fock: int = 0
    min_ratio: float = DEFAULT_RATIO
    breakpoints: typing.Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError('eta must be positive.')
        if not self.delta > 0:
            raise ValueError('delta must be positive.')
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError('n_max must be an integer >= 2.')
        if not 0 <= self.initial_fock < self.n_max:
            raise ValueError('initial_fock must be below n_max.')
        factor = lamb_dicke_factor(self.eta, self.n_max)
        if factor > LAMB_DICKE_MAX:
            raise LambDickeError(
                'eta^2 (n_max + 1) = %g is far outside the Lamb-Dicke regime '
                '(limit %g).' % (factor, LAMB_DICKE_MAX))
        if factor > LAMB_DICKE_WARN:
            warnings.warn('eta^2 (n_max + 1) = %g exceeds %g; the sideband '
                          'model may be inaccurate.'
                          % (factor, LAMB_DICKE_WARN), LambDickeWarning)
        if not self.breakpoints:
            self.breakpoints = tuple(sorted(set(
                self.drive1.breakpoints() + self.drive2.breakpoints())))

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 4 * self.n_levels

    @property
    def ratio(self) -> float:
        """delta / (eta max|Omega_j|)."""
        peak = max(self.drive1.peak, self.drive2.peak)
        if peak == 0:
            return math.inf
        return self.delta / (self.eta * peak)

    @classmethod
    def from_exchange(cls, curve: ParamCurve, eta: float,
                      ratio: float = DEFAULT_RATIO,
                      n_max: int = 5) -> 'IonModel':
        """Ion drives whose effective model follows a two-qubit curve.

        Omega_1 = sqrt(delta |Omega_eff| / eta^2) is real and Omega_2 carries
        the phase of Omega_eff; delta = ratio^2 max|Omega_eff| so that
        delta / (eta max|Omega_j|) = ratio. The R^z coefficient of the curve
        is applied as a local field.
        """
        schedule = synth.twoqubit_hamiltonian(curve)
        grid = numpy.linspace(0.0, schedule.duration, EXCHANGE_GRID)
        strongest = float(numpy.max(numpy.abs(schedule.controls(grid)
                                              .exchange)))
        if strongest == 0:
            raise ValueError('The curve has no exchange drive.')
        delta = ratio ** 2 * strongest

        def z_field(times):
            return schedule.controls(times).cz

        return cls(eta=eta, delta=delta,
                   drive1=_ExchangeDrive(schedule, eta, delta, False),
                   drive2=_ExchangeDrive(schedule, eta, delta, True),
                   n_max=n_max, z_field=z_field, min_ratio=ratio,
                   breakpoints=tuple(schedule.breakpoints()))

    def with_cutoff(self, n_max: int) -> 'IonModel':
        return dataclasses.replace(self, n_max=n_max)

    def sideband_operators(self) -> typing.Tuple[numpy.ndarray, numpy.ndarray]:
        """sigma_1^+ a^dagger and sigma_2^+ a^dagger on the full space."""
        create = numpy.diag(numpy.sqrt(numpy.arange(1, self.n_levels)), -1)
        ident = numpy.eye(2)
        return (numpy.kron(numpy.kron(SIGMA_PLUS, ident), create),
                numpy.kron(numpy.kron(ident, SIGMA_PLUS), create))

    def exchange_amplitude(self, times) -> numpy.ndarray:
        """Omega_eff(t) = eta^2 Omega_1^*(t) Omega_2(t) / delta."""
        times = numpy.asarray(times, dtype=float)
        return (self.eta ** 2 * numpy.conj(self.drive1(times))
                * self.drive2(times) / self.delta)

    def _z_terms(self, times) -> numpy.ndarray:
        if self.z_field is None:
            return numpy.zeros(times.shape)
        return numpy.asarray(self.z_field(times), dtype=float)

    def full_matrices(self, times) -> numpy.ndarray:
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        s1, s2 = self.sideband_operators()
        phase = 1j * self.eta * numpy.exp(-1j * self.delta * times)
        c1 = (phase * self.drive1(times))[:, None, None]
        c2 = (phase * self.drive2(times))[:, None, None]
        a = c1 * s1 + c2 * s2
        h = a + qcore.dagger(a)
        rz = numpy.kron(qcore.R_Z, numpy.eye(self.n_levels))
        return h + self._z_terms(times)[:, None, None] * rz

    def effective_matrices(self, times) -> numpy.ndarray:
        times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
        res = numpy.zeros(times.shape + (4, 4), dtype=complex)
        omega = self.exchange_amplitude(times)
        res[:, 1, 2] = omega
        res[:, 2, 1] = numpy.conj(omega)
        return res + self._z_terms(times)[:, None, None] * qcore.R_Z

    def check_detuning(self) -> None:
        if self.ratio < self.min_ratio * (1 - RATIO_SLACK):
            raise DetuningTooSmallError(
                'delta / (eta max|Omega|) = %g is below the required %g.'
                % (self.ratio, self.min_ratio))

    def full_schedule(self, duration: float) -> synth.HamiltonianSchedule:
        return synth.HamiltonianSchedule(self.dim, duration,
                                         self.full_matrices,
                                         breakpoints=self.breakpoints,
                                         label='ion-full')

    def effective_schedule(self, duration: float
                           ) -> synth.HamiltonianSchedule:
        self.check_detuning()
        return synth.HamiltonianSchedule(4, duration,
                                         self.effective_matrices,
                                         breakpoints=self.breakpoints,
                                         label='ion-effective')

    def embed(self, qubit_state: numpy.ndarray,
              fock: typing.Optional[int] = None) -> numpy.ndarray:
        """qubit state (4, ) tensored with a Fock state of the mode."""
        level = numpy.zeros(self.n_levels, dtype=complex)
        level[self.initial_fock if fock is None else fock] = 1
        return numpy.kron(numpy.asarray(qubit_state, dtype=complex), level)

    def sector(self, states: numpy.ndarray,
               fock: typing.Optional[int] = None) -> numpy.ndarray:
        """Qubit amplitudes of states (..., dim) in one Fock sector."""
        level = self.initial_fock if fock is None else fock
        shaped = states.reshape(states.shape[:-1] + (4, self.n_levels))
        return shaped[..., level]


def full_hamiltonian(model: IonModel, t: float) -> qcore.HermitianMatrix:
    """Blue-sideband Hamiltonian at time t."""
    return qcore.HermitianMatrix(model.full_matrices(numpy.array([t]))[0])


def effective_hamiltonian(model: IonModel, t: float) -> qcore.HermitianMatrix:
    """Exchange Hamiltonian at time t.

    :raises DetuningTooSmallError: when delta / (eta max|Omega_j|) is
      below model.min_ratio.
    """
    model.check_detuning()
    return qcore.HermitianMatrix(model.effective_matrices(numpy.array([t]))[0])


@dataclasses.dataclass(frozen=True)
class IonCheckConfig:
    """Numerical settings of a reduction check.

    :param steps_per_period: time steps per detuning period 2 pi / delta.
    :param cutoff_tol: largest change of the qubit-sector state when n_max
      is doubled on the probe run.
    :param cutoff_check: run the doubling probe before the check.
    :param probe_periods: length of the probe run, in detuning periods.
    :param record_every: steps between trajectory records.
    :param leakage_tol: largest population tolerated in the top Fock level.
    """

    steps_per_period: int = 64
    cutoff_tol: float = 1e-6
    cutoff_check: bool = True
    probe_periods: int = 20
    record_every: int = 4
    leakage_tol: float = 1e-4

    def __post_init__(self):
        if self.steps_per_period < 50:
            raise ConfigError('steps_per_period must be at least 50.')
        if self.probe_periods < 1 or self.record_every < 1:
            raise ConfigError('probe_periods and record_every must be '
                              'positive.')
        if not (self.cutoff_tol > 0 and self.leakage_tol > 0):
            raise ConfigError('Tolerances must be positive.')


@dataclasses.dataclass(frozen=True)
class ReductionReport:
    subspace_fidelity: float
    leakage: float
    phase_error: float
    peak_infidelity: float
    cutoff_population: float
    n_steps: int
    ratio: float
    eta: float
    n_max: int

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _propagator_config(model: IonModel, duration: float,
                       cfg: IonCheckConfig) -> evolve.PropagatorConfig:
    n_steps = evolve.step_count_for(duration, model.delta,
                                    cfg.steps_per_period)
    return evolve.PropagatorConfig(n_steps=n_steps)


def check_cutoff(model: IonModel, cfg: typing.Optional[IonCheckConfig] = None,
                 qubit_state: str = '01') -> float:
    """Probe run at n_max and 2 n_max.

    :return: the largest change of the qubit-sector amplitudes.
    :raises CutoffTooSmallError: above cfg.cutoff_tol.
    """
    cfg = cfg or IonCheckConfig()
    duration = 2 * math.pi * cfg.probe_periods / model.delta
    psi_q = qcore.StateVector.from_label(qubit_state).amplitudes
    finals = []
    for n_max in (model.n_max, 2 * model.n_max):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', LambDickeWarning)
            probe = model.with_cutoff(n_max)
        schedule = probe.full_schedule(duration)
        _, record = evolve.evolve_states(
            schedule, probe.embed(psi_q),
            _propagator_config(probe, duration, cfg),
            record_every=cfg.steps_per_period * cfg.probe_periods + 1)
        finals.append(probe.sector(record[-1][:, 0]))
    change = float(numpy.max(numpy.abs(finals[1] - finals[0])))
    logger.debug('cutoff probe: change %g between n_max=%i and %i', change,
                 model.n_max, 2 * model.n_max)
    if change > cfg.cutoff_tol:
        raise CutoffTooSmallError(
            'Doubling n_max from %i changes the qubit-sector state by %g > %g.'
            % (model.n_max, change, cfg.cutoff_tol))
    return change


def reduction_check(model: IonModel, duration: float,
                    cfg: typing.Optional[IonCheckConfig] = None,
                    qubit_state: str = '01') -> ReductionReport:
    """Compare the full and effective dynamics from a product state.

    The qubit state starts in the initial Fock sector. The fidelity is
    |<psi_eff|P psi_full>| with P the projector on that sector and the
    leakage is 1 - ||P psi_full||^2. The phase error is the argument of
    the same overlap at the final time.

    :raises CutoffTooSmallError: when the top Fock level gets more than
      cfg.leakage_tol population, or the doubling probe fails.
    """
    cfg = cfg or IonCheckConfig()
    if cfg.cutoff_check:
        check_cutoff(model, cfg, qubit_state)
    psi_q = qcore.StateVector.from_label(qubit_state).amplitudes
    pcfg = _propagator_config(model, duration, cfg)
    times, full = evolve.evolve_states(model.full_schedule(duration),
                                       model.embed(psi_q), pcfg,
                                       cfg.record_every)
    times_eff, eff = evolve.evolve_states(model.effective_schedule(duration),
                                          psi_q, pcfg, cfg.record_every)
    full = full[:, :, 0]
    eff = eff[:, :, 0]
    projected = model.sector(full)
    overlaps = numpy.einsum('ni,ni->n', numpy.conj(eff), projected)
    top = model.sector(full, model.n_max)
    cutoff_population = float(numpy.max(numpy.sum(numpy.abs(top) ** 2,
                                                  axis=1)))
    if cutoff_population > cfg.leakage_tol:
        raise CutoffTooSmallError(
            'The top Fock level n_max=%i reached population %g > %g.'
            % (model.n_max, cutoff_population, cfg.leakage_tol))
    final = overlaps[-1]
    report = ReductionReport(
        subspace_fidelity=float(abs(final)),
        leakage=float(1 - numpy.sum(numpy.abs(projected[-1]) ** 2)),
        phase_error=float(numpy.angle(final)) if abs(final) > 0 else 0.0,
        peak_infidelity=float(numpy.max(1 - numpy.abs(overlaps))),
        cutoff_population=cutoff_population,
        n_steps=int(len(evolve.step_edges(model.full_schedule(duration),
                                          pcfg.n_steps)) - 1),
        ratio=model.ratio,
        eta=model.eta,
        n_max=model.n_max)
    logger.info('reduction check at R=%.6g: fidelity %.12f, leakage %.3e',
                report.ratio, report.subspace_fidelity, report.leakage)
    return report


def area_duration(eta: float, ratio: float, peak: float, area: float,
                  shape: str = 'sine_squared') -> float:
    """Duration at which the exchange area reaches area.

    With delta = ratio eta peak and equal real drives, the exchange
    amplitude is eta^2 peak^2 / delta for a square pulse and averages
    3/8 of that for a sine-squared pulse.
    """
    delta = ratio * eta * peak
    square = area * delta / (eta ** 2 * peak ** 2)
    if shape == 'square':
        return square
    if shape == 'sine_squared':
        return 8 * square / 3
    raise ValueError('Unknown pulse shape %r.' % shape)


def sweep_model(eta: float, ratio: float, n_max: int = 5,
                shape: str = 'sine_squared', area: float = math.pi / 4,
                peak: float = 1.0) -> typing.Tuple[IonModel, float]:
    """Model with equal real drives at the given ratio, and its duration."""
    delta = ratio * eta * peak
    duration = area_duration(eta, ratio, peak, area, shape)
    if shape == 'square':
        drive: Drive = ConstantDrive(peak)
    else:
        drive = SineSquaredDrive(peak, duration)
    model = IonModel(eta=eta, delta=delta, drive1=drive, drive2=drive,
                     n_max=n_max, min_ratio=ratio)
    return model, duration


def reduction_sweep(eta: float, ratios: typing.Sequence[float],
                    n_max: int = 5, shape: str = 'sine_squared',
                    area: float = math.pi / 4, peak: float = 1.0,
                    cfg: typing.Optional[IonCheckConfig] = None,
                    max_workers: typing.Optional[int] = None
                    ) -> pandas.DataFrame:
    """Reduction checks over detuning ratios, one row per ratio in order."""
    if len(ratios) == 0:
        raise ValueError('At least one ratio is needed.')

    def one(ratio):
        model, duration = sweep_model(eta, ratio, n_max, shape, area, peak)
        report = reduction_check(model, duration, cfg)
        return {'R': float(ratio), 'eta': eta, 'n_max': n_max,
                'subspace_fidelity': report.subspace_fidelity,
                'leakage': report.leakage,
                'phase_error': report.phase_error,
                'peak_infidelity': report.peak_infidelity,
                'cutoff_population': report.cutoff_population,
                'n_steps': report.n_steps}

    with concurrent.futures.ThreadPoolExecutor(max_workers) as executor:
        rows = list(executor.map(one, ratios))
    return pandas.DataFrame(rows)


def infidelity_slope(frame: pandas.DataFrame,
                     column: str = 'peak_infidelity', x: str = 'R') -> float:
    """Least-squares slope of log(column) against log(x)."""
    values = frame[column].to_numpy(dtype=float)
    if numpy.any(values <= 0):
        raise ValueError('The %s column must be positive for a log-log fit.'
                         % column)
    slope, _ = numpy.polyfit(numpy.log(frame[x].to_numpy(dtype=float)),
                             numpy.log(values), 1)
    return float(slope)

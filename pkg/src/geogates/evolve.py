"""Time-ordered propagation and geometric-gate diagnostics."""

import dataclasses
import enum
import json
import logging
import math
import typing
import numpy
import pandas
from geogates import qcore
from geogates import synth
from geogates.errors import BlockStructureError
from geogates.errors import ConfigError
from geogates.errors import DimensionMismatchError
from geogates.errors import UnitarityLostError
from geogates.paths.curve import ParamCurve
from geogates.paths.curve import path_lengths
from geogates.paths.curve import rabi_magnitude_area
from geogates.paths.curve import solid_angle_phase

logger = logging.getLogger(__name__)

CHUNK_STEPS = 2048
PT_FLOOR = 1e-12
BLOCK_TOL = 1e-8


class Method(enum.Enum):
    MIDPOINT = 'midpoint'
    RK4 = 'rk4'


class Which(enum.Enum):
    ONE_QUBIT = 'one-qubit'
    TWO_QUBIT = 'two-qubit'


@dataclasses.dataclass(frozen=True)
class PropagatorConfig:
    """Numerical settings of a propagation.

    :param n_steps: total number of time steps (at least 16). They are
      spread over the smooth windows of the schedule in proportion to
      their lengths.
    :param method: midpoint exponential or RK4.
    :param unitarity_tol: largest tolerated max|U^dagger U - I|.
    :param eigentol: tolerance of the cyclic-eigenvector check.
    :param pt_grid_min: initial size of the parallel-transport grid.
    :param pt_grid_max: largest parallel-transport grid.
    :param amp_cap: drive amplitude cap used for time estimates.
    """

    n_steps: int = 4096
    method: Method = Method.MIDPOINT
    unitarity_tol: float = qcore.UNITARITY_TOL
    eigentol: float = qcore.EIGENTOL
    pt_grid_min: int = 256
    pt_grid_max: int = 65536
    amp_cap: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, 'method', Method(self.method))
        except ValueError:
            raise ConfigError('Unknown propagation method %r.' % self.method)
        if int(self.n_steps) != self.n_steps or self.n_steps < 16:
            raise ConfigError('n_steps must be an integer >= 16.')
        object.__setattr__(self, 'n_steps', int(self.n_steps))
        for name in ('unitarity_tol', 'eigentol', 'amp_cap'):
            if not getattr(self, name) > 0:
                raise ConfigError('%s must be positive.' % name)
        if not 2 <= self.pt_grid_min <= self.pt_grid_max:
            raise ConfigError('The parallel-transport grid bounds must '
                              'satisfy 2 <= pt_grid_min <= pt_grid_max.')

    def to_dict(self) -> dict:
        res = dataclasses.asdict(self)
        res['method'] = self.method.value
        return res

    @classmethod
    def from_dict(cls, data: typing.Optional[dict]) -> 'PropagatorConfig':
        data = dict(data or {})
        unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError('Unknown propagator settings: %s'
                              % ', '.join(sorted(unknown)))
        return cls(**data)


def step_edges(schedule: synth.HamiltonianSchedule,
               n_steps: int) -> numpy.ndarray:
    """Step boundaries that never straddle a breakpoint of the schedule.

    Each smooth window gets a share of n_steps proportional to its
    length (largest remainder), and at least one step.
    """
    windows = schedule.windows()
    lengths = numpy.array([hi - lo for lo, hi in windows])
    quota = n_steps * lengths / numpy.sum(lengths)
    counts = numpy.maximum(numpy.floor(quota).astype(int), 1)
    spare = n_steps - int(numpy.sum(counts))
    if spare > 0:
        order = numpy.argsort(-(quota - numpy.floor(quota)), kind='stable')
        for i in order[:spare]:
            counts[i] += 1
    pieces = [numpy.linspace(lo, hi, count + 1)[:-1]
              for (lo, hi), count in zip(windows, counts)]
    return numpy.append(numpy.concatenate(pieces), windows[-1][1])


def _ordered_product(steps: numpy.ndarray) -> numpy.ndarray:
    # steps[-1] @ ... @ steps[0], by pairwise reduction.
    while steps.shape[0] > 1:
        if steps.shape[0] % 2:
            ident = numpy.broadcast_to(numpy.eye(steps.shape[-1]),
                                       (1, ) + steps.shape[1:])
            steps = numpy.concatenate((steps, ident))
        steps = steps[1::2] @ steps[0::2]
    return steps[0]


def _midpoint_steps(schedule, edges) -> typing.Iterator[numpy.ndarray]:
    for start in range(0, len(edges) - 1, CHUNK_STEPS):
        lo = edges[start:start + CHUNK_STEPS]
        hi = edges[start + 1:start + CHUNK_STEPS + 1]
        lo = lo[:len(hi)]
        dt = hi - lo
        yield qcore.expm_hermitian(schedule.matrices((lo + hi) / 2), dt)


def _rk4_matrices(schedule, edges) -> typing.Iterator[typing.Tuple[
        float, numpy.ndarray, numpy.ndarray, numpy.ndarray]]:
    for start in range(0, len(edges) - 1, CHUNK_STEPS):
        lo = edges[start:start + CHUNK_STEPS]
        hi = edges[start + 1:start + CHUNK_STEPS + 1]
        lo = lo[:len(hi)]
        h_lo = schedule.matrices(lo)
        h_mid = schedule.matrices((lo + hi) / 2)
        h_hi = schedule.matrices(hi)
        for j in range(len(hi)):
            yield hi[j] - lo[j], h_lo[j], h_mid[j], h_hi[j]


def _rk4_step(y, dt, h_lo, h_mid, h_hi):
    # dy/dt = -i H(t) y
    k1 = -1j * (h_lo @ y)
    k2 = -1j * (h_mid @ (y + 0.5 * dt * k1))
    k3 = -1j * (h_mid @ (y + 0.5 * dt * k2))
    k4 = -1j * (h_hi @ (y + dt * k3))
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _check_unitarity(u: numpy.ndarray, tol: float, n_steps: int) -> None:
    defect = float(numpy.max(numpy.abs(qcore.dagger(u) @ u
                                       - numpy.eye(u.shape[0]))))
    if defect > tol:
        raise UnitarityLostError(
            'The propagator lost unitarity: max|U^dagger U - I| = %g > %g '
            'after %i steps. Increase n_steps.' % (defect, tol, n_steps))


def propagate(schedule: synth.HamiltonianSchedule,
              cfg: typing.Optional[PropagatorConfig] = None
              ) -> qcore.UnitaryMatrix:
    """Evolution operator U(duration) of the schedule.

    The result is checked against the unitarity tolerance and never
    re-unitarized.

    :raises UnitarityLostError: when the check fails.
    """
    cfg = cfg or PropagatorConfig()
    edges = step_edges(schedule, cfg.n_steps)
    dim = schedule.dim
    u = numpy.eye(dim, dtype=complex)
    if cfg.method is Method.MIDPOINT:
        for steps in _midpoint_steps(schedule, edges):
            u = _ordered_product(steps) @ u
    else:
        for dt, h_lo, h_mid, h_hi in _rk4_matrices(schedule, edges):
            u = _rk4_step(u, dt, h_lo, h_mid, h_hi)
    logger.debug('propagated %r with %i %s steps', schedule, len(edges) - 1,
                 cfg.method.value)
    _check_unitarity(u, cfg.unitarity_tol, len(edges) - 1)
    return qcore.UnitaryMatrix(u, tol=cfg.unitarity_tol)


def evolve_states(schedule: synth.HamiltonianSchedule,
                  states: numpy.ndarray,
                  cfg: typing.Optional[PropagatorConfig] = None,
                  record_every: int = 1
                  ) -> typing.Tuple[numpy.ndarray, numpy.ndarray]:
    """Propagate the columns of states (dim, m), recording every few steps.

    :return: recorded times (r, ) and states (r, dim, m), the initial and
      final ones included.
    """
    cfg = cfg or PropagatorConfig()
    if record_every < 1:
        raise ValueError('record_every must be >= 1.')
    psi = numpy.array(states, dtype=complex)
    if psi.ndim == 1:
        psi = psi[:, None]
    if psi.shape[0] != schedule.dim:
        raise DimensionMismatchError(
            'The states have dimension %i but the schedule has dimension %i.'
            % (psi.shape[0], schedule.dim))
    norms = numpy.linalg.norm(psi, axis=0)
    edges = step_edges(schedule, cfg.n_steps)
    n_steps = len(edges) - 1
    times = [float(edges[0])]
    record = [psi.copy()]
    j = 0

    def keep(j, psi):
        if j % record_every == 0 or j == n_steps:
            times.append(float(edges[j]))
            record.append(psi.copy())

    if cfg.method is Method.MIDPOINT:
        for steps in _midpoint_steps(schedule, edges):
            for step in steps:
                psi = step @ psi
                j += 1
                keep(j, psi)
    else:
        for dt, h_lo, h_mid, h_hi in _rk4_matrices(schedule, edges):
            psi = _rk4_step(psi, dt, h_lo, h_mid, h_hi)
            j += 1
            keep(j, psi)
    drift = float(numpy.max(numpy.abs(numpy.linalg.norm(psi, axis=0) - norms)))
    if drift > cfg.unitarity_tol:
        raise UnitarityLostError(
            'The state norm drifted by %g > %g after %i steps. Increase '
            'n_steps.' % (drift, cfg.unitarity_tol, n_steps))
    logger.debug('evolved %i state(s) over %i steps, %i records',
                 psi.shape[1], n_steps, len(times))
    return numpy.array(times), numpy.array(record)


def propagate_state(schedule: synth.HamiltonianSchedule,
                    psi0: qcore.StateVector,
                    cfg: typing.Optional[PropagatorConfig] = None
                    ) -> qcore.StateVector:
    cfg = cfg or PropagatorConfig()
    _, record = evolve_states(schedule, psi0.amplitudes, cfg,
                              record_every=cfg.n_steps + 1)
    return qcore.StateVector(record[-1][:, 0], tol=cfg.unitarity_tol)


def propagate_trajectory(schedule: synth.HamiltonianSchedule,
                         states: typing.Sequence[qcore.StateVector],
                         cfg: typing.Optional[PropagatorConfig] = None,
                         record_every: int = 1) -> pandas.DataFrame:
    """Trajectory table of several states.

    Columns are t, then re_k_i and im_k_i for amplitude i of state k,
    then pt_k = <phi_k|H|phi_k>.
    """
    columns = numpy.array([s.amplitudes for s in states]).T
    times, record = evolve_states(schedule, columns, cfg, record_every)
    mats = schedule.matrices(times)
    data: typing.Dict[str, numpy.ndarray] = {'t': times}
    for k in range(columns.shape[1]):
        for i in range(schedule.dim):
            data['re_%i_%i' % (k, i)] = record[:, i, k].real
            data['im_%i_%i' % (k, i)] = record[:, i, k].imag
    for k in range(columns.shape[1]):
        psi = record[:, :, k]
        data['pt_%i' % k] = numpy.einsum('ni,nij,nj->n', numpy.conj(psi),
                                         mats, psi).real
    return pandas.DataFrame(data)


def geometric_phase_continuous(frame: synth.AuxiliaryFrame, k: int) -> float:
    """Unwound phase i * integral of <nu_k|d nu_k/dt> over the cycle.

    :param k: 0-based index of the frame vector.
    """
    if not 0 <= k < frame.dim:
        raise IndexError('The frame has %i vectors.' % frame.dim)
    return frame.connection_integral(k)


def pt_residual(frame: synth.AuxiliaryFrame,
                schedule: synth.HamiltonianSchedule,
                n_points: int) -> float:
    """max over t and k of |<nu_k(t)|H(t)|nu_k(t)>| on a uniform grid."""
    times = numpy.linspace(0.0, schedule.duration, n_points)
    vecs = frame.vectors(times)
    mats = schedule.matrices(times)
    diag = numpy.einsum('nik,nij,njk->nk', numpy.conj(vecs), mats, vecs)
    return float(numpy.max(numpy.abs(diag)))


def pt_residual_converged(frame, schedule, cfg: PropagatorConfig
                          ) -> typing.Tuple[float, int]:
    """Parallel-transport residual, doubling the grid until the maximum
    changes by less than 10%.
    """
    n = cfg.pt_grid_min
    value = pt_residual(frame, schedule, n)
    while 2 * n <= cfg.pt_grid_max:
        finer = pt_residual(frame, schedule, 2 * n)
        n *= 2
        change = abs(finer - value)
        value = max(value, finer)
        logger.debug('pt residual %g on %i points', value, n)
        if change <= 0.1 * max(value, PT_FLOOR):
            break
    return value, n


def cyclicity_defect(u: qcore.UnitaryMatrix,
                     basis: typing.Sequence[qcore.StateVector]) -> float:
    """max_k ||U P_k U^dagger - P_k||_F with P_k the projector on basis k."""
    mat = u.entries
    res = 0.0
    for state in basis:
        proj = state.projector()
        moved = mat @ proj @ qcore.dagger(mat)
        res = max(res, float(numpy.linalg.norm(moved - proj)))
    return res


@dataclasses.dataclass
class EvolutionReport:
    which: str
    duration: float
    n_steps: int
    method: str
    holonomy_continuous: typing.List[float]
    holonomy_principal: typing.List[float]
    pt_residual_max: float
    pt_grid_points: int
    cyclicity_defect: float
    fidelity_vs_target: float
    geometric_phase: float
    solid_angle: float
    lengths: typing.Dict[str, float]
    time_estimate: float
    final_unitary: typing.List[typing.List[typing.List[float]]]
    target_unitary: typing.List[typing.List[typing.List[float]]]

    def unitary(self) -> numpy.ndarray:
        arr = numpy.array(self.final_unitary)
        return arr[..., 0] + 1j * arr[..., 1]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _pairs(mat: numpy.ndarray) -> typing.List[typing.List[typing.List[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def run_geometric_gate(curve: ParamCurve,
                       which: typing.Union[Which, str],
                       target: qcore.GateSpec,
                       cfg: typing.Optional[PropagatorConfig] = None
                       ) -> EvolutionReport:
    """Synthesize, propagate and verify a geometric gate along a curve.

    :raises OpenCurveError: when the curve is not closed.
    :raises NonCyclicError: when a frame vector at t = 0 is not an
      eigenvector of the propagated operator.
    :raises BlockStructureError: for two qubits, when |00> or |11> is
      not left unchanged within 1e-8.
    """
    cfg = cfg or PropagatorConfig()
    which = Which(which)
    curve.require_closed()
    if which is Which.ONE_QUBIT:
        frame: synth.AuxiliaryFrame = synth.BlochFrame(curve)
        schedule = synth.onequbit_hamiltonian(curve)
        target_u = qcore.gate_from_spec(target)
    else:
        frame = synth.ExchangeFrame(curve)
        schedule = synth.twoqubit_hamiltonian(curve)
        target_u = qcore.exchange_gate_from_spec(target)
    u = propagate(schedule, cfg)
    if which is Which.TWO_QUBIT:
        mat = u.entries
        for index, label in ((0, '00'), (3, '11')):
            image = mat[:, index]
            defect = float(numpy.max(numpy.abs(image - numpy.eye(4)[index])))
            if defect > BLOCK_TOL:
                raise BlockStructureError(
                    'U|%s> differs from |%s> by %g.' % (label, label, defect))
    basis = frame.basis_states(0.0)
    principal = qcore.holonomy_extract(u, basis, cfg.eigentol)
    continuous = [geometric_phase_continuous(frame, k)
                  for k in range(frame.dim)]
    residual, grid = pt_residual_converged(frame, schedule, cfg)
    gamma = solid_angle_phase(curve)
    report = EvolutionReport(
        which=which.value,
        duration=curve.total_time,
        n_steps=cfg.n_steps,
        method=cfg.method.value,
        holonomy_continuous=continuous,
        holonomy_principal=[float(x) for x in principal],
        pt_residual_max=residual,
        pt_grid_points=grid,
        cyclicity_defect=cyclicity_defect(u, basis),
        fidelity_vs_target=qcore.gate_fidelity(u, target_u),
        geometric_phase=gamma,
        solid_angle=2 * gamma,
        lengths=path_lengths(curve),
        time_estimate=rabi_magnitude_area(curve) / cfg.amp_cap,
        final_unitary=_pairs(u.entries),
        target_unitary=_pairs(target_u.entries))
    logger.info('%s gate: fidelity %.15f, holonomies %s', which.value,
                report.fidelity_vs_target,
                ', '.join('%+.9f' % x for x in report.holonomy_principal))
    return report


def curve_gate_spec(curve: ParamCurve) -> qcore.GateSpec:
    """Gate a closed curve realizes: its start point as the axis and half
    the enclosed solid angle as gamma.
    """
    start = curve.start_point
    if curve.chart_axis is not None:
        rot = qcore.chart_rotation(curve.chart_axis)
        m = rot @ qcore.pauli_dot(start) @ qcore.dagger(rot)
        start = [float(numpy.real(numpy.trace(sigma @ m))) / 2
                 for sigma in (qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z)]
    return qcore.GateSpec.from_vector(start, solid_angle_phase(curve))


def holonomy_matches_geometry(report: EvolutionReport,
                              tol: float = 1e-6) -> bool:
    """True when each branch phase equals the unwound phase modulo 2 pi."""
    for principal, continuous in zip(report.holonomy_principal,
                                     report.holonomy_continuous):
        if abs(qcore.principal_angle(principal - continuous)) > tol:
            return False
    return True


def step_count_for(duration: float, max_frequency: float,
                   steps_per_period: int) -> int:
    """Steps needed to resolve a phase e^{-i w t} with w <= max_frequency."""
    periods = duration * max_frequency / (2 * math.pi)
    return max(16, int(math.ceil(periods * steps_per_period)))


def peak_frequency(schedule: synth.HamiltonianSchedule,
                   samples: int = 257) -> float:
    """Fastest angular frequency the propagation has to resolve.

    Sum of the largest ||H|| and the largest rate at which H turns,
    ||dH/dt|| / ||H||, sampled inside each smooth window.
    """
    norm_peak = 0.0
    turn_peak = 0.0
    for lo, hi in schedule.windows():
        times = lo + (hi - lo) * (numpy.arange(samples) + 0.5) / samples
        mats = schedule.matrices(times)
        norms = numpy.linalg.norm(mats, ord=2, axis=(-2, -1))
        rates = numpy.linalg.norm(numpy.diff(mats, axis=0), ord=2,
                                  axis=(-2, -1)) / (times[1] - times[0])
        scale = numpy.maximum(norms[:-1], norms[1:])
        norm_peak = max(norm_peak, float(numpy.max(norms)))
        moving = scale > 0
        if numpy.any(moving):
            turn_peak = max(turn_peak,
                            float(numpy.max(rates[moving] / scale[moving])))
    return norm_peak + turn_peak

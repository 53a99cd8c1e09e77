"""Dense linear algebra for two-level, two-qubit and small Fock-truncated spaces.

Pauli convention: sigma_z = |0><0| - |1><1|, sigma_x = |0><1| + |1><0|,
sigma_y = -i|0><1| + i|1><0|. Two-qubit operators use the basis order
|00>, |01>, |10>, |11> (qubit 1 is the left tensor factor).
"""

import dataclasses
import logging
import math
import typing
import numpy
from geogates.errors import DimensionMismatchError
from geogates.errors import NonCyclicError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
UNITARITY_TOL = 1e-9
AXIS_TOL = 1e-12
EIGENTOL = 1e-6

# Indices of |01> and |10>, the exchange block of the two-qubit space.
EXCHANGE_BLOCK = (1, 2)


def _readonly(values) -> numpy.ndarray:
    res = numpy.array(values, dtype=complex)
    res.setflags(write=False)
    return res


SIGMA_I = _readonly(numpy.eye(2))
SIGMA_X = _readonly([[0, 1], [1, 0]])
SIGMA_Y = _readonly([[0, -1j], [1j, 0]])
SIGMA_Z = _readonly([[1, 0], [0, -1]])

R_X = _readonly((numpy.kron(SIGMA_X, SIGMA_X) +
                 numpy.kron(SIGMA_Y, SIGMA_Y)) / 2)
R_Y = _readonly((numpy.kron(SIGMA_X, SIGMA_Y) -
                 numpy.kron(SIGMA_Y, SIGMA_X)) / 2)
R_Z = _readonly((numpy.kron(SIGMA_Z, SIGMA_I) -
                 numpy.kron(SIGMA_I, SIGMA_Z)) / 2)


def dagger(a: numpy.ndarray) -> numpy.ndarray:
    """Conjugate transpose over the last two axes."""
    return numpy.conj(numpy.swapaxes(a, -1, -2))


def principal_angle(x):
    """Wrap an angle (or an array of angles) into (-pi, pi]."""
    arr = numpy.asarray(x, dtype=float)
    res = arr - 2 * math.pi * numpy.ceil((arr - math.pi) / (2 * math.pi))
    if res.ndim == 0:
        return float(res)
    return res


def _as_matrix(obj) -> numpy.ndarray:
    entries = getattr(obj, 'entries', obj)
    return numpy.asarray(entries, dtype=complex)


class StateVector(object):
    """Normalized pure state.

    The norm is checked at construction and is never silently corrected.
    """

    __slots__ = ('_amplitudes', )

    def __init__(self, amplitudes, tol: float = NORM_TOL):
        arr = numpy.array(amplitudes, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise ValueError('A state vector needs at least one amplitude.')
        norm = float(numpy.linalg.norm(arr))
        if abs(norm - 1.0) > tol:
            raise ValueError(
                'The norm of the state is %r, which differs from 1 by more '
                'than %g.' % (norm, tol))
        arr.setflags(write=False)
        self._amplitudes = arr

    @classmethod
    def basis(cls, dim: int, index: int) -> 'StateVector':
        """Computational basis state |index> in a space of dimension dim."""
        if not 0 <= index < dim:
            raise ValueError('index must be in [0, %i).' % dim)
        arr = numpy.zeros(dim, dtype=complex)
        arr[index] = 1
        return cls(arr)

    @classmethod
    def from_label(cls, label: str) -> 'StateVector':
        """Computational basis state from a bit string such as '01'."""
        if not label or set(label) - {'0', '1'}:
            raise ValueError('The label must be a non-empty bit string.')
        return cls.basis(2 ** len(label), int(label, 2))

    @property
    def dim(self) -> int:
        return self._amplitudes.size

    @property
    def amplitudes(self) -> numpy.ndarray:
        return self._amplitudes

    def overlap(self, other: 'StateVector') -> complex:
        """<self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError(
                'Cannot take the overlap of states with dimensions %i and %i.'
                % (self.dim, other.dim))
        return complex(numpy.vdot(self._amplitudes, other.amplitudes))

    def projector(self) -> numpy.ndarray:
        return numpy.outer(self._amplitudes, self._amplitudes.conj())

    def __repr__(self):
        return '%s(%r)' % (type(self).__name__, self._amplitudes.tolist())


class _SquareMatrix(object):

    __slots__ = ('_entries', )

    def __init__(self, entries):
        arr = numpy.array(_as_matrix(entries), dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError('A square, non-empty matrix is required.')
        arr.setflags(write=False)
        self._entries = arr

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> numpy.ndarray:
        return self._entries

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return numpy.array(self._entries)
        return numpy.array(self._entries, dtype=dtype)

    def __repr__(self):
        return '%s(%r)' % (type(self).__name__, self._entries.tolist())


class UnitaryMatrix(_SquareMatrix):
    """Unitary operator, checked entrywise against U^dagger U = I."""

    __slots__ = ()

    def __init__(self, entries, tol: float = UNITARITY_TOL):
        super().__init__(entries)
        defect = self.unitarity_defect()
        if defect > tol:
            raise ValueError(
                'The matrix is not unitary: max|U^dagger U - I| = %g > %g'
                % (defect, tol))

    def unitarity_defect(self) -> float:
        ident = numpy.eye(self.dim)
        return float(numpy.max(numpy.abs(dagger(self._entries) @ self._entries
                                         - ident)))

    def apply(self, state: StateVector) -> StateVector:
        if state.dim != self.dim:
            raise DimensionMismatchError(
                'Cannot apply a %i-dimensional operator to a %i-dimensional '
                'state.' % (self.dim, state.dim))
        return StateVector(self._entries @ state.amplitudes, tol=1e-9)

    def dagger(self) -> 'UnitaryMatrix':
        return UnitaryMatrix(dagger(self._entries))

    def __matmul__(self, other):
        if isinstance(other, UnitaryMatrix):
            return UnitaryMatrix(self._entries @ other.entries)
        return NotImplemented


class HermitianMatrix(_SquareMatrix):
    """Hermitian operator, stored as (A + A^dagger) / 2."""

    __slots__ = ()

    def __init__(self, entries):
        arr = _as_matrix(entries)
        super().__init__((arr + dagger(arr)) / 2)

    @classmethod
    def from_pauli(cls, h0: float, hx: float, hy: float,
                   hz: float) -> 'HermitianMatrix':
        return cls(h0 * SIGMA_I + hx * SIGMA_X + hy * SIGMA_Y + hz * SIGMA_Z)


def _unit_vector(vector, tol: typing.Optional[float] = None
                 ) -> typing.Tuple[float, float, float]:
    vec = numpy.asarray(vector, dtype=float).reshape(-1)
    if vec.size != 3:
        raise ValueError('An axis must have three components.')
    norm = float(numpy.linalg.norm(vec))
    if tol is not None:
        if abs(norm - 1.0) > tol:
            raise ValueError('The axis %r is not a unit vector.' % (
                vec.tolist(), ))
        return (float(vec[0]), float(vec[1]), float(vec[2]))
    if norm == 0:
        raise ValueError('The axis cannot be the zero vector.')
    vec = vec / norm
    return (float(vec[0]), float(vec[1]), float(vec[2]))


def axis_angles(axis) -> typing.Tuple[float, float]:
    """Polar and azimuthal angles (theta, phi) of a 3-vector."""
    x, y, z = (float(v) for v in axis)
    return (math.atan2(math.hypot(x, y), z), math.atan2(y, x))


@dataclasses.dataclass(frozen=True)
class GateSpec:
    """Target rotation exp(-i gamma n.sigma).

    :param axis: unit 3-vector n.
    :param half_angle: gamma, reported in (-pi, pi].
    """

    axis: typing.Tuple[float, float, float]
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, 'axis', _unit_vector(self.axis, AXIS_TOL))
        object.__setattr__(self, 'half_angle',
                           principal_angle(float(self.half_angle)))

    @classmethod
    def from_vector(cls, vector, half_angle: float) -> 'GateSpec':
        """Build a spec from an axis that does not need to be normalized."""
        return cls(_unit_vector(vector), half_angle)

    @property
    def start_point(self) -> typing.Tuple[float, float]:
        return axis_angles(self.axis)

    @property
    def rotation_angle(self) -> float:
        return 2 * self.half_angle

    def to_dict(self) -> dict:
        return {'axis': list(self.axis), 'half_angle': self.half_angle}


def pauli_dot(axis) -> numpy.ndarray:
    """n.sigma for a 3-vector n."""
    return axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z


def gate_from_spec(spec: GateSpec) -> UnitaryMatrix:
    """exp(-i gamma n.sigma) = cos(gamma) I - i sin(gamma) n.sigma."""
    gamma = spec.half_angle
    entries = (math.cos(gamma) * SIGMA_I
               - 1j * math.sin(gamma) * pauli_dot(spec.axis))
    return UnitaryMatrix(entries, tol=NORM_TOL)


def embed_exchange_block(block: numpy.ndarray,
                         identity: bool = False) -> numpy.ndarray:
    """Lift 2x2 matrices (or a stack of them) onto the |01>, |10> block.

    With identity=True the |00> and |11> diagonal entries are set to 1,
    otherwise they are 0.
    """
    block = numpy.asarray(block, dtype=complex)
    res = numpy.zeros(block.shape[:-2] + (4, 4), dtype=complex)
    res[..., 1:3, 1:3] = block
    if identity:
        res[..., 0, 0] = 1
        res[..., 3, 3] = 1
    return res


def exchange_gate_from_spec(spec: GateSpec) -> UnitaryMatrix:
    """|00><00| + |11><11| + the single-qubit gate on the exchange block."""
    return UnitaryMatrix(
        embed_exchange_block(gate_from_spec(spec).entries, identity=True),
        tol=NORM_TOL)


def chart_rotation(axis) -> numpy.ndarray:
    """SU(2) rotation R with R|0> = |n+> and R sigma_z R^dagger = n.sigma.

    R is the identity for n = z.
    """
    theta, phi = axis_angles(_unit_vector(axis))
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return numpy.array([[c, -s * e.conjugate()],
                        [s * e, c]], dtype=complex)


def gate_fidelity(u, v) -> float:
    """Global-phase insensitive fidelity |Tr(U^dagger V)| / d."""
    a = _as_matrix(u)
    b = _as_matrix(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            'Cannot compare operators of shapes %r and %r.'
            % (a.shape, b.shape))
    return float(abs(numpy.trace(dagger(a) @ b)) / a.shape[0])


def holonomy_extract(u, basis: typing.Sequence[StateVector],
                     eigentol: float = EIGENTOL) -> typing.List[float]:
    """Phases arg<phi_k|U|phi_k> in (-pi, pi] for each basis state.

    :param u: the evolution operator.
    :param basis: orthonormal states expected to be eigenvectors of u.
    :param eigentol: largest tolerated ||U phi - <phi|U|phi> phi||.
    :return: one phase per basis state.
    """
    mat = _as_matrix(u)
    vectors = numpy.array([s.amplitudes for s in basis]).T
    if vectors.shape[0] != mat.shape[0]:
        raise DimensionMismatchError(
            'The basis states have dimension %i but the operator has '
            'dimension %i.' % (vectors.shape[0], mat.shape[0]))
    gram = dagger(vectors) @ vectors
    if numpy.max(numpy.abs(gram - numpy.eye(len(basis)))) > 1e-10:
        raise ValueError('The basis states are not orthonormal.')
    phases = []
    for k, state in enumerate(basis):
        image = mat @ state.amplitudes
        eigval = numpy.vdot(state.amplitudes, image)
        residual = float(numpy.linalg.norm(image - eigval * state.amplitudes))
        if residual > eigentol:
            raise NonCyclicError(
                'Basis state %i is not an eigenvector of the evolution '
                'operator (residual %g > %g).' % (k, residual, eigentol))
        phases.append(principal_angle(numpy.angle(eigval)))
    return phases


def is_exchange_structured(h: numpy.ndarray) -> bool:
    """True when 4x4 matrices only couple |01> and |10> with each other."""
    h = numpy.asarray(h)
    if h.shape[-2:] != (4, 4):
        return False
    mask = numpy.ones((4, 4), dtype=bool)
    mask[1:3, 1:3] = False
    mask[0, 0] = False
    mask[3, 3] = False
    return not numpy.any(h[..., mask])


def _su2_expm(h: numpy.ndarray, dt: float) -> numpy.ndarray:
    # exp(-i (h0 + h.sigma) dt) = e^{-i h0 dt} (cos(|h| dt) - i sin(|h| dt) h.sigma / |h|)
    h0 = (h[..., 0, 0].real + h[..., 1, 1].real) / 2
    hz = (h[..., 0, 0].real - h[..., 1, 1].real) / 2
    hx = h[..., 1, 0].real
    hy = h[..., 1, 0].imag
    norm = numpy.sqrt(hx * hx + hy * hy + hz * hz)
    c = numpy.cos(norm * dt)
    s = dt * numpy.sinc(norm * dt / math.pi)
    phase = numpy.exp(-1j * h0 * dt)
    res = numpy.empty(h.shape, dtype=complex)
    res[..., 0, 0] = c - 1j * s * hz
    res[..., 1, 1] = c + 1j * s * hz
    res[..., 0, 1] = -1j * s * hx - s * hy
    res[..., 1, 0] = -1j * s * hx + s * hy
    return res * phase[..., None, None]


def _eigh_expm(h: numpy.ndarray, dt) -> numpy.ndarray:
    w, v = numpy.linalg.eigh(h)
    return (v * numpy.exp(-1j * w * dt[..., None])[..., None, :]) @ dagger(v)


def expm_hermitian(h, dt) -> numpy.ndarray:
    """exp(-i H dt) for a Hermitian matrix or a stack of them.

    Two-level matrices use the closed-form SU(2) expression and
    exchange-structured 4x4 matrices are exponentiated block by block.
    Anything else goes through a Hermitian eigendecomposition.

    :param dt: scalar step, or one step per matrix of the stack.
    """
    h = numpy.asarray(h, dtype=complex)
    dt = numpy.asarray(dt, dtype=float)
    dim = h.shape[-1]
    if dim == 2:
        return _su2_expm(h, dt)
    if dim == 4 and is_exchange_structured(h):
        res = numpy.zeros(h.shape, dtype=complex)
        res[..., 0, 0] = numpy.exp(-1j * h[..., 0, 0].real * dt)
        res[..., 3, 3] = numpy.exp(-1j * h[..., 3, 3].real * dt)
        res[..., 1:3, 1:3] = _su2_expm(h[..., 1:3, 1:3], dt)
        return res
    return _eigh_expm(h, dt)

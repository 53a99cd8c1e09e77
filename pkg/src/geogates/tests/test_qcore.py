import cmath
import math
import numpy
import pytest
import scipy.linalg
from geogates import qcore
from geogates.errors import DimensionMismatchError
from geogates.errors import NonCyclicError
from . import utils


def _random_axis(rng):
    vec = rng.normal(size=3)
    return vec / numpy.linalg.norm(vec)


def test_pauli_convention():
    assert qcore.SIGMA_Z[0, 0] == 1
    assert qcore.SIGMA_Y[0, 1] == -1j
    utils.assert_matrix_close(qcore.SIGMA_X @ qcore.SIGMA_Y,
                              1j * qcore.SIGMA_Z, 0)


def test_exchange_operators():
    assert qcore.R_X[1, 2] == 1
    assert qcore.R_Y[1, 2] == 1j
    assert qcore.R_Z[1, 1] == 1
    assert qcore.R_Z[2, 2] == -1
    for op in (qcore.R_X, qcore.R_Y, qcore.R_Z):
        assert not numpy.any(op[:, 0])
        assert not numpy.any(op[:, 3])
        assert qcore.is_exchange_structured(op)


def test_sigma_constants_readonly():
    with pytest.raises(ValueError):
        qcore.SIGMA_X[0, 0] = 2


def test_statevector_norm_checked():
    with pytest.raises(ValueError):
        qcore.StateVector([1.0, 1.0])
    state = qcore.StateVector([1 / math.sqrt(2), 1j / math.sqrt(2)])
    assert state.dim == 2


def test_statevector_from_label():
    state = qcore.StateVector.from_label('01')
    assert state.dim == 4
    assert state.amplitudes[1] == 1
    with pytest.raises(ValueError):
        qcore.StateVector.from_label('0a')


def test_statevector_overlap_dimension():
    with pytest.raises(DimensionMismatchError):
        qcore.StateVector.basis(2, 0).overlap(qcore.StateVector.basis(4, 0))


def test_unitary_checked():
    with pytest.raises(ValueError):
        qcore.UnitaryMatrix([[1, 1], [0, 1]])
    u = qcore.UnitaryMatrix(qcore.SIGMA_X)
    assert u.unitarity_defect() == 0


def test_unitary_apply():
    u = qcore.UnitaryMatrix(qcore.SIGMA_X)
    res = u.apply(qcore.StateVector.basis(2, 0))
    assert res.amplitudes[1] == 1
    with pytest.raises(DimensionMismatchError):
        u.apply(qcore.StateVector.basis(4, 0))


def test_hermitian_from_pauli():
    h = qcore.HermitianMatrix.from_pauli(0.5, 1.0, -2.0, 0.25)
    expected = (0.5 * qcore.SIGMA_I + qcore.SIGMA_X - 2 * qcore.SIGMA_Y
                + 0.25 * qcore.SIGMA_Z)
    utils.assert_matrix_close(h, expected, 1e-15)


def test_gatespec_invariants():
    with pytest.raises(ValueError):
        qcore.GateSpec((0.0, 0.0, 2.0), 0.1)
    spec = qcore.GateSpec((0.0, 0.0, 1.0), 3 * math.pi / 2)
    assert spec.half_angle == pytest.approx(-math.pi / 2)
    spec = qcore.GateSpec((0.0, 0.0, 1.0), -math.pi)
    assert spec.half_angle == pytest.approx(math.pi)
    spec = qcore.GateSpec.from_vector((2.0, 0.0, 0.0), 0.2)
    assert spec.axis == (1.0, 0.0, 0.0)
    assert spec.start_point == pytest.approx((math.pi / 2, 0.0))


def test_gate_from_spec_identity():
    u = qcore.gate_from_spec(qcore.GateSpec((0.0, 0.0, 1.0), 0.0))
    utils.assert_matrix_close(u, numpy.eye(2), 0)


def test_gate_from_spec_z():
    u = qcore.gate_from_spec(qcore.GateSpec((0.0, 0.0, 1.0), math.pi / 8))
    expected = numpy.diag([cmath.exp(-1j * math.pi / 8),
                           cmath.exp(1j * math.pi / 8)])
    utils.assert_matrix_close(u, expected, 1e-15)


def test_gate_from_spec_x():
    u = qcore.gate_from_spec(qcore.GateSpec((1.0, 0.0, 0.0), math.pi / 2))
    utils.assert_matrix_close(u, -1j * qcore.SIGMA_X, 1e-15)


def test_gate_from_spec_su2():
    rng = numpy.random.default_rng(11)
    for _ in range(20):
        spec = qcore.GateSpec.from_vector(_random_axis(rng),
                                          rng.uniform(-math.pi, math.pi))
        u = qcore.gate_from_spec(spec)
        assert u.unitarity_defect() <= 1e-12
        assert abs(numpy.linalg.det(u.entries) - 1) <= 1e-12


def test_exchange_gate_from_spec():
    spec = qcore.GateSpec((0.0, 1.0, 0.0), 0.3)
    u = qcore.exchange_gate_from_spec(spec)
    assert u.entries[0, 0] == 1
    assert u.entries[3, 3] == 1
    utils.assert_matrix_close(u.entries[1:3, 1:3],
                              qcore.gate_from_spec(spec), 0)


@pytest.mark.parametrize('u,v,expected',
                         [(numpy.eye(2), numpy.eye(2), 1.0),
                          (numpy.eye(2),
                           cmath.exp(1j * math.pi / 3) * numpy.eye(2), 1.0),
                          (qcore.SIGMA_Z, qcore.SIGMA_X, 0.0)])
def test_gate_fidelity(u, v, expected):
    assert qcore.gate_fidelity(u, v) == pytest.approx(expected, abs=1e-15)


def test_gate_fidelity_symmetric_and_invariant():
    rng = numpy.random.default_rng(3)
    specs = [qcore.GateSpec.from_vector(_random_axis(rng),
                                        rng.uniform(-math.pi, math.pi))
             for _ in range(3)]
    u, v, w = (qcore.gate_from_spec(s).entries for s in specs)
    f = qcore.gate_fidelity(u, v)
    assert f == pytest.approx(qcore.gate_fidelity(v, u), abs=1e-14)
    assert f == pytest.approx(qcore.gate_fidelity(w @ u, w @ v), abs=1e-14)
    assert 0 <= f <= 1 + 1e-12


def test_gate_fidelity_dimension():
    with pytest.raises(DimensionMismatchError):
        qcore.gate_fidelity(numpy.eye(2), numpy.eye(4))


def test_holonomy_extract_diagonal():
    u = numpy.diag([cmath.exp(-1j * math.pi / 8),
                    cmath.exp(1j * math.pi / 8)])
    basis = [qcore.StateVector.basis(2, 0), qcore.StateVector.basis(2, 1)]
    phases = qcore.holonomy_extract(u, basis)
    assert phases == pytest.approx([-math.pi / 8, math.pi / 8], abs=1e-15)


def test_holonomy_extract_identity():
    s = 1 / math.sqrt(2)
    basis = [qcore.StateVector([s, 1j * s]), qcore.StateVector([s, -1j * s])]
    assert qcore.holonomy_extract(numpy.eye(2), basis) == pytest.approx([0.0, 0.0])


def test_holonomy_extract_sigma_x():
    u = scipy.linalg.expm(-1j * math.pi / 5 * qcore.SIGMA_X)
    s = 1 / math.sqrt(2)
    basis = [qcore.StateVector([s, s]), qcore.StateVector([s, -s])]
    phases = qcore.holonomy_extract(u, basis)
    assert phases == pytest.approx([-math.pi / 5, math.pi / 5], abs=1e-14)


def test_holonomy_extract_roundtrip():
    rng = numpy.random.default_rng(5)
    q, _ = numpy.linalg.qr(rng.normal(size=(3, 3))
                           + 1j * rng.normal(size=(3, 3)))
    phases = rng.uniform(-math.pi, math.pi, size=3)
    u = q @ numpy.diag(numpy.exp(1j * phases)) @ q.conj().T
    basis = [qcore.StateVector(q[:, k], tol=1e-10) for k in range(3)]
    extracted = qcore.holonomy_extract(u, basis)
    assert extracted == pytest.approx(list(phases), abs=1e-12)


def test_holonomy_extract_noncyclic():
    basis = [qcore.StateVector.basis(2, 0), qcore.StateVector.basis(2, 1)]
    with pytest.raises(NonCyclicError):
        qcore.holonomy_extract(qcore.SIGMA_X, basis)


def test_holonomy_extract_not_orthonormal():
    s = 1 / math.sqrt(2)
    basis = [qcore.StateVector.basis(2, 0), qcore.StateVector([s, s])]
    with pytest.raises(ValueError):
        qcore.holonomy_extract(numpy.eye(2), basis)


@pytest.mark.parametrize('value,expected',
                         [(math.pi, math.pi),
                          (-math.pi, math.pi),
                          (2.5 * math.pi, 0.5 * math.pi),
                          (-1.5 * math.pi, 0.5 * math.pi),
                          (0.25, 0.25)])
def test_principal_angle(value, expected):
    assert qcore.principal_angle(value) == pytest.approx(expected, abs=1e-15)


def test_chart_rotation():
    assert numpy.array_equal(qcore.chart_rotation((0.0, 0.0, 1.0)),
                             numpy.eye(2))
    rng = numpy.random.default_rng(7)
    for _ in range(10):
        axis = _random_axis(rng)
        rot = qcore.chart_rotation(axis)
        utils.assert_matrix_close(rot @ qcore.SIGMA_Z @ rot.conj().T,
                                  qcore.pauli_dot(axis), 1e-14)
        plus = rot[:, 0]
        utils.assert_matrix_close(qcore.pauli_dot(axis) @ plus, plus, 1e-14)


def test_expm_hermitian_two_level():
    rng = numpy.random.default_rng(1)
    coeffs = rng.normal(size=(6, 4))
    h = numpy.array([qcore.HermitianMatrix.from_pauli(*c).entries
                     for c in coeffs])
    dt = rng.uniform(0.01, 2.0, size=6)
    res = qcore.expm_hermitian(h, dt)
    for k in range(6):
        utils.assert_matrix_close(res[k], scipy.linalg.expm(-1j * h[k] * dt[k]),
                                  1e-13)


def test_expm_hermitian_zero_norm():
    res = qcore.expm_hermitian(numpy.zeros((2, 2)), 0.5)
    utils.assert_matrix_close(res, numpy.eye(2), 0)


def test_expm_hermitian_exchange_block():
    h = 0.3 * qcore.R_X - 0.7 * qcore.R_Y + 0.2 * qcore.R_Z
    res = qcore.expm_hermitian(h, 1.3)
    utils.assert_matrix_close(res, scipy.linalg.expm(-1.3j * h), 1e-13)


def test_expm_hermitian_generic():
    rng = numpy.random.default_rng(2)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = (a + a.conj().T) / 2
    res = qcore.expm_hermitian(h[None], numpy.array([0.4]))
    utils.assert_matrix_close(res[0], scipy.linalg.expm(-0.4j * h), 1e-12)


def test_is_exchange_structured():
    assert not qcore.is_exchange_structured(numpy.kron(qcore.SIGMA_X,
                                                       qcore.SIGMA_I))
    assert not qcore.is_exchange_structured(qcore.SIGMA_X)


def test_embed_exchange_block():
    block = numpy.array([[1, 2], [3, 4]])
    res = qcore.embed_exchange_block(block, identity=True)
    assert res[0, 0] == 1
    assert res[3, 3] == 1
    assert res[1, 2] == 2
    assert res[2, 1] == 3

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gafault import ga3
from gafault.errors import AntiparallelPlanes, ZeroBivector
from gafault.ga3 import (
    KIRCHHOFF,
    KIRCHHOFF_UNIT,
    SIGMA12,
    Bivector3,
    Multivector3,
    Rotor3,
    bivector_products,
    kirchhoff_deviation,
    rotor_between_bivectors,
    sandwich,
    sandwich_vectors,
)

# Independent oracle: G3 is isomorphic to 2x2 complex matrices with the
# basis vectors sent to the Pauli matrices.
PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
I2 = np.eye(2, dtype=complex)
BLADE_MATRICES = [
    I2,
    PAULI[0],
    PAULI[1],
    PAULI[2],
    PAULI[0] @ PAULI[1],
    PAULI[0] @ PAULI[2],
    PAULI[1] @ PAULI[2],
    PAULI[0] @ PAULI[1] @ PAULI[2],
]
_BASIS = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in BLADE_MATRICES]).T


def to_matrix(m: Multivector3):
    return sum(c * b for c, b in zip(m.coeffs, BLADE_MATRICES))


def from_matrix(M) -> Multivector3:
    flat = np.concatenate([M.real.ravel(), M.imag.ravel()])
    return Multivector3(np.linalg.solve(_BASIS, flat))


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
mvs = st.lists(finite, min_size=8, max_size=8).map(lambda c: Multivector3(c))
vecs = st.tuples(finite, finite, finite)


def e(name):
    return Multivector3.basis(name)


def test_basis_squares_and_products():
    assert (e("s1") * e("s1")).allclose(Multivector3.scalar(1.0))
    assert (e("s1") * e("s2")).allclose(e("s12"))
    one = Multivector3.scalar(1.0)
    assert ((one + e("s1")) * (one - e("s1"))).allclose(Multivector3.scalar(0.0))


def test_bivectors_square_to_minus_one():
    for name in ("s12", "s13", "s23"):
        assert (e(name) * e(name)).allclose(Multivector3.scalar(-1.0))


def test_wedge_examples():
    assert (e("s1") ^ e("s2")).allclose(e("s12"))
    lhs = (e("s1") + e("s2")) ^ (e("s2") + e("s3"))
    assert lhs.allclose(e("s12") + e("s13") + e("s23"))


@settings(max_examples=200, deadline=None)
@given(mvs, mvs)
def test_geometric_product_matches_pauli_oracle(a, b):
    want = from_matrix(to_matrix(a) @ to_matrix(b))
    assert np.allclose((a * b).coeffs, want.coeffs, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(mvs, mvs, mvs)
def test_associativity(a, b, c):
    lhs = ((a * b) * c).coeffs
    rhs = (a * (b * c)).coeffs
    assert np.allclose(lhs, rhs, atol=1e-9 * (1 + np.abs(lhs).max()))


@settings(max_examples=200, deadline=None)
@given(vecs)
def test_wedge_of_vector_with_itself_vanishes(v):
    m = Multivector3.vector(*v)
    assert np.allclose((m ^ m).coeffs, 0.0)


@settings(max_examples=200, deadline=None)
@given(vecs, vecs)
def test_wedge_is_antisymmetric_part(u, v):
    a, b = Multivector3.vector(*u), Multivector3.vector(*v)
    half = (a * b - b * a) * 0.5
    assert np.allclose((a ^ b).coeffs, half.coeffs, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(mvs, mvs)
def test_reverse_is_anti_automorphism_and_involution(a, b):
    assert np.allclose((~(a * b)).coeffs, ((~b) * (~a)).coeffs, atol=1e-8)
    assert np.allclose((~~a).coeffs, a.coeffs)


def test_reverse_examples():
    assert (~e("s12")).allclose(-e("s12"))
    m = Multivector3.scalar(3.0) + e("s1")
    assert (~m).allclose(m)


def test_multivector_is_immutable():
    m = e("s1")
    with pytest.raises(ValueError):
        m.coeffs[0] = 2.0


def test_bivector_multivector_round_trip():
    B = Bivector3(0.3, -1.2, 2.5)
    assert Bivector3.from_multivector(B.to_multivector()) == B
    # s31 = -s13
    assert B.to_multivector()["s13"] == -2.5


def test_bivector_products_examples():
    c, comm, g4 = bivector_products(SIGMA12, SIGMA12)
    assert c == pytest.approx(-1.0)
    assert comm.magnitude == pytest.approx(0.0)
    _, comm, g4 = bivector_products(SIGMA12, Bivector3(0.0, 1.0, 0.0))
    # s12 s23 = s13, which is -s31
    assert comm.as_array() == pytest.approx([0.0, 0.0, -1.0])
    assert g4 == 0.0


def test_rotor_between_identical_planes_is_identity():
    R = rotor_between_bivectors(SIGMA12, SIGMA12)
    assert R.s == pytest.approx(1.0)
    assert R.L.magnitude == pytest.approx(0.0, abs=1e-15)


def test_rotor_to_kirchhoff_against_matrix_oracle():
    R = rotor_between_bivectors(SIGMA12, KIRCHHOFF_UNIT)
    assert R.angle == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-12)
    # the rotation must carry the Kirchhoff normal onto s3
    n = np.ones(3) / math.sqrt(3)
    assert R.matrix() @ n == pytest.approx([0, 0, 1], abs=1e-12)
    out = Bivector3.from_multivector(sandwich(R, KIRCHHOFF_UNIT.to_multivector()))
    assert out.as_array() == pytest.approx(SIGMA12.as_array(), abs=1e-12)


def test_antiparallel_planes_rejected():
    with pytest.raises(AntiparallelPlanes):
        rotor_between_bivectors(-SIGMA12, SIGMA12)


def test_quarter_turn_in_s12_takes_s1_to_s2():
    R = Rotor3.from_angle_plane(math.pi / 2, SIGMA12)
    assert sandwich(R, e("s1")).allclose(e("s2"))
    Rz = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1.0]])
    assert np.allclose(R.matrix(), Rz)


def test_identity_sandwich():
    m = Multivector3(np.arange(8.0))
    assert sandwich(Rotor3.identity(), m).allclose(m)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 2 * math.pi), vecs.filter(lambda v: sum(x * x for x in v) > 1e-6), vecs)
def test_rotors_preserve_length(angle, plane, v):
    R = Rotor3.from_angle_plane(angle, Bivector3(*plane))
    r = R.to_multivector()
    assert (~r * r).allclose(Multivector3.scalar(1.0), atol=1e-12)
    out = sandwich_vectors(R, np.array([v]))[0]
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(v), rel=1e-9, abs=1e-12)


def test_sandwich_vectors_matches_scalar_path():
    rng = np.random.default_rng(3)
    R = Rotor3.from_angle_plane(0.7, Bivector3(*rng.normal(size=3)))
    X = rng.normal(size=(5, 3))
    want = np.array([sandwich(R, Multivector3.vector(*x)).coeffs[1:4] for x in X])
    assert np.allclose(sandwich_vectors(R, X), want)


def test_kirchhoff_deviation_examples():
    assert kirchhoff_deviation(KIRCHHOFF) == pytest.approx(0.0, abs=1e-7)
    assert kirchhoff_deviation(KIRCHHOFF * 5.0) == pytest.approx(0.0, abs=1e-7)
    assert kirchhoff_deviation(SIGMA12) == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-12)


def test_zero_bivector_cannot_be_normalized():
    with pytest.raises(ZeroBivector):
        Bivector3(0.0, 0.0, 0.0).normalized()
    with pytest.raises(ZeroBivector):
        kirchhoff_deviation(Bivector3(1e-14, 0.0, 0.0))


def test_grade_projection():
    m = Multivector3(np.arange(1.0, 9.0))
    assert m.grade(0).coeffs.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]
    assert m.grade(2).coeffs.tolist() == [0, 0, 0, 0, 5, 6, 7, 0]
    assert sum((m.grade(k) for k in range(4)), Multivector3.scalar(0.0)).allclose(m)


def test_tables_shape():
    assert ga3.GP_TABLE.shape == (8, 8, 8)
    assert ga3.OP_TABLE.shape == (8, 8, 8)

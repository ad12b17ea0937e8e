"""Euclidean geometric algebra G3 with signature (3, 0, 0).

Multivectors are stored as 8 coefficients on the basis

    [1, s1, s2, s3, s12, s13, s23, s123]

and every product is evaluated through a precomputed 8x8x8 structure-constant
tensor, so ``(a * b)[k] = sum_ij a[i] b[j] T[i, j, k]``.

The public bivector type uses the cyclic component order (s12, s23, s31)
used for reporting plane orientation of three-phase trajectories; internally
the s13 slot holds ``-b31``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import AntiparallelPlanes, ZeroBivector

# bitmask of each basis blade (bit i <-> s_{i+1})
BLADE_MASKS = (0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111)
BLADE_NAMES = ("1", "s1", "s2", "s3", "s12", "s13", "s23", "s123")
GRADES = np.array([bin(m).count("1") for m in BLADE_MASKS])
_INDEX = {m: i for i, m in enumerate(BLADE_MASKS)}


def _blade_product(ma, mb):
    """Sign and mask of the product of two unit blades (Euclidean metric)."""
    swaps = 0
    a = ma >> 1
    while a:
        swaps += bin(a & mb).count("1")
        a >>= 1
    sign = -1.0 if swaps & 1 else 1.0
    return sign, ma ^ mb


def _build_tables():
    gp = np.zeros((8, 8, 8))
    op = np.zeros((8, 8, 8))
    for i, ma in enumerate(BLADE_MASKS):
        for j, mb in enumerate(BLADE_MASKS):
            sign, m = _blade_product(ma, mb)
            k = _INDEX[m]
            gp[i, j, k] = sign
            if ma & mb == 0:
                op[i, j, k] = sign
    return gp, op


GP_TABLE, OP_TABLE = _build_tables()
GP_TABLE.setflags(write=False)
OP_TABLE.setflags(write=False)
REVERSE_SIGNS = np.array([1.0, 1, 1, 1, -1, -1, -1, -1])


@dataclass(frozen=True, eq=False)
class Multivector3:
    """Immutable element of G3."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(8)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def scalar(cls, s: float) -> Multivector3:
        c = np.zeros(8)
        c[0] = s
        return cls(c)

    @classmethod
    def vector(cls, x1: float, x2: float, x3: float) -> Multivector3:
        return cls([0.0, x1, x2, x3, 0.0, 0.0, 0.0, 0.0])

    @classmethod
    def basis(cls, name: str) -> Multivector3:
        c = np.zeros(8)
        c[BLADE_NAMES.index(name)] = 1.0
        return cls(c)

    def grade(self, k: int) -> Multivector3:
        return Multivector3(np.where(GRADES == k, self.coeffs, 0.0))

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector3.scalar(other)
        return Multivector3(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Multivector3(-self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Multivector3.scalar(other)
        return Multivector3(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector3(self.coeffs * other)
        return geometric_product(self, other)

    def __rmul__(self, other):
        return Multivector3(self.coeffs * other)

    def __truediv__(self, s):
        return Multivector3(self.coeffs / s)

    def __xor__(self, other):
        return wedge(self, other)

    def __invert__(self):
        return reverse(self)

    def __getitem__(self, name):
        return float(self.coeffs[BLADE_NAMES.index(name)])

    def allclose(self, other, atol=1e-12, rtol=0.0) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=rtol))

    def __repr__(self):
        terms = [f"{c:+.6g}*{n}" for c, n in zip(self.coeffs, BLADE_NAMES) if c != 0]
        return "Multivector3(" + (" ".join(terms) or "0") + ")"


def geometric_product(a: Multivector3, b: Multivector3) -> Multivector3:
    return Multivector3(np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, GP_TABLE))


def wedge(a: Multivector3, b: Multivector3) -> Multivector3:
    return Multivector3(np.einsum("i,j,ijk->k", a.coeffs, b.coeffs, OP_TABLE))


def reverse(m: Multivector3) -> Multivector3:
    return Multivector3(m.coeffs * REVERSE_SIGNS)


@dataclass(frozen=True)
class Vector3:
    x1: float
    x2: float
    x3: float

    def to_multivector(self) -> Multivector3:
        return Multivector3.vector(self.x1, self.x2, self.x3)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])


@dataclass(frozen=True)
class Bivector3:
    """Bivector in cyclic component order (s12, s23, s31)."""

    b12: float
    b23: float
    b31: float

    @classmethod
    def from_array(cls, arr) -> Bivector3:
        b12, b23, b31 = (float(v) for v in arr)
        return cls(b12, b23, b31)

    @classmethod
    def from_multivector(cls, m: Multivector3) -> Bivector3:
        c = m.coeffs
        return cls(float(c[4]), float(c[6]), float(-c[5]))

    def to_multivector(self) -> Multivector3:
        return Multivector3([0.0, 0.0, 0.0, 0.0, self.b12, -self.b31, self.b23, 0.0])

    def as_array(self) -> np.ndarray:
        return np.array([self.b12, self.b23, self.b31])

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.b12 ** 2 + self.b23 ** 2 + self.b31 ** 2)

    def normalized(self, eps: float = 0.0) -> Bivector3:
        m = self.magnitude
        if m <= eps or m == 0.0:
            raise ZeroBivector(f"bivector magnitude {m:.3g} below {eps:.3g}")
        return Bivector3(self.b12 / m, self.b23 / m, self.b31 / m)

    def __neg__(self):
        return Bivector3(-self.b12, -self.b23, -self.b31)

    def __mul__(self, s: float) -> Bivector3:
        return Bivector3(self.b12 * s, self.b23 * s, self.b31 * s)

    __rmul__ = __mul__


SIGMA12 = Bivector3(1.0, 0.0, 0.0)
KIRCHHOFF = Bivector3(1.0, 1.0, 1.0)
KIRCHHOFF_UNIT = Bivector3(*(1.0 / math.sqrt(3.0),) * 3)


@dataclass(frozen=True)
class Rotor3:
    """Unit even multivector ``s + L`` acting by ``R m R~``."""

    s: float
    L: Bivector3

    @classmethod
    def identity(cls) -> Rotor3:
        return cls(1.0, Bivector3(0.0, 0.0, 0.0))

    @classmethod
    def from_angle_plane(cls, angle: float, plane: Bivector3) -> Rotor3:
        """``exp(-plane_hat * angle / 2)``: turns s1 towards s2 for plane s12."""
        unit = plane.normalized()
        return cls(math.cos(angle / 2), unit * -math.sin(angle / 2))

    @classmethod
    def from_multivector(cls, m: Multivector3) -> Rotor3:
        return cls(float(m.coeffs[0]), Bivector3.from_multivector(m))

    def to_multivector(self) -> Multivector3:
        return Multivector3.scalar(self.s) + self.L.to_multivector()

    def reverse(self) -> Rotor3:
        return Rotor3(self.s, -self.L)

    @property
    def angle(self) -> float:
        """Rotation angle in [0, 2*pi]."""
        return 2.0 * math.atan2(self.L.magnitude, self.s)

    def matrix(self) -> np.ndarray:
        """3x3 matrix M with ``M @ v == sandwich(self, v)`` for vectors."""
        cols = [sandwich(self, Multivector3.vector(*e)).coeffs[1:4] for e in np.eye(3)]
        return np.column_stack(cols)


def bivector_products(A: Bivector3, B: Bivector3):
    """Grade-separated parts of the product of two bivectors.

    Returns
    -------
    contraction : float
        ``<AB>_0``
    commutator : Bivector3
        ``<AB>_2 = (AB - BA) / 2``
    grade4 : float
        ``<AB>_4``; there are no 4-blades in G3, so this is always 0.
    """
    a, b = A.to_multivector(), B.to_multivector()
    ab = a * b
    ba = b * a
    commutator = Bivector3.from_multivector(((ab - ba) * 0.5).grade(2))
    return float(ab.coeffs[0]), commutator, 0.0


def rotor_between_bivectors(A: Bivector3, B: Bivector3) -> Rotor3:
    """Rotor R with ``R B R~ = A`` for unit bivectors A and B."""
    m = Multivector3.scalar(1.0) + A.to_multivector() * reverse(B.to_multivector())
    n = m.norm()
    if n < 1e-9:
        raise AntiparallelPlanes("rotor undefined for opposite planes")
    return Rotor3.from_multivector(m / n)


def sandwich(R: Rotor3, m: Multivector3) -> Multivector3:
    r = R.to_multivector()
    return r * m * reverse(r)


def sandwich_vectors(R: Rotor3, X: np.ndarray) -> np.ndarray:
    """Apply ``R x R~`` to each row of an (N, 3) array of vectors."""
    X = np.asarray(X, dtype=float)
    mv = np.zeros((X.shape[0], 8))
    mv[:, 1:4] = X
    r = R.to_multivector().coeffs
    rr = r * REVERSE_SIGNS
    left = np.einsum("i,nj,ijk->nk", r, mv, GP_TABLE)
    out = np.einsum("ni,j,ijk->nk", left, rr, GP_TABLE)
    return out[:, 1:4]


def kirchhoff_deviation(B: Bivector3, eps: float = 1e-12) -> float:
    """Angle between the plane of B and the Kirchhoff plane, in [0, pi]."""
    unit = B.normalized(eps)
    c, _, _ = bivector_products(unit, KIRCHHOFF_UNIT)
    # B ⌋ K~ = -<B K>_0 since K~ = -K
    return math.acos(max(-1.0, min(1.0, -c)))

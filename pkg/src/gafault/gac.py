"""Centered ellipse fitting in the Geometric Algebra for Conics (G(5,3)).

A planar point ``(x1, x2)`` is embedded as the 8-vector

    s0 + x1 s1 + x2 s2 + 1/2 |x|^2 sinf + 1/2 (x1^2 - x2^2) s~inf + x1 x2 s-inf

over the basis ``(s0, s~0, s-0, s1, s2, sinf, s~inf, s-inf)``.  A conic is
the vector ``Q = v1 s0 + v2 s~0 + v3 s-0 + v4 s1 + v5 s2 + v6 sinf`` and a
point lies on it when ``x . Q = x^T B Q = 0``.  Expanding the bilinear form
with ``v1 = 1`` gives the implicit form

    1/2 (1 + v2) x1^2 + 1/2 (1 - v2) x2^2 + v3 x1 x2 + v6 = 0.

Only origin-centred conics are fitted (``v4 = v5 = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    DegenerateCloud,
    InsufficientPoints,
    NoNonNegativeEigenvalue,
    NotAnEllipse,
    SingularNormalization,
)

ACTIVE = (0, 1, 2, 5)  # v1, v2, v3, v6 inside the 8-vector
CIRCLE_ALPHA = 1e-3
# 4AC - B^2 = v1^2 - v2^2 - v3^2 restricted to (v1, v2, v3, v6)
ELLIPSE_CONSTRAINT = np.diag([1.0, -1.0, -1.0, 0.0])


@dataclass(frozen=True)
class ConicVector:
    v: tuple  # (v1, v2, v3, v4, v5, v6)
    normalized: bool = False

    @property
    def alpha(self) -> float:
        return math.hypot(self.v[1], self.v[2])

    @property
    def beta(self) -> float:
        return -2.0 * self.v[5]

    def full(self) -> np.ndarray:
        """The conic as an 8-vector with zero s~inf and s-inf slots."""
        return np.array([*self.v, 0.0, 0.0])

    def normalize(self) -> ConicVector:
        v1 = self.v[0]
        if abs(v1) < 1e-12 * max(1.0, max(abs(c) for c in self.v)):
            raise SingularNormalization(f"first coefficient {v1:.3g} too small")
        return ConicVector(tuple(float(c / v1) for c in self.v), True)

    @property
    def kind(self) -> str:
        """'circle', 'ellipse' or 'degenerate' (anything else)."""
        q = self if self.normalized else self.normalize()
        if q.alpha >= 1.0 or q.beta <= 0.0:
            return "degenerate"
        return "circle" if q.alpha < CIRCLE_ALPHA else "ellipse"


@dataclass(frozen=True)
class EllipseParams:
    a: float
    b: float
    theta: float


@dataclass(frozen=True)
class LineParams:
    angle: float
    half_length: float


def embed_point(p) -> np.ndarray:
    x1, x2 = float(p[0]), float(p[1])
    return np.array(
        [1.0, 0.0, 0.0, x1, x2, 0.5 * (x1 * x1 + x2 * x2), 0.5 * (x1 * x1 - x2 * x2), x1 * x2]
    )


def embed_points(points) -> np.ndarray:
    """Data matrix D (8 x N) with one embedded point per column."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    x1, x2 = pts[:, 0], pts[:, 1]
    n = len(pts)
    return np.vstack(
        [
            np.ones(n),
            np.zeros(n),
            np.zeros(n),
            x1,
            x2,
            0.5 * (x1 * x1 + x2 * x2),
            0.5 * (x1 * x1 - x2 * x2),
            x1 * x2,
        ]
    )


def bilinear_form() -> np.ndarray:
    eye3 = np.eye(3)
    B = np.zeros((8, 8))
    B[0:3, 5:8] = -eye3
    B[3:5, 3:5] = np.eye(2)
    B[5:8, 0:3] = -eye3
    return B


_B = bilinear_form()


def build_p_matrix(points, min_points: int = 1) -> np.ndarray:
    """``P = B D D^T B / N``, the quadratic form of the algebraic residual."""
    D = embed_points(points)
    n = D.shape[1]
    if n < max(min_points, 1):
        raise InsufficientPoints(f"need at least {min_points} points, got {n}")
    BD = _B @ D
    P = BD @ BD.T / n
    return 0.5 * (P + P.T)


def _cubic_eigenvalues(S, C3):
    """Real eigenvalues of the 3x3 pencil (S, C3) with C3 = C3^-1 diagonal."""
    M = C3 @ S
    tr = np.trace(M)
    minors = (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
        + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    )
    det = np.linalg.det(M)
    coeffs = np.array([1.0, -tr, minors, -det])
    roots = np.roots(coeffs)
    scale = max(1.0, np.max(np.abs(roots)))
    real = np.real(roots[np.abs(np.imag(roots)) <= 1e-7 * scale])

    def poly(lam):
        return ((lam - tr) * lam + minors) * lam - det

    def dpoly(lam):
        return (3.0 * lam - 2.0 * tr) * lam + minors

    polished = []
    for lam in real:
        d = dpoly(lam)
        polished.append(lam - poly(lam) / d if d != 0 else lam)
    return np.array(polished)


def _null_vector(A):
    """Unit vector spanning the (numerical) null space of a 3x3 matrix."""
    c = [np.cross(A[0], A[1]), np.cross(A[0], A[2]), np.cross(A[1], A[2])]
    best = max(c, key=lambda v: float(np.dot(v, v)))
    n = np.linalg.norm(best)
    if n == 0.0:
        # rank <= 1: any vector orthogonal to the dominant row
        row = A[np.argmax(np.linalg.norm(A, axis=1))]
        seed = np.eye(3)[np.argmin(np.abs(row))]
        best = np.cross(row, seed) if np.any(row) else seed
        n = np.linalg.norm(best)
    return best / n


def solve_reduced(P_r: np.ndarray):
    """Smallest non-negative eigenpair of ``P_r v = lam C v``.

    The constraint matrix is singular in the ``v6`` slot, so ``v6`` is
    eliminated through the Schur complement of ``P_r`` and the remaining
    3x3 pencil is solved through its characteristic cubic.

    Returns
    -------
    lam : float
    v : ndarray, shape (4,)
        Eigenvector over ``(v1, v2, v3, v6)``, scaled so ``v^T C v = 1``
        when that quantity is positive.
    """
    P_r = np.asarray(P_r, dtype=float)
    p66 = P_r[3, 3]
    if p66 <= 0.0:
        raise NoNonNegativeEigenvalue("P_r has no weight on the constant term")
    p6 = P_r[:3, 3]
    S = P_r[:3, :3] - np.outer(p6, p6) / p66
    C3 = ELLIPSE_CONSTRAINT[:3, :3]
    lams = _cubic_eigenvalues(S, C3)
    tol = -1e-9 * np.linalg.norm(P_r)
    admissible = lams[lams >= tol]
    if admissible.size == 0:
        raise NoNonNegativeEigenvalue(f"eigenvalues {lams} all negative")
    lam = float(admissible.min())
    u = _null_vector(S - lam * C3)
    v = np.append(u, -np.dot(p6, u) / p66)
    k = float(v @ ELLIPSE_CONSTRAINT @ v)
    if k > 0.0:
        v = v / math.sqrt(k)
    return max(lam, 0.0), v


def fit_centered_conic(points) -> ConicVector:
    """Fit an origin-centred ellipse through 2D points.

    Raises NoNonNegativeEigenvalue when the constrained problem has no
    admissible solution and SingularNormalization when the solution cannot
    be scaled to ``v1 = 1``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 4:
        raise InsufficientPoints(f"centred fit needs 4 points, got {len(pts)}")
    if np.all(np.abs(pts - pts[0]) == 0.0):
        raise InsufficientPoints("all points identical")
    # fit at unit RMS radius; the constant term scales back with k^2
    k = math.sqrt(float(np.mean(np.sum(pts * pts, axis=1))))
    P = build_p_matrix(pts / k)
    P_r = P[np.ix_(ACTIVE, ACTIVE)]
    _, v = solve_reduced(P_r)
    q = ConicVector((float(v[0]), float(v[1]), float(v[2]), 0.0, 0.0, float(v[3]) * k * k))
    return q.normalize()


def extract_angle(q: ConicVector, circle_tol: float = CIRCLE_ALPHA) -> float:
    """Inclination of the major semi-axis, in [0, pi).

    The quadratic form is smallest along the direction at
    ``1/2 atan2(-v3, -v2)``, which is therefore the major axis.
    """
    if not q.normalized:
        q = q.normalize()
    if q.alpha < circle_tol:
        return 0.0
    theta = 0.5 * math.atan2(-q.v[2], -q.v[1])
    theta %= math.pi
    return 0.0 if theta >= math.pi else theta


def extract_semiaxes(q: ConicVector):
    if not q.normalized:
        q = q.normalize()
    alpha, beta = q.alpha, q.beta
    if alpha >= 1.0 or beta <= 0.0:
        raise NotAnEllipse(f"alpha={alpha:.6g}, beta={beta:.6g}")
    return math.sqrt(beta / (1.0 - alpha)), math.sqrt(beta / (1.0 + alpha))


def ellipse_params(q: ConicVector, circle_tol: float = CIRCLE_ALPHA) -> EllipseParams:
    a, b = extract_semiaxes(q)
    return EllipseParams(a, b, extract_angle(q, circle_tol))


def conic_from_ellipse(a: float, b: float, theta: float) -> ConicVector:
    """Normalized centred conic with major semi-axis a at inclination theta."""
    alpha = (a * a - b * b) / (a * a + b * b)
    beta = a * a * (1.0 - alpha)
    # major axis direction minimises the form: atan2(-v3, -v2) = 2 theta
    v2 = -alpha * math.cos(2 * theta)
    v3 = -alpha * math.sin(2 * theta)
    return ConicVector((1.0, v2, v3, 0.0, 0.0, -0.5 * beta), True)


def fit_line_tls(points) -> LineParams:
    """Total-least-squares line through the origin.

    The direction is the principal axis of the second-moment matrix about the
    origin; an isotropic cloud resolves to angle 0.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise InsufficientPoints(f"line fit needs 2 points, got {len(pts)}")
    if np.all(np.abs(pts - pts[0]) == 0.0):
        raise DegenerateCloud("all points coincide")
    sxx = float(np.dot(pts[:, 0], pts[:, 0]))
    syy = float(np.dot(pts[:, 1], pts[:, 1]))
    sxy = float(np.dot(pts[:, 0], pts[:, 1]))
    scale = max(sxx + syy, np.finfo(float).tiny)
    if abs(sxx - syy) <= 1e-12 * scale and abs(sxy) <= 1e-12 * scale:
        angle = 0.0
    else:
        angle = (0.5 * math.atan2(2.0 * sxy, sxx - syy)) % math.pi
    d = np.array([math.cos(angle), math.sin(angle)])
    return LineParams(angle, float(np.max(np.abs(pts @ d))))

"""Canonical forms and exact exponentials for 2x2 matrices with complex spectrum.

A real 2x2 matrix whose discriminant (tr A)^2 - 4 det A is negative has
eigenvalues ``a ± ib`` with ``b > 0``.  Such a matrix is similar to the
rotation-scaling matrix ``[[a, -b], [b, a]]``; in the adapted coordinates its
flow is a genuine logarithmic spiral, which is what the rest of the package
builds on.  This module constructs that change of basis deterministically and
evaluates ``exp(tA)`` in closed form.

Vectors are numpy arrays of shape (2,), matrices of shape (2, 2); both are
referred to as ``Vec2`` / ``Mat2`` in docstrings.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotComplexSpectrum, OffLine, ZeroVector

__all__ = [
    "CanonicalForm",
    "as_matrix",
    "as_vector",
    "canonicalize",
    "discriminant",
    "line_coordinate",
    "matrix_exp",
    "perp",
    "rotation",
]


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite float (2, 2) array."""
    m = np.asarray(a, dtype=float)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(v) -> np.ndarray:
    """Coerce to a finite float (2,) array."""
    w = np.asarray(v, dtype=float)
    if w.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("vector entries must be finite")
    return w


def discriminant(a) -> float:
    """Return (tr A)^2 - 4 det A; negative iff A has complex eigenvalues."""
    m = as_matrix(a)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return tr * tr - 4.0 * det


def rotation(tau: float) -> np.ndarray:
    """Rotation by ``tau`` radians, counter-clockwise for positive ``tau``."""
    c, s = math.cos(tau), math.sin(tau)
    return np.array([[c, -s], [s, c]])


def perp(v) -> np.ndarray:
    """Quarter-turn counter-clockwise: (x, y) -> (-y, x)."""
    w = as_vector(v)
    return np.array([-w[1], w[0]])


@dataclass(frozen=True)
class CanonicalForm:
    """Rotation-scaling normal form of a 2x2 matrix with complex spectrum.

    ``basis`` is the (generally non-orthogonal) change of coordinates ``Q``
    with ``Q^-1 A Q = [[eig_real, -eig_imag], [eig_imag, eig_real]]``,
    normalized to ``|det Q| = 1`` and first column along +x.  ``flipped`` is
    True when the original flow rotates clockwise, i.e. when achieving
    ``eig_imag > 0`` required an orientation-reversing basis
    (conjugation by diag(1, -1) for an input already in clockwise form).

    Attributes
    ----------
    eig_real : float
        Real part of the eigenvalues, tr A / 2.
    eig_imag : float
        Imaginary part, sqrt(|discriminant|) / 2, always positive.
    basis : Mat2
        Change-of-basis matrix Q (canonical frame -> original frame).
    flipped : bool
        True iff det(basis) < 0.
    """

    eig_real: float
    eig_imag: float
    basis: np.ndarray
    flipped: bool
    basis_inv: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.basis_inv is None:
            q = self.basis
            det = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
            inv = np.array([[q[1, 1], -q[0, 1]], [-q[1, 0], q[0, 0]]]) / det
            object.__setattr__(self, "basis_inv", inv)

    def matrix(self) -> np.ndarray:
        """The normal form [[eig_real, -eig_imag], [eig_imag, eig_real]]."""
        return np.array(
            [[self.eig_real, -self.eig_imag], [self.eig_imag, self.eig_real]]
        )

    def to_canonical(self, points: np.ndarray) -> np.ndarray:
        """Map points (2,) or (n, 2) from original to canonical coordinates."""
        return np.asarray(points, dtype=float) @ self.basis_inv.T

    def from_canonical(self, points: np.ndarray) -> np.ndarray:
        """Map points (2,) or (n, 2) from canonical to original coordinates."""
        return np.asarray(points, dtype=float) @ self.basis.T


def canonicalize(a, tol: float = 1e-12) -> CanonicalForm:
    """Compute the rotation-scaling normal form of ``a``.

    Requires discriminant < -tol * ||a||_F^2; matrices inside that band are
    rejected rather than guessed.

    The basis is built from the generator ``N = (A - eig_real I) / eig_imag``
    (which satisfies N^2 = -I): columns ``(e, N e)`` with ``e = (1, 0)``
    conjugate N to the quarter-turn, and the result is scaled to unit
    determinant magnitude.  The choice is deterministic; for normal matrices
    it is orthogonal, and for an input already in clockwise canonical form it
    is exactly diag(1, -1).

    Raises
    ------
    NotComplexSpectrum
        If the discriminant is not below the rejection band.
    """
    m = as_matrix(a)
    disc = discriminant(m)
    scale2 = float(np.sum(m * m))
    if disc >= -tol * max(scale2, 1e-300):
        raise NotComplexSpectrum(
            f"discriminant {disc:.6g} is not negative beyond tolerance; "
            "complex eigenvalue pair required"
        )
    eig_real = 0.5 * (m[0, 0] + m[1, 1])
    eig_imag = 0.5 * math.sqrt(-disc)
    gen = (m - eig_real * np.eye(2)) / eig_imag
    col2 = gen[:, 0]  # N @ (1, 0)
    det = col2[1]  # cross((1,0), col2)
    basis = np.array([[1.0, col2[0]], [0.0, col2[1]]]) / math.sqrt(abs(det))
    return CanonicalForm(eig_real, eig_imag, basis, flipped=bool(det < 0.0))


def matrix_exp(a, t: float) -> np.ndarray:
    """Exact ``exp(t a)`` for a 2x2 matrix with complex spectrum.

    Uses the closed form
    ``exp(tA) = e^{t r} (cos(t w) I + sin(t w) (A - r I) / w)``
    with eigenvalues ``r ± iw``; equivalently a scaled rotation in the
    canonical frame.

    Raises
    ------
    NotComplexSpectrum
        Propagated when the discriminant is nonnegative.
    """
    m = as_matrix(a)
    disc = discriminant(m)
    scale2 = float(np.sum(m * m))
    if disc >= -1e-12 * max(scale2, 1e-300):
        raise NotComplexSpectrum(
            f"discriminant {disc:.6g} is not negative; matrix_exp closed form "
            "requires a complex eigenvalue pair"
        )
    r = 0.5 * (m[0, 0] + m[1, 1])
    w = 0.5 * math.sqrt(-disc)
    gen = (m - r * np.eye(2)) / w
    growth = math.exp(t * r)
    return growth * math.cos(t * w) * np.eye(2) + growth * math.sin(t * w) * gen


def line_coordinate(v, direction, tol: float = 1e-9) -> float:
    """Signed coordinate of ``v`` on the line through 0 spanned by ``direction``.

    Returns ``c`` with ``v = c * direction / |direction|``.  All interval and
    order statements along a line in this package are phrased in this
    coordinate.

    Raises
    ------
    ZeroVector
        If ``direction`` is zero.
    OffLine
        If ``v`` is farther than ``tol * (1 + |v|)`` from the line.
    """
    w = as_vector(v)
    d = as_vector(direction)
    norm_d = math.hypot(d[0], d[1])
    if norm_d == 0.0:
        raise ZeroVector("line direction must be nonzero")
    unit = d / norm_d
    c = float(w @ unit)
    off = w - c * unit
    dist = math.hypot(off[0], off[1])
    if dist > tol * (1.0 + math.hypot(w[0], w[1])):
        raise OffLine(
            f"point {w.tolist()} is {dist:.3g} away from the line "
            f"spanned by {d.tolist()}"
        )
    return c

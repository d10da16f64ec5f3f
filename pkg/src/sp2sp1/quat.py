"""Quaternion arithmetic on numpy arrays.

A quaternion ``a + b i + c j + d k`` is stored as a float array whose last
axis has length 4.  Every function here broadcasts over leading axes, so the
same code handles single quaternions, vectors of H^2 (shape ``(2, 4)``) and
quaternionic matrices (shape ``(m, n, 4)``).  :class:`Quaternion` is a small
immutable convenience wrapper for interactive use.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import PreconditionError, StructuralError

UNIT_TOL = 1e-9

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_array(cls, q) -> "Quaternion":
        a, b, c, d = (float(x) for x in np.asarray(q, dtype=float))
        return cls(a, b, c, d)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.a, self.b, self.c, self.d], dtype=dtype)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self, other))
        return Quaternion.from_array(np.asarray(self) * float(other))

    __rmul__ = __mul__

    def __add__(self, other):
        return Quaternion.from_array(np.asarray(self) + np.asarray(other))

    def __sub__(self, other):
        return Quaternion.from_array(np.asarray(self) - np.asarray(other))

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        return float(np.linalg.norm(np.asarray(self)))

    @property
    def real(self) -> float:
        return self.a

    @property
    def imag(self) -> np.ndarray:
        return np.array([self.b, self.c, self.d])


def qmul(p, q) -> np.ndarray:
    """Hamilton product ``p q`` (broadcasting over leading axes)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    return np.asarray(q, dtype=float) * _CONJ


def qnorm(q) -> np.ndarray:
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def qreal_dot(p, q) -> np.ndarray:
    """Euclidean inner product of quaternions viewed in R^4, i.e. ``Re(conj(p) q)``."""
    return np.sum(np.asarray(p, dtype=float) * np.asarray(q, dtype=float), axis=-1)


def kform(v, w) -> np.ndarray:
    """Quaternionic hermitian form on H^2: ``K(v, w) = sum_i conj(v_i) w_i``.

    ``v`` and ``w`` have shape ``(..., 2, 4)``.
    """
    return np.sum(qmul(qconj(v), w), axis=-2)


def qmatmul(A, B) -> np.ndarray:
    """Product of quaternionic matrices of shapes ``(..., m, n, 4)`` and ``(..., n, p, 4)``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return np.sum(qmul(A[..., :, :, None, :], B[..., None, :, :, :]), axis=-3)


def qadjoint(A) -> np.ndarray:
    """Conjugate transpose ``A*`` of a quaternionic matrix."""
    return qconj(np.swapaxes(np.asarray(A, dtype=float), -3, -2))


def left_matrix(q) -> np.ndarray:
    """4x4 real matrix of ``x -> q x``."""
    return np.stack([qmul(q, e) for e in np.eye(4)], axis=-1)


def right_matrix(q) -> np.ndarray:
    """4x4 real matrix of ``x -> x q``."""
    return np.stack([qmul(e, q) for e in np.eye(4)], axis=-1)


def _unit(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    n = float(np.linalg.norm(xi))
    if abs(1.0 - n) >= UNIT_TOL:
        raise PreconditionError(f"expected a unit quaternion, got norm {n!r}")
    return xi / n


def sp1_conjugate(xi, q) -> np.ndarray:
    """Return ``xi q conj(xi)`` for a unit quaternion ``xi``.

    Raises
    ------
    PreconditionError
        If ``|xi|`` differs from 1 by more than ``UNIT_TOL``.
    """
    xi = _unit(xi)
    return qmul(qmul(xi, q), qconj(xi))


def im_cross(u, v) -> np.ndarray:
    """Cross product on Im H = R^3 with oriented basis (i, j, k)."""
    return np.cross(np.asarray(u, dtype=float), np.asarray(v, dtype=float))


def quaternion_from_rotation(R) -> np.ndarray:
    """Unit quaternion ``xi`` whose conjugation acts on Im H as the rotation ``R``."""
    x, y, z, w = Rotation.from_matrix(np.asarray(R, dtype=float)).as_quat()
    xi = np.array([w, x, y, z])
    return xi if w >= 0 else -xi


def rotation_matrix(xi) -> np.ndarray:
    """3x3 matrix of ``q -> xi q conj(xi)`` restricted to Im H."""
    xi = _unit(xi)
    cols = [sp1_conjugate(xi, e)[1:] for e in (I, J, K)]
    return np.stack(cols, axis=-1)


def complete_axes(dirs, zero_tol=1e-12) -> np.ndarray:
    """Right-handed orthonormal frame ``(e1, e2, e3)`` of R^3 following ``dirs``.

    ``dirs`` holds three optional direction vectors (``None`` or near-zero
    means unconstrained).  Axes are filled in order of priority: the first two
    available directions are Gram-Schmidt orthonormalised; a third is only used
    for its line (the sign is fixed by orientation).  Missing axes are
    completed with the first standard basis vector at distance > 0.5 from the
    span already built.  Returns the frame as matrix columns.
    """
    vecs = []
    for d in dirs:
        if d is None:
            vecs.append(None)
            continue
        d = np.asarray(d, dtype=float)
        n = float(np.linalg.norm(d))
        vecs.append(d / n if n > zero_tol else None)

    axes = [None, None, None]
    for a in range(3):
        if vecs[a] is None or sum(x is not None for x in axes) >= 2:
            continue
        v = vecs[a].copy()
        for b in axes:
            if b is not None:
                v -= (b @ v) * b
        n = float(np.linalg.norm(v))
        if n > 1e-8:
            axes[a] = v / n

    while sum(x is not None for x in axes) < 2:
        built = [x for x in axes if x is not None]
        for e in np.eye(3):
            r = e - sum(((b @ e) * b for b in built), np.zeros(3))
            if np.linalg.norm(r) > 0.5:
                slot = next(a for a, x in enumerate(axes) if x is None)
                axes[slot] = r / np.linalg.norm(r)
                break

    # remaining slot from orientation: e1 x e2 = e3 and cyclic
    missing = next(a for a, x in enumerate(axes) if x is None)
    nxt, nxt2 = axes[(missing + 1) % 3], axes[(missing + 2) % 3]
    axes[missing] = np.cross(nxt, nxt2)
    return np.stack(axes, axis=-1)


def rotation_aligning(t1, t2, t3, tol=1e-6) -> np.ndarray:
    """Unit quaternion whose conjugation sends ``i, j, -k`` onto the directions of ``t1, t2, t3``.

    Zero targets are unconstrained and completed deterministically.  When all
    three targets are non-zero the third one is matched up to sign only, since
    orientation fixes it.

    Raises
    ------
    StructuralError
        If two non-zero targets are not orthogonal within ``tol``.
    """
    ts = [np.asarray(t, dtype=float) for t in (t1, t2, t3)]
    units = [t / np.linalg.norm(t) for t in ts if np.linalg.norm(t) > 1e-12]
    for a in range(len(units)):
        for b in range(a + 1, len(units)):
            if abs(units[a] @ units[b]) > tol:
                raise StructuralError("rotation targets are not pairwise orthogonal")
    R = complete_axes([ts[0], ts[1], -ts[2]])
    return quaternion_from_rotation(R)

"""Sp(2)Sp(1)-orbits of real k-planes in H^2 = R^8, k = 2, 3, 4.

A frame is an ``(8, k)`` real array with orthonormal columns; rows 0-3 hold the
first quaternionic coordinate (components 1, i, j, k) and rows 4-7 the second.
A plane is classified by a tuple ``lam`` of ``C(k, 2)`` reals: some orthonormal
basis of some plane in its orbit has Gram matrix ``M_lam`` under the
quaternionic hermitian form.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from .errors import (
    ClassificationError,
    InadmissibleTupleError,
    PreconditionError,
    UnsupportedDimensionError,
)
from .hherm import (
    MLAMBDA_PATTERN,
    PAIR_LABELS,
    PAIRS,
    check_admissible,
    lambda_dim,
    mlambda,
    sp_diagonalize,
)
from .quat import (
    complete_axes,
    kform,
    qconj,
    qmatmul,
    qmul,
    qnorm,
)

ORTHONORMAL_TOL = 1e-10
CLASSIFY_TOL = 1e-12
PSI_GAP = 1e-6
FALLBACK_RESTARTS = 8

# which pairs share an imaginary axis in M_lambda, with the sign relating q_pq to +lambda*axis
AXIS_GROUPS = {
    3: (((0, 1), 1.0), ((0, 2), 1.0), ((1, 2), -1.0)),
}
AXIS_GROUPS_4 = (
    (((0, 1), 1.0), ((2, 3), -1.0)),  # i
    (((0, 2), 1.0), ((1, 3), 1.0)),  # j
    (((0, 3), 1.0), ((1, 2), -1.0)),  # k
)


@dataclass(frozen=True)
class LambdaClass:
    lam: np.ndarray
    residual: float
    degenerate: bool

    @property
    def k(self) -> int:
        return lambda_dim(self.lam)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lambda": {PAIR_LABELS[pq]: float(v) for pq, v in zip(PAIRS[self.k], self.lam)},
            "residual": float(self.residual),
            "degenerate": bool(self.degenerate),
        }


@dataclass(frozen=True)
class GroupElement:
    """An element ``(g, xi)`` of Sp(2) x Sp(1) acting by ``v -> g v conj(xi)``."""

    g: np.ndarray  # (2, 2, 4), g* g = Id
    xi: np.ndarray  # (4,), unit

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        gg = qmatmul(qconj(np.swapaxes(g, 0, 1)), g)
        eye = np.zeros((2, 2, 4))
        eye[[0, 1], [0, 1], 0] = 1.0
        if np.max(np.abs(gg - eye)) > 1e-10 or abs(np.linalg.norm(xi) - 1) > 1e-10:
            raise PreconditionError("not an element of Sp(2) x Sp(1)")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def identity(cls) -> "GroupElement":
        g = np.zeros((2, 2, 4))
        g[[0, 1], [0, 1], 0] = 1.0
        return cls(g, np.array([1.0, 0.0, 0.0, 0.0]))


# frames ----------------------------------------------------------------------

def as_hvectors(F) -> np.ndarray:
    """``(..., 8, k)`` real frame -> ``(..., k, 2, 4)`` vectors of H^2."""
    F = np.asarray(F, dtype=float)
    return np.swapaxes(F, -1, -2).reshape(F.shape[:-2] + (F.shape[-1], 2, 4))


def from_hvectors(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    return np.swapaxes(U.reshape(U.shape[:-2] + (8,)), -1, -2)


def check_frame(F, tol=ORTHONORMAL_TOL) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != 8:
        raise PreconditionError(f"a frame must have shape (8, k), got {F.shape}")
    defect = float(np.max(np.abs(F.T @ F - np.eye(F.shape[1])), initial=0.0))
    if defect > tol:
        raise PreconditionError(f"frame is not orthonormal (Gram defect {defect:.3e})")
    return F


def frame_to_json(F) -> dict:
    F = np.asarray(F, dtype=float)
    return {"k": int(F.shape[1]), "columns": [[float(x) for x in col] for col in F.T]}


def frame_from_json(obj) -> np.ndarray:
    cols = obj["columns"]
    F = np.array(cols, dtype=float).reshape(len(cols), 8).T if cols else np.zeros((8, 0))
    if "k" in obj and int(obj["k"]) != F.shape[1]:
        raise PreconditionError(f"frame declares k={obj['k']} but has {F.shape[1]} columns")
    return F


def gram(F) -> np.ndarray:
    """Quaternionic Gram matrix ``(K(u_i, u_j))`` of a frame (batched over leading axes)."""
    U = as_hvectors(F)
    return kform(U[..., :, None, :, :], U[..., None, :, :, :])


def psi_matrix(F) -> np.ndarray:
    """Matrix ``Re(Q^2)`` of the endomorphism psi_V in the basis of the frame."""
    Q = gram(F)
    # Re(pq) = p0 q0 - <Im p, Im q>
    return np.einsum("...irc,...rjc->...ij", Q * np.array([1, -1, -1, -1]), Q)


def frame_from_angles(k, theta) -> np.ndarray:
    """Columns ``(cos t_p, sin t_p) u_p`` with ``u = 1, i, j, k``; Gram matrix ``M_lambda``
    for ``lambda_pq = cos(t_p - t_q)``."""
    theta = np.asarray(theta, dtype=float)
    if k not in (2, 3, 4) or theta.shape != (k,):
        raise UnsupportedDimensionError("frame_from_angles needs k in {2, 3, 4} and k angles")
    F = np.zeros((8, k))
    for p, t in enumerate(theta):
        F[p, p] = np.cos(t)
        F[4 + p, p] = np.sin(t)
    return F


def lambda_from_angles(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.array([np.cos(theta[p] - theta[q]) for p, q in PAIRS[len(theta)]])


def apply_group(F, el: GroupElement) -> np.ndarray:
    U = as_hvectors(F)  # (k, 2, 4)
    gU = np.sum(qmul(el.g[None, :, :, :], U[:, None, :, :]), axis=2)
    return from_hvectors(qmul(gU, qconj(el.xi)))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_frames(rng, size, n=8, k=2) -> np.ndarray:
    """``size`` Haar-random orthonormal ``(n, k)`` frames (QR of Gaussian matrices)."""
    G = rng.standard_normal((size, n, k))
    Qm, R = np.linalg.qr(G)
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    bad = np.any(np.abs(np.diagonal(R, axis1=-2, axis2=-1)) < 1e-12, axis=-1)
    if np.any(bad):
        Qm[bad] = haar_frames(rng, int(bad.sum()), n, k)
        d[bad] = 1.0
    return Qm * d[..., None, :]


def random_frame(k, seed=None) -> np.ndarray:
    return haar_frames(_rng(seed), 1, 8, k)[0]


def random_group_element(seed=None) -> GroupElement:
    rng = _rng(seed)
    while True:
        cols = rng.standard_normal((2, 2, 4))  # two columns in H^2
        c1 = cols[0] / np.linalg.norm(cols[0])
        c2 = cols[1] - qmul(c1, kform(c1, cols[1]))
        n2 = np.linalg.norm(c2)
        if n2 > 1e-8:
            break
    c2 = c2 / n2
    g = np.stack([c1, c2], axis=1)  # g[row, col]
    xi = rng.standard_normal(4)
    return GroupElement(g, xi / np.linalg.norm(xi))


def complement(F) -> np.ndarray:
    """Orthonormal frame(s) of the orthogonal complement in R^8 (batched)."""
    F = np.asarray(F, dtype=float)
    k = F.shape[-1]
    Qm, _ = np.linalg.qr(F, mode="complete")
    return Qm[..., :, k:]


# the finite group Z_2^k x S_k --------------------------------------------------

@lru_cache(maxsize=None)
def group_action(k):
    """Index and sign arrays: image ``g.lam`` is ``signs[g] * lam[index[g]]``."""
    pairs = PAIRS[k]
    pos = {pq: a for a, pq in enumerate(pairs)}
    index, signs = [], []
    for sigma in itertools.permutations(range(k)):
        for eps in itertools.product((1.0, -1.0), repeat=k):
            idx, sg = [], []
            for p, q in pairs:
                s, t = sigma[p], sigma[q]
                idx.append(pos[(min(s, t), max(s, t))])
                sg.append(eps[p] * eps[q])
            index.append(idx)
            signs.append(sg)
    return np.array(index), np.array(signs)


def group_orbit(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    index, signs = group_action(lambda_dim(lam))
    return signs * lam[index]


def canonicalize(lam, decimals=9) -> np.ndarray:
    """Lexicographically greatest image of ``lam`` under Z_2^k x S_k.

    Comparison uses values rounded to ``decimals`` places, ties broken by the
    exact values, so that numerically equal tuples pick the same representative.
    """
    images = group_orbit(lam)
    rounded = np.round(images, decimals)
    keys = [images[:, c] for c in reversed(range(images.shape[1]))]
    keys += [rounded[:, c] for c in reversed(range(images.shape[1]))]
    best = np.lexsort(keys)[-1]
    return images[best].copy()


def class_distance(a, b) -> float:
    """Group-minimised max-norm distance between two lambda tuples."""
    b = np.asarray(b, dtype=float)
    if lambda_dim(a) != lambda_dim(b):
        raise UnsupportedDimensionError("lambda tuples of different k")
    return float(np.min(np.max(np.abs(group_orbit(a) - b), axis=1)))


# classification ----------------------------------------------------------------

def _axis_groups(k):
    if k == 3:
        return tuple((g,) for g in AXIS_GROUPS[3])
    return AXIS_GROUPS_4


def _signed(Q, pair, sign):
    p, q = pair
    return sign * Q[..., p, q, 1:]


def _pattern_defect(Q) -> np.ndarray:
    """Sp(1)-invariant residual vector; zero iff ``Q`` is conjugate to an M_lambda."""
    k = Q.shape[-3]
    groups = _axis_groups(k)
    parts = [Q[..., np.arange(k)[:, None] != np.arange(k), 0].reshape(Q.shape[:-3] + (-1,))]
    for a in range(3):
        va = [_signed(Q, *m) for m in groups[a]]
        for x, y in itertools.combinations(va, 2):
            parts.append(np.cross(x, y))
        for b in range(a + 1, 3):
            for x in va:
                for m in groups[b]:
                    parts.append(np.sum(x * _signed(Q, *m), axis=-1)[..., None])
    return np.concatenate(parts, axis=-1)


def _read_lambda(Q, axes) -> tuple[np.ndarray, np.ndarray]:
    """Read lambda off ``Q`` given image axes ``(e1, e2, e3)`` of ``(i, j, k)``; also
    return the squared mass of ``Q`` off the M_lambda pattern."""
    k = Q.shape[-3]
    lam, mass = [], 0.0
    for p, q in PAIRS[k]:
        unit, sign = MLAMBDA_PATTERN[(p, q)]
        e = axes[..., :, unit - 1]
        v = Q[..., p, q, 1:]
        val = sign * np.sum(v * e, axis=-1)
        lam.append(val)
        mass = mass + np.sum((v - sign * val[..., None] * e) ** 2, axis=-1) + Q[..., p, q, 0] ** 2
    return np.stack(lam, axis=-1), mass


def _group_direction(Q, group):
    best = None
    for pair, sign in group:
        v = _signed(Q, pair, sign)
        if best is None or np.linalg.norm(v) > np.linalg.norm(best):
            best = v
    return best


def _aligned_read(Q):
    """Scalar path: choose axes from the pattern groups and read lambda."""
    k = Q.shape[0]
    if k == 2:
        q12 = Q[0, 1, 1:]
        axes = complete_axes([q12, None, None])
    else:
        axes = complete_axes([_group_direction(Q, g) for g in _axis_groups(k)])
    lam, mass = _read_lambda(Q, axes)
    return lam, float(mass)


def _rotate_gram(Q, R):
    """Gram matrix of the basis ``u' = u R`` for a real orthogonal ``R``."""
    return np.einsum("...ai,...abc,...bj->...ijc", R, Q, R)


def _psi_blocks(w, gap):
    blocks, start = [], 0
    scale = max(float(np.sum(np.abs(w))), 1e-300)
    for a in range(1, len(w) + 1):
        if a == len(w) or abs(w[a] - w[a - 1]) >= gap * scale:
            blocks.append(list(range(start, a)))
            start = a
    return blocks


def _block_rotation(params, blocks, k):
    R = np.eye(k)
    pos = 0
    for b in blocks:
        m = len(b)
        if m < 2:
            continue
        S = np.zeros((m, m))
        iu = np.triu_indices(m, 1)
        S[iu] = params[pos : pos + len(iu[0])]
        S -= S.T
        pos += len(iu[0])
        R[np.ix_(b, b)] = expm(S)
    return R


def _fallback(Q, w, tol, rng):
    """Search rotations inside repeated psi-eigenspaces for a pattern-shaped Gram matrix."""
    best = None
    for gap in (PSI_GAP, 1e-4, 1e-2, np.inf):
        blocks = _psi_blocks(w, gap) if np.isfinite(gap) else [list(range(len(w)))]
        nparams = sum(len(b) * (len(b) - 1) // 2 for b in blocks)
        if nparams == 0:
            continue
        starts = [np.zeros(nparams)] + [rng.uniform(-np.pi, np.pi, nparams) for _ in range(FALLBACK_RESTARTS)]
        for x0 in starts:
            sol = least_squares(
                lambda p: _pattern_defect(_rotate_gram(Q, _block_rotation(p, blocks, len(w)))),
                x0,
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
                method="lm",
            )
            Qr = _rotate_gram(Q, _block_rotation(sol.x, blocks, len(w)))
            lam, mass = _aligned_read(Qr)
            if best is None or mass < best[1]:
                best = (lam, mass)
            if mass <= tol:
                return best
    return best


def classify(F, tol=CLASSIFY_TOL) -> LambdaClass:
    """Orbit invariant ``[lambda]`` of the plane spanned by a 2-, 3- or 4-frame.

    The basis is first rotated into an eigenbasis of psi_V, where the Gram
    matrix is Sp(1)-conjugate to some ``M_lambda``; lambda is read off after
    aligning the imaginary axes.  When psi_V has repeated eigenvalues the
    eigenbasis is not unique and a least-squares search over rotations of the
    repeated eigenspaces restores the pattern.

    Raises
    ------
    UnsupportedDimensionError
        For k outside {2, 3, 4}; use :func:`complement` for k >= 5.
    ClassificationError
        If no rotation brings the residual below ``tol``.
    """
    F = check_frame(F)
    k = F.shape[1]
    if k not in (2, 3, 4):
        raise UnsupportedDimensionError(
            f"classify handles k in {{2, 3, 4}}, got k={k}; classify the complement for k >= 5"
        )
    Q = gram(F)
    degenerate = False
    if k == 2:
        lam, mass = _aligned_read(Q)
    else:
        w, R = np.linalg.eigh(psi_matrix(F))
        Q = _rotate_gram(Q, R)
        lam, mass = _aligned_read(Q)
        if mass > tol:
            degenerate = True
            lam, mass = _fallback(Q, w, tol, np.random.default_rng(0))
    if mass > tol:
        raise ClassificationError("could not bring Gram matrix to M_lambda shape", mass)
    lam = np.clip(lam, -1.0, 1.0)
    return LambdaClass(canonicalize(lam), mass, degenerate)


def classify_batch(F, tol=CLASSIFY_TOL) -> np.ndarray:
    """Raw (non-canonical) lambda tuples for a stack of frames ``(N, 8, k)``.

    Generic frames go through a vectorised path; frames whose residual
    exceeds ``tol`` are re-done one by one with :func:`classify`.
    """
    F = np.asarray(F, dtype=float)
    n, _, k = F.shape
    Q = gram(F)
    if k == 2:
        return np.linalg.norm(Q[:, 0, 1, 1:], axis=-1)[:, None]
    _, R = np.linalg.eigh(psi_matrix(F))
    Q = _rotate_gram(Q, R)
    groups = _axis_groups(k)
    d1 = _signed(Q, *groups[0][0])
    d2 = _signed(Q, *groups[1][0])
    n1 = np.linalg.norm(d1, axis=-1, keepdims=True)
    e1 = d1 / np.where(n1 > 0, n1, 1.0)
    d2 = d2 - np.sum(d2 * e1, axis=-1, keepdims=True) * e1
    n2 = np.linalg.norm(d2, axis=-1, keepdims=True)
    e2 = d2 / np.where(n2 > 0, n2, 1.0)
    axes = np.stack([e1, e2, np.cross(e1, e2)], axis=-1)
    lam, mass = _read_lambda(Q, axes)
    redo = (mass > tol) | (n1[:, 0] < 1e-6) | (n2[:, 0] < 1e-6)
    for idx in np.flatnonzero(redo):
        lam[idx] = classify(F[idx], tol).lam
    return lam


def reconstruct(lam, tol=1e-8) -> np.ndarray:
    """An orthonormal frame whose Gram matrix is ``M_lambda``.

    Raises
    ------
    InadmissibleTupleError
        If ``M_lambda`` has Moore rank above 2 or a negative eigenvalue.
    """
    lam = check_admissible(lam, tol)
    k = lambda_dim(lam)
    ms = sp_diagonalize(mlambda(lam))
    delta = np.clip(ms.eigenvalues[:2], 0.0, None)
    A = ms.unitary
    U = np.stack([np.sqrt(delta[0]) * A[0], np.sqrt(delta[1]) * A[1]], axis=1)  # (k, 2, 4)
    F = from_hvectors(U)
    # symmetric re-orthonormalisation removes round-off from the dropped eigenvalues
    u, _, vt = np.linalg.svd(F, full_matrices=False)
    F = u @ vt
    err = float(np.max(np.abs(gram(F) - mlambda(lam))))
    if err > 1e-7:
        raise InadmissibleTupleError(f"reconstruction misses M_lambda by {err:.3e}")
    assert F.shape == (8, k)
    return F


def lambda_class_from_json(obj) -> LambdaClass:
    k = int(obj["k"])
    lam = np.array([obj["lambda"][PAIR_LABELS[pq]] for pq in PAIRS[k]], dtype=float)
    return LambdaClass(lam, float(obj.get("residual", 0.0)), bool(obj.get("degenerate", False)))


def dumps_frame(F) -> str:
    return json.dumps(frame_to_json(F))


def is_quaternionic(F, tol=1e-9) -> bool:
    """Whether span(F) is invariant under right multiplication by i, j, k."""
    F = np.asarray(F, dtype=float)
    P = F @ F.T
    U = as_hvectors(F)
    for unit in np.eye(4)[1:]:
        G = from_hvectors(qmul(U, unit))
        if np.max(np.abs(P @ G - G)) > tol:
            return False
    return True


__all__ = [
    "LambdaClass",
    "GroupElement",
    "apply_group",
    "canonicalize",
    "class_distance",
    "classify",
    "classify_batch",
    "complement",
    "frame_from_angles",
    "gram",
    "psi_matrix",
    "random_frame",
    "random_group_element",
    "reconstruct",
    "qnorm",
]

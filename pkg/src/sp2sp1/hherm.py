"""Hyperhermitian quaternionic matrices and their Moore spectral data.

Matrices are arrays of shape ``(k, k, 4)``.  Moore eigenvalues are obtained
from the complex adjoint, a ``2k x 2k`` hermitian matrix whose spectrum is the
Moore spectrum with every eigenvalue doubled.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    InadmissibleTupleError,
    NumericalDegeneracyError,
    StructuralError,
    UnsupportedDimensionError,
)
from .quat import left_matrix, qadjoint, qmatmul

HERMITIAN_TOL = 1e-10
PAIRING_TOL = 1e-6

# pairs (p, q), p < q, in the fixed order (1,2),(1,3),(1,4),(2,3),(2,4),(3,4); 0-based
PAIRS = {
    2: ((0, 1),),
    3: ((0, 1), (0, 2), (1, 2)),
    4: ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
}
PAIR_LABELS = {(p, q): f"{p + 1}{q + 1}" for p in range(4) for q in range(p + 1, 4)}

# entry (p, q) of M_lambda is sign * lambda_pq * unit, unit index 1=i, 2=j, 3=k
MLAMBDA_PATTERN = {
    (0, 1): (1, 1.0),
    (0, 2): (2, 1.0),
    (0, 3): (3, 1.0),
    (1, 2): (3, -1.0),
    (1, 3): (2, 1.0),
    (2, 3): (1, -1.0),
}


class MooreSpectrum(NamedTuple):
    eigenvalues: np.ndarray  # descending
    unitary: np.ndarray  # A with Q = A* diag(eigenvalues) A


def lambda_dim(lam) -> int:
    """Size k of the matrix M_lambda for a tuple of C(k,2) entries."""
    n = len(lam)
    for k, pairs in PAIRS.items():
        if len(pairs) == n:
            return k
    raise UnsupportedDimensionError(f"a lambda tuple must have 1, 3 or 6 entries, got {n}")


def check_hyperhermitian(Q, tol=HERMITIAN_TOL) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 3 or Q.shape[0] != Q.shape[1] or Q.shape[2] != 4:
        raise StructuralError(f"expected a (k, k, 4) quaternionic matrix, got shape {Q.shape}")
    defect = float(np.max(np.abs(Q - qadjoint(Q)), initial=0.0))
    if defect > tol * max(1.0, float(np.max(np.abs(Q), initial=0.0))):
        raise StructuralError(f"matrix is not hyperhermitian (defect {defect:.3e})")
    return Q


def complex_adjoint(Q) -> np.ndarray:
    """Hermitian ``[[Z1, Z2], [-conj(Z2), conj(Z1)]]`` where ``Q = Z1 + Z2 j``."""
    Q = check_hyperhermitian(Q)
    z1 = Q[..., 0] + 1j * Q[..., 1]
    z2 = Q[..., 2] + 1j * Q[..., 3]
    return np.block([[z1, z2], [-z2.conj(), z1.conj()]])


def real_representation(Q) -> np.ndarray:
    """The ``4k x 4k`` real matrix of ``x -> Q x`` on H^k = R^{4k}."""
    Q = np.asarray(Q, dtype=float)
    k = Q.shape[0]
    R = np.zeros((4 * k, 4 * k))
    for a in range(k):
        for b in range(k):
            R[4 * a : 4 * a + 4, 4 * b : 4 * b + 4] = left_matrix(Q[a, b])
    return R


def _spectral_scale(w) -> float:
    return max(1.0, float(np.max(np.abs(w), initial=0.0)))


def moore_eigenvalues(Q) -> np.ndarray:
    """Moore eigenvalues of ``Q``, sorted in descending order.

    Raises
    ------
    NumericalDegeneracyError
        If the doubled complex spectrum cannot be paired off.
    """
    w = np.linalg.eigvalsh(complex_adjoint(Q))[::-1]
    first, second = w[0::2], w[1::2]
    gap = float(np.max(np.abs(first - second), initial=0.0))
    if gap > PAIRING_TOL * _spectral_scale(w):
        raise NumericalDegeneracyError(f"complex adjoint spectrum does not pair up (gap {gap:.3e})")
    return 0.5 * (first + second)


def moore_det(Q) -> float:
    return float(np.prod(moore_eigenvalues(Q)))


def moore_rank(Q, tol=None) -> int:
    """Number of Moore eigenvalues with ``|e| > tol`` (default ``1e-8`` x spectral radius)."""
    w = moore_eigenvalues(Q)
    if tol is None:
        tol = 1e-8 * max(float(np.max(np.abs(w), initial=0.0)), np.finfo(float).tiny)
    return int(np.sum(np.abs(w) > tol))


def _quaternion_vector(v) -> np.ndarray:
    # complex vector [p; r] of the adjoint <-> quaternionic x = p - conj(r) j
    k = v.shape[0] // 2
    p, r = v[:k], v[k:]
    return np.stack([p.real, p.imag, -r.real, r.imag], axis=-1)


def _pair_columns(x) -> np.ndarray:
    # the two complex columns representing x and x*j
    p = x[:, 0] + 1j * x[:, 1]
    r = -(x[:, 2] - 1j * x[:, 3])
    return np.stack([np.concatenate([p, r]), np.concatenate([r.conj(), -p.conj()])], axis=-1)


def sp_diagonalize(Q) -> MooreSpectrum:
    """Factor ``Q = A* D A`` with ``A`` in Sp(k) and ``D`` real diagonal (descending).

    Quaternionic eigenvectors are assembled from complex eigenvectors of the
    adjoint: within each cluster of equal eigenvalues the candidate with the
    largest component outside the already-built quaternionic span is taken next.
    """
    Q = check_hyperhermitian(Q)
    k = Q.shape[0]
    chi = complex_adjoint(Q)
    w, V = np.linalg.eigh(chi)
    order = list(np.argsort(-w, kind="stable"))
    scale = _spectral_scale(w)
    cluster_tol = 1e-8 * scale

    found, evals = [], []
    basis = np.zeros((2 * k, 0), dtype=complex)
    while len(found) < k and order:
        top = w[order[0]]
        cluster = [i for i in order if top - w[i] <= cluster_tol]
        resid = {i: V[:, i] - basis @ (basis.conj().T @ V[:, i]) for i in cluster}
        best = max(cluster, key=lambda i: np.linalg.norm(resid[i]))
        if np.linalg.norm(resid[best]) < 0.5:
            order = [i for i in order if i not in cluster]
            continue
        x = _quaternion_vector(resid[best] / np.linalg.norm(resid[best]))
        cols = _pair_columns(x)
        found.append(x)
        evals.append(float(np.real(cols[:, 0].conj() @ chi @ cols[:, 0])))
        basis = np.concatenate([basis, cols], axis=1)
        order.remove(best)
    if len(found) < k:
        raise NumericalDegeneracyError("could not assemble a full quaternionic eigenbasis")

    X = np.stack(found, axis=1)  # columns are eigenvectors
    A = qadjoint(X)
    D = np.zeros((k, k, 4))
    D[np.arange(k), np.arange(k), 0] = evals
    err = float(np.max(np.abs(qmatmul(qmatmul(X, D), A) - Q)))
    if err > 1e-8 * scale:
        raise NumericalDegeneracyError(f"Sp(k) diagonalisation residual {err:.3e}")
    return MooreSpectrum(np.asarray(evals), A)


def mlambda(lam) -> np.ndarray:
    """The canonical hyperhermitian matrix ``M_lambda`` (k = 2, 3, 4)."""
    lam = np.asarray(lam, dtype=float)
    k = lambda_dim(lam)
    M = np.zeros((k, k, 4))
    M[np.arange(k), np.arange(k), 0] = 1.0
    for (p, q), value in zip(PAIRS[k], lam):
        unit, sign = MLAMBDA_PATTERN[(p, q)]
        M[p, q, unit] = sign * value
        M[q, p, unit] = -sign * value
    return M


def mlambda_det_closed(lam) -> float:
    """Closed-form Moore determinant of ``M_lambda`` for k = 2, 3, 4."""
    lam = np.asarray(lam, dtype=float)
    k = lambda_dim(lam)
    if k == 2:
        (l12,) = lam
        return float(1 - l12**2)
    if k == 3:
        l12, l13, l23 = lam
        return float(1 - l12**2 - l13**2 - l23**2 + 2 * l12 * l13 * l23)
    l12, l13, l14, l23, l24, l34 = lam
    return float(
        1
        - l12**2 - l13**2 - l14**2 - l23**2 - l24**2 - l34**2
        + 2 * l23 * l34 * l24 + 2 * l12 * l23 * l13 + 2 * l12 * l24 * l14 + 2 * l13 * l34 * l14
        + l12**2 * l34**2 + l23**2 * l14**2 + l13**2 * l24**2
        - 2 * l12 * l23 * l34 * l14 - 2 * l12 * l24 * l13 * l34 - 2 * l13 * l24 * l23 * l14
    )


def rank2_residual(lam) -> float:
    """Size of the Moore spectrum of ``M_lambda`` beyond its two largest eigenvalues.

    Zero exactly when ``M_lambda`` has Moore rank at most 2.
    """
    w = moore_eigenvalues(mlambda(lam))
    if w.size <= 2:
        return 0.0
    return float(np.max(np.abs(w[2:])))


def check_admissible(lam, tol=1e-8) -> np.ndarray:
    """Validate that ``lam`` lies in [-1, 1] and ``M_lambda`` is psd of Moore rank <= 2."""
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) > 1 + tol):
        raise InadmissibleTupleError("lambda entries must lie in [-1, 1]")
    w = moore_eigenvalues(mlambda(lam))
    if w.size > 2 and np.max(np.abs(w[2:])) > tol:
        raise InadmissibleTupleError(f"M_lambda has Moore rank > 2 (third eigenvalue {w[2]:.3e})")
    if np.min(w) < -tol:
        raise InadmissibleTupleError(f"M_lambda has a negative Moore eigenvalue {np.min(w):.3e}")
    return lam

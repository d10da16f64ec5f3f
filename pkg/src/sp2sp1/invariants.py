"""Invariant functions ``f_{k,i}`` on Gr_k(H^2), Laplacian eigenfunctions and Klain evaluation.

Polynomials are stored as explicit monomial lists over the pair labels
``"12", "13", ...``; a monomial is ``(coefficient, {label: exponent})``.
For ``5 <= k <= 8`` the functions are pulled back through the orthogonal
complement, ``f_{k,i} := f_{8-k,i}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError, UnsupportedDimensionError
from .hherm import PAIR_LABELS, PAIRS
from .orbit import check_frame, classify, complement

DIMENSIONS = (1, 1, 2, 3, 5, 3, 2, 1, 1)


def _m(coef, *factors):
    expo = {}
    for lab in factors:
        expo[lab] = expo.get(lab, 0) + 1
    return (coef, expo)


def _sq(*labels):
    return [x for lab in labels for x in (lab, lab)]


# f_{k,i} for k <= 4, as monomial lists
POLYNOMIALS = {
    (2, 1): [_m(1, *_sq("12"))],
    (3, 1): [_m(1, *_sq(lab)) for lab in ("12", "13", "23")],
    (3, 2): [
        _m(1, *_sq("12", "23")),
        _m(1, *_sq("13", "23")),
        _m(1, *_sq("12", "13")),
    ],
    (4, 1): [_m(1, *_sq(lab)) for lab in ("12", "13", "14", "23", "24", "34")],
    (4, 2): [
        _m(1, *_sq("12", "34")),
        _m(1, *_sq("13", "24")),
        _m(1, *_sq("14", "23")),
    ],
    (4, 3): [
        _m(1, *_sq(a, b))
        for a, b in (
            ("12", "13"), ("12", "14"), ("13", "14"), ("12", "23"), ("12", "24"), ("23", "24"),
            ("13", "23"), ("13", "34"), ("23", "34"), ("14", "24"), ("14", "34"), ("24", "34"),
        )
    ],
    (4, 4): [
        _m(2, "12", "13", *_sq("23"), "24", "34"),
        _m(2, "12", "13", *_sq("14"), "24", "34"),
        _m(2, "12", "23", *_sq("13"), "14", "34"),
        _m(2, "12", "23", *_sq("24"), "14", "34"),
        _m(2, "24", "23", *_sq("12"), "14", "13"),
        _m(2, "24", "23", *_sq("34"), "14", "13"),
        _m(3, *_sq("12", "13", "14")),
        _m(3, *_sq("12", "23", "24")),
        _m(3, *_sq("13", "23", "34")),
        _m(3, *_sq("14", "24", "34")),
    ],
}


@dataclass(frozen=True)
class EigenRow:
    """One invariant Laplacian eigenfunction ``sum_i coeffs[i] f_{k,i}``."""

    k: int
    j: int
    coeffs: tuple  # over f_{k,0}, f_{k,1}, ...
    eigenvalue: int
    weight: tuple  # highest weight of SO(8), four entries


_EIGEN = {
    0: [((1,), 0, (0, 0, 0, 0))],
    1: [((1,), 0, (0, 0, 0, 0))],
    2: [((1, 0), 0, (0, 0, 0, 0)), ((-3, 7), 28, (2, 2, 0, 0))],
    3: [
        ((1, 0, 0), 0, (0, 0, 0, 0)),
        ((-9, 7, 0), 28, (2, 2, 0, 0)),
        ((15, -17, 16), 60, (4, 2, 2, 0)),
    ],
    4: [
        ((1, 0, 0, 0, 0), 0, (0, 0, 0, 0)),
        ((-18, 7, 0, 0, 0), 28, (2, 2, 0, 0)),
        ((0, -1, 6, 0, 0), 40, (2, 2, 2, 2)),
        ((66, -43, 8, 20, 0), 60, (4, 2, 2, 0)),
        ((-210, 226, -194, -161, 63), 96, (6, 2, 2, 2)),
    ],
}

EIGEN_TABLE = {
    k: tuple(EigenRow(k, j, c, mu, w) for j, (c, mu, w) in enumerate(rows))
    for k, rows in _EIGEN.items()
}

# Laplacian of each f_{k,i} as coefficients over f_{k,0}, f_{k,1}, ...
LAPLACIAN_IDENTITIES = {
    (2, 1): (-12, 28),
    (3, 1): (-36, 28, 0),
    (3, 2): (18, -34, 60),
    (4, 1): (-72, 28, 0, 0, 0),
    (4, 2): (-12, -2, 40, 0, 0),
    (4, 3): (48, -68, 8, 60, 0),
    (4, 4): (24, 64, -152, -92, 96),
}


def reduced_degree(k) -> int:
    if not 0 <= k <= 8:
        raise UnsupportedDimensionError(f"degree must lie in 0..8, got {k}")
    return min(k, 8 - k)


def check_id(k, i):
    if not 0 <= k <= 8 or not 0 <= i < DIMENSIONS[k]:
        raise PreconditionError(f"no invariant function f_{{{k},{i}}}")


def f_eval(k, i, lam) -> float:
    """Evaluate ``f_{k,i}`` (``k <= 4``) at a lambda tuple (or a stack of them)."""
    check_id(k, i)
    if k > 4:
        raise UnsupportedDimensionError("f_eval takes k <= 4; use klain_eval for frames of higher degree")
    lam = np.asarray(lam, dtype=float)
    if i == 0:
        return np.ones(lam.shape[:-1]) if lam.ndim > 1 else 1.0
    if lam.shape[-1] != len(PAIRS[k]):
        raise PreconditionError(f"f_{{{k},{i}}} needs {len(PAIRS[k])} lambda entries, got {lam.shape[-1]}")
    vals = {PAIR_LABELS[pq]: lam[..., a] for a, pq in enumerate(PAIRS[k])}
    total = 0.0
    for coef, expo in POLYNOMIALS[(k, i)]:
        term = coef
        for lab, e in expo.items():
            term = term * vals[lab] ** e
        total = total + term
    return total if lam.ndim > 1 else float(total)


def f_vector(k, lam) -> np.ndarray:
    """All ``f_{k,i}`` at ``lam`` for ``k <= 4``; last axis indexes ``i``."""
    lam = np.asarray(lam, dtype=float)
    return np.stack([np.broadcast_to(f_eval(k, i, lam), lam.shape[:-1]) for i in range(DIMENSIONS[k])], axis=-1)


def eigenfunction_eval(k, j, lam) -> float:
    row = EIGEN_TABLE[reduced_degree(k)][j]
    return f_vector(row.k, lam) @ np.array(row.coeffs, dtype=float)


def _reduced_lambda(F):
    """Lambda tuple of the frame or of its complement, whichever has degree <= 4."""
    F = check_frame(F)
    k = F.shape[1]
    r = reduced_degree(k)
    if r < 2:
        return r, None
    G = F if k <= 4 else complement(F)
    return r, classify(G).lam


def klain_eval(k, i, F) -> float:
    """``f_{k,i}`` at the plane spanned by ``F`` (any degree 0..8)."""
    check_id(k, i)
    F = np.asarray(F, dtype=float)
    if F.shape[-1] != k:
        raise PreconditionError(f"frame has {F.shape[-1]} columns, expected {k}")
    r, lam = _reduced_lambda(F)
    return 1.0 if lam is None else f_eval(r, i, lam)


def dimension_table() -> tuple:
    """Number of invariant functions per degree, counted from the registries."""
    counts = []
    for k in range(9):
        r = reduced_degree(k)
        counts.append(1 + sum(1 for kk, _ in POLYNOMIALS if kk == r))
    return tuple(counts)


def eigen_matrix(k) -> np.ndarray:
    """Rows: eigenfunctions of degree ``k``; columns: coefficients over ``f_{k,i}``."""
    return np.array([row.coeffs for row in EIGEN_TABLE[reduced_degree(k)]], dtype=float)


def exact_eigen_check(k) -> list:
    """Exact check that each eigen-table row is an eigenvector of the Laplacian identities.

    Returns ``(row, residual)`` pairs with ``residual`` a tuple of Fractions
    (all zero when the row is consistent).
    """
    r = reduced_degree(k)
    n = DIMENSIONS[r]
    L = [[Fraction(0)] * n for _ in range(n)]  # L[i] = coefficients of Delta f_{r,i}
    for (kk, i), coeffs in LAPLACIAN_IDENTITIES.items():
        if kk == r:
            L[i] = [Fraction(c) for c in coeffs]
    out = []
    for row in EIGEN_TABLE[r]:
        image = [sum(Fraction(row.coeffs[i]) * L[i][m] for i in range(n)) for m in range(n)]
        res = tuple(image[m] - row.eigenvalue * Fraction(row.coeffs[m]) for m in range(n))
        out.append((row, res))
    return out

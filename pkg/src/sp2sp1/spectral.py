"""Laplacian of invariant functions restricted to the maximal torus of Gr_k(H^2).

A torus point is a vector of ``k`` angles; it stands for the plane
``frame_from_angles(k, theta)``, whose class is ``lambda_pq = cos(t_p - t_q)``.
Angles are treated as orthonormal coordinates and ``Delta = -div grad``.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .errors import PreconditionError, UnsupportedDimensionError
from .hherm import PAIRS
from .invariants import (
    DIMENSIONS,
    EIGEN_TABLE,
    LAPLACIAN_IDENTITIES,
    eigenfunction_eval,
    exact_eigen_check,
    f_eval,
)
from .orbit import frame_from_angles
from .quat import left_matrix, right_matrix

VOLUME_FLOOR = 1e-4
SAMPLE_FLOOR = 1e-3
SINGULAR_FLOOR = 1e-9


def _check_k(k):
    if k not in (2, 3, 4):
        raise UnsupportedDimensionError(f"torus computations need k in {{2, 3, 4}}, got {k}")


@dataclass(frozen=True)
class TorusPoint:
    k: int
    theta: tuple

    def __post_init__(self):
        _check_k(self.k)
        if len(self.theta) != self.k:
            raise PreconditionError("need one angle per column")
        object.__setattr__(self, "theta", tuple(float(t) % (2 * np.pi) for t in self.theta))

    @property
    def lam(self) -> np.ndarray:
        return lambda_on_torus(self.theta)


def lambda_on_torus(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    k = theta.shape[-1]
    return np.stack([np.cos(theta[..., p] - theta[..., q]) for p, q in PAIRS[k]], axis=-1)


@dataclass(frozen=True)
class _Factor:
    coeffs: tuple  # linear form in theta
    kind: str  # "sin" or "cos"
    power: int


def _volume_factors(k):
    _check_k(k)
    out = []

    def form(pos=(), neg=(), scale=None):
        c = np.zeros(k, dtype=int)
        for a in pos:
            c[a] += 1
        for a in neg:
            c[a] -= 1
        return tuple(int(x) for x in c)

    if k == 2:
        return [_Factor(form((0,), (1,)), "sin", 3), _Factor(form((0,), (1,)), "cos", 2)]
    for i, j in itertools.combinations(range(k), 2):
        out.append(_Factor(form((i,), (j,)), "sin", 1))
    if k == 3:
        for m in range(3):
            c = np.zeros(3, dtype=int)
            c[(m + 1) % 3] += 1
            c[(m + 2) % 3] += 1
            c[m] -= 2
            out.append(_Factor(tuple(int(x) for x in c), "sin", 1))
    else:
        for (h, l), (m, n) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
            out.append(_Factor(form((h, l), (m, n)), "sin", 1))
    return out


def orbit_volume(k, theta) -> float:
    """Closed-form volume of the Sp(2)Sp(1)-orbit through a torus point, with ``c_k = 1``."""
    theta = np.asarray(theta, dtype=float)
    vol = 1.0
    for fac in _volume_factors(k):
        x = np.dot(fac.coeffs, theta)
        vol *= abs(np.sin(x) if fac.kind == "sin" else np.cos(x)) ** fac.power
    return float(vol)


def grad_log_volume(k, theta) -> np.ndarray:
    """Analytic gradient of ``log orbit_volume`` in the angle coordinates."""
    theta = np.asarray(theta, dtype=float)
    g = np.zeros(k)
    for fac in _volume_factors(k):
        c = np.array(fac.coeffs, dtype=float)
        x = c @ theta
        d = np.cos(x) / np.sin(x) if fac.kind == "sin" else -np.sin(x) / np.cos(x)
        g += fac.power * d * c
    return g


def lie_algebra_basis() -> list:
    """The 13 generators of sp(2) + sp(1) acting on R^8, normalised to unit Frobenius norm."""
    Z = np.zeros((4, 4))
    Id = np.eye(4)
    mats = [np.block([[Z, -Id], [Id, Z]])]
    for q in np.eye(4)[1:]:
        L, R = left_matrix(q), right_matrix(q)
        mats += [
            np.block([[L, Z], [Z, Z]]),
            np.block([[Z, Z], [Z, L]]),
            np.block([[Z, L], [L, Z]]),
            np.block([[R, Z], [Z, R]]),
        ]
    return [m / np.linalg.norm(m) for m in mats]


def orbit_volume_numeric(k, theta, require_generic=True) -> float:
    """Jacobian of the orbit map at a torus point, from the 13 Lie algebra tangent vectors.

    Each generator ``X`` moves the plane along ``(I - F F^T) X F``; the
    volume element is the product of the leading ``k(8-k) - (k-1)``
    singular values (the orbit dimension at a generic point).  Agrees with
    :func:`orbit_volume` up to a constant depending only on ``k``.

    Raises
    ------
    PreconditionError
        If ``require_generic`` and the closed-form volume is below ``1e-6``.
    """
    _check_k(k)
    if require_generic and orbit_volume(k, theta) <= 1e-6:
        raise PreconditionError("orbit_volume_numeric needs a non-degenerate torus point")
    F = frame_from_angles(k, theta)
    P = np.eye(8) - F @ F.T
    G = np.stack([(P @ X @ F).ravel() for X in lie_algebra_basis()], axis=1)
    s = np.linalg.svd(G, compute_uv=False)
    r = k * (8 - k) - (k - 1)
    return float(np.prod(s[:r]))


def _fd_derivatives(fn, theta, h):
    theta = np.asarray(theta, dtype=float)
    f0 = fn(theta)
    grad = np.zeros(len(theta))
    lap = 0.0
    for a in range(len(theta)):
        e = np.zeros(len(theta))
        e[a] = h
        fp, fm = fn(theta + e), fn(theta - e)
        grad[a] = (fp - fm) / (2 * h)
        lap -= (fp - 2 * f0 + fm) / h**2
    return f0, grad, lap


def torus_laplacian(fn, theta, h=1e-3) -> float:
    """``Delta_T fn`` (flat, sign ``-sum d^2/dtheta^2``) by central differences."""
    return _fd_derivatives(fn, theta, h)[2]


def laplacian_invariant(fn, k, theta, h=1e-3) -> float:
    """``(Delta f)|_T = Delta_T f - <grad f, grad log vol>`` for an invariant ``f``.

    ``fn`` is a function of the angle vector.

    Raises
    ------
    PreconditionError
        At points with orbit volume at most ``1e-4`` or for ``h`` outside ``[1e-4, 1e-2]``.
    """
    theta = np.asarray(theta, dtype=float)
    if not 1e-4 <= h <= 1e-2:
        raise PreconditionError(f"step h={h} outside [1e-4, 1e-2]")
    if orbit_volume(k, theta) <= VOLUME_FLOOR:
        raise PreconditionError("Laplacian formula only holds where the orbit volume is positive")
    _, grad, lap = _fd_derivatives(fn, theta, h)
    return float(lap - grad @ grad_log_volume(k, theta))


def invariant_on_torus(k, i):
    return lambda theta: f_eval(k, i, lambda_on_torus(theta))


def eigenfunction_on_torus(k, j):
    return lambda theta: float(eigenfunction_eval(k, j, lambda_on_torus(theta)))


def sample_torus(k, n_points, seed=None, floor=SAMPLE_FLOOR) -> np.ndarray:
    """Uniform angle vectors with orbit volume above ``floor`` (rejection sampling)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = []
    while len(pts) < n_points:
        th = rng.uniform(0.0, 2 * np.pi, k)
        if orbit_volume(k, th) > floor:
            pts.append(th)
    return np.array(pts)


def identity_names(k) -> list:
    names = [f"Delta(f_{k},0) = 0"]
    for (kk, i), coeffs in LAPLACIAN_IDENTITIES.items():
        if kk == k:
            terms = " + ".join(f"{c}*f_{k},{m}" for m, c in enumerate(coeffs) if c)
            names.append(f"Delta(f_{k},{i}) = {terms}")
    return names


@dataclass
class CheckReport:
    name: str
    max_rel_error: float
    n_points: int
    h: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["identity_name"] = d.pop("name")
        d["pass"] = d.pop("passed")
        return d


def _rel(lhs, rhs):
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def check_laplacian_identities(k, n_points=100, seed=0, h=1e-3, tol=1e-3) -> list:
    """Compare both sides of every Laplacian identity of degree ``k`` at sampled torus points."""
    pts = sample_torus(k, n_points, seed)
    reports = []
    for i, name in enumerate(identity_names(k)):
        coeffs = LAPLACIAN_IDENTITIES.get((k, i), (0,) * DIMENSIONS[k])
        worst = 0.0
        for th in pts:
            lhs = laplacian_invariant(invariant_on_torus(k, i), k, th, h)
            fv = np.array([f_eval(k, m, lambda_on_torus(th)) for m in range(DIMENSIONS[k])])
            worst = max(worst, _rel(lhs, float(np.dot(coeffs, fv))))
        reports.append(CheckReport(name, worst, n_points, h, worst <= tol))
    return reports


def check_eigenfunctions(k, n_points=50, seed=0, h=1e-3, tol=1e-3) -> list:
    """Eigen-table rows: exact algebraic check plus pointwise FD check of ``Delta f = mu f``."""
    reports = []
    exact = exact_eigen_check(k)
    pts = sample_torus(k, n_points, seed) if k >= 2 else np.zeros((0, k))
    for row, residual in exact:
        worst = 0.0
        for th in pts:
            lhs = laplacian_invariant(eigenfunction_on_torus(k, row.j), k, th, h)
            rhs = row.eigenvalue * float(eigenfunction_eval(k, row.j, lambda_on_torus(th)))
            worst = max(worst, _rel(lhs, rhs))
        algebraic = all(x == 0 for x in residual)
        name = f"k={k} row {row.j}: eigenvalue {row.eigenvalue}"
        reports.append(CheckReport(name, worst, len(pts), h, algebraic and worst <= tol))
    return reports


def casimir_eigenvalue(weight, n=8) -> int:
    """``sum_i w_i (w_i - 2 i + n)`` for a dominant weight ``w`` of SO(n)."""
    w = [int(x) for x in weight]
    if any(w[a] < w[a + 1] for a in range(len(w) - 2)) or (len(w) > 1 and w[-2] < abs(w[-1])):
        raise PreconditionError(f"{tuple(w)} is not a dominant weight")
    return sum(x * (x - 2 * i + n) for i, x in enumerate(w, start=1))


def casimir_table() -> list:
    """``(weight, tabulated eigenvalue, Casimir value)`` for the distinct eigen-table weights."""
    seen = {}
    for rows in EIGEN_TABLE.values():
        for row in rows:
            seen.setdefault(row.weight, row.eigenvalue)
    return [(w, mu, casimir_eigenvalue(w)) for w, mu in sorted(seen.items(), key=lambda x: x[1])]

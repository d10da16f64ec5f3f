"""Crofton construction of the Sp(2)Sp(1)-invariant valuations on H^2 = R^8.

A valuation of degree ``1 <= k <= 7`` is ``mu(K) = int g(E) vol(pi_E K) dE``
over the probability Haar measure on Gr_k.  Its Klain function is the cosine
transform of ``g``; choosing ``g`` as an eigenfunction divided by its
multiplier makes the Klain function equal that eigenfunction.  Degrees 0 and 8
are the Euler characteristic and the Lebesgue volume.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cosine import MCResult, cos_angle, eigen_multiplier
from .errors import PreconditionError, StructuralError
from .invariants import DIMENSIONS, eigen_matrix, f_vector, reduced_degree
from .orbit import check_frame, classify_batch, complement, haar_frames

MAX_GENERATORS = 32


# bodies ---------------------------------------------------------------------

@dataclass(frozen=True)
class Zonotope:
    """Minkowski sum of the segments ``[0, g]`` for the given generators."""

    generators: np.ndarray  # (m, 8)

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if g.shape[-1] != 8:
            raise PreconditionError("zonotope generators live in R^8")
        if len(g) > MAX_GENERATORS:
            raise PreconditionError(f"at most {MAX_GENERATORS} generators are supported, got {len(g)}")
        object.__setattr__(self, "generators", g)

    def transformed(self, M) -> "Zonotope":
        return Zonotope(self.generators @ np.asarray(M).T)

    def to_json(self) -> dict:
        return {"type": "zonotope", "generators": self.generators.tolist()}


@dataclass(frozen=True)
class PlanarCube:
    """Cube of side ``side`` spanned by an orthonormal frame (lower-dimensional body)."""

    frame: np.ndarray
    side: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "frame", check_frame(self.frame, tol=1e-8))

    def transformed(self, M) -> "PlanarCube":
        return PlanarCube(np.asarray(M) @ self.frame, self.side)

    def to_json(self) -> dict:
        return {"type": "cube", "frame": self.frame.T.tolist(), "side": self.side}


@dataclass(frozen=True)
class Ball:
    radius: float = 1.0

    def transformed(self, M) -> "Ball":
        return self

    def to_json(self) -> dict:
        return {"type": "ball", "radius": self.radius}


def body_from_json(obj):
    kind = obj.get("type")
    if kind == "zonotope":
        return Zonotope(np.array(obj["generators"], dtype=float))
    if kind == "cube":
        return PlanarCube(np.array(obj["frame"], dtype=float).T, float(obj.get("side", 1.0)))
    if kind == "ball":
        return Ball(float(obj.get("radius", 1.0)))
    raise PreconditionError(f"unknown body type {kind!r}")


def unit_ball_volume(k) -> float:
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def projection_volume(body, E) -> np.ndarray:
    """Exact k-volume of the orthogonal projection of ``body`` onto span(E) (batched over E)."""
    E = np.asarray(E, dtype=float)
    k = E.shape[-1]
    lead = E.shape[:-2]
    if isinstance(body, Ball):
        return np.full(lead, unit_ball_volume(k) * body.radius**k)
    if isinstance(body, PlanarCube):
        if body.frame.shape[1] != k:
            # a cube of lower dimension projects to a null set; higher cannot be handled exactly
            if body.frame.shape[1] < k:
                return np.zeros(lead)
            return projection_volume(Zonotope(body.side * body.frame.T), E)
        return body.side**k * cos_angle(body.frame, E)
    if isinstance(body, Zonotope):
        if k == 0:
            return np.ones(lead)
        P = np.einsum("...ak,ma->...mk", E, body.generators)  # projected generators in E-coordinates
        total = np.zeros(lead)
        for S in itertools.combinations(range(len(body.generators)), k):
            total = total + np.abs(np.linalg.det(P[..., list(S), :]))
        return total
    raise PreconditionError(f"unsupported body {body!r}")


# valuations -----------------------------------------------------------------

@dataclass(frozen=True)
class CroftonValuation:
    """Invariant valuation of degree ``k`` given by eigen-table coefficients.

    ``klain_coeffs[j]`` is the weight of eigen-table row ``j`` in the Klain
    function; the Crofton density is ``sum_j klain_coeffs[j] / c_j * eig_j``.
    """

    k: int
    klain_coeffs: tuple
    label: str = ""
    density_coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r = reduced_degree(self.k)
        if len(self.klain_coeffs) != DIMENSIONS[r]:
            raise PreconditionError(f"degree {self.k} needs {DIMENSIONS[r]} coefficients")
        if 1 <= self.k <= 7:
            mult = [float(eigen_multiplier(self.k, j)) for j in range(DIMENSIONS[r])]
            if any(m == 0 for m in mult):
                raise StructuralError("zero cosine multiplier")
            dens = np.array(self.klain_coeffs, dtype=float) / np.array(mult)
        else:
            dens = np.array(self.klain_coeffs, dtype=float)
        object.__setattr__(self, "density_coeffs", dens)

    def klain_poly(self) -> np.ndarray:
        """Klain function as coefficients over ``f_{k,i}``."""
        return np.asarray(self.klain_coeffs, dtype=float) @ eigen_matrix(self.k)

    def density_poly(self) -> np.ndarray:
        """Crofton density as coefficients over ``f_{k,i}``."""
        return self.density_coeffs @ eigen_matrix(self.k)

    def klain(self, lam) -> float:
        r = reduced_degree(self.k)
        if r < 2:
            return float(self.klain_poly()[0])
        return float(f_vector(r, lam) @ self.klain_poly())


def make_eigen_valuation(k, j) -> CroftonValuation:
    coeffs = [0.0] * DIMENSIONS[reduced_degree(k)]
    coeffs[j] = 1.0
    return CroftonValuation(k, tuple(coeffs), f"eig[{k},{j}]")


def basis_coefficients(k, i) -> np.ndarray:
    """Coefficients ``a`` with ``f_{k,i} = sum_j a_j eig_j``."""
    A = eigen_matrix(k)
    e = np.zeros(len(A))
    e[i] = 1.0
    return np.linalg.solve(A.T, e)


def make_basis_valuation(k, i) -> CroftonValuation:
    """The unique invariant valuation whose Klain function is ``f_{k,i}``."""
    return CroftonValuation(k, tuple(basis_coefficients(k, i)), f"phi[{k},{i}]")


def make_klain_valuation(k, fcoeffs, label="") -> CroftonValuation:
    """Valuation with Klain function ``sum_i fcoeffs[i] f_{k,i}``."""
    A = eigen_matrix(k)
    return CroftonValuation(k, tuple(np.linalg.solve(A.T, np.asarray(fcoeffs, dtype=float))), label)


# Monte Carlo ----------------------------------------------------------------

def reduced_lambda_batch(E) -> np.ndarray | None:
    """Lambda tuples for a stack of k-frames, via the complement when ``k >= 5``."""
    k = E.shape[-1]
    r = reduced_degree(k)
    if r < 2:
        return None
    return classify_batch(E if k <= 4 else complement(E))


@dataclass
class GrassmannSample:
    """Haar-random k-frames with their invariant-function values; shared across valuations."""

    k: int
    frames: np.ndarray
    fvals: np.ndarray  # (N, dim) values of f_{k,i}

    @classmethod
    def draw(cls, k, N, seed=None) -> "GrassmannSample":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        E = haar_frames(rng, N, 8, k)
        lam = reduced_lambda_batch(E)
        r = reduced_degree(k)
        fvals = np.ones((N, 1)) if lam is None else f_vector(r, lam)
        return cls(k, E, fvals)

    def estimate(self, v: CroftonValuation, body) -> MCResult:
        if v.k != self.k:
            raise PreconditionError("valuation and sample degrees differ")
        vals = (self.fvals @ v.density_poly()) * projection_volume(body, self.frames)
        N = len(vals)
        return MCResult(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(N)), N, None)


def euler_characteristic(body) -> float:
    return 1.0


def lebesgue_volume(body) -> float:
    if isinstance(body, Zonotope):
        return float(projection_volume(body, np.eye(8)))
    if isinstance(body, Ball):
        return unit_ball_volume(8) * body.radius**8
    if isinstance(body, PlanarCube):
        return body.side**8 if body.frame.shape[1] == 8 else 0.0
    raise PreconditionError(f"unsupported body {body!r}")


def evaluate(v: CroftonValuation, body, N=10**5, seed=None) -> MCResult:
    """``mu(body)`` by Monte Carlo over Haar-random planes; exact for degrees 0 and 8."""
    if v.k == 0:
        return MCResult(v.klain_coeffs[0] * euler_characteristic(body), 0.0, 0, seed)
    if v.k == 8:
        return MCResult(v.klain_coeffs[0] * lebesgue_volume(body), 0.0, 0, seed)
    if N < 1000:
        raise PreconditionError("evaluate needs N >= 1000")
    res = GrassmannSample.draw(v.k, N, seed).estimate(v, body)
    return res._replace(seed=seed)


def klain_extract(v: CroftonValuation, E, N=10**5, seed=None) -> MCResult:
    """Klain function of ``v`` at span(E): the valuation of the unit cube in E."""
    E = check_frame(E, tol=1e-8)
    if E.shape[1] != v.k:
        raise PreconditionError(f"plane has dimension {E.shape[1]}, valuation degree {v.k}")
    return evaluate(v, PlanarCube(E), N, seed)


def all_basis_valuations() -> dict:
    return {(k, i): make_basis_valuation(k, i) for k in range(9) for i in range(DIMENSIONS[k])}


def basis_census() -> tuple:
    """Number of basis valuations constructed per degree 0..8."""
    vals = all_basis_valuations()
    counts = [0] * 9
    for (k, _), v in vals.items():
        counts[k] += 1
    # Klain functions of one degree must be linearly independent
    for k in range(9):
        K = np.array([vals[(k, i)].klain_poly() for i in range(counts[k])])
        if np.linalg.matrix_rank(K) != counts[k]:
            raise StructuralError(f"degree {k} valuations are linearly dependent")
    return tuple(counts)

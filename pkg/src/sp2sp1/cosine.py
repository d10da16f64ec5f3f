"""Multipliers of the cosine transform on Gr_k(R^n) and Monte Carlo checks.

Haar measure on Gr_k is normalised to a probability measure throughout.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import PoleError, PreconditionError
from .invariants import EIGEN_TABLE
from .orbit import haar_frames

POLE_TOL = 1e-6


def siegel_gamma(z) -> float:
    """``prod_j Gamma(z_j - (j - 1)/2)``.

    Raises
    ------
    PoleError
        If some argument lies within ``POLE_TOL`` of a non-positive integer.
    """
    out = 1.0
    for j, zj in enumerate(np.atleast_1d(np.asarray(z, dtype=float))):
        x = zj - j / 2
        if x <= 0 and abs(x - round(x)) < POLE_TOL:
            raise PoleError(f"Gamma has a pole at {x:g}")
        out *= math.gamma(x)
    return out


@dataclass(frozen=True)
class MultiplierQuery:
    n: int
    k: int
    weight: tuple
    alpha: float | None = None

    def __post_init__(self):
        w = tuple(int(x) for x in self.weight)
        w = w + (0,) * max(0, self.k - len(w))
        if any(w[self.k :]):
            raise PreconditionError(f"weight {self.weight} has depth above k={self.k}")
        object.__setattr__(self, "weight", w[: self.k])
        if not 1 <= self.k <= self.n // 2:
            raise PreconditionError(f"need 1 <= k <= n/2, got n={self.n}, k={self.k}")

    @property
    def rho(self) -> float:
        return self.n / 2


def multiplier_alpha(q: MultiplierQuery) -> float:
    """Scalar by which the alpha-cosine transform acts on the component of highest weight ``q.weight``.

    Raises
    ------
    PoleError
        Near a pole of any Siegel Gamma factor; for ``alpha = rho + 1`` use
        :func:`multiplier_cosine`.
    """
    if q.alpha is None:
        raise PreconditionError("multiplier_alpha needs alpha; use multiplier_cosine for the classical case")
    k, rho, a = q.k, q.rho, float(q.alpha)
    lam = np.array(q.weight, dtype=float)
    ones = np.ones(k)
    sign = (-1.0) ** (int(np.sum(np.abs(q.weight))) // 2)
    try:
        num = (
            siegel_gamma(rho * ones)
            * siegel_gamma((a - rho + k) / 2 * ones)
            * siegel_gamma((-a + rho + lam) / 2)
        )
        den = (
            siegel_gamma(k / 2 * ones)
            * siegel_gamma((-a + rho) / 2 * ones)
            * siegel_gamma((a + rho + lam) / 2)
        )
    except PoleError as exc:
        raise PoleError(f"{exc}; the classical case alpha = rho + 1 is handled by multiplier_cosine") from None
    return sign * num / den


def multiplier_alpha_limit(q: MultiplierQuery, t=1e-3) -> float:
    """``lim_{alpha -> rho + 1}`` of :func:`multiplier_alpha` by symmetric Richardson extrapolation."""

    def sym(s):
        up = multiplier_alpha(MultiplierQuery(q.n, q.k, q.weight, q.rho + 1 + s))
        down = multiplier_alpha(MultiplierQuery(q.n, q.k, q.weight, q.rho + 1 - s))
        return (up + down) / 2

    return (4 * sym(t / 2) - sym(t)) / 3


def check_cosine_weight(n, k, weight) -> tuple:
    """Validate a weight occurring in Val_k: even entries, ``|w_j| <= 2`` for ``j >= 2``."""
    w = tuple(int(x) for x in weight)
    if any(x % 2 for x in w) or w[0] < 0:
        raise PreconditionError(f"weight {weight} must have even entries and w_1 >= 0")
    if any(abs(x) > 2 for x in w[1:]):
        raise PreconditionError(f"weight {weight} has an entry beyond the first exceeding 2 in size")
    if any(x < 0 for x in w[:-1]) or (w[-1] < 0 and len(w) != n // 2):
        raise PreconditionError(f"weight {weight} is not dominant")
    if any(abs(w[j]) > abs(w[j - 1]) for j in range(1, len(w))):
        raise PreconditionError(f"weight {weight} is not dominant")
    if any(w[k:]):
        raise PreconditionError(f"weight {weight} has depth above k={k}")
    return w


class PiRational(NamedTuple):
    """The exact number ``coef * pi**power``."""

    coef: Fraction
    power: int

    def __float__(self):
        return float(self.coef) * math.pi**self.power

    def __str__(self):
        return format_pi_rational(self)


class _HalfGamma(NamedTuple):
    coef: Fraction
    sqrt_pi: int  # power of sqrt(pi)


def half_integer_gamma(x2: int) -> _HalfGamma:
    """Exact ``Gamma(x2 / 2)`` for an integer ``x2`` as a rational times a power of sqrt(pi)."""
    if x2 % 2 == 0:
        m = x2 // 2
        if m <= 0:
            raise PoleError(f"Gamma has a pole at {m}")
        return _HalfGamma(Fraction(math.factorial(m - 1)), 0)
    m = (x2 - 1) // 2  # x = m + 1/2
    if m >= 0:
        return _HalfGamma(Fraction(math.factorial(2 * m), 4**m * math.factorial(m)), 1)
    m = -m
    return _HalfGamma(Fraction((-4) ** m * math.factorial(m), math.factorial(2 * m)), 1)


def multiplier_cosine_exact(n, k, weight) -> PiRational:
    """Cosine-transform multiplier on Gr_k(R^n), exactly.

    ``c = (-1)^(a/2 - 1) b'! (n - b' + 1)! G((k+1)/2) G((n-k+1)/2) G((a-1)/2) / (2 pi n! G((n+1+a)/2))``
    with ``a`` the first weight entry, ``b`` the depth and ``b' = max(1, b)``.
    """
    if not 1 <= k <= n // 2:
        raise PreconditionError(f"need 1 <= k <= n/2, got n={n}, k={k}")
    w = check_cosine_weight(n, k, tuple(weight) + (0,) * max(0, k - len(weight)))
    a = w[0]
    b = sum(1 for x in w if x != 0)
    bp = max(1, b)
    sign = -1 if (a // 2 - 1) % 2 else 1
    coef = Fraction(sign * math.factorial(bp) * math.factorial(n - bp + 1), 2 * math.factorial(n))
    half = 0
    for g, inv in (
        (half_integer_gamma(k + 1), False),
        (half_integer_gamma(n - k + 1), False),
        (half_integer_gamma(a - 1), False),
        (half_integer_gamma(n + 1 + a), True),
    ):
        coef = coef / g.coef if inv else coef * g.coef
        half += -g.sqrt_pi if inv else g.sqrt_pi
    half -= 2  # the 1/pi
    if half % 2:
        raise ArithmeticError("odd power of sqrt(pi); not a pi-rational")
    return PiRational(coef, half // 2)


def multiplier_cosine(n, k, weight) -> float:
    return float(multiplier_cosine_exact(n, k, weight))


def format_pi_rational(x: PiRational) -> str:
    """Render as ``p/q``, ``p/qπ`` (meaning ``p/(q π)``) or ``pπ/q``; ASCII minus."""
    c, e = x.coef, x.power
    sign = "-" if c < 0 else ""
    p, q = abs(c.numerator), c.denominator
    if e == 0:
        return f"{sign}{p}" if q == 1 else f"{sign}{p}/{q}"
    pi = "π" if abs(e) == 1 else f"π^{abs(e)}"
    if e < 0:
        return f"{sign}{p}/{pi}" if q == 1 else f"{sign}{p}/{q}{pi}"
    return f"{sign}{p}{pi}" if q == 1 else f"{sign}{p}{pi}/{q}"


def degree_weight(k, j) -> tuple:
    """Highest weight paired with eigen-table row ``j`` in degree ``k`` (``k <= 4``), cut to ``k`` entries."""
    return EIGEN_TABLE[k][j].weight[:k]


def table_scalars(n=8) -> list:
    """Rows ``(k, weight, PiRational)`` for every eigen-table row with ``2 <= k <= 4``."""
    rows = []
    for k in (2, 3, 4):
        for row in EIGEN_TABLE[k]:
            rows.append((k, row.weight, multiplier_cosine_exact(n, k, row.weight[:k])))
    return rows


def eigen_multiplier(k, j, n=8) -> PiRational:
    """Multiplier for eigen-table row ``j`` of degree ``k`` (1 <= k <= 7, via the complement for k >= 5)."""
    r = min(k, n - k)
    if r < 1:
        raise PreconditionError("the cosine transform needs 1 <= k <= n - 1")
    return multiplier_cosine_exact(n, r, EIGEN_TABLE[r][j].weight[:r])


# Monte Carlo ---------------------------------------------------------------

def cos_angle(E, F) -> np.ndarray:
    """``|det(E^T F)|``, the product of the cosines of the principal angles (batched over F)."""
    E = np.asarray(E, dtype=float)
    F = np.asarray(F, dtype=float)
    if E.shape[-2:] != F.shape[-2:]:
        raise PreconditionError(f"frames of shapes {E.shape} and {F.shape} do not match")
    if E.shape[-1] == 0:
        return np.ones(np.broadcast_shapes(E.shape[:-2], F.shape[:-2]))
    return np.abs(np.linalg.det(np.swapaxes(E, -1, -2) @ F))


class MCResult(NamedTuple):
    estimate: float
    std_error: float
    n: int
    seed: int | None


def chunked_mean(sampler, N, seed=None, chunk=50_000, workers=1) -> MCResult:
    """Mean and standard error of ``sampler(rng, m) -> (m,) values`` over ``N`` draws.

    Chunks get independent child seeds, so the result depends only on
    ``(N, seed, chunk)`` and not on ``workers``.
    """
    if N < 1:
        raise PreconditionError("need at least one sample")
    sizes = [min(chunk, N - s) for s in range(0, N, chunk)]
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(len(sizes))

    def run(args):
        ss, m = args
        v = np.asarray(sampler(np.random.default_rng(ss), m), dtype=float)
        return v.sum(), (v**2).sum()

    jobs = list(zip(children, sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / N
    var = max(s2 / N - mean**2, 0.0) * N / max(N - 1, 1)
    return MCResult(float(mean), float(np.sqrt(var / N)), N, seed)


def mc_cosine_transform(f, E, N=10**6, seed=None, chunk=50_000, workers=1) -> MCResult:
    """Monte Carlo estimate of ``int f(F) |cos(E, F)| dF`` over Haar-random ``F``.

    ``f`` maps a stack of frames ``(m, n, k)`` to ``m`` values; ``None`` means ``f = 1``.
    The standard error is the jackknife error of a sample mean, ``s / sqrt(N)``.
    """
    E = np.asarray(E, dtype=float)
    n, k = E.shape
    if N < 1000:
        raise PreconditionError("mc_cosine_transform needs N >= 1000")

    def sampler(rng, m):
        F = haar_frames(rng, m, n, k)
        c = cos_angle(E, F)
        return c if f is None else np.asarray(f(F), dtype=float) * c

    return chunked_mean(sampler, N, seed, chunk, workers)

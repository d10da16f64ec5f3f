"""Verification suites shared by the command line and the test-suite.

Each suite returns a list of JSON-ready check reports with a ``pass`` field.
"""
from __future__ import annotations

import numpy as np

from .cosine import (
    MultiplierQuery,
    format_pi_rational,
    mc_cosine_transform,
    multiplier_cosine,
    multiplier_alpha_limit,
    table_scalars,
)
from .hherm import mlambda, mlambda_det_closed, moore_det, moore_eigenvalues, rank2_residual
from .invariants import DIMENSIONS, eigenfunction_eval, klain_eval
from .orbit import (
    apply_group,
    canonicalize,
    class_distance,
    classify,
    classify_batch,
    frame_from_angles,
    gram,
    lambda_from_angles,
    random_frame,
    random_group_element,
    reconstruct,
)
from .spectral import (
    casimir_table,
    check_eigenfunctions,
    check_laplacian_identities,
    orbit_volume,
    orbit_volume_numeric,
    sample_torus,
)
from .valuation import (
    GrassmannSample,
    PlanarCube,
    all_basis_valuations,
    basis_census,
    make_klain_valuation,
)


def _report(name, value, threshold, passed=None, **extra) -> dict:
    ok = bool(value <= threshold) if passed is None else bool(passed)
    return {"check": name, "value": float(value), "threshold": float(threshold), "pass": ok, **extra}


def _zreport(name, estimate, std_error, target, sigmas=3.0) -> dict:
    z = abs(estimate - target) / std_error if std_error > 0 else (0.0 if estimate == target else np.inf)
    return {
        "check": name,
        "estimate": float(estimate),
        "std_error": float(std_error),
        "target": float(target),
        "z": float(z),
        "pass": bool(z <= sigmas),
    }


def random_angle_lambdas(k, n, rng) -> np.ndarray:
    return np.array([lambda_from_angles(rng.uniform(0, 2 * np.pi, k)) for _ in range(n)])


def moore_suite(n=1000, seed=0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for k in (2, 3, 4):
        worst = max(
            abs(moore_det(mlambda(lam)) - mlambda_det_closed(lam))
            for lam in rng.uniform(-1, 1, (n, k * (k - 1) // 2))
        )
        out.append(_report(f"moore determinant closed form, k={k}", worst, 1e-9))
    return out


def orbit_suite(n=200, seed=0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    for k in (2, 3, 4):
        worst = 0.0
        for _ in range(n):
            F = random_frame(k, rng)
            a = classify(F).lam
            b = classify(apply_group(F, random_group_element(rng))).lam
            worst = max(worst, class_distance(a, b))
        # degenerate strata: repeated or right-angle torus coordinates, in a rotated basis
        for _ in range(n // 10):
            theta = rng.choice([0.0, np.pi / 2, np.pi / 3], size=k)
            R = np.linalg.qr(rng.normal(size=(k, k)))[0]
            F = frame_from_angles(k, theta) @ R
            a = classify(F).lam
            b = classify(apply_group(F, random_group_element(rng))).lam
            worst = max(worst, class_distance(a, b), class_distance(a, canonicalize(lambda_from_angles(theta))))
        out.append(_report(f"orbit invariance, k={k}", worst, 1e-6))
    for k in (2, 3, 4):
        worst = 0.0
        for lam in random_angle_lambdas(k, n, rng):
            worst = max(worst, class_distance(classify(reconstruct(lam)).lam, canonicalize(lam)))
        out.append(_report(f"round trip, k={k}", worst, 1e-6))
    for k in (3, 4):
        worst = max(float(moore_eigenvalues(gram(random_frame(k, rng)))[2]) for _ in range(5 * n))
        out.append(_report(f"gram third Moore eigenvalue, k={k}", worst, 1e-8))
    for k in (3, 4):
        lam = classify_batch(np.stack([random_frame(k, rng) for _ in range(n)]))
        out.append(_report(f"admissibility of classified tuples, k={k}", max(map(rank2_residual, lam)), 1e-8))
    return out


def laplacian_suite(n_points=100, seed=0, h=1e-3, tol=1e-3) -> list:
    out = []
    for k in (2, 3, 4):
        coarse = check_laplacian_identities(k, n_points, seed, h, tol)
        fine = check_laplacian_identities(k, n_points, seed, h / 2, tol)
        for a, b in zip(coarse, fine):
            rep = a.to_json()
            ratio = a.max_rel_error / b.max_rel_error if b.max_rel_error > 0 else float("inf")
            rep["max_rel_error_half_h"] = b.max_rel_error
            rep["ratio"] = ratio
            # a vanishing identity (Delta f_{k,0} = 0) has no truncation error to shrink
            rep["pass"] = bool(a.passed and b.passed and (a.max_rel_error < 1e-12 or 3.0 <= ratio <= 5.0))
            out.append(rep)
    return out


def eigen_suite(n_points=50, seed=0, h=1e-3, tol=1e-3) -> list:
    return [r.to_json() for k in range(5) for r in check_eigenfunctions(k, n_points, seed, h, tol)]


def casimir_suite() -> list:
    return [
        {"check": f"casimir {w}", "eigenvalue": mu, "casimir": c, "pass": mu == c}
        for w, mu, c in casimir_table()
    ]


def multiplier_rows() -> list:
    rows = []
    for k, w, x in table_scalars():
        rows.append({"k": k, "weight": list(w), "exact": format_pi_rational(x), "value": float(x)})
    return rows


def multiplier_suite() -> list:
    out = []
    for k, w, x in table_scalars():
        lim = multiplier_alpha_limit(MultiplierQuery(8, k, w[:k]))
        err = abs(lim - float(x))
        out.append(_report(f"alpha limit matches closed form, k={k} {w}", err, 1e-8, exact=format_pi_rational(x)))
    return out


def volume_suite(n_points=20, seed=0) -> list:
    out = []
    for k in (2, 3, 4):
        r = np.array([orbit_volume_numeric(k, th) / orbit_volume(k, th) for th in sample_torus(k, n_points, seed)])
        out.append(_report(f"orbit volume ratio spread, k={k}", np.ptp(r) / np.mean(r), 1e-6, ratio=float(np.mean(r))))
    return out


def cosine_suite(samples=10**6, seed=0, workers=4) -> list:
    ss = np.random.SeedSequence(seed).spawn(6)
    out = []
    table = {(k, tuple(w)): x for k, w, x in table_scalars()}
    for idx, k in enumerate((2, 3, 4)):
        E = random_frame(k, np.random.default_rng(ss[idx]))
        target = table[(k, (0, 0, 0, 0))]
        r = mc_cosine_transform(None, E, samples, ss[idx], workers=workers)
        out.append(_zreport(f"cosine transform of 1, k={k}", r.estimate, r.std_error, float(target)))
    weight = next(w for (k, w) in table if k == 2 and any(w))
    theta = np.random.default_rng(ss[3]).uniform(0, 2 * np.pi, 2)
    E = frame_from_angles(2, theta)
    fE = float(eigenfunction_eval(2, 1, lambda_from_angles(theta)))
    r = mc_cosine_transform(
        lambda F: eigenfunction_eval(2, 1, classify_batch(F)), E, samples, ss[4], workers=workers
    )
    out.append(_zreport(f"cosine transform of the k=2 eigenfunction {weight}", r.estimate, r.std_error, float(table[(2, weight)]) * fE))
    r = mc_cosine_transform(None, np.array([[1.0], [0.0]]), max(samples // 10, 1000), ss[5])
    out.append(_zreport("cosine transform of 1 on lines in R^2", r.estimate, r.std_error, multiplier_cosine(2, 1, (0,))))
    return out


def crofton_suite(samples=10**5, n_planes=10, seed=0) -> list:
    """Klain function of every basis valuation at random planes, plus the vanishing check."""
    out = []
    vals = all_basis_valuations()
    ss = np.random.SeedSequence(seed).spawn(10)
    for k in range(9):
        rng = np.random.default_rng(ss[k])
        planes = [random_frame(k, rng) if k else np.zeros((8, 0)) for _ in range(n_planes)]
        sample = GrassmannSample.draw(k, samples, rng) if 1 <= k <= 7 else None
        for i in range(DIMENSIONS[k]):
            v = vals[(k, i)]
            for p, E in enumerate(planes):
                target = klain_eval(k, i, E)
                if sample is None:
                    est, se = v.klain_coeffs[0], 0.0
                else:
                    r = sample.estimate(v, PlanarCube(E))
                    est, se = r.estimate, r.std_error
                out.append(_zreport(f"klain of phi[{k},{i}] at plane {p}", est, se, target))
    # Klain function f_{2,0} - f_{2,1} vanishes on planes inside a quaternionic line
    v = make_klain_valuation(2, (1.0, -1.0), "f20 - f21")
    E = frame_from_angles(2, (0.0, 0.0))
    r = GrassmannSample.draw(2, samples, np.random.default_rng(ss[9])).estimate(v, PlanarCube(E))
    out.append(_zreport("f20 - f21 valuation on a cube in a quaternionic line", r.estimate, r.std_error, 0.0))
    census = basis_census()
    out.append({"check": "basis census", "counts": list(census), "total": sum(census), "pass": census == DIMENSIONS})
    return out


SUITES = ("moore", "orbit", "laplacian", "eigen", "casimir", "multipliers", "volume", "cosine", "crofton")

import numpy as np
import pytest

from sp2sp1.errors import PreconditionError
from sp2sp1.spectral import (
    TorusPoint,
    _fd_derivatives,
    casimir_eigenvalue,
    casimir_table,
    check_eigenfunctions,
    check_laplacian_identities,
    grad_log_volume,
    invariant_on_torus,
    laplacian_invariant,
    orbit_volume,
    orbit_volume_numeric,
    sample_torus,
    torus_laplacian,
)


def test_orbit_volume_examples():
    assert orbit_volume(2, (0.4, 0.4)) == 0
    g = lambda x: np.sin(x) ** 3 * np.cos(x) ** 2
    ratio = orbit_volume(2, (0, np.pi / 4)) / orbit_volume(2, (0, np.pi / 6))
    assert ratio == pytest.approx(g(np.pi / 4) / g(np.pi / 6))
    assert orbit_volume(4, (0.1, 0.7, 0.3, 0.5)) == pytest.approx(0, abs=1e-15)


def test_grad_log_volume_matches_fd(rng):
    for k in (2, 3, 4):
        for th in sample_torus(k, 10, rng):
            fd = _fd_derivatives(lambda t: np.log(orbit_volume(k, t)), th, 1e-5)[1]
            assert np.allclose(grad_log_volume(k, th), fd, rtol=1e-5, atol=1e-5)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_numeric_volume_ratio_constant(k, rng):
    r = [orbit_volume_numeric(k, th) / orbit_volume(k, th) for th in sample_torus(k, 20, rng)]
    assert np.ptp(r) / np.mean(r) <= 1e-6


def test_numeric_volume_degenerate():
    assert orbit_volume_numeric(2, (0, np.pi / 2), require_generic=False) < 1e-8
    with pytest.raises(PreconditionError):
        orbit_volume_numeric(2, (0, np.pi / 2))


def test_worked_example_k2(rng):
    # the three displayed pieces of the k=2 computation, each reproduced separately
    for th in sample_torus(2, 20, rng):
        d = th[1] - th[0]
        c, s = np.cos(d), np.sin(d)
        f0, grad, lap = _fd_derivatives(invariant_on_torus(2, 1), th, 1e-3)
        assert lap == pytest.approx(-4 + 8 * c**2, abs=1e-5)
        assert np.allclose(grad, 2 * c * s * np.array([1, -1]), atol=1e-5)
        glv = (5 * c**2 - 2) / (c * s) * np.array([-1, 1])
        assert np.allclose(grad_log_volume(2, th), glv, rtol=1e-10)
        assert lap - grad @ glv == pytest.approx(28 * f0 - 12, rel=1e-3)


def test_laplacian_examples(rng):
    th = sample_torus(4, 1, rng)[0]
    assert laplacian_invariant(lambda t: 1.0, 4, th) == pytest.approx(0, abs=1e-6)
    th2 = sample_torus(2, 1, rng)[0]
    f = invariant_on_torus(2, 1)
    assert laplacian_invariant(f, 2, th2) == pytest.approx(28 * f(th2) - 12, rel=1e-3)


def test_laplacian_preconditions():
    with pytest.raises(PreconditionError):
        laplacian_invariant(lambda t: 1.0, 2, (0.0, 0.0))
    with pytest.raises(PreconditionError):
        laplacian_invariant(lambda t: 1.0, 2, (0.0, 0.7), h=0.1)


def test_torus_laplacian_of_quadratic():
    assert torus_laplacian(lambda t: t @ t, np.array([0.3, 0.1])) == pytest.approx(-4)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_identities(k):
    reports = check_laplacian_identities(k, n_points=30, seed=1, h=1e-3, tol=1e-3)
    assert len(reports) == {2: 2, 3: 3, 4: 5}[k]
    assert all(r.passed for r in reports), [(r.name, r.max_rel_error) for r in reports]


def test_fd_second_order(rng):
    pts = sample_torus(4, 10, rng)
    f = invariant_on_torus(4, 4)
    from sp2sp1.invariants import f_eval
    from sp2sp1.spectral import lambda_on_torus

    def err(h):
        out = []
        for th in pts:
            fv = [f_eval(4, m, lambda_on_torus(th)) for m in range(5)]
            rhs = 96 * fv[4] + 64 * fv[1] - 92 * fv[3] - 152 * fv[2] + 24
            out.append(abs(laplacian_invariant(f, 4, th, h) - rhs))
        return max(out)

    assert 3.0 <= err(2e-3) / err(1e-3) <= 5.0


@pytest.mark.parametrize("k", [0, 2, 4])
def test_eigenfunctions(k):
    reports = check_eigenfunctions(k, n_points=10, seed=2)
    assert all(r.passed for r in reports)


def test_casimir():
    assert casimir_eigenvalue((2, 2, 0, 0)) == 28
    assert casimir_eigenvalue((6, 2, 2, 2)) == 96
    assert casimir_eigenvalue((0, 0, 0, 0)) == 0
    assert casimir_eigenvalue((6, 2, 2, -2)) == 96
    for _, mu, c in casimir_table():
        assert mu == c
    with pytest.raises(PreconditionError):
        casimir_eigenvalue((0, 2, 0, 0))


def test_torus_point():
    p = TorusPoint(2, (7.0, -1.0))
    assert 0 <= min(p.theta) and max(p.theta) < 2 * np.pi
    assert p.lam == pytest.approx([np.cos(8.0)])
    with pytest.raises(Exception):
        TorusPoint(5, (0,) * 5)

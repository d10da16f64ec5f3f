import json

import numpy as np
import pytest

from sp2sp1.errors import PreconditionError
from sp2sp1.invariants import klain_eval
from sp2sp1.orbit import apply_group, frame_from_angles, random_frame, random_group_element
from sp2sp1.valuation import (
    Ball,
    GrassmannSample,
    PlanarCube,
    Zonotope,
    basis_census,
    basis_coefficients,
    body_from_json,
    evaluate,
    klain_extract,
    make_basis_valuation,
    make_eigen_valuation,
    make_klain_valuation,
    projection_volume,
    unit_ball_volume,
)


def group_matrix(el):
    return apply_group(np.eye(8), el)


def test_projection_volume_examples(rng):
    E = random_frame(3, rng)
    assert projection_volume(PlanarCube(E), E) == pytest.approx(1)
    F = random_frame(3, rng)
    from sp2sp1.cosine import cos_angle

    assert projection_volume(PlanarCube(F), E) == pytest.approx(cos_angle(F, E))
    assert projection_volume(Zonotope(E.T), E) == pytest.approx(1)
    assert projection_volume(Ball(2.0), E) == pytest.approx(4 / 3 * np.pi * 8)
    assert unit_ball_volume(2) == pytest.approx(np.pi)


def test_zonotope_volume_oracle(rng):
    # brute-force oracle: projected zonotope in the plane is a polygon; area via convex hull
    from scipy.spatial import ConvexHull

    G = rng.standard_normal((5, 8))
    E = random_frame(2, rng)
    P = G @ E
    corners = np.array([np.array(s) @ P for s in np.ndindex(*(2,) * 5)])
    assert projection_volume(Zonotope(G), E) == pytest.approx(ConvexHull(corners).volume)


def test_zonotope_limits():
    with pytest.raises(PreconditionError):
        Zonotope(np.ones((33, 8)))
    with pytest.raises(PreconditionError):
        Zonotope(np.ones((3, 7)))


def test_body_json(rng):
    for body in (Zonotope(rng.standard_normal((3, 8))), PlanarCube(random_frame(2, rng), 1.5), Ball(0.7)):
        back = body_from_json(json.loads(json.dumps(body.to_json())))
        E = random_frame(2, rng)
        assert projection_volume(back, E) == pytest.approx(projection_volume(body, E))


def test_eigen_densities():
    assert make_eigen_valuation(2, 0).density_poly() == pytest.approx([7, 0])
    assert make_eigen_valuation(2, 1).density_poly() == pytest.approx(252 * np.array([-3, 7]))
    d = make_eigen_valuation(4, 4).density_poly()
    assert d == pytest.approx(70070 * np.array([-210, 226, -194, -161, 63]))


def test_basis_coefficients():
    assert basis_coefficients(2, 0) == pytest.approx([1, 0])
    assert basis_coefficients(2, 1) == pytest.approx([3 / 7, 1 / 7])
    from sp2sp1.invariants import eigen_matrix

    for k in (3, 4, 5):
        A = eigen_matrix(k)
        for i in range(len(A)):
            e = np.zeros(len(A))
            e[i] = 1
            assert np.max(np.abs(basis_coefficients(k, i) @ A - e)) < 1e-12


def test_evaluate_examples(rng):
    E0 = random_frame(2, rng)
    r = evaluate(make_basis_valuation(2, 0), PlanarCube(E0), 100_000, 1)
    assert abs(r.estimate - 1) <= 3 * r.std_error
    v = make_klain_valuation(2, (1, -1))
    r = evaluate(v, PlanarCube(frame_from_angles(2, (0, 0))), 100_000, 2)
    assert abs(r.estimate) <= 3 * r.std_error
    r = evaluate(make_basis_valuation(2, 1), PlanarCube(frame_from_angles(2, (0, np.pi / 3))), 100_000, 3)
    assert abs(r.estimate - 0.25) <= 3 * r.std_error


def test_klain_extract_examples(rng):
    r = klain_extract(make_eigen_valuation(2, 0), random_frame(2, rng), 50_000, 4)
    assert abs(r.estimate - 1) <= 3 * r.std_error
    r = klain_extract(make_eigen_valuation(2, 1), frame_from_angles(2, (0, 0)), 100_000, 5)
    assert abs(r.estimate - 4) <= 3 * r.std_error
    r = klain_extract(make_basis_valuation(4, 2), frame_from_angles(4, (0, 0, 0, 0)), 100_000, 6)
    assert abs(r.estimate - 3) <= 3 * r.std_error
    with pytest.raises(PreconditionError):
        klain_extract(make_basis_valuation(4, 2), random_frame(3, rng), 1000, 0)


def test_extremal_degrees(rng):
    Z = Zonotope(rng.standard_normal((9, 8)))
    assert evaluate(make_basis_valuation(0, 0), Z).estimate == 1
    vol = evaluate(make_basis_valuation(8, 0), Z).estimate
    assert vol == pytest.approx(projection_volume(Z, np.eye(8)))
    assert evaluate(make_basis_valuation(8, 0), Zonotope(np.eye(8))).estimate == pytest.approx(1)


def test_homogeneity_and_evenness(rng):
    Z = Zonotope(rng.standard_normal((5, 8)))
    for k in (2, 3):
        v = make_basis_valuation(k, 1)
        a = evaluate(v, Z, 5000, 7).estimate
        b = evaluate(v, Zonotope(2.5 * Z.generators), 5000, 7).estimate
        c = evaluate(v, Zonotope(-Z.generators), 5000, 7).estimate
        assert b == pytest.approx(2.5**k * a, rel=1e-12)
        assert c == a


def test_invariance(rng):
    Z = Zonotope(rng.standard_normal((4, 8)))
    M = group_matrix(random_group_element(rng))
    assert np.allclose(M.T @ M, np.eye(8))
    v = make_basis_valuation(3, 2)
    a = evaluate(v, Z, 60_000, 8)
    b = evaluate(v, Z.transformed(M), 60_000, 9)
    assert abs(a.estimate - b.estimate) <= 3 * np.hypot(a.std_error, b.std_error)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 7])
def test_klain_consistency(k, rng):
    sample = GrassmannSample.draw(k, 40_000, 100 + k)
    E = random_frame(k, rng)
    for i in range(len(sample.fvals[0])):
        r = sample.estimate(make_basis_valuation(k, i), PlanarCube(E))
        assert abs(r.estimate - klain_eval(k, i, E)) <= 3 * r.std_error


def test_census():
    assert basis_census() == (1, 1, 2, 3, 5, 3, 2, 1, 1)
    assert sum(basis_census()) == 19

import itertools

import numpy as np
import pytest

from sp2sp1.errors import PreconditionError, UnsupportedDimensionError
from sp2sp1.hherm import PAIRS
from sp2sp1.invariants import (
    DIMENSIONS,
    EIGEN_TABLE,
    dimension_table,
    eigenfunction_eval,
    exact_eigen_check,
    f_eval,
    klain_eval,
)
from sp2sp1.orbit import (
    apply_group,
    classify,
    complement,
    frame_from_angles,
    group_orbit,
    random_frame,
    random_group_element,
    reconstruct,
)


# second transcription, written independently as plain expressions ------------

def _named(lam):
    k = {1: 2, 3: 3, 6: 4}[len(lam)]
    return {f"{p + 1}{q + 1}": x for (p, q), x in zip(PAIRS[k], lam)}


def second_reader(k, i, lam):
    L = _named(lam)
    s = {key: v * v for key, v in L.items()}
    if i == 0:
        return 1.0
    if (k, i) == (2, 1):
        return s["12"]
    if (k, i) == (3, 1):
        return s["12"] + s["13"] + s["23"]
    if (k, i) == (3, 2):
        return s["12"] * s["23"] + s["13"] * s["23"] + s["12"] * s["13"]
    if (k, i) == (4, 1):
        return sum(s.values())
    if (k, i) == (4, 2):
        return s["12"] * s["34"] + s["13"] * s["24"] + s["14"] * s["23"]
    if (k, i) == (4, 3):
        # every product of two squares sharing an index
        tot = 0.0
        for a, b in itertools.combinations(s, 2):
            if set(a) & set(b):
                tot += s[a] * s[b]
        return tot
    if (k, i) == (4, 4):
        l12, l13, l14, l23, l24, l34 = (L[x] for x in ("12", "13", "14", "23", "24", "34"))
        cross = 2 * l12 * l13 * l24 * l34 * (s["23"] + s["14"])
        cross += 2 * l12 * l23 * l14 * l34 * (s["13"] + s["24"])
        cross += 2 * l24 * l23 * l14 * l13 * (s["12"] + s["34"])
        # triangles: the three squares on pairs through one vertex
        tri = sum(np.prod([s[x] for x in s if str(v) in x]) for v in range(1, 5))
        return cross + 3 * tri
    raise KeyError((k, i))


@pytest.mark.parametrize("k,i", [(k, i) for k in (2, 3, 4) for i in range(DIMENSIONS[k])])
def test_transcription(k, i):
    rng = np.random.default_rng(100 * k + i)
    for lam in rng.uniform(-1, 1, (5, k * (k - 1) // 2)):
        assert f_eval(k, i, lam) == pytest.approx(second_reader(k, i, lam), rel=1e-13, abs=1e-14)


def test_f_examples():
    assert f_eval(2, 1, [0.5]) == 0.25
    assert f_eval(4, 2, np.ones(6)) == 3
    assert f_eval(4, 4, np.ones(6)) == 24
    with pytest.raises(PreconditionError):
        f_eval(4, 1, [0.5])
    with pytest.raises(PreconditionError):
        f_eval(2, 2, [0.5])
    with pytest.raises(UnsupportedDimensionError):
        f_eval(5, 1, np.ones(6))


def test_f_group_invariant(rng):
    for k in (2, 3, 4):
        for lam in rng.uniform(-1, 1, (20, k * (k - 1) // 2)):
            for i in range(DIMENSIONS[k]):
                vals = np.array([f_eval(k, i, im) for im in group_orbit(lam)])
                assert np.allclose(vals, f_eval(k, i, lam), rtol=1e-14, atol=1e-15)


def test_f44_even_weight():
    # under lambda_pq -> eps_p eps_q lambda_pq every monomial of f_{4,4} is unchanged
    from sp2sp1.invariants import POLYNOMIALS

    for _, expo in POLYNOMIALS[(4, 4)]:
        for v in range(1, 5):
            assert sum(e for lab, e in expo.items() if str(v) in lab) % 2 == 0


def test_eigenfunction_examples():
    assert eigenfunction_eval(2, 1, [1.0]) == 4
    assert eigenfunction_eval(2, 1, [np.sqrt(3 / 7)]) == pytest.approx(0, abs=1e-14)
    assert eigenfunction_eval(4, 2, np.ones(6)) == 12


def test_eigen_table_exact():
    for k in range(5):
        for row, residual in exact_eigen_check(k):
            assert all(x == 0 for x in residual), (k, row)
    assert [r.eigenvalue for r in EIGEN_TABLE[4]] == [0, 28, 40, 60, 96]


def test_klain_examples(rng):
    assert klain_eval(1, 0, random_frame(1, rng)) == 1
    F = frame_from_angles(2, (0, 0))
    assert klain_eval(2, 0, F) - klain_eval(2, 1, F) == pytest.approx(0)
    real2 = np.zeros((8, 2))
    real2[[0, 4], [0, 1]] = 1
    assert klain_eval(6, 1, complement(real2)) == pytest.approx(0, abs=1e-15)
    assert klain_eval(0, 0, np.zeros((8, 0))) == 1
    assert klain_eval(8, 0, np.eye(8)) == 1


def test_klain_invariance(rng):
    for k in range(1, 8):
        F = random_frame(k, rng)
        G = apply_group(F, random_group_element(rng))
        for i in range(DIMENSIONS[k]):
            assert klain_eval(k, i, F) == pytest.approx(klain_eval(k, i, G), abs=1e-6)


def test_klain_high_degree_uses_complement(rng):
    F = random_frame(5, rng)
    lam = classify(complement(F)).lam
    for i in range(3):
        assert klain_eval(5, i, F) == pytest.approx(f_eval(3, i, lam))


def test_complement(rng):
    F = np.eye(8)[:, :4]
    C = complement(F)
    assert np.allclose(C @ C.T, np.diag([0, 0, 0, 0, 1, 1, 1, 1]), atol=1e-12)
    for k in range(1, 8):
        F = random_frame(k, rng)
        C = complement(F)
        assert np.allclose(C.T @ C, np.eye(8 - k)) and np.allclose(F.T @ C, 0, atol=1e-12)
        CC = complement(C)
        assert np.max(np.abs(CC @ CC.T - F @ F.T)) < 1e-10
    line = reconstruct(np.ones(6))
    assert classify(complement(line)).lam == pytest.approx(np.ones(6))


def test_dimensions():
    assert dimension_table() == (1, 1, 2, 3, 5, 3, 2, 1, 1)
    assert sum(dimension_table()) == 19

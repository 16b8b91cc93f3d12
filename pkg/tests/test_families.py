from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from gztower.families import (
    FamilySpec,
    build_family,
    char_minor,
    independence_rank,
    random_rational_matrix,
    verify_commutes,
    verify_trivial_numeric,
)
from gztower.poisson import (
    PoissonPoly,
    evaluate,
    evaluate_at,
    random_canonical_point,
)

P = PoissonPoly


# ---------------------------------------------------------------------------
# characteristic minors
# ---------------------------------------------------------------------------

def test_char_minor_1x1():
    assert char_minor(2, 1) == P.lam(2) - P.u(2, 1, 1)


def test_char_minor_2x2_expansion():
    lam = P.lam(2)
    expected = ((lam - P.u(2, 1, 1)) * (lam - P.u(2, 2, 2))
                - P.u(2, 1, 2) * P.u(2, 2, 1))
    assert char_minor(2, 2) == expected


def test_corner_minor_1x1():
    # rows {2} x cols {1} of (lam - u): lam does not appear
    assert char_minor(2, 1, corner=True) == -P.u(2, 2, 1)


def test_char_minor_right_side_uses_ut():
    assert char_minor(2, 1, side="right") == P.lam(2) - P.ut(2, 1, 1)


def test_char_minor_evaluation_matches_numpy_det():
    rng = np.random.default_rng(0)
    for n, k in [(3, 1), (3, 2), (3, 3), (4, 3)]:
        u = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        lam = complex(rng.standard_normal(), rng.standard_normal())
        sub = lam * np.eye(k) - u[:k, :k]
        direct = np.linalg.det(sub)
        sym = evaluate_at(char_minor(n, k), u=u, lam=lam)
        assert abs(sym - direct) < 1e-10


def test_full_char_poly_conjugation_invariant():
    rng = np.random.default_rng(1)
    n = 3
    u = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    v = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    poly = char_minor(n, n)
    lam = 0.7 - 0.3j
    before = evaluate_at(poly, u=u, lam=lam)
    after = evaluate_at(poly, u=v @ u @ np.linalg.inv(v), lam=lam)
    assert abs(before - after) < 1e-9


# ---------------------------------------------------------------------------
# family construction
# ---------------------------------------------------------------------------

def test_family_spec_validation():
    with pytest.raises(ValueError):
        FamilySpec("nope", 2)
    with pytest.raises(ValueError):
        FamilySpec("mf", 2)  # missing shift
    with pytest.raises(ValueError):
        FamilySpec("gz-principal", 2, shift=((Fraction(1),),))


def test_gz_principal_n1():
    fam = build_family(FamilySpec("gz-principal", 1, "both"))
    assert [p for _, p in fam.generators] == [-P.u(1, 1, 1)]


def test_gz_principal_n2_members():
    fam = build_family(FamilySpec("gz-principal", 2, "both"))
    assert len(fam.generators) == 4
    members = {label: poly for label, poly in fam.generators}
    assert members["L[k=1] lam^0"] == -P.u(2, 1, 1)
    assert members["R[k=1] lam^0"] == -P.ut(2, 1, 1)
    assert members["I[k=2] lam^1"] == -(P.u(2, 1, 1) + P.u(2, 2, 2))
    assert members["I[k=2] lam^0"] == (P.u(2, 1, 1) * P.u(2, 2, 2)
                                       - P.u(2, 1, 2) * P.u(2, 2, 1))


def test_generator_count_is_n_squared():
    for n in (1, 2, 3, 4):
        fam = build_family(FamilySpec("gz-principal", n, "both"))
        assert len(fam.generators) == n * n


def test_mf_diagonal_example_against_numeric_det():
    spec = FamilySpec("mf", 2, side="left",
                      shift=((Fraction(1), Fraction(0)),
                             (Fraction(0), Fraction(0))))
    fam = build_family(spec)
    # u-dependent coefficients of det(u - mu A - lam): the lam coefficient is
    # -(u11+u22) (the +mu part is a separate constant-coefficient monomial),
    # the mu coefficient is -u22, the constant term is det u
    members = {label: poly for label, poly in fam.generators}
    assert members["MF lam^1"] == -(P.u(2, 1, 1) + P.u(2, 2, 2))
    assert members["MF lam^0 mu^1"] == -P.u(2, 2, 2)
    assert members["MF lam^0"] == (P.u(2, 1, 1) * P.u(2, 2, 2)
                                   - P.u(2, 1, 2) * P.u(2, 2, 1))
    # reassembling with the dropped constant coefficients reproduces the
    # numeric determinant
    rng = np.random.default_rng(2)
    u = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lam, mu = 0.3 + 0.1j, -0.8 + 0.4j
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    direct = np.linalg.det(u - mu * a - lam * np.eye(2))
    total = lam ** 2 + lam * mu  # dropped: constant coefficients of lam^2, lam*mu
    total += evaluate_at(members["MF lam^1"], u=u) * lam
    total += evaluate_at(members["MF lam^0 mu^1"], u=u) * mu
    total += evaluate_at(members["MF lam^0"], u=u)
    assert abs(total - direct) < 1e-12


# ---------------------------------------------------------------------------
# commutativity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["gz-principal", "gz-corner"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_gz_families_commute_exactly(kind, n):
    rep = verify_commutes(build_family(FamilySpec(kind, n, "both")))
    assert rep.status == "ok"
    assert rep.max_nonzero_terms == 0
    if kind == "gz-principal":
        assert rep.pairs_checked == (n * n) * (n * n - 1) // 2


def test_mf_family_commutes_exactly_n4():
    rng = np.random.default_rng(13)
    spec = FamilySpec("mf", 4, side="left",
                      shift=random_rational_matrix(4, rng))
    assert verify_commutes(build_family(spec)).status == "ok"


def test_mf_family_commutes_exactly_n2():
    rng = np.random.default_rng(3)
    spec = FamilySpec("mf", 2, side="left",
                      shift=random_rational_matrix(2, rng))
    assert verify_commutes(build_family(spec)).status == "ok"


@given(st.integers(0, 10_000))
@settings(max_examples=10)
def test_mf_family_commutes_for_random_shifts(seed):
    rng = np.random.default_rng(seed)
    spec = FamilySpec("mf", 2, side="left",
                      shift=random_rational_matrix(2, rng))
    assert verify_commutes(build_family(spec)).status == "ok"


def test_verify_commutes_rejects_trivial_family():
    with pytest.raises(ValueError):
        verify_commutes(build_family(FamilySpec("trivial", 2, "left")))


def test_commutation_report_shape():
    rep = verify_commutes(build_family(FamilySpec("gz-principal", 2, "both")))
    data = rep.to_json()
    assert data["status"] == "ok"
    assert data["witness"] is None
    assert data["family"]["kind"] == "gz-principal"


# ---------------------------------------------------------------------------
# the trivial family and independence
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_trivial_family_numeric(n):
    rep = verify_trivial_numeric(n, pt_count=5, seed=0)
    assert rep.status == "ok"
    assert rep.max_abs_bracket < 1e-5


def test_trivial_family_numeric_n3():
    rep = verify_trivial_numeric(3, pt_count=3, seed=1)
    assert rep.status == "ok"


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 4), (3, 9)])
def test_independence_rank(n, expected):
    rng = np.random.default_rng(4)
    fam = build_family(FamilySpec("gz-principal", n, "both"))
    pt = random_canonical_point(n, rng)
    assert independence_rank(fam, pt) == expected


def test_independence_rank_matches_numeric_jacobian():
    # cross-check the analytic chain rule against plain finite differences
    rng = np.random.default_rng(5)
    n = 2
    fam = build_family(FamilySpec("gz-principal", n, "both"))
    pt = random_canonical_point(n, rng)
    from gztower.families import _symbol_jacobian
    for _, poly in fam.generators:
        analytic = _symbol_jacobian(poly, pt)
        numeric = []
        for which in ("g", "p"):
            for i in range(n):
                for j in range(n):
                    h = 1e-6
                    vals = []
                    for s in (1.0, -1.0):
                        gm, pm = pt.g.copy(), pt.p.copy()
                        (gm if which == "g" else pm)[i, j] += s * h
                        from gztower.poisson import CanonicalPoint
                        vals.append(evaluate(poly, CanonicalPoint(gm, pm, validate=False)))
                    numeric.append((vals[0] - vals[1]) / (2 * h))
        assert np.max(np.abs(analytic - np.array(numeric))) < 1e-6

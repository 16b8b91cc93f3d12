from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from gztower.orbits import sample_orbit
from gztower.polytools import principal_charpoly
from gztower.tower import (
    PathThroughPunctureError,
    RegularityLostError,
    action_angle_bracket_table,
    angle_variables,
    build_tower,
    default_base_point,
    differentials,
    hamiltonian_flow,
    linearization_check,
    path_log_increments,
    trajectory_records,
)


# ---------------------------------------------------------------------------
# differentials and residues
# ---------------------------------------------------------------------------

def test_residue_example_two_punctures():
    d = differentials([0.0, 1.0])
    assert d.residue_column(0) == [-1.0, 1.0]


def test_residue_sums_exact():
    d = differentials([Fraction(0), Fraction(1), Fraction(3, 2)])
    assert d.residue_sums() == [0, 0, 1]


def test_single_puncture():
    d = differentials([0.5 + 0.5j])
    assert d.residue_sums() == [1.0]


def test_coincident_punctures_rejected():
    with pytest.raises(ValueError):
        differentials([Fraction(1), Fraction(1)])


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5, unique=True))
@settings(max_examples=30)
def test_residue_sum_rule_rational(values):
    punctures = [Fraction(v, 7) for v in values]
    sums = differentials(punctures).residue_sums()
    n = len(punctures)
    assert sums == [Fraction(int(k == n - 1)) for k in range(n)]


def test_residue_sum_rule_float():
    rng = np.random.default_rng(0)
    for _ in range(10):
        pts = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        sums = differentials(list(pts)).residue_sums()
        assert max(abs(s - (1.0 if k == 3 else 0.0)) for k, s in enumerate(sums)) < 1e-12


# ---------------------------------------------------------------------------
# branch-tracked elementary integrals
# ---------------------------------------------------------------------------

def test_path_log_against_quadrature():
    # independent oracle: trapezoidal quadrature of lam^m / A(lam) along the
    # same deflected polyline
    punctures = [0.2 + 0.1j, -0.5 - 0.4j, 1.1 + 0.9j]
    diffs = differentials(punctures)
    a, b = 3.0 + 0j, -2.0 + 2.5j
    dlogs = path_log_increments(a, b, punctures)
    for m in range(3):
        closed = sum(r * d for r, d in zip(diffs.residue_column(m), dlogs))
        ts = np.linspace(0.0, 1.0, 200001)
        zs = a + (b - a) * ts

        def integrand(z):
            denom = np.prod([z - g for g in punctures], axis=0)
            return z ** m / denom

        vals = integrand(zs)
        quad = np.sum((vals[1:] + vals[:-1]) * np.diff(zs)) / 2.0
        assert abs(closed - quad) < 1e-7


def test_path_deflects_around_puncture():
    # puncture sitting exactly on the straight segment
    punctures = [0.0 + 0j]
    dlogs = path_log_increments(-1.0 + 0j, 1.0 + 0j, punctures)
    # continuation around the deflection gives Delta log = +-i*pi, finite
    assert abs(abs(dlogs[0].imag) - np.pi) < 1e-9
    assert abs(dlogs[0].real) < 1e-9


def test_endpoint_at_puncture_rejected():
    with pytest.raises(PathThroughPunctureError):
        path_log_increments(2.0, 1.0 + 0j, [1.0 + 0j])


# ---------------------------------------------------------------------------
# angle variables
# ---------------------------------------------------------------------------

def test_level_one_literal_angle_is_zero():
    res = angle_variables([1.5 + 0.5j], [], [], lam0=5.0,
                          leading_coeff=2.0 + 1.0j)
    assert res.tau_literal == [0j]
    assert res.tau[0] == pytest.approx(np.log(2.0 + 1.0j))


def test_angles_vanish_when_divisors_coincide():
    # e-points equal to the previous-level roots: the two sums cancel termwise
    gamma = [0.0 + 0j, 2.0 + 0j]
    shared = [1.0 + 0.3j]
    res = angle_variables(gamma, shared, shared, lam0=6.0, augment=False)
    assert max(abs(t) for t in res.tau_literal) < 1e-14


def test_angle_base_point_independence():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    base = default_base_point(pt)
    ref = build_tower(pt, lam0=base)
    for off in (0.25, 1.0 + 0.5j, -0.75j):
        alt = build_tower(pt, lam0=base + off)
        for lv_r, lv_a in zip(ref.levels[:-1], alt.levels[:-1]):
            assert max(abs(x - y) for x, y in zip(lv_r.tau, lv_a.tau)) < 1e-9


def test_abel_coordinate_derivative_consistency():
    # moving one e-point changes tau[n,k] by integrand * delta, so exp(tau)
    # transforms multiplicatively with the predicted factor
    gamma = [0.5 + 0j, -1.0 + 0.5j, 2.0 - 0.5j]
    e_pts = [1.3 + 0.2j, -0.2 - 0.6j]
    prev = [0.9 + 0.1j, -0.8 + 0.2j]
    lam0 = 6.0 + 0j
    delta = 1e-6
    n = len(gamma)
    for k in (1, n):
        res0 = angle_variables(gamma, e_pts, prev, lam0, augment=False)
        moved = [e_pts[0] + delta, e_pts[1]]
        res1 = angle_variables(gamma, moved, prev, lam0, augment=False)
        a_at = np.prod([e_pts[0] - g for g in gamma])
        predicted = delta * e_pts[0] ** (n - k) / a_at
        observed = res1.tau_literal[k - 1] - res0.tau_literal[k - 1]
        assert abs(observed - predicted) < 1e-6 * max(1.0, abs(predicted))
        ratio = np.exp(res1.tau_literal[k - 1]) / np.exp(res0.tau_literal[k - 1])
        assert abs(ratio - np.exp(predicted)) < 1e-6


def test_augmentation_requires_leading_coefficient():
    with pytest.raises(ValueError):
        angle_variables([1.0 + 0j], [], [], lam0=4.0, augment=True)


# ---------------------------------------------------------------------------
# tower assembly
# ---------------------------------------------------------------------------

def test_tower_n1_trivial():
    pt = sample_orbit([0.7 + 0.2j], seed=0)
    tower = build_tower(pt)
    assert len(tower.levels) == 1
    lv = tower.levels[0]
    assert len(lv.e) == 0 and lv.tau == [] and lv.leading_coeff is None
    assert tower.zero_section == {}


def test_tower_n3_structure():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    tower = build_tower(pt)
    assert [lv.n for lv in tower.levels] == [1, 2, 3]
    for lv in tower.levels:
        assert len(lv.gamma) == lv.n
        assert len(lv.h) == lv.n
        # monic actions are the elementary symmetric functions of the roots
        assert np.max(np.abs(np.poly(lv.gamma)[1:] - lv.h)) < 1e-10
        if lv.n < pt.n:
            assert len(lv.e) == lv.n - 1
            assert len(lv.tau) == lv.n
            assert all(np.isfinite([z.real, z.imag]).all() and abs(z) > 0
                       for z in lv.jacobian)
        else:
            assert len(lv.e) == 0 and lv.tau == []
    assert sorted(tower.zero_section) == [2, 3]
    for n, section in tower.zero_section.items():
        assert len(section) == n
        assert all(np.isfinite([z.real, z.imag]).all() for z in section)


def test_tower_json():
    pt = sample_orbit([1.0, -1.0], seed=4)
    data = build_tower(pt).to_json()
    assert set(data) == {"levels", "zero_section", "minor_convention", "base_point"}
    assert data["minor_convention"] == "rows+"


# ---------------------------------------------------------------------------
# flows
# ---------------------------------------------------------------------------

def test_flow_conserves_spectrum_and_actions():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    flow = hamiltonian_flow(pt, (2, 1), t_final=1.0, steps=1000, sample_every=100)
    s0 = np.sort_complex(np.linalg.eigvals(flow.points[0]))
    for u in flow.points:
        assert np.max(np.abs(np.sort_complex(np.linalg.eigvals(u)) - s0)) < 1e-8
        for n in (1, 2, 3):
            drift = np.abs(principal_charpoly(u, n)
                           - principal_charpoly(pt.u, n))
            assert np.max(drift) < 1e-8


def test_casimir_flow_is_stationary():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    flow = hamiltonian_flow(pt, (3, 2), t_final=0.5, steps=100, sample_every=100)
    assert max(np.max(np.abs(u - pt.u)) for u in flow.points) < 1e-10


def test_flow_regularity_guard_reports_time():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    with pytest.raises(RegularityLostError) as err:
        hamiltonian_flow(pt, (2, 1), t_final=0.1, steps=10, reg_gap=1e6)
    assert err.value.time == 0.0


def test_invalid_selector_rejected():
    pt = sample_orbit([1.0, -1.0], seed=4)
    with pytest.raises(ValueError):
        hamiltonian_flow(pt, (3, 1))


# ---------------------------------------------------------------------------
# linearization and the canonical pairing
# ---------------------------------------------------------------------------

def test_linearization_n2():
    pt = sample_orbit([0.5, -1.0 + 0.5j], seed=3)
    rep = linearization_check(pt, (1, 1))
    assert rep.status == "ok"
    assert abs(rep.slopes[(1, 1)] - 1.0) < 1e-3


@pytest.mark.parametrize("selector", [(1, 1), (2, 1), (2, 2)])
def test_linearization_n3(selector):
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    rep = linearization_check(pt, selector)
    assert rep.status == "ok"
    for key, slope in rep.slopes.items():
        expected = 1.0 if key == selector else 0.0
        assert abs(slope - expected) < 1e-3


def test_casimir_flow_all_slopes_zero():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    rep = linearization_check(pt, (3, 1))
    # the Casimir selector has no conjugate angle on the orbit: every tracked
    # angle must sit still
    assert all(abs(s) < 1e-3 for s in rep.slopes.values())
    assert rep.status == "ok"


def test_action_angle_table_is_canonical():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    rep = action_angle_bracket_table(pt)
    assert rep.status == "ok"
    assert rep.max_deviation_upper < 1e-4
    # the augmented level-one angle is conjugate to h[1,1]
    assert abs(rep.h_tau[((1, 1), (1, 1))] - 1.0) < 1e-4
    for (ka, kb), val in rep.h_tau.items():
        expected = 1.0 if ka == kb else 0.0
        assert abs(val - expected) < 1e-4
    for val in rep.h_h.values():
        assert abs(val) < 1e-4


def test_trajectory_records_shape():
    pt = sample_orbit([1.0, 2.0 + 0.5j, -1.0], seed=11)
    records = trajectory_records(pt, (2, 1), t_final=0.05, steps=50, samples=5)
    assert len(records) >= 5
    rec = records[0]
    assert set(rec) == {"t", "u", "h", "tau", "branch_flags"}
    assert set(rec["tau"]) == {"1,1", "2,1", "2,2"}
    assert set(rec["h"]) == {"1,1", "2,1", "2,2", "3,1", "3,2", "3,3"}

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conflation import (
    CapacityError,
    Classification,
    PiecewiseMeasure,
    ValidationError,
    d_omega,
    random_perturbation,
    refine_check,
)
from conflation.classification import MAX_METRIC_CELLS
from oracles import brute_d_omega

LEB = PiecewiseMeasure.lebesgue()


def test_cells_half_open_last_closed():
    pi = Classification([0, 0.5, 1])
    a, b = pi.cells
    assert a.contains(0.0) and not a.contains(0.5)
    assert b.contains(0.5) and b.contains(1.0)


def test_singleton_one_encoding():
    pi = Classification([0, 1, 1])
    assert pi.k == 2
    a, b = pi.cells
    assert not a.contains(1.0) and b.contains(1.0)
    assert pi.to_list() == [0.0, 1.0, 1.0]


def test_near_duplicate_cuts_dropped():
    assert Classification([0, 0.5, 0.5 + 1e-14, 1]).k == 2


@pytest.mark.parametrize("cuts", [[0.1, 1], [0, 0.9], [0, 0.6, 0.4, 1], [0]])
def test_invalid_cuts(cuts):
    with pytest.raises(ValidationError):
        Classification(cuts)


def test_refinement_position_switch():
    rho = Classification([0, 1 / 3, 2 / 3, 5 / 6, 1])
    pi = Classification([0, 1 / 3, 2 / 3, 1])
    assert refine_check(rho, pi, LEB)
    assert not refine_check(pi, rho, LEB)


def test_refinement_reflexive_and_incomparable():
    pi = Classification([0, 0.5, 1])
    assert refine_check(pi, pi, LEB)
    assert not refine_check(Classification([0, 1 / 3, 1]), pi, LEB)


def test_refinement_up_to_null_sets():
    omega = PiecewiseMeasure.from_segments([(0, 0.4, 1.25), (0.6, 1, 1.25)])
    assert refine_check(Classification([0, 0.45, 1]), Classification([0, 0.55, 1]), omega)


def test_d_omega_examples():
    assert d_omega(Classification([0, 0.5, 1]), Classification([0, 0.5, 1]), LEB) == 0.0
    d = d_omega(Classification([0, 0.5, 1]), Classification([0, 0.6, 1]), LEB)
    assert d == pytest.approx(0.1, abs=1e-12)


def test_d_omega_split_near_cut():
    eps = 0.01
    pi, rho = Classification([0, 0.5, 1]), Classification([0, 0.5 - eps, 0.5 + eps, 1])
    d = d_omega(pi, rho, LEB)
    assert d == pytest.approx(brute_d_omega(pi, rho, LEB), abs=1e-12)
    assert d <= 2 * eps + 1e-12


def test_d_omega_zero_for_null_shift():
    omega = PiecewiseMeasure.from_segments([(0, 0.4, 1.25), (0.6, 1, 1.25)])
    assert d_omega(Classification([0, 0.45, 1]), Classification([0, 0.55, 1]), omega) == pytest.approx(0, abs=1e-12)


def test_d_omega_with_atom():
    omega = 0.5 * (LEB + PiecewiseMeasure([0, 1], [0], [0], [(1.0, 1.0)]))
    pi, rho = Classification([0, 1, 1]), Classification([0, 1])
    assert d_omega(pi, rho, omega) == pytest.approx(brute_d_omega(pi, rho, omega), abs=1e-12)
    assert d_omega(pi, rho, omega) == pytest.approx(0.5, abs=1e-12)


def test_d_omega_capacity():
    with pytest.raises(CapacityError):
        d_omega(Classification.uniform(11), Classification.uniform(10), LEB)
    half = MAX_METRIC_CELLS // 2
    assert d_omega(Classification.uniform(half), Classification.uniform(half), LEB) == 0.0


def test_perturbation_examples():
    pi = Classification([0, 0.5, 1])
    q = random_perturbation(pi, 0.1, seed=7)
    assert q.k == 2 and abs(q.cuts[1] - 0.5) <= 0.1
    assert random_perturbation(pi, 0.1, seed=7) == q
    with pytest.raises(ValidationError):
        random_perturbation(pi, 0.3, seed=0)


def test_perturbation_distance_vanishes():
    pi = Classification([0, 0.3, 0.7, 1])
    ds = [d_omega(pi, random_perturbation(pi, eps, seed=1), LEB) for eps in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(a > b for a, b in zip(ds, ds[1:]))
    assert ds[-1] < 1e-4


def test_json_round_trip():
    pi = Classification([0, 0.25, 1, 1])
    assert Classification.from_dict(pi.to_dict()) == pi


# -- properties ---------------------------------------------------------------


@st.composite
def classifications(draw, k_max=6):
    k = draw(st.integers(1, k_max))
    inner = draw(st.lists(st.floats(0.01, 0.99), min_size=k - 1, max_size=k - 1, unique=True))
    return Classification([0.0] + sorted(inner) + [1.0])


@settings(max_examples=100)
@given(classifications(), classifications(), classifications())
def test_pseudo_metric_axioms(a, b, c):
    assert d_omega(a, a, LEB) == 0.0
    assert d_omega(a, b, LEB) == d_omega(b, a, LEB)
    assert d_omega(a, c, LEB) <= d_omega(a, b, LEB) + d_omega(b, c, LEB) + 1e-9


@settings(max_examples=40)
@given(classifications(4), classifications(4))
def test_metric_matches_enumeration(a, b):
    assert d_omega(a, b, LEB) == pytest.approx(brute_d_omega(a, b, LEB), abs=1e-12)


@given(classifications(), classifications())
def test_common_refinement_refines_both(a, b):
    joint = Classification(np.union1d(a.cuts, b.cuts))
    assert refine_check(joint, a, LEB) and refine_check(joint, b, LEB)


@given(classifications(), st.integers(0, 10_000))
def test_perturbation_keeps_order_and_bound(pi, seed):
    widths = np.diff(pi.cuts)
    eps = 0.49 * widths.min()
    q = random_perturbation(pi, eps, seed)
    assert q.k == pi.k
    assert np.all(np.abs(q.cuts - pi.cuts) <= eps + 1e-15)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiport.core import interferometer, output_amplitudes, random_phases
from multiport.feasibility import Verdict
from multiport.fock import (
    TWO_PHOTON_ORDER,
    PhotonNumberError,
    expand_creation_polynomial,
    fock_basis,
    occupation_label,
    parse_occupation,
    permanent,
    propagate,
    same_port_closed_form,
    transfer_matrix,
    two_photon_distribution,
    two_photon_same_port_conditions,
    two_photon_two_port_conditions,
    two_port_closed_form,
)

EXAMPLE_LAM = np.exp(1j * np.array([math.pi / 2, -math.pi / 6, -math.pi / 6]))
# exact rational results from a symbolic expansion, in TWO_PHOTON_ORDER
P200_EXAMPLE = np.array([1, 1, 1, 2, 2, 2]) / 9
P110_EXAMPLE = np.array([2, 2, 2, 1, 1, 1]) / 9
P200_EXAMPLE_MONOMIAL = np.array([1, 1, 1, 4, 4, 4]) / 15


def naive_permanent(m):
    n = len(m)
    return sum(math.prod(m[i][s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


def test_basis_order_and_size():
    assert fock_basis(2, 3) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    for n, d in ((3, 4), (4, 3), (6, 3)):
        assert len(fock_basis(n, d)) == math.comb(n + d - 1, d - 1)


def test_labels():
    assert occupation_label((2, 0, 0)) == "200"
    assert occupation_label((10, 0)) == "10,0"
    assert parse_occupation("110") == (1, 1, 0)
    assert parse_occupation("1,1,0") == (1, 1, 0)


@pytest.mark.parametrize("n", range(0, 7))
def test_permanent_matches_naive(n, rng):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert permanent(m) == pytest.approx(naive_permanent(m) if n else 1, rel=1e-10, abs=1e-12)


def test_permanent_known():
    assert permanent(np.ones((4, 4))) == pytest.approx(24)
    assert permanent([[1, 2], [3, 4]]) == pytest.approx(10)


@pytest.mark.parametrize("d", range(2, 7))
def test_transfer_matrix_is_transpose(d, rng):
    lam = random_phases(d, rng)
    assert np.allclose(transfer_matrix(lam), interferometer(lam).T)


@pytest.mark.parametrize("d,occ", [(2, (1, 1)), (3, (2, 0, 0)), (3, (1, 1, 0)), (3, (1, 1, 1)), (4, (2, 1, 0, 1)), (3, (3, 0, 2))])
def test_permanent_propagation_matches_polynomial(d, occ, rng):
    for _ in range(5):
        v = transfer_matrix(random_phases(d, rng))
        a = propagate(occ, v)
        b = expand_creation_polynomial(occ, v)
        assert a.basis == b.basis
        assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-12)
        assert abs(a.norm - 1) < 1e-10


def test_single_photon_reduces_to_amplitudes(rng):
    lam = random_phases(4, rng)
    out = propagate((1, 0, 0, 0), transfer_matrix(lam))
    c = output_amplitudes(lam)
    for k in range(4):
        occ = tuple(int(j == k) for j in range(4))
        assert out.amplitude(occ) == pytest.approx(c[k])


def test_worked_example_distributions():
    assert np.allclose(two_photon_distribution(EXAMPLE_LAM, (2, 0, 0)), P200_EXAMPLE, atol=1e-12)
    assert np.allclose(two_photon_distribution(EXAMPLE_LAM, (1, 1, 0)), P110_EXAMPLE, atol=1e-12)
    c = output_amplitudes(EXAMPLE_LAM)
    assert np.allclose(np.abs(same_port_closed_form(c, "monomial")) ** 2, P200_EXAMPLE_MONOMIAL, atol=1e-12)


def test_hong_ou_mandel_suppression():
    # balanced beam splitter: |11> never leaves as |11>
    lam = np.array([1, 1j])
    v = transfer_matrix(lam)
    out = propagate((1, 1), v)
    assert abs(out.amplitude((1, 1))) < 1e-12


@settings(max_examples=50)
@given(st.lists(st.floats(-7, 7, allow_nan=False), min_size=3, max_size=3))
def test_closed_forms_match_propagation(theta):
    lam = np.exp(1j * np.asarray(theta))
    c = output_amplitudes(lam)
    v = transfer_matrix(lam)
    got200 = propagate((2, 0, 0), v).in_order(TWO_PHOTON_ORDER)
    got110 = propagate((1, 1, 0), v).in_order(TWO_PHOTON_ORDER)
    assert np.allclose(got200, same_port_closed_form(c), atol=1e-12)
    assert np.allclose(got110, two_port_closed_form(c), atol=1e-12)
    # exchange symmetry: a bunched-pair amplitude is sqrt(2) c_k c_l
    assert got200[3] == pytest.approx(math.sqrt(2) * c[0] * c[1], abs=1e-12)


def test_photon_limit():
    v = transfer_matrix(np.ones(3))
    with pytest.raises(PhotonNumberError):
        propagate((4, 3, 0), v)
    with pytest.raises(ValueError):
        propagate((1, 0), v)
    with pytest.raises(ValueError):
        propagate((-1, 1, 0), v)


def test_same_port_example_is_reachable_physically():
    rep = two_photon_same_port_conditions(P200_EXAMPLE)
    assert rep.verdict is Verdict.FEASIBLE
    assert rep.details["round_trip_residual"] < 1e-9
    assert np.allclose(two_photon_distribution(rep.details["lam"], (2, 0, 0)), P200_EXAMPLE, atol=1e-9)


def test_same_port_example_rejected_under_factor_two():
    rep = two_photon_same_port_conditions(P200_EXAMPLE, convention="monomial")
    assert rep.verdict is Verdict.INFEASIBLE
    assert "2*sqrt" in rep.notes[0]
    assert two_photon_same_port_conditions(P200_EXAMPLE_MONOMIAL, convention="monomial").verdict is Verdict.FEASIBLE


@pytest.mark.parametrize("convention", ["fock", "monomial"])
def test_two_photon_round_trips(convention, rng):
    for _ in range(40):
        lam = random_phases(3, rng)
        c = output_amplitudes(lam)
        for fn, cf in ((two_photon_same_port_conditions, same_port_closed_form), (two_photon_two_port_conditions, two_port_closed_form)):
            vec = cf(c, convention)
            p = np.abs(vec) ** 2
            rep = fn(p / p.sum(), convention=convention, tol=1e-7)
            assert rep.verdict is Verdict.FEASIBLE, rep.notes


def test_two_port_rejects_inconsistent():
    rep = two_photon_two_port_conditions([0.5, 0.5, 0, 0, 0, 0])
    assert rep.verdict is Verdict.INFEASIBLE
    rep = two_photon_two_port_conditions([0.01, 0.01, 0.9, 0.04, 0.02, 0.02])
    assert rep.verdict is Verdict.INFEASIBLE


def test_two_port_example():
    assert two_photon_two_port_conditions(P110_EXAMPLE).verdict is Verdict.FEASIBLE


def test_bad_convention():
    with pytest.raises(ValueError):
        same_port_closed_form([1, 0, 0], "other")

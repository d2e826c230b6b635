import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nondegen.errors import DomainError, StructuralMismatchError
from nondegen.funk_hecke import (
    EigenvalueTable,
    a_constant,
    closed_table,
    eigenvalue_closed,
    eigenvalue_quadrature,
    kappa,
    normalization_audit,
    quadrature_table,
    ratio_law,
)
from nondegen.params import ProblemParams

# theta-form Funk-Hecke integrals evaluated with mpmath (30 digits)
FROZEN = {
    (3, 0.75): [17.034229780569032103, 5.6780765935230107009, 3.0574258580508519159,
                1.9783343787387865338, 1.4130959848134189527],
    (2, 0.25): [17.771531752633464932, 10.662919051580078937, 8.2933814845622836055,
                7.0174766407834707346, 6.191891153632474171],
}


def test_kappa_values():
    assert kappa(1) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-15)
    assert kappa(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert kappa(3) == pytest.approx(8 * math.pi**1.5, rel=1e-15)
    with pytest.raises(DomainError):
        kappa(0)


@pytest.mark.parametrize("N,s", [(1, 0.25), (2, 0.5), (3, 0.5), (3, 0.75), (4, 0.9)])
def test_ratio_law_closed(N, s):
    P = ProblemParams(N, s)
    e = np.array([eigenvalue_closed(P, l) for l in range(52)])
    np.testing.assert_allclose(e[1:] / e[:-1], ratio_law(P, np.arange(51)), rtol=1e-12)
    assert np.all(np.diff(e) < 0)


def test_reference_point_harmonic_decay():
    P = ProblemParams(3, 0.5)
    prod = [eigenvalue_closed(P, l) * (l + 1) for l in range(21)]
    np.testing.assert_allclose(prod, prod[0], rtol=1e-12)


def test_quadrature_spot_values():
    P = ProblemParams(3, 0.5)
    assert eigenvalue_quadrature(P, 0) == pytest.approx(2 * math.pi**2, rel=1e-10)
    assert eigenvalue_quadrature(P, 1) == pytest.approx(math.pi**2, rel=1e-10)
    assert eigenvalue_quadrature(P, 1) / eigenvalue_quadrature(P, 0) == pytest.approx(0.5, rel=1e-12)


@pytest.mark.parametrize("l", range(8))
def test_quadrature_two_sphere_closed_form(l):
    # N=2, s=1/2: int P_l(t) / sqrt(2-2t) dt = 2/(2l+1)
    assert eigenvalue_quadrature(ProblemParams(2, 0.5), l) == pytest.approx(4 * math.pi / (2 * l + 1), rel=1e-12)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_quadrature_frozen_values(key):
    P = ProblemParams(*key)
    got = [eigenvalue_quadrature(P, l) for l in range(5)]
    np.testing.assert_allclose(got, FROZEN[key], rtol=1e-12)


@pytest.mark.parametrize("N,s", [(1, 0.25), (1, 0.4)])
def test_circle_eigenvalues_ratio(N, s):
    P = ProblemParams(N, s)
    q = np.array([eigenvalue_quadrature(P, l) for l in range(8)])
    np.testing.assert_allclose(q[1:] / q[:-1], ratio_law(P, np.arange(7)), rtol=1e-10)


@pytest.mark.parametrize("l", [0, 3, 10, 25])
def test_quadrature_rule_size_independent(l):
    P = ProblemParams(3, 0.3)
    n = math.ceil(l / 2) + 2
    a = eigenvalue_quadrature(P, l, n=n)
    b = eigenvalue_quadrature(P, l, n=2 * n)
    assert abs(a - b) <= 1e-13 * abs(b) + 1e-15
    with pytest.raises(DomainError):
        eigenvalue_quadrature(P, l, n=n - 1)


def test_negative_degree_rejected():
    with pytest.raises(DomainError):
        eigenvalue_quadrature(ProblemParams(3, 0.5), -1)
    with pytest.raises(DomainError):
        eigenvalue_closed(ProblemParams(3, 0.5), -1)


@pytest.mark.parametrize("N,s,ref", [(3, 0.5, 1 / 8), (2, 0.5, 1 / (2 * math.sqrt(2)))])
def test_audit_reference_values(N, s, ref):
    k, resid = normalization_audit(ProblemParams(N, s), 20)
    assert k == pytest.approx(ref, rel=1e-12)
    assert np.max(resid) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1, 2, 3, 4, 5]), st.floats(0.05, 0.95))
def test_audit_l_independent(N, s):
    if N <= 2 * s:
        return
    _, resid = normalization_audit(ProblemParams(N, s), 20)
    assert np.max(resid) <= 1e-10


def test_audit_detects_wrong_l_dependence():
    with pytest.raises(StructuralMismatchError):
        normalization_audit(ProblemParams(3, 0.5).with_defect("exponent"), 20)
    with pytest.raises(DomainError):
        normalization_audit(ProblemParams(3, 0.5), 2)


@pytest.mark.parametrize("N,s", [(2, 0.5), (3, 0.5), (3, 0.75), (1, 0.25), (4, 0.3)])
def test_a_equals_first_eigenvalue(N, s):
    P = ProblemParams(N, s)
    k, _ = normalization_audit(P, 20)
    a = a_constant(P)
    assert a > 0
    assert a / (k * eigenvalue_closed(P, 1)) == pytest.approx(1.0, rel=1e-8)


def test_a_reference_value():
    # gamma = 1/(2 pi^2), p = 2, alpha = 2 at N=3, s=1/2
    assert a_constant(ProblemParams(3, 0.5)) == pytest.approx(math.pi**2, rel=1e-14)


def test_tables():
    P = ProblemParams(2, 0.3)
    c, q = closed_table(P, 10), quadrature_table(P, 10)
    np.testing.assert_allclose(c.ratios(), ratio_law(P, np.arange(10)), rtol=1e-12)
    np.testing.assert_allclose(q.ratios(), ratio_law(P, np.arange(10)), rtol=1e-10)
    with pytest.raises(StructuralMismatchError):
        EigenvalueTable(P, np.array([1.0, 2.0]), "closed_form")
    with pytest.raises(StructuralMismatchError):
        EigenvalueTable(P, np.array([1.0, -1.0]), "closed_form")


def test_large_degree_no_overflow():
    P = ProblemParams(4, 0.2)
    e = eigenvalue_closed(P, 500)
    assert 0 < e < eigenvalue_closed(P, 499)

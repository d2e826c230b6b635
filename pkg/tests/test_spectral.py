import math

import numpy as np
import pytest

from nondegen.errors import DomainError, NumericalError
from nondegen.funk_hecke import eigenvalue_closed, normalization_audit
from nondegen.params import DEFECTS, ProblemParams
from nondegen.spectral import (
    CertificateConfig,
    build_zonal_matrix,
    full_sphere_eigenvalues,
    gap_at_e1,
    match_spectrum,
    nondegeneracy_certificate,
    spectrum,
)


@pytest.fixture(scope="module")
def m3():
    return build_zonal_matrix(ProblemParams(3, 0.5), 64)


def test_top_eigenvalue_reference_point(m3):
    # constant function: int_{S^3} |w-e|^-2 de = 2 pi^2
    assert spectrum(m3, 1)[0] == pytest.approx(2 * math.pi**2, rel=1e-5)


def test_matrix_nearly_symmetric_before_symmetrization(m3):
    assert m3.raw_asymmetry <= 1e-12
    np.testing.assert_array_equal(m3.matrix, m3.matrix.T)


def test_constant_is_eigenfunction(m3):
    out = m3.apply(np.ones(m3.n))
    np.testing.assert_allclose(out, 2 * math.pi**2, rtol=1e-5)


@pytest.mark.parametrize("N,s", [(2, 0.5), (3, 0.5), (3, 0.75)])
def test_first_six_match_audited_closed_form(N, s):
    P = ProblemParams(N, s)
    k, _ = normalization_audit(P, 20)
    vals = spectrum(build_zonal_matrix(P, 64), 6)
    ref = [k * eigenvalue_closed(P, l) for l in range(6)]
    np.testing.assert_allclose(vals, ref, rtol=1e-5)
    assert np.all(np.diff(vals) < 0)


def test_two_sphere_reference_values():
    vals = spectrum(build_zonal_matrix(ProblemParams(2, 0.5), 64), 4)
    np.testing.assert_allclose(vals, [4 * math.pi / (2 * l + 1) for l in range(4)], rtol=1e-5)


def test_refinement_stable():
    P = ProblemParams(3, 0.5)
    a = spectrum(build_zonal_matrix(P, 32), 6)
    b = spectrum(build_zonal_matrix(P, 64), 6)
    np.testing.assert_allclose(a, b, rtol=1e-6)


@pytest.mark.parametrize("N,s", [(3, 0.5), (3, 0.75), (2, 0.5)])
def test_eigenvalues_accumulate_at_zero(N, s):
    vals = spectrum(build_zonal_matrix(ProblemParams(N, s), 64), 12)
    assert vals[10] < vals[0] / 10
    assert vals[-1] > 0


def test_guards():
    with pytest.raises(DomainError):
        build_zonal_matrix(ProblemParams(1, 0.3))
    with pytest.raises(DomainError):
        build_zonal_matrix(ProblemParams(3, 0.5), n=8)
    with pytest.raises(DomainError):
        build_zonal_matrix(ProblemParams(3, 0.5), inner_n=16)
    with pytest.raises(DomainError):
        spectrum(build_zonal_matrix(ProblemParams(3, 0.5), 16), 17)


def test_unreachable_target_reported():
    with pytest.raises(NumericalError):
        build_zonal_matrix(ProblemParams(3, 0.5), 16, target=1e-30)


def test_match_spectrum_flags_spurious_value():
    ref = [10.0, 5.0, 3.0, 2.0]
    pairs, unmatched = match_spectrum([10.0, 7.0, 5.0, 3.0], ref)
    assert unmatched == [7.0]
    assert [p[0] for p in pairs] == [0, 1, 2]
    pairs, unmatched = match_spectrum([10.0, 3.0], ref)
    assert not unmatched
    assert [p[0] for p in pairs] == [0, 2]


def test_gap_values():
    # N=3, s=1/2: e_l proportional to 1/(l+1), so gap = min(1 - 2/3, 2 - 1)
    assert gap_at_e1(ProblemParams(3, 0.5)) == pytest.approx(1 / 3, rel=1e-14)
    assert gap_at_e1(ProblemParams(2, 0.5)) == pytest.approx(1 - 3 / 5, rel=1e-14)


@pytest.mark.parametrize("N,s", [(3, 0.5), (2, 0.5)])
def test_certificate_passes(N, s):
    rep = nondegeneracy_certificate(ProblemParams(N, s))
    assert rep.verdict, [c.summary() for c in rep.checks if not c.passed]
    assert len(rep.eigenvalues) == 6
    assert rep.multiplicities == [1] * 6
    assert [p[0] for p in rep.matched] == list(range(6))
    assert rep.gap_at_e1 > 0


def test_certificate_circle_skips_zonal_spectrum():
    rep = nondegeneracy_certificate(ProblemParams(1, 0.25))
    assert rep.verdict
    assert "zonal_spectrum" not in {c.name for c in rep.checks}


@pytest.mark.parametrize("defect", sorted(DEFECTS))
def test_certificate_detects_defects(defect):
    cfg = CertificateConfig(kernel_radii=(0.0, 0.5, 2.0))
    rep = nondegeneracy_certificate(ProblemParams(3, 0.5).with_defect(defect), cfg)
    failing = {c.name for c in rep.checks if not c.passed}
    assert not rep.verdict
    assert "eigenvalue_identification" in failing
    if defect == "exponent":
        assert {"normalization_audit", "zonal_spectrum"} <= failing
    else:
        assert {"bubble_residual", "kernel_annihilation"} <= failing


@pytest.mark.slow
def test_full_sphere_multiplicities():
    vals = full_sphere_eigenvalues(ProblemParams(2, 0.5))
    ref = [4 * math.pi / (2 * l + 1) for l in range(3)]
    assert vals[0] == pytest.approx(ref[0], rel=1e-2)
    np.testing.assert_allclose(vals[1:4], ref[1], rtol=1e-2)
    np.testing.assert_allclose(vals[4:9], ref[2], rtol=2e-2)
    assert vals[9] < 0.9 * ref[2]

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nondegen.bubble import (
    Bubble,
    KernelFunction,
    bubble_amplitude,
    bubble_eval,
    bubble_profile,
    kernel_eval,
    kernel_profile,
)
from nondegen.errors import DomainError
from nondegen.params import DEFECTS, ProblemParams, amplitude_value, riesz_gamma_value

admissible = st.tuples(st.integers(1, 6), st.floats(0.05, 0.95)).filter(lambda t: t[0] > 2 * t[1])


@settings(max_examples=60, deadline=None)
@given(admissible)
def test_derived_exponents(ns):
    N, s = ns
    P = ProblemParams(N, s)
    assert P.p + 1 == pytest.approx(P.two_star, rel=1e-15)
    assert N / 2 - 1 < P.funk_alpha < N / 2
    assert P.bubble_amplitude > 0
    assert P.riesz_gamma > 0
    assert P.bubble_amplitude == amplitude_value(N, s)


@pytest.mark.parametrize("N,s", [(1, 0.6), (1, 0.5), (2, 1.0), (3, 0.0), (0, 0.3), (2.0, 0.5)])
def test_rejects_inadmissible(N, s):
    with pytest.raises(DomainError):
        ProblemParams(N, s)


def test_amplitude_reference_point():
    assert bubble_amplitude(ProblemParams(3, 0.5)) == pytest.approx(2.0, rel=1e-15)


def test_amplitude_classical_limit():
    # s = 1, N = 4: (N(N-2))^((N-2)/4) = 8^(1/2)
    assert amplitude_value(4, 1.0) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    for N in (3, 5, 6):
        assert amplitude_value(N, 1.0) == pytest.approx((N * (N - 2)) ** ((N - 2) / 4), rel=1e-13)


def test_gamma_values():
    assert riesz_gamma_value(3, 0.5) == pytest.approx(1 / (2 * math.pi**2), rel=1e-15)
    # Newtonian potential constant
    assert riesz_gamma_value(3, 1.0) == pytest.approx(1 / (4 * math.pi), rel=1e-15)


def test_defects_perturb_one_thing():
    P = ProblemParams(3, 0.5)
    assert not P.is_perturbed
    assert P.with_defect("amplitude").bubble_amplitude == pytest.approx(2.2)
    assert P.with_defect("gamma").riesz_gamma == pytest.approx(1.1 * P.riesz_gamma)
    assert P.with_defect("exponent").kernel_exponent == pytest.approx(2.1)
    for name in DEFECTS:
        assert P.with_defect(name).is_perturbed
        assert P.with_defect(name).clean() == P
    with pytest.raises(DomainError):
        P.with_defect("nothing")


def test_bubble_origin_and_scaling():
    P = ProblemParams(3, 0.5)
    assert Bubble(P)(np.zeros(3)) == pytest.approx(P.bubble_amplitude)
    rng = np.random.default_rng(0)
    x = rng.normal(size=(100, 3))
    w2 = bubble_eval(Bubble(P, mu=2.0), x)
    ref = 2 ** (P.decay / 2) * Bubble(P)(2 * x)
    np.testing.assert_allclose(w2, ref, rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(admissible, st.floats(0.1, 10.0), st.floats(-3, 3), st.floats(-3, 3))
def test_scaling_covariance(ns, mu, a, b):
    N, s = ns
    P = ProblemParams(N, s)
    xi = np.full(N, 0.3)
    x = np.full(N, a) + np.arange(N) * b / max(N, 1)
    lhs = Bubble(P, mu=mu, xi=xi)(x)
    rhs = mu ** (P.decay / 2) * Bubble(P)(mu * (x - xi))
    assert lhs == pytest.approx(rhs, rel=1e-13)
    assert lhs > 0


def test_bubble_far_field():
    P = ProblemParams(2, 0.3)
    R = 1e4
    x = np.array([R, 0.0])
    assert Bubble(P)(x) * R**P.decay == pytest.approx(P.bubble_amplitude, rel=1e-7)


def test_bubble_rejects_bad_args():
    P = ProblemParams(2, 0.5)
    with pytest.raises(DomainError):
        Bubble(P, mu=0.0)
    with pytest.raises(DomainError):
        Bubble(P, xi=(0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        KernelFunction(P, 3)


@pytest.mark.parametrize("N,s", [(3, 0.5), (2, 0.3), (1, 0.25), (4, 0.9)])
def test_z0_values(N, s):
    P = ProblemParams(N, s)
    z = KernelFunction(P, 0)
    assert z(np.zeros(N)) == pytest.approx(P.decay / 2 * P.bubble_amplitude, rel=1e-15)
    rng = np.random.default_rng(1)
    u = rng.normal(size=(50, N))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    np.testing.assert_allclose(z(u), 0.0, atol=1e-15)


@pytest.mark.parametrize("N,s", [(3, 0.5), (2, 0.7), (1, 0.2)])
def test_translation_generators_finite_difference(N, s):
    P = ProblemParams(N, s)
    w = Bubble(P)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(100, N))
    h = 1e-5
    for i in range(N):
        e = np.zeros(N)
        e[i] = h
        fd = (w(x + e) - w(x - e)) / (2 * h)
        np.testing.assert_allclose(kernel_eval(KernelFunction(P, i + 1), x), fd, atol=1e-8)


@pytest.mark.parametrize("N,s", [(3, 0.5), (2, 0.25)])
def test_dilation_generator_is_mu_derivative(N, s):
    P = ProblemParams(N, s)
    rng = np.random.default_rng(4)
    x = rng.normal(size=(100, N))
    h = 1e-5
    fd = (Bubble(P, mu=1 + h)(x) - Bubble(P, mu=1 - h)(x)) / (2 * h)
    np.testing.assert_allclose(KernelFunction(P, 0)(x), fd, atol=1e-8)


def test_symmetries():
    P = ProblemParams(3, 0.4)
    rng = np.random.default_rng(5)
    x = rng.normal(size=(20, 3))
    flip = x * np.array([-1.0, 1.0, 1.0])
    z1, z2 = KernelFunction(P, 1), KernelFunction(P, 2)
    np.testing.assert_allclose(z1(flip), -z1(x), atol=1e-15)
    np.testing.assert_allclose(z2(flip), z2(x), atol=1e-15)
    rot = x[:, [1, 0, 2]]
    np.testing.assert_allclose(KernelFunction(P, 0)(rot), KernelFunction(P, 0)(x), atol=1e-15)


def test_profiles_match_fields():
    P = ProblemParams(3, 0.5)
    r = np.linspace(0, 5, 11)
    x = np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=-1)
    np.testing.assert_allclose(bubble_profile(P, r), Bubble(P)(x), rtol=1e-15)
    np.testing.assert_allclose(kernel_profile(P, 0, r), KernelFunction(P, 0)(x), rtol=1e-15, atol=1e-17)
    np.testing.assert_allclose(kernel_profile(P, 1, r), KernelFunction(P, 1)(x), rtol=1e-15)


@pytest.mark.parametrize("k", [0, 1])
def test_generators_bounded_with_interior_max(k):
    P = ProblemParams(3, 0.5)
    r = np.concatenate([[0.0], np.logspace(-3, 4, 2000)])
    v = np.abs(kernel_profile(P, k, r))
    assert np.all(np.isfinite(v))
    assert np.argmax(v) < len(r) - 1
    assert v[-1] < 1e-6 * v.max()


def test_decay_hints():
    P = ProblemParams(3, 0.5)
    assert Bubble(P).decay_exponent == P.decay
    assert KernelFunction(P, 0).decay_exponent == P.decay
    assert KernelFunction(P, 2).decay_exponent == P.decay + 1

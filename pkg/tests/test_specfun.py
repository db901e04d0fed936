import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dopplerkb import lineshape
from dopplerkb.lineshape import LineShapeParams
from dopplerkb.specfun import (
    ConvergenceError,
    faddeeva,
    faddeeva_deriv,
    kummer_1f1,
    w1,
    w1_deriv,
)

mpmath.mp.dps = 30


def w_oracle(z):
    """w(z) = (i/pi) int exp(-t^2) / (z - t) dt for Im z > 0; erfc form on the real axis."""
    z = mpmath.mpc(z.real, z.imag)
    if z.imag == 0:
        return complex(mpmath.exp(-z * z) * mpmath.erfc(-1j * z))
    f = lambda t: mpmath.exp(-t * t) / (z - t)
    pts = [-mpmath.inf, z.real - 1, z.real, z.real + 1, mpmath.inf]
    return complex(1j / mpmath.pi * mpmath.quad(f, pts))


GRID = [complex(x, y) for x in np.linspace(-6, 6, 13) for y in (0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 4.0, 6.0)]


@pytest.mark.parametrize("z", GRID)
def test_faddeeva_matches_quadrature(z):
    ref = w_oracle(z)
    assert abs(faddeeva(z) - ref) <= 1e-10 * abs(ref)


def test_faddeeva_origin_and_imaginary_axis():
    assert faddeeva(0j) == pytest.approx(1.0, abs=1e-15)
    y = np.array([0.01, 0.3, 1.0, 5.0, 40.0])
    w = faddeeva(1j * y)
    assert np.all(np.abs(w.imag) < 1e-14)
    ref = np.array([float(mpmath.exp(t * t) * mpmath.erfc(t)) for t in y])
    np.testing.assert_allclose(w.real, ref, rtol=1e-12)


def test_faddeeva_large_argument_asymptote():
    z = np.array([30 + 0.5j, -200 + 3j, 1e4 + 1j])
    np.testing.assert_allclose(faddeeva(z), 1j / (math.sqrt(math.pi) * z) * (1 + 1 / (2 * z * z)), rtol=1e-6)


def test_faddeeva_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        faddeeva(1 - 0.1j)


@given(st.floats(-50, 50), st.floats(0, 50))
@settings(max_examples=200, deadline=None)
def test_faddeeva_symmetry_and_positivity(x, y):
    z = complex(x, y)
    w = faddeeva(z)
    assert np.isfinite(w)
    assert abs(faddeeva(complex(-x, y)) - np.conj(w)) <= 1e-13 * abs(w)
    if y > 0:
        assert w.real > 0


def test_faddeeva_derivative_by_finite_difference():
    z = np.array([0.3 + 0.2j, -2 + 1j, 4 + 0.01j])
    h = 1e-6
    fd = (faddeeva(z + h) - faddeeva(z - h)) / (2 * h)
    np.testing.assert_allclose(faddeeva_deriv(z), fd, rtol=1e-7)
    fd1 = (w1(z + h) - w1(z - h)) / (2 * h)
    np.testing.assert_allclose(w1_deriv(z), fd1, rtol=1e-6)


def test_w1_is_the_theta_derivative_of_the_exact_profile():
    # d/dtheta of the exact Galatry absorbance at theta = 0 equals Re w1 / 12
    nu = np.linspace(-3, 3, 13)
    p = LineShapeParams(doppler_hwhm_e=1.0, homogeneous_hw=0.05)
    h = 1e-4
    plus = lineshape.galatry_absorbance_exact(p.replace(theta=h), nu)
    minus = lineshape.galatry_absorbance_exact(p.replace(theta=2 * h), nu)
    base = lineshape.voigt_absorbance(p, nu)
    # second-order forward difference
    deriv = (-3 * base + 4 * plus - minus) / (2 * h)
    zeta = nu + 0.05j
    np.testing.assert_allclose(deriv, w1(zeta).real / 12.0, atol=2e-6)


def test_printed_w1_variant_disagrees_with_exact_profile():
    # the variant with (3 - z^2) instead of (3 - 2 z^2) misses the exact slope
    nu = np.linspace(-3, 3, 13)
    zeta = nu + 0.05j
    w = faddeeva(zeta)
    variant = 8 / math.sqrt(math.pi) * (1 - zeta**2) + 4j * zeta * (3 - zeta**2) * w
    assert np.max(np.abs(variant.real - w1(zeta).real)) > 0.1


def test_kummer_exponential_identity():
    for x in [0.0, 1e-3, 0.7, -2.5, 10.0, 35.0, -60.0, 80.0, 2.0 + 3.0j]:
        assert kummer_1f1(1.0, 1.0, x) == pytest.approx(np.exp(x), rel=1e-12)


@pytest.mark.parametrize("a,b,x", [(0.5, 1.5, 2.0), (1.0, 3.2, -4.0), (2.3, 1.1, 15.0), (1.0, 50.5, 60.0), (1.0, 2.0 + 5.0j, 3.0)])
def test_kummer_contiguous_relation(a, b, x):
    # (b - a) M(a-1) + (2a - b + x) M(a) - a M(a+1) = 0
    m0 = kummer_1f1(a - 1, b, x)
    m1 = kummer_1f1(a, b, x)
    m2 = kummer_1f1(a + 1, b, x)
    lhs = (b - a) * m0 + (2 * a - b + x) * m1 - a * m2
    scale = max(abs((b - a) * m0), abs((2 * a - b + x) * m1), abs(a * m2))
    assert abs(lhs) <= 1e-8 * scale


@pytest.mark.parametrize("a,b,x", [(1.0, 1.5, 3.0), (0.3, 2.5, -7.0), (1.0, 101.0, 45.0), (1.0, 3.0, 60.0), (1.0, 1.0 + 2.0j, 0.5)])
def test_kummer_against_mpmath(a, b, x):
    ref = complex(mpmath.hyp1f1(a, b, x))
    assert abs(kummer_1f1(a, b, x) - ref) <= 1e-10 * abs(ref)


def test_kummer_domain_errors():
    with pytest.raises(ValueError):
        kummer_1f1(1.0, -2.0, 1.0)
    with pytest.raises(ValueError):
        kummer_1f1(1.0, 0.0, 1.0)
    with pytest.raises(ConvergenceError):
        kummer_1f1(1.0, 1.5, 1e4 + 1e4j, max_terms=50)

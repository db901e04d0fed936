"""Special functions for Doppler and soft-collision line shapes.

The Faddeeva function is evaluated with Weideman's rational expansion
(N = 40 terms) inside ``|z| < FADDEEVA_CF_RADIUS`` and with the Laplace
continued fraction outside. Both pieces hold relative accuracy near 1e-14 on
the closed upper half-plane.
"""

import math

import numpy as np
from scipy.special import loggamma, rgamma

__all__ = [
    "ConvergenceError",
    "faddeeva",
    "faddeeva_deriv",
    "w1",
    "w1_deriv",
    "kummer_1f1",
    "FADDEEVA_CF_RADIUS",
    "KUMMER_ASYMPTOTIC_RADIUS",
]

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

FADDEEVA_CF_RADIUS = 15.0
# below this Im z the rational approximant is corrected near the real axis
NEAR_AXIS_IM = 1e-5
# Asymptotic 1F1 expansion is tried only when |x| exceeds this and dominates |b - a|.
KUMMER_ASYMPTOTIC_RADIUS = 40.0


class ConvergenceError(ArithmeticError):
    """A series, expansion or iteration failed to reach its tolerance."""


def _weideman_coefficients(n):
    m = 2 * n
    k = np.arange(-m + 1, m)
    big_l = math.sqrt(n / math.sqrt(2.0))
    t = big_l * np.tan(k * np.pi / (2 * m))
    f = np.concatenate([[0.0], np.exp(-t * t) * (big_l**2 + t * t)])
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return big_l, a[1 : n + 1][::-1].copy()


_WEIDEMAN_L, _WEIDEMAN_A = _weideman_coefficients(40)


def _faddeeva_rational(z):
    big_l = _WEIDEMAN_L
    denom = big_l - 1j * z
    p = np.polyval(_WEIDEMAN_A, (big_l + 1j * z) / denom)
    return 2.0 * p / denom**2 + INV_SQRT_PI / denom


def _faddeeva_near_axis(z):
    # Re w on the real axis is exp(-x^2) exactly; the rational form only gets
    # it to ~1e-16 absolute, so step off the axis with a Taylor series in y
    x = z.real
    y = z.imag
    w0 = np.exp(-x * x) + 1j * _faddeeva_rational(x + 0j).imag
    d1 = -2.0 * x * w0 + 2j * INV_SQRT_PI
    d2 = -2.0 * w0 - 2.0 * x * d1
    return w0 + 1j * y * d1 - 0.5 * y * y * d2


def _faddeeva_cfrac(z, depth=40):
    # w(z) = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...))))
    acc = z.copy()
    for k in range(depth, 0, -1):
        acc = z - (0.5 * k) / acc
    return 1j * INV_SQRT_PI / acc


def _as_upper_half_plane(z, name="z"):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag < 0):
        raise ValueError(f"{name} must satisfy Im({name}) >= 0")
    return z


def faddeeva(z):
    """Scaled complex error function ``w(z) = exp(-z**2) erfc(-i z)``.

    Parameters
    ----------
    z : complex or array_like of complex
        Argument in the closed upper half-plane.

    Returns
    -------
    complex or ndarray
        ``w(z)`` with the shape of ``z``.

    Raises
    ------
    ValueError
        If any ``Im(z) < 0``.
    """
    z = _as_upper_half_plane(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    far = np.abs(z) >= FADDEEVA_CF_RADIUS
    near = ~far & (z.imag < NEAR_AXIS_IM)
    mid = ~far & ~near
    out[mid] = _faddeeva_rational(z[mid])
    if np.any(near):
        out[near] = _faddeeva_near_axis(z[near])
    if np.any(far):
        out[far] = _faddeeva_cfrac(z[far])
    return out[0] if scalar else out


def faddeeva_deriv(z, w=None):
    """Derivative ``w'(z) = -2 z w(z) + 2i/sqrt(pi)``."""
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = faddeeva(z)
    return -2.0 * z * w + 2j * INV_SQRT_PI


def w1(z, w=None):
    """First-order soft-collision correction function.

    ``w1(z) = 8/sqrt(pi) (1 - z**2) + 4 i z (3 - 2 z**2) w(z)``

    This is ``i * sqrt(pi) * w'''(z)``, i.e. the Fourier-Laplace image of the
    cubic term ``s**3 / 12`` in the small-friction expansion of the Galatry
    correlation function. ``w`` may be supplied to reuse a Faddeeva evaluation.
    """
    z = _as_upper_half_plane(z)
    if w is None:
        w = faddeeva(z)
    z2 = z * z
    return 8.0 * INV_SQRT_PI * (1.0 - z2) + 4j * z * (3.0 - 2.0 * z2) * w


def w1_deriv(z, w=None):
    """Derivative of :func:`w1` with respect to ``z``."""
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = faddeeva(z)
    wp = faddeeva_deriv(z, w)
    z2 = z * z
    return -16.0 * INV_SQRT_PI * z + 4j * (3.0 - 6.0 * z2) * w + 4j * z * (3.0 - 2.0 * z2) * wp


@np.errstate(over="ignore", invalid="ignore")
def _kummer_series(a, b, x, tol, max_terms, chunk=4096):
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    largest = 1.0
    n0 = 0
    while n0 < max_terms:
        n = np.arange(n0, n0 + chunk, dtype=float)
        ratios = (a + n) * x / ((b + n) * (n + 1.0))
        terms = term * np.cumprod(ratios)
        total += terms.sum()
        term = terms[-1]
        largest = max(largest, float(np.abs(terms).max()))
        if not np.isfinite(total):
            break
        mags = np.abs(terms[-8:])
        if term == 0 or (
            np.all(mags <= tol * abs(total)) and np.all(np.abs(ratios[-8:]) < 1.0)
        ):
            if largest * 1e-16 > 1e-10 * abs(total):
                raise ConvergenceError("1F1 power series lost precision to cancellation")
            return total
        n0 += chunk
    raise ConvergenceError(f"1F1 power series did not converge within {max_terms} terms")


def _asymptotic_sum(p, q, x, max_terms):
    # sum_s (p)_s (q)_s / s! x^{-s}, stopped at the smallest term
    total = 1.0 + 0.0j
    t = 1.0 + 0.0j
    smallest = 1.0
    for s in range(max_terms):
        t_next = t * (p + s) * (q + s) / ((s + 1.0) * x)
        if abs(t_next) > abs(t) and s > 0:
            break
        t = t_next
        total += t
        smallest = abs(t)
        if t == 0:
            break
    return total, smallest


@np.errstate(over="ignore", invalid="ignore")
def _kummer_asymptotic(a, b, x, tol, max_terms=500):
    # DLMF 13.7.2 with the e^{+i pi a} branch (valid for Im x >= 0); for real
    # positive x the two branches are averaged, which keeps real inputs real.
    x = complex(x)
    s1, r1 = _asymptotic_sum(1.0 - a, b - a, x, max_terms)
    s2, r2 = _asymptotic_sum(a, a - b + 1.0, -x, max_terms)
    phase = np.cos(np.pi * a) if (x.imag == 0 and x.real > 0) else np.exp(1j * np.pi * a)
    lg_b = loggamma(complex(b))
    pre1 = np.exp(lg_b + x + (a - b) * np.log(x)) * rgamma(complex(a))
    pre2 = np.exp(lg_b - a * np.log(x)) * phase * rgamma(complex(b - a))
    total = pre1 * s1 + pre2 * s2
    err = abs(pre1) * r1 + abs(pre2) * r2
    if not np.isfinite(total) or err > tol * abs(total):
        raise ConvergenceError("1F1 asymptotic expansion did not reach tolerance")
    return total


def kummer_1f1(a, b, x, tol=1e-15, max_terms=2_000_000):
    """Kummer confluent hypergeometric function ``1F1(a; b; x)``.

    Parameters
    ----------
    a : float
    b : float or complex
        Must not be a non-positive integer.
    x : float or complex
    tol : float
        Relative truncation tolerance for either evaluation scheme.
    max_terms : int
        Term budget for the power series.

    Returns
    -------
    complex

    Notes
    -----
    The large-argument expansion is used when ``|x| > KUMMER_ASYMPTOTIC_RADIUS``
    and ``|x| > 4 |b - a| + 4 |a|**2``; otherwise, or if the expansion does not
    reach ``tol``, the power series is summed. The soft-collision profile puts
    ``b`` close to ``x`` (both near ``1/(2 theta**2)``), a regime the asymptotic
    form does not cover; there the series converges after roughly
    ``10 sqrt(x)`` terms.
    """
    b = complex(b)
    if b.imag == 0 and b.real <= 0 and b.real == math.floor(b.real):
        raise ValueError("b must not be a non-positive integer")
    x = complex(x)
    if x == 0:
        return 1.0 + 0.0j
    if x.real < 0:
        # Kummer's transformation avoids the alternating series
        return complex(np.exp(x) * kummer_1f1(b - a, b, -x, tol, max_terms))
    if abs(x) > KUMMER_ASYMPTOTIC_RADIUS and abs(x) > 4.0 * abs(b - a) + 4.0 * abs(a) ** 2:
        try:
            return complex(_kummer_asymptotic(a, b, x, tol))
        except ConvergenceError:
            pass
    try:
        return complex(_kummer_series(a, b, x, tol, max_terms))
    except ConvergenceError:
        if abs(x) > KUMMER_ASYMPTOTIC_RADIUS:
            return complex(_kummer_asymptotic(a, b, x, tol))
        raise

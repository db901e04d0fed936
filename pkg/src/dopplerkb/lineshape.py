"""Absorption line shapes: Voigt, soft-collision (Galatry) and its expansion.

All public functions take ordinary frequencies in Hz. Absorbances are
normalised so that a pure Doppler profile (no collisions, no friction) peaks
at ``amplitude`` on line centre; the instrument-independent prefactor of the
absorption coefficient is lumped into ``amplitude``.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize

from . import constants
from .specfun import ConvergenceError, INV_SQRT_PI, faddeeva, kummer_1f1, w1

__all__ = [
    "LineShapeParams",
    "GasConditions",
    "reduced_coordinate",
    "voigt_absorbance",
    "galatry_absorbance_expansion",
    "galatry_absorbance_exact",
    "galatry_absorbance_kummer",
    "absorbance",
    "transmission",
    "diffusion_coefficient",
    "friction_coefficient",
    "mean_free_path",
    "theta_from_conditions",
    "theta_from_mean_free_path",
    "fwhm",
    "MAX_EXPANSION_THETA",
]

MAX_EXPANSION_THETA = 0.01
# integrand envelope cut-off for the exact profile: e^-37.5 ~ 5e-17
_LOG_ENVELOPE_CUTOFF = -37.5


@dataclass(frozen=True)
class LineShapeParams:
    """Parameters of a single absorption line.

    Attributes
    ----------
    doppler_hwhm_e : float
        Doppler e-fold half-width (Hz).
    homogeneous_hw : float
        Collisional (Lorentzian) half-width (Hz).
    center : float
        Line centre relative to the scan origin (Hz).
    amplitude : float
        Peak absorbance of the pure Doppler profile.
    theta : float
        Dynamical friction coefficient in units of the Doppler width.
    baseline_offset, baseline_slope : float
        Linear baseline added in absorbance units (slope per Hz).
    """

    doppler_hwhm_e: float
    homogeneous_hw: float = 0.0
    center: float = 0.0
    amplitude: float = 1.0
    theta: float = 0.0
    baseline_offset: float = 0.0
    baseline_slope: float = 0.0

    def __post_init__(self):
        if not self.doppler_hwhm_e > 0:
            raise ValueError("doppler_hwhm_e must be > 0")
        if self.homogeneous_hw < 0:
            raise ValueError("homogeneous_hw must be >= 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            "doppler_hwhm_e": self.doppler_hwhm_e,
            "homogeneous_hw": self.homogeneous_hw,
            "center": self.center,
            "amplitude": self.amplitude,
            "theta": self.theta,
            "baseline_offset": self.baseline_offset,
            "baseline_slope": self.baseline_slope,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class GasConditions:
    """Thermodynamic state of the absorbing gas (SI units).

    ``diffusion_d0`` is the self-diffusion coefficient at ``reference_pressure``.
    """

    pressure: float
    temperature: float = constants.T_WATER_TRIPLE_ICE
    molecular_mass: float = constants.MASS_NH3
    diffusion_d0: float = constants.D0_NH3
    reference_pressure: float = constants.ATM
    wavelength: float = constants.C / constants.NU0_SAQ63

    def __post_init__(self):
        for name in (
            "pressure",
            "temperature",
            "molecular_mass",
            "diffusion_d0",
            "reference_pressure",
            "wavelength",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


def reduced_coordinate(params, nu):
    """Return ``zeta = ((nu - center) + i gamma) / doppler_hwhm_e``."""
    nu = np.asarray(nu, dtype=float)
    xi = (nu - params.center) / params.doppler_hwhm_e
    eta = params.homogeneous_hw / params.doppler_hwhm_e
    return xi + 1j * eta


def _baseline(params, nu):
    return params.baseline_offset + params.baseline_slope * np.asarray(nu, dtype=float)


def voigt_absorbance(params, nu):
    """Voigt absorbance ``amplitude * Re w(zeta)`` plus baseline."""
    zeta = reduced_coordinate(params, nu)
    return params.amplitude * faddeeva(zeta).real + _baseline(params, nu)


def galatry_absorbance_expansion(params, nu):
    """First-order small-friction Galatry absorbance.

    ``amplitude * (Re w(zeta) + theta/12 Re w1(zeta))`` plus baseline. Raises
    ``ValueError`` for ``theta > MAX_EXPANSION_THETA``.
    """
    if params.theta > MAX_EXPANSION_THETA:
        raise ValueError(
            f"theta={params.theta:g} exceeds the expansion domain ({MAX_EXPANSION_THETA})"
        )
    zeta = reduced_coordinate(params, nu)
    w = faddeeva(zeta)
    shape = w.real + (params.theta / 12.0) * w1(zeta, w).real
    return params.amplitude * shape + _baseline(params, nu)


def _friction_exponent(s, theta):
    """``(1 - theta s - exp(-theta s)) / (2 theta**2)`` without cancellation."""
    x = theta * s
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    s = np.broadcast_to(np.asarray(s, dtype=float), x.shape)
    small = np.abs(x) < 0.1
    xs = x[small]
    # (x + expm1(-x)) / theta^2 = s^2/2 - theta s^3/6 + ...; no division, so
    # subnormal theta is safe
    series = np.zeros_like(xs)
    term = s[small] ** 2 / 2.0
    for k in range(3, 20):
        series += term
        term = -term * xs / k
    out[small] = -series / 2.0
    xl = x[~small]
    out[~small] = -(xl + np.expm1(-xl)) / (2.0 * theta * theta)
    return out


def _log_envelope(s, eta, theta):
    return -eta * s + float(_friction_exponent(np.array([s]), theta)[0])


def _integration_limit(eta, theta):
    upper = 16.0
    while _log_envelope(upper, eta, theta) > _LOG_ENVELOPE_CUTOFF:
        upper *= 2.0
        if upper > 1e12:
            raise ConvergenceError("correlation function does not decay")
    return optimize.brentq(
        lambda s: _log_envelope(s, eta, theta) - _LOG_ENVELOPE_CUTOFF, 0.0, upper, xtol=1e-6
    )


def galatry_absorbance_exact(params, nu, epsrel=1e-12):
    """Galatry absorbance by adaptive quadrature of the correlation function.

    Integrates ``Re int_0^inf exp(i xi s - eta s) phi(s) ds`` with the soft-collision
    memory factor ``phi(s) = exp((1 - theta s - e^{-theta s}) / (2 theta**2))`` in
    Doppler-scaled time ``s``. With ``theta == 0`` the Voigt profile is returned.
    """
    if params.theta == 0:
        return voigt_absorbance(params, nu)
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    zeta = reduced_coordinate(params, nu_arr)
    eta = float(zeta.imag[0]) if zeta.size else 0.0
    theta = params.theta
    upper = _integration_limit(eta, theta)

    def envelope(s):
        return math.exp(_log_envelope(s, eta, theta))

    out = np.empty(nu_arr.shape)
    for i, xi in enumerate(zeta.real):
        # far-wing points hit the roundoff floor; the error check below decides
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if xi == 0.0:
                val, err = integrate.quad(envelope, 0.0, upper, epsabs=1e-15, epsrel=epsrel, limit=500)
            else:
                val, err = integrate.quad(
                    envelope,
                    0.0,
                    upper,
                    weight="cos",
                    wvar=abs(xi),
                    epsabs=1e-15,
                    epsrel=epsrel,
                    limit=500,
                )
        if not np.isfinite(val) or err > 1e-8 * max(abs(val), 1e-6):
            raise ConvergenceError(f"quadrature did not converge at xi={xi:g}")
        out[i] = val
    result = params.amplitude * INV_SQRT_PI * out + _baseline(params, nu_arr)
    return result if np.ndim(nu) else float(result[0])


def galatry_absorbance_kummer(params, nu):
    """Galatry absorbance through the confluent hypergeometric closed form.

    ``amplitude/sqrt(pi) Re[1F1(1; 1 + y/theta; 1/(2 theta**2)) / y]`` with
    ``y = 1/(2 theta) + eta - i xi``. Practical for ``theta`` down to ~1e-4;
    below that the series needs ~10/theta terms per point.
    """
    if params.theta == 0:
        return voigt_absorbance(params, nu)
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    zeta = reduced_coordinate(params, nu_arr)
    theta = params.theta
    x = 1.0 / (2.0 * theta * theta)
    out = np.empty(nu_arr.shape)
    for i, z in enumerate(zeta):
        y = 1.0 / (2.0 * theta) + z.imag - 1j * z.real
        out[i] = (kummer_1f1(1.0, 1.0 + y / theta, x) / y).real
    result = params.amplitude * INV_SQRT_PI * out + _baseline(params, nu_arr)
    return result if np.ndim(nu) else float(result[0])


_MODELS = {
    "voigt": voigt_absorbance,
    "galatry": galatry_absorbance_expansion,
    "galatry_expansion": galatry_absorbance_expansion,
    "galatry_exact": galatry_absorbance_exact,
    "galatry_kummer": galatry_absorbance_kummer,
}


def absorbance(params, nu, model="galatry"):
    """Dispatch to a named profile (``voigt``, ``galatry``, ``galatry_exact``, ...)."""
    try:
        func = _MODELS[model]
    except KeyError:
        raise ValueError(f"unknown line-shape model {model!r}") from None
    return func(params, nu)


def transmission(absorbance):
    """Lambert-Beer transmission ``exp(-A)``."""
    a = np.asarray(absorbance, dtype=float)
    if np.any(a < 0):
        raise ValueError("absorbance must be >= 0")
    t = np.exp(-a)
    return t if t.ndim else float(t)


def diffusion_coefficient(cond):
    """Diffusion coefficient at ``cond.pressure`` (m^2/s), scaled as 1/P."""
    return cond.diffusion_d0 * cond.reference_pressure / cond.pressure


def friction_coefficient(cond, k_b=constants.K_B_CODATA2006):
    """Dynamical friction coefficient ``beta_d = k_B T / (m D)`` in s^-1."""
    return k_b * cond.temperature / (cond.molecular_mass * diffusion_coefficient(cond))


def mean_free_path(cond, k_b=constants.K_B_CODATA2006):
    """``l_m = sqrt(3 m / k_B T) * D`` (m)."""
    return math.sqrt(3.0 * cond.molecular_mass / (k_b * cond.temperature)) * diffusion_coefficient(
        cond
    )


def theta_from_conditions(cond, doppler_hwhm_e, k_b=constants.K_B_CODATA2006):
    """Friction parameter ``theta = beta_d / (2 pi doppler_hwhm_e)``."""
    if not doppler_hwhm_e > 0:
        raise ValueError("doppler_hwhm_e must be > 0")
    return friction_coefficient(cond, k_b) / (2.0 * math.pi * doppler_hwhm_e)


def theta_from_mean_free_path(cond, k_b=constants.K_B_CODATA2006):
    """``theta = sqrt(3 / 8 pi^2) * wavelength / l_m``.

    Equals :func:`theta_from_conditions` when the Doppler width is the
    thermal one for the same temperature, mass and wavelength.
    """
    return math.sqrt(3.0 / (8.0 * math.pi**2)) * cond.wavelength / mean_free_path(cond, k_b)


def fwhm(nu, profile):
    """Full width at half maximum of a sampled single-peaked profile.

    Half-maximum crossings are located by linear interpolation.
    """
    nu = np.asarray(nu, dtype=float)
    y = np.asarray(profile, dtype=float)
    i = int(np.argmax(y))
    half = y[i] / 2.0
    left = np.nonzero(y[:i] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("profile does not fall below half maximum on both sides")
    l1 = left[-1]
    r1 = i + right[0]
    nl = nu[l1] + (half - y[l1]) * (nu[l1 + 1] - nu[l1]) / (y[l1 + 1] - y[l1])
    nr = nu[r1 - 1] + (half - y[r1 - 1]) * (nu[r1] - nu[r1 - 1]) / (y[r1] - y[r1 - 1])
    return nr - nl

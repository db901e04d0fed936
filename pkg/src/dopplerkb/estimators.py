"""scikit-learn style wrappers around the spectrum fit and the campaign procedure."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from . import constants
from .fitting import FitConfig, fit_all, fit_spectrum, search_g
from .synth import Spectrum, SpectrumMeta
from .thermometry import LineReference, kb_from_width

__all__ = ["SpectrumFitter", "DopplerThermometer"]


def _fit_config(est):
    return FitConfig(
        amplitude_per_pa=est.amplitude_per_pa,
        temperature=est.temperature,
        molecular_mass=est.molecular_mass,
        nu0=est.nu0,
        diffusion_d0=est.diffusion_d0,
    )


class SpectrumFitter(RegressorMixin, BaseEstimator):
    """Fit one transmission scan with the collisional width tied to ``g * P``.

    ``X`` is the frequency offset (Hz), shape ``(n,)`` or ``(n, 1)``; ``y`` the
    detected signal. ``sample_weight`` is ``1 / sigma**2`` of the signal; without
    it every point gets unit weight, which only rescales the error bars.

    Attributes
    ----------
    result_ : FitResult
    doppler_width_ : float
    doppler_width_error_ : float
    pressure_ : float
    """

    def __init__(
        self,
        g=124e3,
        model="galatry",
        amplitude_per_pa=0.8,
        temperature=constants.T_WATER_TRIPLE_ICE,
        molecular_mass=constants.MASS_NH3,
        nu0=constants.NU0_SAQ63,
        diffusion_d0=constants.D0_NH3,
    ):
        self.g = g
        self.model = model
        self.amplitude_per_pa = amplitude_per_pa
        self.temperature = temperature
        self.molecular_mass = molecular_mass
        self.nu0 = nu0
        self.diffusion_d0 = diffusion_d0

    @staticmethod
    def _freq(X):
        X = check_array(X, ensure_2d=False, dtype=float)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError("X must hold a single frequency column")
            X = X[:, 0]
        return X

    def fit(self, X, y, sample_weight=None):
        nu = self._freq(X)
        y = check_array(y, ensure_2d=False, dtype=float)
        check_consistent_length(nu, y)
        if sample_weight is None:
            sigma = np.ones_like(y)
        else:
            sw = check_array(sample_weight, ensure_2d=False, dtype=float)
            check_consistent_length(nu, sw)
            if np.any(sw <= 0):
                raise ValueError("sample_weight must be > 0")
            sigma = 1.0 / np.sqrt(sw)
        order = np.argsort(nu, kind="stable")
        s = Spectrum(nu[order], y[order], sigma[order], SpectrumMeta(float("nan"), self.temperature, float(np.ptp(nu)), -1))
        self.result_ = fit_spectrum(s, self.g, self.model, _fit_config(self))
        self.doppler_width_ = self.result_.width
        self.doppler_width_error_ = self.result_.width_error
        self.pressure_ = self.result_.pressure
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Model signal ``exp(-(A + baseline))`` at the frequencies ``X``."""
        check_is_fitted(self, "result_")
        from . import lineshape

        nu = self._freq(X)
        kind = "galatry_expansion" if self.result_.model == "galatry" else "voigt"
        return np.exp(-lineshape.absorbance(self.result_.params, nu, kind))


class DopplerThermometer(BaseEstimator):
    """Shared-g campaign analysis returning a Boltzmann constant.

    ``fit`` takes a list of :class:`~dopplerkb.synth.Spectrum`; ``predict``
    refits new spectra at the learned ``g_star_`` and returns their widths.

    Attributes
    ----------
    campaign_ : CampaignResult
    g_star_ : float
    width_ : float
    kb_ : float
    kb_rel_sigma_ : float
    """

    def __init__(
        self,
        model="galatry",
        g_bracket=(60e3, 200e3),
        amplitude_per_pa=0.8,
        temperature=constants.T_WATER_TRIPLE_ICE,
        molecular_mass=constants.MASS_NH3,
        nu0=constants.NU0_SAQ63,
        diffusion_d0=constants.D0_NH3,
        workers=1,
    ):
        self.model = model
        self.g_bracket = g_bracket
        self.amplitude_per_pa = amplitude_per_pa
        self.temperature = temperature
        self.molecular_mass = molecular_mass
        self.nu0 = nu0
        self.diffusion_d0 = diffusion_d0
        self.workers = workers

    @staticmethod
    def _check_spectra(spectra):
        spectra = list(spectra)
        if not spectra or not all(isinstance(s, Spectrum) for s in spectra):
            raise ValueError("expected a non-empty sequence of Spectrum objects")
        return spectra

    def fit(self, spectra, y=None):
        spectra = self._check_spectra(spectra)
        res = search_g(spectra, self.model, self.g_bracket, _fit_config(self), workers=self.workers)
        ref = LineReference(self.nu0, self.molecular_mass, self.temperature)
        self.campaign_ = res
        self.g_star_ = res.g_star
        self.width_ = res.width_mean
        self.kb_ = kb_from_width(res.width_mean, ref)
        self.kb_rel_sigma_ = 2.0 * res.width_sigma_total / res.width_mean
        return self

    def predict(self, spectra):
        check_is_fitted(self, "g_star_")
        spectra = self._check_spectra(spectra)
        fits = fit_all(spectra, self.g_star_, self.model, _fit_config(self), self.workers)
        return np.array([f.width for f in fits])

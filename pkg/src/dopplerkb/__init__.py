"""Doppler-broadening thermometry on molecular absorption lines.

Line shapes (Voigt, Galatry), hyperfine broadening, shared-g campaign fits
and the k_B error budget, exercised on synthetic spectra.
"""

from .fitting import FitConfig, FitResult, CampaignResult, fit_spectrum, search_g, weighted_mean_width
from .hyperfine import GROUND_SAQ63, UPPER_SAQ63, HyperfineConstants, StickSpectrum, broadening_correction, stick_spectrum
from .lineshape import GasConditions, LineShapeParams, absorbance, theta_from_conditions
from .specfun import faddeeva, kummer_1f1, w1
from .synth import CampaignConfig, Spectrum, synth_campaign, synth_spectrum
from .thermometry import LineReference, apply_ledger, default_ledger, kb_from_width, width_from_kb

__version__ = "0.1.0"

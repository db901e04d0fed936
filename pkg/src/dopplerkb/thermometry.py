"""Doppler width <-> Boltzmann constant, systematic ledger, line-shape bias study.

The Doppler e-fold half-width of a line at ``nu0`` is
``width = nu0 sqrt(2 k_B T / (m c^2))``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import constants

__all__ = [
    "LineReference",
    "SAQ63_REFERENCE",
    "kb_from_width",
    "width_from_kb",
    "LedgerEntry",
    "CorrectionLedger",
    "default_ledger",
    "apply_ledger",
    "BiasPoint",
    "voigt_galatry_bias",
    "simulated_bias_curve",
]


@dataclass(frozen=True)
class LineReference:
    """Line frequency (Hz), molecular mass (kg) and gas temperature (K)."""

    nu0: float = constants.NU0_SAQ63
    molecular_mass: float = constants.MASS_NH3
    temperature: float = constants.T_WATER_TRIPLE_ICE

    def __post_init__(self):
        if not (self.nu0 > 0 and self.molecular_mass > 0 and self.temperature > 0):
            raise ValueError("nu0, molecular_mass and temperature must be > 0")


SAQ63_REFERENCE = LineReference()


def kb_from_width(width, ref=SAQ63_REFERENCE):
    """Boltzmann constant (J/K) from a Doppler e-fold half-width (Hz)."""
    if not width > 0:
        raise ValueError("width must be > 0")
    return ref.molecular_mass * constants.C**2 / (2.0 * ref.temperature) * (width / ref.nu0) ** 2


def width_from_kb(kb, ref=SAQ63_REFERENCE):
    """Doppler e-fold half-width (Hz) for a Boltzmann constant ``kb``."""
    if kb < 0:
        raise ValueError("kb must be >= 0")
    return ref.nu0 * math.sqrt(2.0 * kb * ref.temperature / (ref.molecular_mass * constants.C**2))


# --- systematic ledger --------------------------------------------------------

KINDS = ("correction", "contribution", "bound")


@dataclass(frozen=True)
class LedgerEntry:
    """One row of a line-width error budget, in ppm of the width.

    ``kind``:
      * ``correction``: ``width_ppm`` is a known broadening removed from k_B;
      * ``contribution``: an effect already inside the line model or
        negligible; only its uncertainty counts;
      * ``bound``: an upper limit; its uncertainty is taken as rectangular,
        ``width_uncertainty_ppm / sqrt(3)``.
    """

    name: str
    width_ppm: float
    width_uncertainty_ppm: float
    kind: str = "correction"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.width_uncertainty_ppm < 0:
            raise ValueError("uncertainty must be >= 0")

    @property
    def standard_uncertainty_ppm(self):
        if self.kind == "bound":
            return self.width_uncertainty_ppm / math.sqrt(3.0)
        return self.width_uncertainty_ppm

    @property
    def kb_ppm(self):
        return -2.0 * self.width_ppm if self.kind == "correction" else 0.0

    @property
    def kb_uncertainty_ppm(self):
        return 2.0 * self.standard_uncertainty_ppm

    def to_dict(self):
        return {
            "name": self.name,
            "width_ppm": self.width_ppm,
            "uncertainty_ppm": self.width_uncertainty_ppm,
            "kind": self.kind,
        }

    @classmethod
    def from_dict(cls, d):
        missing = {"name", "width_ppm", "uncertainty_ppm", "kind"} - set(d)
        if missing:
            raise ValueError(f"ledger entry missing {sorted(missing)}")
        return cls(str(d["name"]), float(d["width_ppm"]), float(d["uncertainty_ppm"]), str(d["kind"]))


@dataclass
class CorrectionLedger:
    entries: list = field(default_factory=list)

    def to_list(self):
        return [e.to_dict() for e in self.entries]

    @classmethod
    def from_list(cls, rows):
        if not isinstance(rows, list):
            raise ValueError("ledger must be a JSON list of entries")
        return cls([LedgerEntry.from_dict(r) for r in rows])


def default_ledger():
    """Systematic budget of the ammonia measurement (width level, ppm)."""
    return CorrectionLedger(
        [
            LedgerEntry("Collisional effects (LDM and homogeneous width, 0.25-2.5 Pa)", 0.0, 70.0, "contribution"),
            LedgerEntry("Hyperfine structure of the absorption line", 4.355, 0.015, "correction"),
            LedgerEntry("Gas purity (impurity partial pressure)", 0.0, 10.0, "bound"),
            LedgerEntry("Non-linearity of the photodetector", 0.0, 10.0, "bound"),
            LedgerEntry("Saturation broadening of the absorption", 0.0, 10.0, "bound"),
            LedgerEntry("Residual optical offset", 0.0, 1.0, "bound"),
            LedgerEntry("Amplitude modulation @ 40 kHz", 0.8, 0.08, "contribution"),
            LedgerEntry("Differential saturation of hyperfine components", 0.0, 0.3, "bound"),
            LedgerEntry("Laser linewidth", 0.0, 0.2, "bound"),
            LedgerEntry("Temperature of the gas", 0.0, 1.25, "contribution"),
            LedgerEntry("Linearity and accuracy of the laser frequency scale", 0.0, 0.01, "bound"),
            LedgerEntry("Transit effect (laser beam geometry)", 0.0, 0.0, "contribution"),
        ]
    )


def apply_ledger(kb_raw, ledger):
    """Apply corrections to ``kb_raw``; combine uncertainties in quadrature.

    Returns ``(kb_corrected, combined_relative_uncertainty)``; the relative
    uncertainty is at the k_B level (twice the width-level figure).
    """
    factor = 1.0
    var = []
    for e in ledger.entries:
        factor *= 1.0 + e.kb_ppm * 1e-6
        var.append(e.kb_uncertainty_ppm**2)
    return kb_raw * factor, math.sqrt(math.fsum(var)) * 1e-6


# --- Voigt versus Galatry ---------------------------------------------------------


@dataclass
class BiasPoint:
    p_max: float
    bias_ppm: float
    sigma_ppm: float
    n_spectra: int
    kb_voigt: float
    kb_galatry: float
    g_voigt: float
    g_galatry: float


def voigt_galatry_bias(
    spectra,
    p_max_grid,
    fit_config,
    g_bracket,
    ref=SAQ63_REFERENCE,
    shared_g=False,
    min_spectra=10,
    workers=1,
):
    """k_B difference between Voigt and Galatry analyses of pressure sub-ensembles.

    For each ``p_max`` the spectra with nominal pressure ``<= p_max`` go through
    the full shared-g search and weighted mean twice. With ``shared_g`` the
    Voigt pass reuses the Galatry ``g*`` instead of running its own search.
    ``bias_ppm = (kB_voigt - kB_galatry) / kB_galatry * 1e6``; ``sigma_ppm`` is
    the statistical k_B uncertainty of the Galatry pass.
    """
    from .fitting import fit_all, search_g, weighted_mean_width

    out = []
    for p_max in p_max_grid:
        subset = [s for s in spectra if s.meta.pressure <= p_max * (1 + 1e-9)]
        if len(subset) < min_spectra:
            raise ValueError(f"only {len(subset)} spectra with P <= {p_max} Pa")
        gal = search_g(subset, "galatry", g_bracket, fit_config, workers=workers)
        if shared_g:
            fits = fit_all(subset, gal.g_star, "voigt", fit_config, workers=workers)
            mean, _, _ = weighted_mean_width(fits)
            g_v = gal.g_star
        else:
            voi = search_g(subset, "voigt", g_bracket, fit_config, workers=workers)
            mean, g_v = voi.width_mean, voi.g_star
        kb_v = kb_from_width(mean, ref)
        kb_g = kb_from_width(gal.width_mean, ref)
        out.append(
            BiasPoint(
                p_max=float(p_max),
                bias_ppm=(kb_v - kb_g) / kb_g * 1e6,
                sigma_ppm=2.0 * gal.width_sigma / gal.width_mean * 1e6,
                n_spectra=len(subset),
                kb_voigt=kb_v,
                kb_galatry=kb_g,
                g_voigt=g_v,
                g_galatry=gal.g_star,
            )
        )
    return out


def simulated_bias_curve(pressures, cfg, fit_config, ref=SAQ63_REFERENCE):
    """k_B bias (ppm) from fitting noiseless Galatry spectra with a Voigt profile.

    The Voigt fit keeps the collisional width at its true value (``g_truth``),
    so the narrowing shows up entirely as a smaller Doppler width.
    """
    from .fitting import fit_spectrum
    from .synth import synth_spectrum

    out = []
    kb_true = cfg.kb_truth
    for p in pressures:
        s = synth_spectrum(cfg.__class__(**{**cfg.to_dict(), "baseline_drift": 0.0}), p, 0, noise=False)
        fit = fit_spectrum(s, cfg.g_truth, "voigt", fit_config)
        out.append((float(p), (kb_from_width(fit.params.doppler_hwhm_e, ref) / kb_true - 1.0) * 1e6))
    return np.array(out)

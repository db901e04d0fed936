"""Synthetic linear-absorption spectra and measurement campaigns.

Spectra are generated in transmission space::

    signal = I0 (1 + f sin(2 pi nu / P_fringe + phi)) exp(-A(nu)) + noise

with ``A`` the first-order Galatry absorbance (optionally the hyperfine
composite) and heteroscedastic Gaussian noise
``sigma = (I0 / snr) ((1 - floor) exp(-A) + floor)``: the full-absorption
depth ``I0`` over the largest noise equals ``snr``, and noise falls where
the gas absorbs.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants, hyperfine, lineshape
from .lineshape import GasConditions, LineShapeParams
from .thermometry import LineReference, width_from_kb

__all__ = [
    "CampaignConfig",
    "SpectrumMeta",
    "Spectrum",
    "truth_params",
    "frequency_grid",
    "synth_spectrum",
    "iter_campaign",
    "synth_campaign",
    "campaign_seeds",
]


@dataclass
class CampaignConfig:
    """Generator settings for a synthetic campaign.

    Frequencies in Hz, pressures in Pa. ``amplitude_per_pa`` is the peak
    absorbance of the pure Doppler profile per Pa; ``g_truth`` the collisional
    half-width per Pa.
    """

    pressures: list = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0, 1.3, 1.6, 2.0, 2.5])
    spectra_per_pressure: int = 25
    snr_at_full_absorption: float = 1000.0
    temperature: float = constants.T_WATER_TRIPLE_ICE
    kb_truth: float = constants.K_B_CODATA2006
    molecular_mass: float = constants.MASS_NH3
    nu0: float = constants.NU0_SAQ63
    baseline_drift: float = 1e-4
    fringe_period: float = 300e6
    g_truth: float = 124e3
    amplitude_per_pa: float = 0.8
    include_hyperfine: bool = False
    include_ldm: bool = True
    diffusion_d0: float = constants.D0_NH3
    reference_pressure: float = constants.ATM
    n_points: int = 500
    scan_span: float = 250e6
    noise_floor: float = 0.1
    center_jitter: float = 1e6
    incident_power: float = 1.0

    def __post_init__(self):
        self.pressures = [float(p) for p in self.pressures]
        if not self.pressures:
            raise ValueError("pressures must not be empty")
        if any(not (0 < p <= 10) for p in self.pressures):
            raise ValueError("pressures must lie in (0, 10] Pa")
        if self.spectra_per_pressure < 1:
            raise ValueError("spectra_per_pressure must be >= 1")
        if not self.snr_at_full_absorption > 0:
            raise ValueError("snr_at_full_absorption must be > 0")
        if self.n_points < 16:
            raise ValueError("n_points must be >= 16")
        for name in ("temperature", "kb_truth", "molecular_mass", "nu0", "scan_span", "incident_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 <= self.noise_floor <= 1:
            raise ValueError("noise_floor must be in [0, 1]")
        if self.baseline_drift < 0 or self.g_truth < 0 or self.amplitude_per_pa < 0:
            raise ValueError("baseline_drift, g_truth and amplitude_per_pa must be >= 0")

    @property
    def reference(self):
        return LineReference(self.nu0, self.molecular_mass, self.temperature)

    @property
    def doppler_truth(self):
        return width_from_kb(self.kb_truth, self.reference)

    def gas(self, pressure):
        return GasConditions(
            pressure=pressure,
            temperature=self.temperature,
            molecular_mass=self.molecular_mass,
            diffusion_d0=self.diffusion_d0,
            reference_pressure=self.reference_pressure,
            wavelength=constants.C / self.nu0,
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown campaign keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class SpectrumMeta:
    pressure: float
    temperature: float
    scan_span: float
    seed: int
    truth: LineShapeParams = None

    def to_dict(self):
        d = {
            "pressure_pa": self.pressure,
            "temperature_k": self.temperature,
            "scan_span_hz": self.scan_span,
            "seed": self.seed,
        }
        if self.truth is not None:
            d["truth"] = self.truth.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        truth = d.get("truth")
        return cls(
            pressure=float(d["pressure_pa"]),
            temperature=float(d["temperature_k"]),
            scan_span=float(d.get("scan_span_hz", 0.0)),
            seed=int(d.get("seed", -1)),
            truth=LineShapeParams.from_dict(truth) if truth else None,
        )


@dataclass
class Spectrum:
    """A sampled absorption scan with its per-point noise estimate."""

    freq_offsets: np.ndarray
    signal: np.ndarray
    sigma: np.ndarray
    meta: SpectrumMeta

    def __post_init__(self):
        self.freq_offsets = np.asarray(self.freq_offsets, dtype=float)
        self.signal = np.asarray(self.signal, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        n = self.freq_offsets.size
        if n < 16:
            raise ValueError("a spectrum needs at least 16 points")
        if self.signal.shape != (n,) or self.sigma.shape != (n,):
            raise ValueError("freq_offsets, signal and sigma must have equal length")
        if np.any(np.diff(self.freq_offsets) <= 0):
            raise ValueError("freq_offsets must be strictly increasing")
        if np.any(~(self.sigma > 0)):
            raise ValueError("sigma must be > 0 everywhere")

    def __len__(self):
        return self.freq_offsets.size


def truth_params(cfg, pressure, center=0.0):
    """Line parameters the generator uses at ``pressure``."""
    doppler = cfg.doppler_truth
    theta = (
        lineshape.theta_from_conditions(cfg.gas(pressure), doppler, k_b=cfg.kb_truth)
        if cfg.include_ldm
        else 0.0
    )
    return LineShapeParams(
        doppler_hwhm_e=doppler,
        homogeneous_hw=cfg.g_truth * pressure,
        center=center,
        amplitude=cfg.amplitude_per_pa * pressure,
        theta=theta,
    )


def _sticks():
    return hyperfine.stick_spectrum(hyperfine.GROUND_SAQ63, hyperfine.UPPER_SAQ63)


def frequency_grid(cfg):
    step = cfg.scan_span / cfg.n_points
    return (np.arange(cfg.n_points) - (cfg.n_points - 1) / 2.0) * step


def synth_spectrum(cfg, pressure, seed, noise=True):
    """Generate one spectrum; a pure function of ``(cfg, pressure, seed)``."""
    if not 0 < pressure <= 10:
        raise ValueError("pressure must lie in (0, 10] Pa")
    rng = np.random.default_rng(seed)
    nu = frequency_grid(cfg)
    center = rng.uniform(-cfg.center_jitter, cfg.center_jitter) if cfg.center_jitter else 0.0
    phase = rng.uniform(0.0, 2.0 * math.pi)
    params = truth_params(cfg, pressure, center)
    if cfg.include_hyperfine:
        sticks = _sticks()
        a = np.zeros_like(nu)
        for off, inten in zip(sticks.offsets, sticks.intensities):
            a += inten * lineshape.galatry_absorbance_expansion(params.replace(center=center + off), nu)
    else:
        a = lineshape.galatry_absorbance_expansion(params, nu)
    trans = np.exp(-a)
    incident = cfg.incident_power * (
        1.0 + cfg.baseline_drift * np.sin(2.0 * math.pi * nu / cfg.fringe_period + phase)
    )
    sigma = (cfg.incident_power / cfg.snr_at_full_absorption) * (
        (1.0 - cfg.noise_floor) * trans + cfg.noise_floor
    )
    signal = incident * trans
    if noise:
        signal = signal + sigma * rng.standard_normal(nu.size)
    meta = SpectrumMeta(pressure, cfg.temperature, cfg.scan_span, int(seed), params)
    return Spectrum(nu, signal, sigma, meta)


def campaign_seeds(cfg, master_seed):
    """Per-spectrum ``(pressure, seed)`` pairs, pressure-major order."""
    ss = np.random.SeedSequence(master_seed)
    n = len(cfg.pressures) * cfg.spectra_per_pressure
    seeds = [int(s.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for s in ss.spawn(n)]
    out = []
    i = 0
    for p in cfg.pressures:
        for _ in range(cfg.spectra_per_pressure):
            out.append((p, seeds[i]))
            i += 1
    return out


def iter_campaign(cfg, master_seed, noise=True):
    """Yield the campaign one spectrum at a time (bounded memory)."""
    for p, seed in campaign_seeds(cfg, master_seed):
        yield synth_spectrum(cfg, p, seed, noise=noise)


def synth_campaign(cfg, master_seed, noise=True):
    """All spectra of a campaign as a list."""
    return list(iter_campaign(cfg, master_seed, noise=noise))

"""File formats: run config, spectrum CSV + sidecar, campaign manifest, ledger, bias CSV."""

import csv
import json
import os

import numpy as np

from .fitting import FitConfig
from .hyperfine import GROUND_SAQ63, UPPER_SAQ63, HyperfineConstants
from .synth import CampaignConfig, Spectrum, SpectrumMeta
from .thermometry import CorrectionLedger

__all__ = [
    "CONFIG_VERSION",
    "ConfigError",
    "RunConfig",
    "load_json",
    "dump_json",
    "load_run_config",
    "write_spectrum",
    "read_spectrum",
    "write_campaign",
    "read_campaign",
    "load_hyperfine_constants",
    "load_ledger",
    "write_ledger",
    "write_bias_csv",
    "read_bias_csv",
    "write_table_csv",
]

CONFIG_VERSION = 1
SPECTRUM_HEADER = ["freq_offset_hz", "signal", "sigma"]
BIAS_HEADER = ["p_max_pa", "bias_ppm", "sigma_ppm"]
MANIFEST_NAME = "manifest.json"
FRINGE_NOTE = "baseline: sinusoidal fringe stand-in; the experimental baseline shape is undocumented"


class ConfigError(ValueError):
    """Malformed, missing or schema-violating input."""


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _expect_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


_ANALYSIS_DEFAULTS = {
    "g_bracket": [60e3, 200e3],
    "p_max_grid": [0.5, 0.75, 1.0, 1.3, 1.6, 2.0, 2.5],
    "n_replicates": 200,
    "n_subsets": 4,
    "per_fit_duration_s": 42.0,
}


class RunConfig:
    """Fully resolved run settings: campaign, extractor and analysis blocks.

    JSON layout::

        {"version": 1, "campaign": {...}, "fit": {...}, "analysis": {...}}

    Every block is optional; missing keys take defaults, unknown keys are
    rejected.
    """

    def __init__(self, campaign=None, fit=None, analysis=None):
        self.campaign = campaign or CampaignConfig()
        self.fit = fit or FitConfig.from_campaign(self.campaign)
        self.analysis = dict(_ANALYSIS_DEFAULTS)
        self.analysis.update(analysis or {})

    @classmethod
    def from_dict(cls, d):
        _expect_keys(d, {"version", "campaign", "fit", "analysis"}, "config")
        if d.get("version") != CONFIG_VERSION:
            raise ConfigError(f"config version must be {CONFIG_VERSION}, got {d.get('version')!r}")
        try:
            camp = d.get("campaign", {})
            _expect_keys(camp, CampaignConfig.__dataclass_fields__, "campaign")
            campaign = CampaignConfig.from_dict(camp)
            fit_d = d.get("fit", {})
            _expect_keys(fit_d, FitConfig.__dataclass_fields__, "fit")
            base = FitConfig.from_campaign(campaign).to_dict()
            base.update(fit_d)
            fit = FitConfig(**base)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        analysis = d.get("analysis", {})
        _expect_keys(analysis, _ANALYSIS_DEFAULTS, "analysis")
        out = cls(campaign, fit, analysis)
        g = out.analysis["g_bracket"]
        if not (isinstance(g, list) and len(g) == 2 and 0 <= g[0] < g[1]):
            raise ConfigError("analysis.g_bracket must be [lo, hi] with 0 <= lo < hi")
        return out

    def to_dict(self):
        return {
            "version": CONFIG_VERSION,
            "campaign": self.campaign.to_dict(),
            "fit": self.fit.to_dict(),
            "analysis": dict(self.analysis),
        }


def load_run_config(path=None):
    return RunConfig() if path is None else RunConfig.from_dict(load_json(path))


# --- spectra ------------------------------------------------------------------------


def write_spectrum(s, csv_path):
    """CSV ``freq_offset_hz,signal,sigma`` plus a ``.json`` sidecar next to it."""
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_HEADER)
        for row in zip(s.freq_offsets, s.signal, s.sigma):
            w.writerow([repr(float(v)) for v in row])
    dump_json(s.meta.to_dict(), os.path.splitext(csv_path)[0] + ".json")


def read_spectrum(csv_path):
    try:
        with open(csv_path, encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {csv_path}") from exc
    if not rows or rows[0] != SPECTRUM_HEADER:
        raise ConfigError(f"{csv_path}: header must be {','.join(SPECTRUM_HEADER)}")
    try:
        data = np.array(rows[1:], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{csv_path}: non-numeric value") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise ConfigError(f"{csv_path}: expected 3 columns")
    meta_d = load_json(os.path.splitext(csv_path)[0] + ".json")
    try:
        meta = SpectrumMeta.from_dict(meta_d)
        return Spectrum(data[:, 0], data[:, 1], data[:, 2], meta)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{csv_path}: {exc}") from exc


def write_campaign(spectra, out_dir, run_config, master_seed):
    """Write each spectrum as it arrives (``spectra`` may be a generator)."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for i, s in enumerate(spectra):
        name = f"spectrum_{i:05d}.csv"
        write_spectrum(s, os.path.join(out_dir, name))
        files.append(name)
    manifest = {
        "version": CONFIG_VERSION,
        "master_seed": master_seed,
        "config": run_config.to_dict(),
        "files": files,
        "notes": [FRINGE_NOTE],
    }
    dump_json(manifest, os.path.join(out_dir, MANIFEST_NAME))
    return manifest


def read_campaign(campaign_dir):
    """Return ``(spectra, manifest)``."""
    path = os.path.join(campaign_dir, MANIFEST_NAME)
    if not os.path.isfile(path):
        raise ConfigError(f"no {MANIFEST_NAME} in {campaign_dir}")
    manifest = load_json(path)
    _expect_keys(manifest, {"version", "master_seed", "config", "files", "notes"}, "manifest")
    files = manifest.get("files") or []
    if not files:
        raise ConfigError(f"{campaign_dir}: manifest lists no spectra")
    spectra = [read_spectrum(os.path.join(campaign_dir, f)) for f in files]
    return spectra, manifest


# --- hyperfine constants, ledger, tables ----------------------------------------------


def load_hyperfine_constants(path=None):
    """``{"version": 1, "lower": {...}, "upper": {...}}`` in kHz; defaults to saQ(6,3)."""
    if path is None:
        return GROUND_SAQ63, UPPER_SAQ63
    d = load_json(path)
    _expect_keys(d, {"version", "lower", "upper"}, "hyperfine constants")
    if d.get("version") != CONFIG_VERSION:
        raise ConfigError(f"hyperfine constants version must be {CONFIG_VERSION}")
    out = []
    for level in ("lower", "upper"):
        block = d.get(level)
        if block is None:
            raise ConfigError(f"hyperfine constants: missing '{level}'")
        _expect_keys(block, {"eqq", "r", "s", "t", "u"}, level)
        if "eqq" not in block:
            raise ConfigError(f"{level}: 'eqq' is required")
        try:
            out.append(HyperfineConstants(**{k: float(v) for k, v in block.items()}))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{level}: {exc}") from exc
    return tuple(out)


def load_ledger(path):
    d = load_json(path)
    try:
        return CorrectionLedger.from_list(d)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def write_ledger(ledger, path):
    dump_json(ledger.to_list(), path)


def write_table_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def write_bias_csv(points, path):
    write_table_csv(path, BIAS_HEADER, [(b.p_max, b.bias_ppm, b.sigma_ppm) for b in points])


def read_bias_csv(path):
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != BIAS_HEADER:
        raise ConfigError(f"{path}: header must be {','.join(BIAS_HEADER)}")
    return np.array(rows[1:], dtype=float)

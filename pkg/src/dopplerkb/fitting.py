"""Per-spectrum fits and the shared-g campaign procedure.

Each spectrum is fitted in absorbance space, ``y = -log(signal)`` with
``sigma_y = sigma / signal``, against::

    y(nu) = a P Re[w(zeta) + theta/12 w1(zeta)] + b0 + b1 u
    zeta  = (nu - c + i g P) / D,   theta = kappa P / D

The free parameters are the pressure-like ``P``, the Doppler width ``D``, the
center ``c`` and the baseline ``b0, b1`` (``u`` is the scan coordinate in
units of 100 MHz). ``a`` (absorbance per Pa), ``g`` and ``kappa`` are held
fixed, so the collisional width and the friction parameter both scale with
the fitted pressure.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constants, lineshape
from .lineshape import GasConditions, LineShapeParams
from .optim import FitFailure, damped_least_squares
from .specfun import faddeeva, faddeeva_deriv, w1, w1_deriv

__all__ = [
    "FitConfig",
    "FitResult",
    "CampaignResult",
    "BracketError",
    "PARAM_NAMES",
    "fit_spectrum",
    "fit_all",
    "width_vs_pressure_slope",
    "search_g",
    "weighted_mean_width",
    "bootstrap_width_error",
    "SubsetConsistency",
    "subset_consistency",
    "uncertainty_vs_time",
    "loglog_slope",
    "write_fits_jsonl",
    "read_fits_jsonl",
]

PARAM_NAMES = ("pressure", "doppler_hwhm_e", "center", "baseline_offset", "baseline_slope")
MODELS = ("voigt", "galatry")
_U_SCALE = 1e8  # Hz per unit of the baseline-slope coordinate


class BracketError(ValueError):
    """The g bracket does not enclose a sign change of the width-pressure slope."""


@dataclass(frozen=True)
class FitConfig:
    """Extractor settings. These are the analyst's assumptions, not the truth.

    ``kb_nominal`` only sets the friction parameter tie ``theta = kappa P / D``;
    a percent-level error in it moves the fitted width by far less than a ppm.
    """

    amplitude_per_pa: float = 0.8
    temperature: float = constants.T_WATER_TRIPLE_ICE
    molecular_mass: float = constants.MASS_NH3
    nu0: float = constants.NU0_SAQ63
    diffusion_d0: float = constants.D0_NH3
    reference_pressure: float = constants.ATM
    kb_nominal: float = constants.K_B_CODATA2006
    max_iter: int = 200
    slope_tolerance: float = 0.2
    max_g_iter: int = 40
    include_ldm: bool = True

    def __post_init__(self):
        for name in ("amplitude_per_pa", "temperature", "molecular_mass", "nu0", "diffusion_d0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not self.slope_tolerance > 0:
            raise ValueError("slope_tolerance must be > 0")

    @classmethod
    def from_campaign(cls, cfg, **kw):
        """Extractor settings matching a generator config's known quantities."""
        return cls(
            amplitude_per_pa=cfg.amplitude_per_pa,
            temperature=cfg.temperature,
            molecular_mass=cfg.molecular_mass,
            nu0=cfg.nu0,
            diffusion_d0=cfg.diffusion_d0,
            reference_pressure=cfg.reference_pressure,
            include_ldm=cfg.include_ldm,
            **kw,
        )

    @property
    def kappa(self):
        """``theta * D / P`` in Hz/Pa; zero when the narrowing is switched off."""
        if not self.include_ldm:
            return 0.0
        cond = GasConditions(
            pressure=1.0,
            temperature=self.temperature,
            molecular_mass=self.molecular_mass,
            diffusion_d0=self.diffusion_d0,
            reference_pressure=self.reference_pressure,
            wavelength=constants.C / self.nu0,
        )
        return lineshape.friction_coefficient(cond, self.kb_nominal) / (2.0 * math.pi)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class FitResult:
    """Fitted line parameters of one spectrum.

    ``params.homogeneous_hw`` equals ``g_fixed * pressure`` exactly.
    """

    params: LineShapeParams
    pressure: float
    param_errors: dict
    covariance: np.ndarray
    chi2_reduced: float
    n_points: int
    converged: bool
    g_fixed: float
    model: str
    nominal_pressure: float = float("nan")
    seed: int = -1

    @property
    def width(self):
        return self.params.doppler_hwhm_e

    @property
    def width_error(self):
        return self.param_errors["doppler_hwhm_e"]

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "pressure": self.pressure,
            "param_errors": dict(self.param_errors),
            "covariance": np.asarray(self.covariance).tolist(),
            "chi2_reduced": self.chi2_reduced,
            "n_points": self.n_points,
            "converged": self.converged,
            "g_fixed": self.g_fixed,
            "model": self.model,
            "nominal_pressure": self.nominal_pressure,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            params=LineShapeParams.from_dict(d["params"]),
            pressure=float(d["pressure"]),
            param_errors={k: float(v) for k, v in d["param_errors"].items()},
            covariance=np.asarray(d["covariance"], dtype=float),
            chi2_reduced=float(d["chi2_reduced"]),
            n_points=int(d["n_points"]),
            converged=bool(d["converged"]),
            g_fixed=float(d["g_fixed"]),
            model=str(d["model"]),
            nominal_pressure=float(d.get("nominal_pressure", float("nan"))),
            seed=int(d.get("seed", -1)),
        )


@dataclass
class CampaignResult:
    g_star: float
    slope_at_g_star: float
    slope_error: float
    width_mean: float
    width_sigma: float
    dispersion_ratio: float
    model: str
    per_spectrum: list = field(default_factory=list, repr=False)
    g_history: list = field(default_factory=list, repr=False)
    g_star_error: float = float("nan")
    width_sigma_g: float = float("nan")

    @property
    def n_spectra(self):
        return len(self.per_spectrum)

    @property
    def width_sigma_total(self):
        """Scatter sigma and the g* contribution in quadrature."""
        if not math.isfinite(self.width_sigma_g):
            return self.width_sigma
        return math.hypot(self.width_sigma, self.width_sigma_g)

    def summary(self):
        """JSON-ready dict without the per-spectrum list."""
        return {
            "model": self.model,
            "g_star_hz_per_pa": self.g_star,
            "slope_at_g_star_hz_per_pa": self.slope_at_g_star,
            "slope_error_hz_per_pa": self.slope_error,
            "width_mean_hz": self.width_mean,
            "width_sigma_hz": self.width_sigma,
            "dispersion_ratio": self.dispersion_ratio,
            "g_star_error_hz_per_pa": self.g_star_error,
            "width_sigma_g_hz": self.width_sigma_g,
            "width_sigma_total_hz": self.width_sigma_total,
            "n_spectra": self.n_spectra,
            "g_history": [list(h) for h in self.g_history],
        }


# --- single spectrum --------------------------------------------------------------


def _check_model(model):
    if model == "galatry_expansion":
        return "galatry"
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    return model


def _absorbance_data(s):
    ok = s.signal > 0
    if ok.sum() < 16:
        raise FitFailure("fewer than 16 points with positive signal")
    nu = s.freq_offsets[ok]
    y = -np.log(s.signal[ok])
    sy = s.sigma[ok] / s.signal[ok]
    return nu, y, sy


class _Model:
    """Tied absorbance model with its analytic Jacobian."""

    def __init__(self, nu, g, a, kappa, galatry):
        self.nu = nu
        self.u = (nu - 0.5 * (nu[0] + nu[-1])) / _U_SCALE
        self.g = g
        self.a = a
        self.kappa = kappa if galatry else 0.0

    def _parts(self, x):
        p, d, c = x[0], x[1], x[2]
        if not (d > 0 and p > 0):
            return None
        xi = (self.nu - c) / d
        eta = self.g * p / d
        theta = self.kappa * p / d
        z = xi + 1j * eta
        w = faddeeva(z)
        return p, d, xi, eta, theta, z, w

    def value(self, x):
        parts = self._parts(x)
        if parts is None:
            return np.full(self.nu.size, np.inf)
        p, _, _, _, theta, z, w = parts
        shape = w.real
        if theta:
            shape = shape + (theta / 12.0) * w1(z, w).real
        return self.a * p * shape + x[3] + x[4] * self.u

    def jacobian(self, x):
        p, d, xi, eta, theta, z, w = self._parts(x)
        wp = faddeeva_deriv(z, w)
        if theta:
            gz = wp + (theta / 12.0) * w1_deriv(z, w)
            f = w.real + (theta / 12.0) * w1(z, w).real
            f_theta = w1(z, w).real / 12.0
        else:
            gz = wp
            f = w.real
            f_theta = np.zeros_like(f)
        f_xi = gz.real
        f_eta = -gz.imag
        ap = self.a * p
        jac = np.empty((self.nu.size, 5))
        jac[:, 0] = self.a * f + ap * (f_eta * self.g + f_theta * self.kappa) / d
        jac[:, 1] = -ap * (xi * f_xi + eta * f_eta + theta * f_theta) / d
        jac[:, 2] = -ap * f_xi / d
        jac[:, 3] = 1.0
        jac[:, 4] = self.u
        return jac


def _initial_guess(nu, y, sy, cfg):
    """Data-driven start: edge baseline, peak absorbance, second moment."""
    n = nu.size
    edge = max(4, n // 10)
    xe = np.concatenate([nu[:edge], nu[-edge:]])
    ye = np.concatenate([y[:edge], y[-edge:]])
    b1, b0 = np.polyfit(xe, ye, 1)
    a = y - (b0 + b1 * nu)
    k = max(1, n // 100)
    smooth = np.convolve(a, np.ones(2 * k + 1) / (2 * k + 1), mode="same")
    i = int(np.argmax(smooth))
    peak = max(float(smooth[i]), 1e-12)
    pos = np.clip(a, 0.0, None)
    wsum = pos.sum()
    c = float(np.sum(pos * nu) / wsum) if wsum > 0 else float(nu[i])
    var = float(np.sum(pos * (nu - c) ** 2) / wsum) if wsum > 0 else (nu[-1] - nu[0]) ** 2 / 36
    d = math.sqrt(2.0 * var) if var > 0 else (nu[-1] - nu[0]) / 6
    # a Gaussian tail clipped by the scan underestimates the moment only slightly
    d = float(np.clip(d, (nu[1] - nu[0]) * 2, nu[-1] - nu[0]))
    mid = 0.5 * (nu[0] + nu[-1])
    return np.array([peak / cfg.amplitude_per_pa, d, c, b0 + b1 * mid, b1 * _U_SCALE])


def fit_spectrum(s, g_fixed, model="galatry", config=None, x0=None):
    """Fit one spectrum with the collisional width tied to ``g_fixed * P``.

    Parameters
    ----------
    s : Spectrum
    g_fixed : float
        Collisional half-width per Pa (Hz/Pa).
    model : {"voigt", "galatry"}
        ``galatry`` is the first-order expansion; ``galatry_expansion`` is
        accepted as an alias.
    config : FitConfig, optional
    x0 : array_like, optional
        Start vector in :data:`PARAM_NAMES` order; the baseline slope is per
        100 MHz and relative to the scan midpoint.

    Returns
    -------
    FitResult

    Raises
    ------
    FitFailure
        Non-convergence or singular curvature.
    """
    model = _check_model(model)
    cfg = config or FitConfig()
    if not g_fixed >= 0:
        raise ValueError("g_fixed must be >= 0")
    nu, y, sy = _absorbance_data(s)
    m = _Model(nu, g_fixed, cfg.amplitude_per_pa, cfg.kappa, model == "galatry")
    start = _initial_guess(nu, y, sy, cfg) if x0 is None else np.asarray(x0, dtype=float)
    inv = 1.0 / sy

    def resid(x):
        return (m.value(x) - y) * inv

    def jac(x):
        return m.jacobian(x) * inv[:, None]

    scale = np.array([max(abs(start[0]), 1e-3), abs(start[1]), abs(start[1]), 1.0, 1.0])
    sol = damped_least_squares(resid, start, jac=jac, x_scale=scale, max_iter=cfg.max_iter)
    x = sol.x
    if not (x[0] > 0 and x[1] > 0):
        raise FitFailure("fit left the physical domain (P or width <= 0)")
    # report the baseline slope per Hz
    t = np.diag([1.0, 1.0, 1.0, 1.0, 1.0 / _U_SCALE])
    cov = t @ sol.covariance @ t
    # baseline offset reported at nu = 0: b0' = b0 - b1 * mid / U
    mid = 0.5 * (nu[0] + nu[-1])
    shift = np.eye(5)
    shift[3, 4] = -mid
    cov = shift @ cov @ shift.T
    errs = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    theta = m.kappa * x[0] / x[1]
    params = LineShapeParams(
        doppler_hwhm_e=float(x[1]),
        homogeneous_hw=float(g_fixed * x[0]),
        center=float(x[2]),
        amplitude=float(cfg.amplitude_per_pa * x[0]),
        theta=float(theta),
        baseline_offset=float(x[3] - x[4] * mid / _U_SCALE),
        baseline_slope=float(x[4] / _U_SCALE),
    )
    return FitResult(
        params=params,
        pressure=float(x[0]),
        param_errors={k: float(e) for k, e in zip(PARAM_NAMES, errs)},
        covariance=cov,
        chi2_reduced=float(sol.chi2_reduced),
        n_points=int(nu.size),
        converged=True,
        g_fixed=float(g_fixed),
        model=model,
        nominal_pressure=float(s.meta.pressure),
        seed=int(s.meta.seed),
    )


def _x0_from_fit(fit):
    p = fit.params
    return np.array([fit.pressure, p.doppler_hwhm_e, p.center, p.baseline_offset, p.baseline_slope * _U_SCALE])


def _fit_task(args):
    s, g, model, cfg, x0 = args
    if x0 is not None:
        # warm start; the baseline offset in x0 is at nu=0, convert to midpoint
        mid = 0.5 * (s.freq_offsets[0] + s.freq_offsets[-1])
        x0 = x0.copy()
        x0[3] = x0[3] + x0[4] * mid / _U_SCALE
    return fit_spectrum(s, g, model, cfg, x0=x0)


def fit_all(spectra, g_fixed, model="galatry", config=None, workers=1, warm=None):
    """Fit every spectrum at one g; order of results follows ``spectra``.

    ``warm`` is an optional list of previous :class:`FitResult` used as starts.
    Results do not depend on ``workers``.
    """
    cfg = config or FitConfig()
    starts = [None] * len(spectra) if warm is None else [_x0_from_fit(f) for f in warm]
    tasks = [(s, g_fixed, model, cfg, x0) for s, x0 in zip(spectra, starts)]
    if workers and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_fit_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [_fit_task(t) for t in tasks]


# --- campaign statistics ------------------------------------------------------------


def _fsum(x):
    return math.fsum(np.asarray(x, dtype=float).tolist())


def width_vs_pressure_slope(fits):
    """Weighted linear regression of fitted width on fitted pressure.

    Returns ``(slope, slope_error)`` in Hz/Pa. The error is the
    inverse-curvature one, inflated by the Birge ratio when the scatter exceeds
    the error bars.
    """
    if len(fits) < 3:
        raise ValueError("need at least 3 fits")
    p = np.array([f.pressure for f in fits])
    d = np.array([f.width for f in fits])
    w = 1.0 / np.array([f.width_error for f in fits]) ** 2
    nominal = np.array([f.nominal_pressure for f in fits])
    groups = nominal[np.isfinite(nominal)]
    distinct = len(np.unique(np.round(groups, 9))) if groups.size == len(fits) else len(np.unique(np.round(p, 3)))
    if distinct < 2:
        raise ValueError("width_vs_pressure_slope needs at least 2 distinct pressures")
    sw = _fsum(w)
    pm = _fsum(w * p) / sw
    dm = _fsum(w * d) / sw
    sxx = _fsum(w * (p - pm) ** 2)
    if not sxx > 0:
        raise ValueError("pressures have no spread")
    slope = _fsum(w * (p - pm) * (d - dm)) / sxx
    resid = d - dm - slope * (p - pm)
    chi2 = _fsum(w * resid**2)
    dof = len(fits) - 2
    birge = math.sqrt(chi2 / dof) if dof > 0 else 1.0
    return slope, math.sqrt(1.0 / sxx) * max(1.0, birge)


def weighted_mean_width(fits):
    """Inverse-variance weighted mean width with scatter-derived sigma.

    Returns ``(mean, sigma, dispersion_ratio)``. ``sigma`` is the weighted
    standard deviation of the mean obtained from the dispersion of the
    sample; ``dispersion_ratio`` is that over ``1/sqrt(sum w)``. Identical
    inputs give ``sigma == 0`` (degenerate).
    """
    good = [f for f in fits if f.converged]
    if not good:
        raise ValueError("no converged fits")
    if len(good) < 2:
        f = good[0]
        return f.width, f.width_error, 1.0
    d = np.array([f.width for f in good])
    w = 1.0 / np.array([f.width_error for f in good]) ** 2
    sw = _fsum(w)
    mean = _fsum(w * d) / sw
    n = len(good)
    chi2 = _fsum(w * (d - mean) ** 2)
    sigma = math.sqrt(chi2 / ((n - 1) * sw))
    naive = 1.0 / math.sqrt(sw)
    return mean, sigma, sigma / naive


def search_g(spectra, model, g_bracket, config=None, workers=1):
    """Find the g at which fitted widths do not depend on pressure.

    Secant steps with bisection fallback on ``slope(g)`` until
    ``|slope| < config.slope_tolerance * slope_error``.

    Raises
    ------
    BracketError
        The bracket ends give slopes of the same sign, or the campaign has a
        single pressure.
    """
    cfg = config or FitConfig()
    lo, hi = (float(v) for v in g_bracket)
    if not 0 <= lo < hi:
        raise ValueError("g_bracket must satisfy 0 <= lo < hi")
    nominal = {round(float(s.meta.pressure), 9) for s in spectra}
    if len(nominal) < 2:
        raise BracketError("a single-pressure campaign cannot constrain g")
    history = []

    def evaluate(g, warm=None):
        fits = fit_all(spectra, g, model, cfg, workers, warm=warm)
        s, e = width_vs_pressure_slope(fits)
        history.append((g, s, e, weighted_mean_width(fits)[0]))
        return fits, s, e

    f_lo, s_lo, e_lo = evaluate(lo)
    f_hi, s_hi, e_hi = evaluate(hi, f_lo)
    tol = cfg.slope_tolerance
    if abs(s_lo) < tol * e_lo:
        best = (lo, f_lo, s_lo, e_lo)
    elif abs(s_hi) < tol * e_hi:
        best = (hi, f_hi, s_hi, e_hi)
    elif s_lo * s_hi > 0:
        raise BracketError(f"slope has the same sign at g={lo:g} ({s_lo:+.3g}) and g={hi:g} ({s_hi:+.3g})")
    else:
        best = None
        a, sa, fa = lo, s_lo, f_lo
        b, sb, fb = hi, s_hi, f_hi
        for _ in range(cfg.max_g_iter):
            g = b - sb * (b - a) / (sb - sa)
            # keep the secant step away from the bracket ends
            width = b - a
            if not (a + 0.05 * width < g < b - 0.05 * width):
                g = 0.5 * (a + b)
            fg, sg, eg = evaluate(g, fa if abs(g - a) < abs(g - b) else fb)
            if abs(sg) < tol * eg:
                best = (g, fg, sg, eg)
                break
            if sg * sa < 0:
                b, sb, fb = g, sg, fg
            else:
                a, sa, fa = g, sg, fg
        if best is None:
            raise FitFailure("g search did not reach the slope tolerance")
    g, fits, s, e = best
    mean, sigma, ratio = weighted_mean_width(fits)
    g_err, sigma_g = _g_star_propagation(history, e)
    return CampaignResult(
        g_star=g,
        slope_at_g_star=s,
        slope_error=e,
        width_mean=mean,
        width_sigma=sigma,
        dispersion_ratio=ratio,
        model=_check_model(model),
        per_spectrum=fits,
        g_history=history,
        g_star_error=g_err,
        width_sigma_g=sigma_g,
    )


def _g_star_propagation(history, slope_error):
    """Error of g* and its effect on the mean width.

    Straight-line fits of slope(g) and width(g) over the search history give
    ``sigma_g = slope_error / |ds/dg|`` and ``sigma_g * |dD/dg|``.
    """
    pts = sorted(set(history))
    if len({h[0] for h in pts}) < 2:
        return float("nan"), float("nan")
    g = np.array([h[0] for h in pts])
    dsdg = np.polyfit(g, [h[1] for h in pts], 1)[0]
    dDdg = np.polyfit(g, [h[3] for h in pts], 1)[0]
    if dsdg == 0:
        return float("inf"), float("inf")
    g_err = slope_error / abs(dsdg)
    return float(g_err), float(g_err * abs(dDdg))


def bootstrap_width_error(s, g_fixed, model="galatry", n_replicates=200, seed=0, config=None):
    """Residual-resampling bootstrap of the fitted Doppler width.

    Standardised residuals ``r_i / sigma_i`` of the base fit are drawn with
    replacement, rescaled by the local ``sigma`` and added to the fitted
    model; each replicate is refitted from the base solution.

    Returns
    -------
    float
        Standard deviation of the replicate widths (Hz).

    Raises
    ------
    ValueError
        ``n_replicates < 2``.
    FitFailure
        More than 10% of replicates fail.
    """
    if n_replicates < 2:
        raise ValueError("n_replicates must be >= 2")
    from .synth import Spectrum

    cfg = config or FitConfig()
    base = fit_spectrum(s, g_fixed, model, cfg)
    nu, y, sy = _absorbance_data(s)
    m = _Model(nu, g_fixed, cfg.amplitude_per_pa, cfg.kappa, _check_model(model) == "galatry")
    x0 = _x0_from_fit(base)
    mid = 0.5 * (nu[0] + nu[-1])
    x0[3] = x0[3] + x0[4] * mid / _U_SCALE
    fitted = m.value(x0)
    z = (y - fitted) / sy
    z = z - z.mean()
    # small-sample correction of the residual spread for the 5 fitted parameters
    z = z * math.sqrt(nu.size / (nu.size - 5))
    rng = np.random.default_rng(seed)
    widths = []
    failures = 0
    for _ in range(n_replicates):
        ys = fitted + sy * rng.choice(z, size=z.size, replace=True)
        rep = Spectrum(nu, np.exp(-ys), sy * np.exp(-ys), s.meta)
        try:
            widths.append(fit_spectrum(rep, g_fixed, model, cfg, x0=x0).width)
        except FitFailure:
            failures += 1
    if failures > 0.1 * n_replicates:
        raise FitFailure(f"{failures}/{n_replicates} bootstrap replicates failed")
    return float(np.std(widths, ddof=1))


@dataclass
class SubsetConsistency:
    subsets: list
    chi2: float
    dof: int
    p_value: float

    @property
    def consistent(self):
        return self.p_value > 0.01


def subset_consistency(fits, n_subsets=4, seed=0):
    """Random partition into ``n_subsets`` groups, each reduced independently.

    Returns a :class:`SubsetConsistency` whose ``subsets`` holds ``(mean,
    sigma)`` pairs and whose chi-square tests the subset means against their
    sigmas.
    """
    from scipy.stats import chi2 as chi2_dist

    if n_subsets < 2:
        raise ValueError("n_subsets must be >= 2")
    if len(fits) < n_subsets:
        raise ValueError("fewer fits than subsets")
    order = np.random.default_rng(seed).permutation(len(fits))
    out = []
    for idx in np.array_split(order, n_subsets):
        mean, sigma, _ = weighted_mean_width([fits[i] for i in idx])
        out.append((mean, sigma))
    means = np.array([m for m, _ in out])
    sig = np.array([s for _, s in out])
    if np.all(sig > 0):
        w = 1.0 / sig**2
        mu = _fsum(w * means) / _fsum(w)
        chi2 = _fsum(w * (means - mu) ** 2)
        p = float(chi2_dist.sf(chi2, n_subsets - 1))
    else:
        chi2, p = float("nan"), float("nan")
    return SubsetConsistency(out, chi2, n_subsets - 1, p)


def _prefix_variance(d, w):
    # cumulative sums of centred values keep rounding far below the scatter
    ref = d[0]
    x = d - ref
    sw = np.cumsum(w)
    swx = np.cumsum(w * x)
    swx2 = np.cumsum(w * x * x)
    n = np.arange(1, len(d) + 1)
    mean = swx / sw
    chi2 = np.clip(swx2 - sw * mean**2, 0.0, None)
    var = np.empty(len(d))
    var[0] = (1.0 / w[0]) / d[0] ** 2
    if len(d) > 1:
        var[1:] = chi2[1:] / ((n[1:] - 1) * sw[1:]) / (ref + mean[1:]) ** 2
    return var


def uncertainty_vs_time(fits, per_fit_duration=42.0, seed=0, n_shuffles=1):
    """Relative width uncertainty versus accumulated measurement time.

    Fits are shuffled, then the weighted mean and its scatter sigma are
    computed for every prefix. The first point (one fit) uses the fit's own
    error bar. With ``n_shuffles > 1`` the relative variance is averaged over
    independent orderings, which smooths the curve without changing its
    expectation.

    Returns
    -------
    ndarray, shape (n, 2)
        Columns ``tau`` (s) and relative uncertainty.
    """
    if not fits:
        raise ValueError("no fits")
    if n_shuffles < 1:
        raise ValueError("n_shuffles must be >= 1")
    d_all = np.array([f.width for f in fits])
    w_all = 1.0 / np.array([f.width_error for f in fits]) ** 2
    rng = np.random.default_rng(seed)
    var = np.zeros(len(fits))
    for _ in range(n_shuffles):
        order = rng.permutation(len(fits))
        var += _prefix_variance(d_all[order], w_all[order])
    n = np.arange(1, len(fits) + 1)
    return np.column_stack([n * per_fit_duration, np.sqrt(var / n_shuffles)])


def loglog_slope(curve, min_count=10, n_points=30):
    """Slope of ``log(rel)`` versus ``log(tau)`` over log-spaced prefixes."""
    curve = np.asarray(curve, dtype=float)
    n = curve.shape[0]
    if n < 2 * min_count:
        raise ValueError("curve too short for a slope")
    idx = np.unique(np.geomspace(min_count, n, n_points).astype(int)) - 1
    x = np.log(curve[idx, 0])
    y = np.log(curve[idx, 1])
    return float(np.polyfit(x, y, 1)[0])


# --- export -------------------------------------------------------------------------


def write_fits_jsonl(fits, path):
    with open(path, "w", encoding="utf-8") as fh:
        for f in fits:
            fh.write(json.dumps(f.to_dict(), sort_keys=True) + "\n")


def read_fits_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [FitResult.from_dict(json.loads(line)) for line in fh if line.strip()]

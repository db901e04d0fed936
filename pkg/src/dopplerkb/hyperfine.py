"""Hyperfine structure of a symmetric-top rovibrational Q line (NH3 saQ(6,3)).

Levels are labelled in the coupled basis ``|(J I_N) F1, I_H; F>`` with the
nitrogen spin ``I_N = 1`` and the total proton spin ``I_H = 3/2`` (K a multiple
of 3). The effective hyperfine Hamiltonian is

    H = eQq (3K^2/J(J+1) - 1) V_Q + R (I_N.J) + S (I_H.J)
        + T [3(I_N.J)(I_H.J) + 3(I_H.J)(I_N.J) - 2(I_N.I_H) J(J+1)] / ((2J-1)(2J+3))
        + U [3(I_H.J)^2 + 3/2 (I_H.J) - I_H(I_H+1) J(J+1)] / ((2J-1)(2J+3))

with ``V_Q`` the Casimir quadrupole operator. Matrix elements are built with
6-j recoupling; by default only the diagonal (first-order) elements are kept.
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import lineshape
from .lineshape import LineShapeParams
from .optim import RankDeficientError, damped_least_squares

__all__ = [
    "HyperfineConstants",
    "SublevelLabel",
    "HyperfineLine",
    "StickSpectrum",
    "GROUND_SAQ63",
    "UPPER_SAQ63",
    "wigner_6j",
    "hamiltonian_blocks",
    "sublevel_energies",
    "stick_spectrum",
    "crossover_positions",
    "crossover_groups",
    "BroadeningCorrection",
    "broadening_correction",
    "multiplet_centers",
    "triplet_model",
    "TripletFit",
    "fit_triplet",
    "write_stick_csv",
    "read_stick_csv",
]

I_N = 1
I_H = Fraction(3, 2)


@dataclass(frozen=True)
class HyperfineConstants:
    """Hyperfine coupling constants of one vibrational level, in kHz."""

    eqq: float
    r: float = 0.0
    s: float = 0.0
    t: float = 0.0
    u: float = 0.0

    def __post_init__(self):
        for name in ("eqq", "r", "s", "t", "u"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"hyperfine constant {name} must be finite")

    def shifted(self, d_eqq=0.0, d_r=0.0, d_s=0.0, d_t=0.0, d_u=0.0):
        return HyperfineConstants(
            self.eqq + d_eqq, self.r + d_r, self.s + d_s, self.t + d_t, self.u + d_u
        )

    def to_dict(self):
        return {"eqq": self.eqq, "r": self.r, "s": self.s, "t": self.t, "u": self.u}


GROUND_SAQ63 = HyperfineConstants(eqq=-4010.0, r=6.75, s=-18.00, t=-0.85, u=-0.0025)
UPPER_SAQ63 = HyperfineConstants(eqq=-4010.0 - 196.8, r=6.75 - 0.535, s=-17.5, t=-0.9, u=-0.0025)


@dataclass(frozen=True, order=True)
class SublevelLabel:
    f1: int
    f: Fraction

    def __str__(self):
        return f"F1={self.f1},F={self.f}"


@dataclass(frozen=True)
class HyperfineLine:
    offset: float
    intensity: float
    lower: SublevelLabel
    upper: SublevelLabel

    @property
    def is_main(self):
        return self.lower == self.upper


@dataclass
class StickSpectrum:
    """Hyperfine components of one rovibrational line.

    ``offset`` is in Hz from the hyperfine-free line centre; intensities sum
    to one.
    """

    lines: list
    center_of_gravity: float = field(init=False)

    def __post_init__(self):
        total = sum(ln.intensity for ln in self.lines)
        if self.lines and total > 0:
            self.lines = [
                HyperfineLine(ln.offset, ln.intensity / total, ln.lower, ln.upper)
                for ln in self.lines
            ]
            self.center_of_gravity = float(
                sum(ln.offset * ln.intensity for ln in self.lines)
            )
        else:
            self.center_of_gravity = 0.0

    def __len__(self):
        return len(self.lines)

    @property
    def offsets(self):
        return np.array([ln.offset for ln in self.lines])

    @property
    def intensities(self):
        return np.array([ln.intensity for ln in self.lines])

    def shifted(self, delta):
        return StickSpectrum(
            [HyperfineLine(ln.offset + delta, ln.intensity, ln.lower, ln.upper) for ln in self.lines]
        )

    def scaled(self, factor):
        """Offsets measured from the centre of gravity are multiplied by ``factor``."""
        cog = self.center_of_gravity
        return StickSpectrum(
            [
                HyperfineLine(cog + factor * (ln.offset - cog), ln.intensity, ln.lower, ln.upper)
                for ln in self.lines
            ]
        )


# --- angular momentum algebra -------------------------------------------------


def _triangle(a, b, c):
    if a + b < c or a + c < b or b + c < a:
        return None
    s = a + b + c
    if s.denominator != 1:
        return None
    return Fraction(
        math.factorial(int(a + b - c)) * math.factorial(int(a - b + c)) * math.factorial(int(-a + b + c)),
        math.factorial(int(s) + 1),
    )


@lru_cache(maxsize=None)
def wigner_6j(j1, j2, j3, j4, j5, j6):
    """Wigner 6-j symbol ``{j1 j2 j3; j4 j5 j6}`` by the Racah formula.

    Arguments may be ints, floats or Fractions (half-integers).
    """
    j1, j2, j3, j4, j5, j6 = (Fraction(j).limit_denominator(2) for j in (j1, j2, j3, j4, j5, j6))
    triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)]
    deltas = []
    for t in triads:
        d = _triangle(*t)
        if d is None:
            return 0.0
        deltas.append(d)
    sums = [int(sum(t)) for t in triads]
    cols = [int(j1 + j2 + j4 + j5), int(j2 + j3 + j5 + j6), int(j3 + j1 + j6 + j4)]
    total = Fraction(0)
    for z in range(max(sums), min(cols) + 1):
        den = math.factorial(cols[0] - z) * math.factorial(cols[1] - z) * math.factorial(cols[2] - z)
        for a in sums:
            den *= math.factorial(z - a)
        total += Fraction((-1) ** z * math.factorial(z + 1), den)
    pref = math.sqrt(float(deltas[0] * deltas[1] * deltas[2] * deltas[3]))
    return float(total) * pref


def _reduced_self(j):
    j = float(j)
    return math.sqrt(j * (j + 1.0) * (2.0 * j + 1.0))


def _phase(x):
    x = Fraction(x)
    if x.denominator != 1:
        raise ValueError("non-integer phase exponent")
    return -1.0 if int(x) % 2 else 1.0


def _f1_values(j):
    return list(range(j - I_N, j + I_N + 1))


def sublevel_labels(j):
    """The ``3 x 4`` coupled-basis labels of a level with rotational ``j``."""
    labels = []
    for f1 in _f1_values(j):
        f = f1 - I_H
        while f <= f1 + I_H:
            if f >= 0:
                labels.append(SublevelLabel(f1, Fraction(f)))
            f += 1
    return labels


def _f_blocks(j):
    blocks = {}
    for lab in sublevel_labels(j):
        blocks.setdefault(lab.f, []).append(lab.f1)
    return blocks


@lru_cache(maxsize=None)
def _operator_blocks(j):
    """Per-F matrices of the scalar operators (I_N.J), (I_H.J), (I_N.I_H), V_Q."""
    blocks = {}
    jj = j * (j + 1)
    inn = I_N * (I_N + 1)
    for f, f1s in _f_blocks(j).items():
        n = len(f1s)
        in_j = np.zeros((n, n))
        ih_j = np.zeros((n, n))
        in_ih = np.zeros((n, n))
        v_q = np.zeros((n, n))
        for a, f1 in enumerate(f1s):
            c = f1 * (f1 + 1) - jj - inn
            in_j[a, a] = c / 2.0
            v_q[a, a] = (0.75 * c * (c + 1) - inn * jj) / (
                2.0 * I_N * (2 * I_N - 1) * (2 * j - 1) * (2 * j + 3)
            )
            for b, f1p in enumerate(f1s):
                if abs(f1 - f1p) > 1:
                    continue
                coupling = _phase(f1p + I_H + f) * wigner_6j(f, I_H, f1, 1, f1p, I_H)
                coupling *= _reduced_self(I_H)
                red_j = (
                    _phase(j + I_N + f1p + 1)
                    * math.sqrt((2 * f1 + 1) * (2 * f1p + 1))
                    * wigner_6j(j, f1, I_N, f1p, j, 1)
                    * _reduced_self(j)
                )
                red_n = (
                    _phase(j + I_N + f1 + 1)
                    * math.sqrt((2 * f1 + 1) * (2 * f1p + 1))
                    * wigner_6j(I_N, f1, j, f1p, I_N, 1)
                    * _reduced_self(I_N)
                )
                ih_j[a, b] = coupling * red_j
                in_ih[a, b] = coupling * red_n
        blocks[f] = (f1s, in_j, ih_j, in_ih, v_q)
    return blocks


def hamiltonian_blocks(c, j, k):
    """Hyperfine Hamiltonian (kHz) as a dict ``F -> (F1 list, matrix)``."""
    _check_level(j, k)
    jj = j * (j + 1)
    ihh = float(I_H * (I_H + 1))
    q_factor = c.eqq * (3.0 * k * k / jj - 1.0)
    denom = (2 * j - 1) * (2 * j + 3)
    out = {}
    for f, (f1s, in_j, ih_j, in_ih, v_q) in _operator_blocks(j).items():
        eye = np.eye(len(f1s))
        h = q_factor * v_q + c.r * in_j + c.s * ih_j
        h = h + c.t * (3.0 * in_j @ ih_j + 3.0 * ih_j @ in_j - 2.0 * jj * in_ih) / denom
        h = h + c.u * (3.0 * ih_j @ ih_j + 1.5 * ih_j - ihh * jj * eye) / denom
        out[f] = (f1s, 0.5 * (h + h.T))
    return out


def _check_level(j, k):
    if not (isinstance(j, (int, np.integer)) and isinstance(k, (int, np.integer))):
        raise ValueError("j and k must be integers")
    if j < 2 or k < 1 or k > j or k % 3 != 0:
        # I_H = 3/2 and a quadrupole Casimir term need K = 3n and J >= 2
        raise ValueError(f"unsupported level (J={j}, K={k}); need K a nonzero multiple of 3, K <= J")


def sublevel_energies(c, j=6, k=3, exact=False):
    """Hyperfine energies (Hz) of the 12 sublevels, relative to the unsplit level.

    By default the diagonal (first-order) elements in the coupled basis are
    returned. With ``exact=True`` each F block is diagonalised and eigenvalues
    are labelled by their dominant F1 component.
    """
    out = []
    for f, (f1s, h) in hamiltonian_blocks(c, j, k).items():
        if exact:
            vals, vecs = np.linalg.eigh(h)
            for i in range(len(f1s)):
                dom = f1s[int(np.argmax(np.abs(vecs[:, i])))]
                out.append((SublevelLabel(dom, f), vals[i] * 1e3))
        else:
            for a, f1 in enumerate(f1s):
                out.append((SublevelLabel(f1, f), h[a, a] * 1e3))
    return sorted(out, key=lambda item: item[0])


@lru_cache(maxsize=None)
def _line_strength_factors(j):
    """Coupled-basis reduced dipole factors ``<F1 F||mu||F1' F'>`` (Q branch)."""
    labels = sublevel_labels(j)
    out = {}
    for lo in labels:
        for up in labels:
            if abs(lo.f - up.f) > 1:
                continue
            val = (
                _phase(lo.f1 + I_H + up.f + 1)
                * math.sqrt((2 * lo.f + 1) * (2 * up.f + 1))
                * wigner_6j(lo.f1, lo.f, I_H, up.f, up.f1, 1)
                * _phase(j + I_N + up.f1 + 1)
                * math.sqrt((2 * lo.f1 + 1) * (2 * up.f1 + 1))
                * wigner_6j(j, lo.f1, I_N, up.f1, j, 1)
            )
            out[(lo, up)] = val
    return out


def stick_spectrum(lower, upper, j=6, k=3, exact=False):
    """Hyperfine stick spectrum of a ``Delta J = 0`` transition.

    Every pair of sublevels with ``|Delta F| <= 1`` is listed (78 lines for
    J = 6). Intensities are weak-field line strengths from 6-j recoupling,
    normalised to unit sum; components with ``|Delta F1| = 2`` carry zero
    intensity unless ``exact`` mixes F1 states.
    """
    factors = _line_strength_factors(j)
    if not exact:
        e_lo = dict(sublevel_energies(lower, j, k))
        e_up = dict(sublevel_energies(upper, j, k))
        lines = [
            HyperfineLine(e_up[up] - e_lo[lo], val * val, lo, up)
            for (lo, up), val in factors.items()
        ]
        return StickSpectrum(lines)
    lo_states = _eigenstates(lower, j, k)
    up_states = _eigenstates(upper, j, k)
    lines = []
    for lab_lo, (e_lo, f1s_lo, v_lo) in lo_states.items():
        for lab_up, (e_up, f1s_up, v_up) in up_states.items():
            if abs(lab_lo.f - lab_up.f) > 1:
                continue
            amp = 0.0
            for a, f1 in enumerate(f1s_lo):
                for b, f1p in enumerate(f1s_up):
                    key = (SublevelLabel(f1, lab_lo.f), SublevelLabel(f1p, lab_up.f))
                    amp += v_lo[a] * v_up[b] * factors.get(key, 0.0)
            lines.append(HyperfineLine((e_up - e_lo) * 1e3, amp * amp, lab_lo, lab_up))
    return StickSpectrum(lines)


def _eigenstates(c, j, k):
    out = {}
    for f, (f1s, h) in hamiltonian_blocks(c, j, k).items():
        vals, vecs = np.linalg.eigh(h)
        for i in range(len(f1s)):
            dom = f1s[int(np.argmax(np.abs(vecs[:, i])))]
            out[SublevelLabel(dom, f)] = (vals[i], f1s, vecs[:, i])
    return out


# --- crossovers ---------------------------------------------------------------


def crossover_positions(s, min_weight=0.0):
    """Saturated-absorption crossover resonances of a stick spectrum.

    Every pair of lines sharing a lower or an upper sublevel gives a resonance
    at the mean of their frequencies, weighted by the geometric mean of the
    two intensities. Returns ``(offset, weight)`` tuples sorted by offset.
    """
    out = []
    lines = [ln for ln in s.lines if ln.intensity > 0]
    for i in range(len(lines)):
        for jdx in range(i + 1, len(lines)):
            a, b = lines[i], lines[jdx]
            if a.lower == b.lower or a.upper == b.upper:
                w = math.sqrt(a.intensity * b.intensity)
                if w > min_weight:
                    out.append((0.5 * (a.offset + b.offset), w))
    return sorted(out)


def crossover_groups(crossovers, inner=150e3, outer=450e3):
    """Weighted centres of gravity of the crossover groups on either side.

    Only resonances with ``inner < |offset| < outer`` (Hz) contribute. Returns
    ``(negative_cog, positive_cog)``; a side without resonances gives ``nan``.
    """
    res = []
    for sign in (-1.0, 1.0):
        sel = [(o, w) for o, w in crossovers if inner < sign * o < outer]
        if not sel:
            res.append(float("nan"))
            continue
        o, w = np.array(sel).T
        res.append(float(np.sum(o * w) / np.sum(w)))
    return tuple(res)


# --- Doppler broadening by the unresolved structure -----------------------------


@dataclass
class BroadeningCorrection:
    width_ppm: float
    kb_ppm: float
    weak_fraction: float
    fitted_center: float


def _fit_single_profile(nu, y, env, model):
    d0 = env.doppler_hwhm_e

    def resid(x):
        p = env.replace(doppler_hwhm_e=d0 * (1.0 + x[0]), center=x[1] * d0, amplitude=x[2])
        return lineshape.absorbance(p, nu, model) - y

    sol = damped_least_squares(resid, [0.0, env.center / d0, env.amplitude], xtol=1e-15, ftol=1e-15)
    return d0 * (1.0 + sol.x[0]), sol.x[1] * d0


def _composite(s, env, nu, model):
    y = np.zeros_like(nu)
    for off, inten in zip(s.offsets, s.intensities):
        y += inten * lineshape.absorbance(env.replace(center=env.center + off), nu, model)
    return y


def broadening_correction(s, env, model="voigt", weak_threshold=400e3, span=5.0, n_points=2001):
    """Width inflation of a Doppler envelope by an unresolved stick spectrum.

    The composite ``sum_i I_i A(nu - delta_i)`` is fitted by one profile of the
    same family (Doppler width, centre and amplitude free; collisional width
    and friction fixed at ``env``). The fit of a single stick on the same grid
    is subtracted so grid effects cancel.

    Returns
    -------
    BroadeningCorrection
        ``width_ppm`` fractional width inflation, ``kb_ppm = -2 width_ppm``,
        ``weak_fraction`` the share of the inflation removed when components
        with ``|offset - cog| > weak_threshold`` are moved to the centre of
        gravity, and the fitted centre.
    """
    if len(s) == 0:
        raise ValueError("empty stick spectrum")
    cog = s.center_of_gravity
    spread = np.ptp(s.offsets) if len(s) > 1 else 0.0
    if spread * 10 > env.doppler_hwhm_e:
        raise ValueError("hyperfine spread must be < 1/10 of the Doppler width")
    d0 = env.doppler_hwhm_e
    nu = env.center + cog + np.linspace(-span * d0, span * d0, n_points)
    ref_width, _ = _fit_single_profile(nu, lineshape.absorbance(env.replace(center=env.center + cog), nu, model), env, model)

    def inflation(stick):
        width, center = _fit_single_profile(nu, _composite(stick, env, nu, model), env, model)
        return (width - ref_width) / d0 * 1e6, center

    width_ppm, center = inflation(s)
    merged = StickSpectrum(
        [
            HyperfineLine(
                cog if abs(ln.offset - cog) > weak_threshold else ln.offset,
                ln.intensity,
                ln.lower,
                ln.upper,
            )
            for ln in s.lines
        ]
    )
    merged_ppm, _ = inflation(merged)
    weak = (width_ppm - merged_ppm) / width_ppm if width_ppm != 0 else 0.0
    return BroadeningCorrection(width_ppm, -2.0 * width_ppm, weak, center)


# --- saturated-absorption triplet ---------------------------------------------


def multiplet_centers(delta_eqq, delta_r, lower=GROUND_SAQ63, upper_rest=UPPER_SAQ63, j=6, k=3):
    """Intensity-weighted centres (Hz) and weights of the ``Delta F = Delta F1 = 0`` multiplets.

    The upper level takes ``lower.eqq + delta_eqq`` and ``lower.r + delta_r``;
    its S, T, U come from ``upper_rest``. Returned in ascending F1 order.
    """
    upper = HyperfineConstants(
        lower.eqq + delta_eqq, lower.r + delta_r, upper_rest.s, upper_rest.t, upper_rest.u
    )
    sticks = stick_spectrum(lower, upper, j, k)
    centers, weights = [], []
    for f1 in _f1_values(j):
        sel = [ln for ln in sticks.lines if ln.is_main and ln.lower.f1 == f1]
        w = sum(ln.intensity for ln in sel)
        centers.append(sum(ln.offset * ln.intensity for ln in sel) / w)
        weights.append(w)
    weights = np.array(weights)
    return np.array(centers), weights / weights.sum()


def _lorentz_derivative(x, fwhm):
    hw = 0.5 * fwhm
    u = x / hw
    return -2.0 * u / (hw * (1.0 + u * u) ** 2)


def triplet_model(
    nu,
    delta_eqq,
    delta_r,
    fwhm,
    center=0.0,
    scale=1.0,
    offset=0.0,
    slope=0.0,
    lower=GROUND_SAQ63,
    upper_rest=UPPER_SAQ63,
):
    """First-derivative Lorentzian triplet of the main hyperfine multiplets.

    ``delta_eqq``, ``delta_r`` in kHz; ``nu``, ``fwhm``, ``center`` in Hz. Each
    component is ``scale * w_k * d/dnu L(nu - center - c_k)`` with ``L`` a
    unit-height Lorentzian scaled by ``fwhm/2``, so ``scale`` is the slope
    amplitude; baseline ``offset + slope * (nu - center)``.
    """
    if not fwhm > 0:
        raise ValueError("fwhm must be > 0")
    nu = np.asarray(nu, dtype=float)
    centers, weights = multiplet_centers(delta_eqq, delta_r, lower, upper_rest)
    y = np.zeros_like(nu)
    for c, w in zip(centers, weights):
        y += w * _lorentz_derivative(nu - center - c, fwhm) * (0.5 * fwhm)
    return scale * y + offset + slope * (nu - center)


@dataclass
class TripletFit:
    delta_eqq: float
    delta_r: float
    fwhm: float
    center: float
    scale: float
    offset: float
    slope: float
    covariance: np.ndarray
    errors: np.ndarray
    chi2_reduced: float
    relative_position_errors: np.ndarray

    names = ("delta_eqq", "delta_r", "fwhm", "center", "scale", "offset", "slope")


def fit_triplet(nu, signal, sigma=None, p0=None, lower=GROUND_SAQ63, upper_rest=UPPER_SAQ63):
    """Least-squares fit of :func:`triplet_model` to a saturated-absorption scan.

    Returns a :class:`TripletFit`; the covariance is scaled by the reduced
    chi-square when ``sigma`` is not given. ``relative_position_errors`` are
    the 1-sigma errors of the outer multiplets relative to the central one.

    Raises
    ------
    RankDeficientError
        For a flat scan (no line information).
    """
    nu = np.asarray(nu, dtype=float)
    y = np.asarray(signal, dtype=float)
    if nu.size < 8:
        raise ValueError("need at least 8 samples")
    if np.ptp(nu) < 200e3:
        raise ValueError("scan must span at least 200 kHz")
    if np.ptp(y) == 0:
        raise RankDeficientError("flat scan carries no line information")
    absolute = sigma is not None
    sig = np.ones_like(y) if sigma is None else np.broadcast_to(np.asarray(sigma, float), y.shape)
    if p0 is None:
        ybl = y - np.median(y)
        amp = 0.5 * (ybl.max() - ybl.min())
        p0 = [-190.0, -0.5, 20e3, float(np.mean(nu)), amp if amp > 0 else 1.0, float(np.median(y)), 0.0]
    scales = np.array([10.0, 1.0, 1e3, 1e3, max(abs(p0[4]), 1e-12), max(abs(p0[4]), 1e-12), max(abs(p0[4]), 1e-12) / 1e5])

    def resid(x):
        d_eqq, d_r, fw, c, sc, off, sl = x * scales
        if fw <= 0:
            return np.full_like(y, 1e10)
        return (triplet_model(nu, d_eqq, d_r, fw, c, sc, off, sl, lower, upper_rest) - y) / sig

    sol = damped_least_squares(resid, np.asarray(p0, float) / scales, absolute_sigma=absolute, rcond=1e-10)
    x = sol.x * scales
    cov = sol.covariance * np.outer(scales, scales)
    # centres are linear in (delta_eqq, delta_r)
    c0, _ = multiplet_centers(0.0, 0.0, lower, upper_rest)
    c1, _ = multiplet_centers(1.0, 0.0, lower, upper_rest)
    c2, _ = multiplet_centers(0.0, 1.0, lower, upper_rest)
    jac = np.stack([c1 - c0, c2 - c0], axis=1)
    rel = jac - jac[1]
    rel_cov = rel @ cov[:2, :2] @ rel.T
    rel_err = np.sqrt(np.clip(np.diag(rel_cov), 0, None))[[0, 2]]
    return TripletFit(
        *x,
        covariance=cov,
        errors=np.sqrt(np.clip(np.diag(cov), 0, None)),
        chi2_reduced=sol.chi2_reduced,
        relative_position_errors=rel_err,
    )


# --- file format --------------------------------------------------------------

STICK_CSV_HEADER = ["offset_hz", "intensity", "f1_low", "f_low", "f1_up", "f_up"]


def write_stick_csv(s, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(STICK_CSV_HEADER)
        for ln in s.lines:
            w.writerow(
                [
                    repr(float(ln.offset)),
                    repr(float(ln.intensity)),
                    ln.lower.f1,
                    str(ln.lower.f),
                    ln.upper.f1,
                    str(ln.upper.f),
                ]
            )


def read_stick_csv(path):
    lines = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != STICK_CSV_HEADER:
            raise ValueError(f"unexpected stick CSV header {reader.fieldnames}")
        for row in reader:
            lines.append(
                HyperfineLine(
                    float(row["offset_hz"]),
                    float(row["intensity"]),
                    SublevelLabel(int(row["f1_low"]), Fraction(row["f_low"])),
                    SublevelLabel(int(row["f1_up"]), Fraction(row["f_up"])),
                )
            )
    return StickSpectrum(lines)

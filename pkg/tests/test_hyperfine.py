import math
from fractions import Fraction

import numpy as np
import pytest
from sympy import Rational
from sympy.physics.wigner import wigner_6j as sympy_6j

from dopplerkb import hyperfine as hf
from dopplerkb.hyperfine import GROUND_SAQ63, UPPER_SAQ63, HyperfineConstants, SublevelLabel
from dopplerkb.lineshape import LineShapeParams
from dopplerkb.optim import RankDeficientError

DOPPLER = 49.886e6
ENV = LineShapeParams(doppler_hwhm_e=DOPPLER)
J, K = 6, 3


# --- explicit product-space oracle ------------------------------------------------------


def spin_matrices(j):
    m = np.arange(j, -j - 1, -1)
    jp = np.zeros((len(m), len(m)))
    for i in range(1, len(m)):
        jp[i - 1, i] = math.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    jx = 0.5 * (jp + jp.T)
    jy = -0.5j * (jp - jp.T)
    return [jx, jy, np.diag(m).astype(complex)]


class ProductSpace:
    """|J m_J> x |I_N m_N> x |I_H m_H>, 13 x 3 x 4 = 156 states."""

    def __init__(self, j=J):
        self.j = j
        dims = (2 * j + 1, 3, 4)
        eye = [np.eye(d) for d in dims]
        ops = [spin_matrices(j), spin_matrices(1), spin_matrices(1.5)]
        self.J, self.N, self.H = (
            [np.kron(np.kron(*( [o if k == s else eye[k] for k in range(2)] )), eye[2]) if s < 2 else np.kron(np.kron(eye[0], eye[1]), o) for o in ops[s]]
            for s in range(3)
        )
        self.dim = int(np.prod(dims))

    @staticmethod
    def dot(a, b):
        return sum(x @ y for x, y in zip(a, b))

    def hamiltonian(self, c, k=K):
        j = self.j
        jj = j * (j + 1)
        nj = self.dot(self.N, self.J)
        hj = self.dot(self.H, self.J)
        nh = self.dot(self.N, self.H)
        eye = np.eye(self.dim)
        denom = (2 * j - 1) * (2 * j + 3)
        vq = (3 * nj @ nj + 1.5 * nj - 2 * jj * eye) / (2 * 1 * 1 * denom)
        h = c.eqq * (3 * k * k / jj - 1) * vq + c.r * nj + c.s * hj
        h = h + c.t * (3 * nj @ hj + 3 * hj @ nj - 2 * jj * nh) / denom
        h = h + c.u * (3 * hj @ hj + 1.5 * hj - 3.75 * jj * eye) / denom
        return h

    def projector(self, f1, f):
        f1_vec = [a + b for a, b in zip(self.J, self.N)]
        f_vec = [a + b for a, b in zip(f1_vec, self.H)]
        p = np.eye(self.dim, dtype=complex)
        for op, val in ((self.dot(f1_vec, f1_vec), f1 * (f1 + 1)), (self.dot(f_vec, f_vec), float(f) * (float(f) + 1))):
            vals, vecs = np.linalg.eigh(op)
            sel = np.abs(vals - val) < 1e-6
            p = p @ (vecs[:, sel] @ vecs[:, sel].conj().T)
        return p


@pytest.fixture(scope="module")
def space():
    return ProductSpace()


def test_6j_against_sympy():
    cases = [(6, 5, 1, 5, 6, 1), (Fraction(13, 2), Fraction(11, 2), 1, 6, 6, Fraction(1, 2)), (1, 1, 1, 1, 1, 1), (6, 7, 1, 7, 6, 1), (2, 2, 2, 2, 2, 2)]
    for c in cases:
        assert hf.wigner_6j(*c) == pytest.approx(float(sympy_6j(*[Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x for x in c])), abs=1e-14)
    assert hf.wigner_6j(1, 1, 5, 1, 1, 1) == 0.0


def test_exact_energies_match_full_diagonalisation(space):
    for c in (GROUND_SAQ63, UPPER_SAQ63):
        vals = np.linalg.eigvalsh(space.hamiltonian(c)) * 1e3
        expected = []
        for lab, e in hf.sublevel_energies(c, exact=True):
            expected += [e] * int(2 * lab.f + 1)
        np.testing.assert_allclose(np.sort(vals), np.sort(expected), atol=1e-6)


def test_first_order_energies_are_coupled_basis_diagonal(space):
    h = space.hamiltonian(GROUND_SAQ63)
    for lab, e in hf.sublevel_energies(GROUND_SAQ63):
        p = space.projector(lab.f1, lab.f)
        assert np.trace(p).real == pytest.approx(2 * lab.f + 1)
        diag = (np.trace(p @ h) / np.trace(p)).real * 1e3
        assert e == pytest.approx(diag, abs=1e-6)


def test_line_strengths_match_dipole_oracle(space):
    # any rank-1 operator on J alone gives the Q-branch strengths
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    ref = {}
    projectors = {lab: space.projector(lab.f1, lab.f) for lab in hf.sublevel_labels(J)}
    for ln in s.lines:
        pl, pu = projectors[ln.lower], projectors[ln.upper]
        ref[(ln.lower, ln.upper)] = sum(np.trace(pl @ q @ pu @ q.conj().T).real for q in space.J)
    total = sum(ref.values())
    for ln in s.lines:
        assert ln.intensity == pytest.approx(ref[(ln.lower, ln.upper)] / total, abs=1e-12)


GOLDEN_GROUND_KHZ = {
    (5, Fraction(7, 2)): 367.965795,
    (5, Fraction(9, 2)): 274.280739,
    (5, Fraction(11, 2)): 159.773415,
    (5, Fraction(13, 2)): 24.441805,
    (6, Fraction(9, 2)): -180.712930,
    (6, Fraction(11, 2)): -277.129686,
    (6, Fraction(13, 2)): -391.080054,
    (6, Fraction(15, 2)): -522.565679,
    (7, Fraction(11, 2)): 370.020615,
    (7, Fraction(13, 2)): 269.107115,
    (7, Fraction(15, 2)): 152.665000,
    (7, Fraction(17, 2)): 20.692786,
}


def test_golden_sublevel_energies():
    got = {(lab.f1, lab.f): v / 1e6 for lab, v in hf.sublevel_energies(GROUND_SAQ63)}
    assert set(got) == set(GOLDEN_GROUND_KHZ)
    for key, ref in GOLDEN_GROUND_KHZ.items():
        assert got[key] == pytest.approx(ref * 1e-3, abs=1e-9)


def test_proton_terms_trace_out():
    # (2F+1)-weighted mean over F leaves the quadrupole and R(I_N.J) terms
    c = GROUND_SAQ63
    jj = J * (J + 1)
    e = hf.sublevel_energies(c)
    for f1 in (5, 6, 7):
        rows = [(lab.f, v) for lab, v in e if lab.f1 == f1]
        mean = sum((2 * f + 1) * v for f, v in rows) / sum(2 * f + 1 for f, _ in rows) / 1e3
        nj = (f1 * (f1 + 1) - jj - 2) / 2
        vq = (3 * nj * nj + 1.5 * nj - 2 * jj) / (2 * (2 * J - 1) * (2 * J + 3))
        assert mean == pytest.approx(c.eqq * (3 * K * K / jj - 1) * vq + c.r * nj, abs=1e-9)


def test_stick_spectrum_counts_and_normalisation():
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    assert len(s) == 78
    assert s.intensities.sum() == pytest.approx(1.0, abs=1e-14)
    zero = [ln for ln in s.lines if abs(ln.lower.f1 - ln.upper.f1) == 2]
    assert len(zero) == 12 and all(ln.intensity == 0 for ln in zero)
    main = sum(ln.intensity for ln in s.lines if ln.is_main)
    assert main > 0.9


def test_weak_satellites_and_crossovers_positions():
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    weak = [ln for ln in s.lines if ln.intensity > 1e-4 and abs(ln.offset - s.center_of_gravity) > 400e3]
    assert weak and all(450e3 < abs(ln.offset) < 700e3 for ln in weak)
    neg, pos = hf.crossover_groups(hf.crossover_positions(s, min_weight=1e-3))
    assert -350e3 < neg < -200e3 and 200e3 < pos < 350e3


def test_broadening_correction_saq63_constants():
    corr = hf.broadening_correction(hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63), ENV)
    assert corr.width_ppm == pytest.approx(4.355, rel=0.10)
    assert corr.kb_ppm == pytest.approx(-8.71, rel=0.10)
    assert corr.kb_ppm == -2 * corr.width_ppm
    assert corr.weak_fraction == pytest.approx(0.91, abs=0.05)


def test_exact_diagonalisation_changes_little():
    a = hf.broadening_correction(hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63), ENV)
    b = hf.broadening_correction(hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63, exact=True), ENV)
    assert b.width_ppm == pytest.approx(a.width_ppm, rel=0.01)


def test_broadening_is_shift_invariant_and_quadratic():
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    base = hf.broadening_correction(s, ENV).width_ppm
    assert hf.broadening_correction(s.shifted(3e5), ENV).width_ppm == pytest.approx(base, abs=0.01)
    for lam in (0.5, 2.0):
        assert hf.broadening_correction(s.scaled(lam), ENV).width_ppm / base == pytest.approx(lam**2, rel=0.02)


def test_broadening_matches_variance_estimate():
    # small-spread limit: relative width change = var / doppler^2
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    var = np.sum(s.intensities * (s.offsets - s.center_of_gravity) ** 2)
    assert hf.broadening_correction(s, ENV).width_ppm == pytest.approx(var / DOPPLER**2 * 1e6, rel=0.01)


def test_envelope_family_independence():
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    env = ENV.replace(homogeneous_hw=300e3, theta=7e-4)
    v = hf.broadening_correction(s, env, model="voigt").width_ppm
    g = hf.broadening_correction(s, env, model="galatry_expansion").width_ppm
    assert abs(v - g) < 0.05


def test_all_zero_constants_collapse():
    z = HyperfineConstants(0.0)
    s = hf.stick_spectrum(z, z)
    assert np.all(s.offsets == 0)
    assert hf.broadening_correction(s, ENV).width_ppm == pytest.approx(0.0, abs=1e-6)


def test_identical_levels_put_main_lines_at_zero():
    s = hf.stick_spectrum(GROUND_SAQ63, GROUND_SAQ63)
    assert all(ln.offset == 0 for ln in s.lines if ln.is_main)


def test_broadening_input_errors():
    with pytest.raises(ValueError):
        hf.broadening_correction(hf.StickSpectrum([]), ENV)
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    with pytest.raises(ValueError):
        hf.broadening_correction(s, LineShapeParams(doppler_hwhm_e=1e5))
    with pytest.raises(ValueError):
        hf.sublevel_energies(GROUND_SAQ63, j=6, k=2)


def test_stick_csv_roundtrip(tmp_path):
    s = hf.stick_spectrum(GROUND_SAQ63, UPPER_SAQ63)
    path = tmp_path / "sticks.csv"
    hf.write_stick_csv(s, path)
    assert path.read_text().splitlines()[0] == "offset_hz,intensity,f1_low,f_low,f1_up,f_up"
    back = hf.read_stick_csv(path)
    np.testing.assert_array_equal(back.offsets, s.offsets)
    np.testing.assert_allclose(back.intensities, s.intensities, rtol=1e-15)
    assert [ln.lower for ln in back.lines] == [ln.lower for ln in s.lines]


def _triplet_data(d_eqq, d_r, seed=0, noise=2e-3):
    nu = np.linspace(-150e3, 150e3, 301)
    y = hf.triplet_model(nu, d_eqq, d_r, fwhm=8e3, center=1.5e3, scale=1.0, offset=0.01, slope=1e-7)
    rng = np.random.default_rng(seed)
    return nu, y + noise * rng.standard_normal(nu.size)


def test_triplet_fit_recovers_deltas():
    nu, y = _triplet_data(-196.8, -0.535)
    fit = hf.fit_triplet(nu, y, sigma=np.full(nu.size, 2e-3))
    assert fit.delta_eqq == pytest.approx(-196.8, abs=4 * fit.errors[0])
    assert fit.delta_r == pytest.approx(-0.535, abs=4 * fit.errors[1])
    assert np.all(fit.relative_position_errors > 0)


def test_triplet_zero_deltas_single_peak():
    # with identical levels the three multiplets coincide
    centers, _ = hf.multiplet_centers(0.0, 0.0, GROUND_SAQ63, GROUND_SAQ63)
    np.testing.assert_allclose(centers, 0.0, atol=1e-9)


def test_triplet_rejects_flat_signal():
    nu = np.linspace(-150e3, 150e3, 301)
    with pytest.raises(RankDeficientError):
        hf.fit_triplet(nu, np.zeros_like(nu))

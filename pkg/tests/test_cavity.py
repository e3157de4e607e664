"""Cavity spectra: resonances, complex poles, response peaks, lifetimes."""

import cmath
import math

import numpy as np
import pytest

from qlev import cavity
from qlev.airy import airy_phase, airy_zero
from qlev.cavity import (
    METHOD_EFFECTIVE_RANGE,
    METHOD_NUMERIC,
    METHOD_SCATTERING_LENGTH,
    LorentzianPeak,
    ResonanceRecord,
    complex_poles,
    ideal_levels,
    lifetime,
    lorentzian_fit,
    pole_lifetime,
    pole_records,
    read_resonance_csv,
    read_response_csv,
    resonances_effective_range,
    resonances_numeric,
    response_function,
    response_scan,
    rho_effective_range,
    scattering_length_levels,
    scattering_length_lifetime,
    scattering_length_records,
    transition_frequencies,
    write_resonance_csv,
    write_response_csv,
)
from qlev.effrange import preset_coefficients, r_model, v4_coefficients
from qlev.errors import (
    BracketFailure,
    FitDiverged,
    PeakOverlap,
    QlevUsageError,
    WrongBasin,
)
from qlev.potential import HBAR


# ---------------------------------------------------------------------------
# ideal ladder
# ---------------------------------------------------------------------------


def test_ideal_levels_are_airy_zeros(setup):
    levels = ideal_levels(setup, 8)
    for n, level in enumerate(levels, start=1):
        assert level == pytest.approx(airy_zero(n) * setup.eps_g, rel=1e-15)


def test_ideal_transition_frequency(setup):
    levels = ideal_levels(setup, 2)
    omega21 = (levels[1] - levels[0]) / HBAR
    assert omega21 == pytest.approx(1599.3894, abs=5e-4)


def test_numeric_route_reproduces_ideal_ladder(setup):
    records = resonances_numeric(setup, None, 6)
    for rec in records:
        want = airy_zero(rec.n) * setup.eps_g
        assert rec.e_real == pytest.approx(want, rel=1e-9)
        assert rec.method == METHOD_NUMERIC
        assert rec.survival == pytest.approx(1.0, abs=1e-9)


def test_effective_range_route_reproduces_ideal_ladder(setup):
    records = resonances_effective_range(setup, None, 6)
    for rec in records:
        want = airy_zero(rec.n) * setup.eps_g
        assert rec.e_real == pytest.approx(want, rel=1e-9)
        assert rec.method == METHOD_EFFECTIVE_RANGE


def test_level_spacing_shrinks_with_n(setup):
    levels = ideal_levels(setup, 12)
    gaps = [b - a for a, b in zip(levels, levels[1:])]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


# ---------------------------------------------------------------------------
# scattering-length shift
# ---------------------------------------------------------------------------


def test_scattering_length_levels_shift_uniformly(setup, mirror):
    coeffs = preset_coefficients(mirror)
    base = ideal_levels(setup, 5)
    shifted = scattering_length_levels(setup, coeffs.a, 5)
    mg = setup.mass * setup.gravity
    for e0, e1 in zip(base, shifted):
        assert e1 == pytest.approx(e0 + mg * coeffs.a, rel=1e-14)
        assert e1.imag < 0  # Im(a) < 0: every level acquires a width


def test_transitions_immune_to_uniform_shift(setup, mirror):
    # a state-independent complex shift cancels in E_n - E_m exactly
    coeffs = preset_coefficients(mirror)
    recs = scattering_length_records(setup, coeffs.a, 3)
    assert all(r.method == METHOD_SCATTERING_LENGTH for r in recs)
    ideal = [
        ResonanceRecord(n=n, e_real=airy_zero(n) * setup.eps_g, method=METHOD_NUMERIC)
        for n in (1, 2, 3)
    ]
    got = transition_frequencies(recs, [(2, 1), (3, 1)])
    want = transition_frequencies(ideal, [(2, 1), (3, 1)])
    assert got[0] == pytest.approx(want[0], rel=1e-14)
    assert got[1] == pytest.approx(want[1], rel=1e-14)


def test_transition_frequencies_missing_level(setup):
    recs = scattering_length_records(setup, -1e-9j, 2)
    with pytest.raises(QlevUsageError):
        transition_frequencies(recs, [(5, 1)])


# ---------------------------------------------------------------------------
# resonance conditions: the two routes agree on shared physics
# ---------------------------------------------------------------------------


def test_phase_condition_at_effective_range_roots(setup, mirror):
    # at each root the full round-trip phase is a multiple of 2 pi
    coeffs = preset_coefficients(mirror)
    records = resonances_effective_range(setup, coeffs, 5)
    for rec in records:
        bold_e = rec.e_real / setup.eps_g
        r = r_model(coeffs, math.sqrt(bold_e) / setup.ell_g, setup)
        phase = 2.0 * airy_phase(-bold_e) + cmath.phase(-r)
        assert phase == pytest.approx(2.0 * math.pi * rec.n, abs=1e-10)
        assert rec.survival == pytest.approx(abs(r), rel=1e-12)


def test_routes_agree_on_shared_v4_model(setup, mirror):
    # same physics both ways: analytic v4 coefficients vs wave equation
    coeffs = v4_coefficients(mirror.ell)
    model = mirror.model("v4")
    ana = resonances_effective_range(setup, coeffs, 3)
    num = resonances_numeric(setup, model, 3)
    for a, b in zip(ana, num):
        assert a.e_real == pytest.approx(b.e_real, abs=1e-5 * setup.eps_g)


def test_numeric_resonance_has_unimodular_defect(setup, mirror):
    records = resonances_numeric(setup, mirror.model("v4"), 2)
    for rec in records:
        assert rec.survival is not None
        assert 0.97 < rec.survival < 1.0  # a little flux tunnels into the surface


def test_bracket_failure_for_extreme_shift(setup):
    # a huge complex scattering length pushes the root out of its bracket
    wild = v4_coefficients(3.5e-6)  # ell comparable to ell_g
    with pytest.raises((BracketFailure, QlevUsageError)):
        resonances_effective_range(setup, wild, 2)


# ---------------------------------------------------------------------------
# complex poles
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def silica_coeffs(silica):
    return preset_coefficients(silica)


@pytest.fixture(scope="module")
def silica_poles(setup, silica_coeffs):
    return complex_poles(setup, silica_coeffs, 4)


def test_poles_sit_below_their_resonances(setup, silica_coeffs, silica_poles):
    records = resonances_effective_range(setup, silica_coeffs, 4)
    for rec, pole in zip(records, silica_poles):
        assert pole.imag < 0
        assert pole.real == pytest.approx(rec.e_real, abs=3e-6 * setup.eps_g)


def test_pole_is_a_true_root_of_the_response_denominator(setup, silica_coeffs, silica_poles):
    for pole in silica_poles[:2]:
        rho = rho_effective_range(setup, silica_coeffs, pole / setup.eps_g)
        assert abs(rho - 1.0) < 1e-9


def test_pole_widths_nearly_n_independent(silica_poles):
    widths = [-p.imag for p in silica_poles]
    spread = (max(widths) - min(widths)) / widths[0]
    assert spread < 0.02  # the universal-width regime


def test_pole_lifetimes(setup, silica_coeffs, silica_poles):
    tau1 = pole_lifetime(silica_poles[0])
    assert tau1 == pytest.approx(HBAR / (2.0 * abs(silica_poles[0].imag)), rel=1e-15)
    # the closed-form lifetime from b alone lands within a few percent
    tau_b = scattering_length_lifetime(setup, silica_coeffs.b)
    assert tau1 == pytest.approx(tau_b, rel=0.05)
    with pytest.raises(QlevUsageError):
        pole_lifetime(complex(1.0, 0.0))
    with pytest.raises(QlevUsageError):
        scattering_length_lifetime(setup, -1e-9)


def test_wrong_basin_guard(setup, silica_coeffs):
    # seeding the Newton hunt with nonsense must be caught, not returned
    with pytest.raises((WrongBasin, QlevUsageError)):
        cavity._pole_newton(
            lambda z: rho_effective_range(setup, silica_coeffs, z), 3.2, "test"
        )


def test_pole_records_roundtrip(setup, silica_poles, tmp_path):
    records = pole_records(setup, silica_poles, METHOD_EFFECTIVE_RANGE)
    assert [r.n for r in records] == [1, 2, 3, 4]
    path = tmp_path / "poles.csv"
    write_resonance_csv(setup, records, path, surface="silica-bulk")
    back, surfaces = read_resonance_csv(setup, path)
    assert surfaces == ["silica-bulk"] * 4
    for orig, parsed in zip(records, back):
        assert parsed.n == orig.n
        assert parsed.e_real == orig.e_real
        assert parsed.e_complex == orig.e_complex
        assert parsed.lifetime_s == orig.lifetime_s
        assert parsed.method == orig.method


def test_resonance_record_validation(setup):
    with pytest.raises(QlevUsageError):
        ResonanceRecord(n=0, e_real=1.0, method=METHOD_NUMERIC)
    with pytest.raises(QlevUsageError):
        ResonanceRecord(n=1, e_real=1.0, method="guesswork")
    with pytest.raises(QlevUsageError):
        ResonanceRecord(
            n=1, e_real=1.0, method=METHOD_NUMERIC, e_complex=complex(1.0, 0.5)
        )


# ---------------------------------------------------------------------------
# response function and Lorentzian peaks
# ---------------------------------------------------------------------------


def test_response_function_identities():
    rho = 0.3 + 0.4j
    f = response_function(rho)
    assert f == pytest.approx(rho / (1.0 - rho), rel=1e-15)
    # geometric series: one round trip, two, three ... summed
    total = sum(rho**j for j in range(1, 200))
    assert f == pytest.approx(total, rel=1e-12)
    with pytest.raises(QlevUsageError):
        response_function(1.0 + 0.0j)


def test_response_scan_peaks_near_ideal_levels(setup, silica_coeffs):
    grid = np.linspace(2.0, 2.7, 400)
    rows = response_scan(setup, silica_coeffs, grid)
    es = np.array([row[0] for row in rows])
    fs = np.array([row[1] for row in rows])
    peak_e = es[int(np.argmax(fs))]
    assert peak_e == pytest.approx(airy_zero(1), abs=5e-3)


def test_lorentzian_fit_recovers_synthetic_peak():
    center, width, amp = 2.34, 2.5e-3, 0.11
    es = np.linspace(center - 4 * width, center + 4 * width, 81)
    samples = [(float(e), amp / ((e - center) ** 2 + width**2)) for e in es]
    peak = lorentzian_fit(samples)
    assert peak.center == pytest.approx(center, abs=1e-12)
    assert peak.half_width == pytest.approx(width, rel=1e-10)
    assert peak.amplitude == pytest.approx(amp, rel=1e-10)
    assert peak.residual < 1e-12


def test_lorentzian_fit_on_real_response(setup, silica_coeffs):
    pole = complex_poles(setup, silica_coeffs, 1)[0] / setup.eps_g
    c0, w0 = pole.real, abs(pole.imag)
    grid = np.linspace(c0 - 1.8 * w0, c0 + 1.8 * w0, 91)
    peak = lorentzian_fit(response_scan(setup, silica_coeffs, grid))
    assert peak.center == pytest.approx(c0, abs=2e-6)
    assert peak.half_width == pytest.approx(w0, rel=1e-3)
    # peak amplitude ties to the pole residue: A = amp/w^2 at resonance
    assert peak.amplitude / w0**2 == pytest.approx(
        max(f for _, f in response_scan(setup, silica_coeffs, [c0])), rel=1e-2
    )


def test_lorentzian_fit_guards():
    with pytest.raises(QlevUsageError):
        lorentzian_fit([(0.0, 1.0)] * 5)
    # peak on the data edge
    es = np.linspace(0.0, 1.0, 21)
    with pytest.raises(QlevUsageError):
        lorentzian_fit([(float(e), math.exp(2 * e)) for e in es])
    # span too small next to the estimated width
    center, width = 2.34, 1e-2
    es = np.linspace(center - 0.3 * width, center + 0.3 * width, 31)
    with pytest.raises(QlevUsageError):
        lorentzian_fit([(float(e), 1.0 / ((e - center) ** 2 + width**2)) for e in es])


def test_lorentzian_fit_rejects_overlapping_peaks():
    c1, c2, w = 1.0, 1.03, 4e-3
    es = np.linspace(0.98, 1.05, 141)
    samples = [
        (
            float(e),
            1.0 / ((e - c1) ** 2 + w**2) + 0.8 / ((e - c2) ** 2 + w**2),
        )
        for e in es
    ]
    with pytest.raises(PeakOverlap):
        lorentzian_fit(samples)


def test_lorentzian_fit_diverges_on_non_lorentzian_data():
    # a flat-topped single bump: right topology, wrong line shape
    center, width = 2.34, 2.5e-3
    es = np.linspace(center - 4 * width, center + 4 * width, 81)
    samples = [
        (float(e), 1.0 / (1.0 + ((e - center) / width) ** 8)) for e in es
    ]
    with pytest.raises(FitDiverged):
        lorentzian_fit(samples)


def test_lorentzian_peak_validation():
    with pytest.raises(QlevUsageError):
        LorentzianPeak(center=1.0, half_width=0.0, amplitude=1.0, residual=0.0)


# ---------------------------------------------------------------------------
# numeric poles (wave-equation route)
# ---------------------------------------------------------------------------


def test_numeric_pole_matches_effective_range_for_shared_model(setup, silica):
    # the factorized effective-range response and the wave equation agree
    # on the pole of the shared v4 potential to a few 1e-5 eps_g
    coeffs = v4_coefficients(silica.ell)
    model = silica.model("v4")
    p_ana = complex_poles(setup, coeffs, 1)[0] / setup.eps_g
    p_num = complex_poles(setup, model, 1)[0] / setup.eps_g
    assert abs(p_ana.real - p_num.real) < 1e-5
    assert abs(p_ana.imag - p_num.imag) < 5e-5


def test_response_csv_roundtrip(tmp_path, setup, silica_coeffs):
    rows = response_scan(setup, silica_coeffs, np.linspace(2.0, 2.7, 25))
    path = tmp_path / "scan.csv"
    write_response_csv(rows, path)
    es, fs = read_response_csv(path)
    assert list(es) == [row[0] for row in rows]
    assert list(fs) == [row[1] for row in rows]
    assert path.read_text().splitlines()[0] == "E_over_epsg,abs_f_sq"

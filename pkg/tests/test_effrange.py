"""Effective-range expansion of quantum reflection: model, fit, inversion."""

import cmath
import math

import numpy as np
import pytest

from qlev.effrange import (
    ALPHA0_V4,
    ALPHA2_V4,
    EULER_GAMMA,
    EffectiveRangeCoefficients,
    alpha,
    coefficients_from_json,
    coefficients_to_json,
    fit_coefficients,
    invert_to_kA,
    preset_coefficients,
    r_model,
    scattering_length,
    synthetic_reflection,
    v4_coefficients,
)
from qlev.errors import (
    DegenerateR,
    IllConditionedFit,
    ModelNonPhysical,
    QlevUsageError,
    WindowTooNarrow,
)
from qlev.potential import BOHR_RADIUS
from qlev.scatter import ReflectionData


# ---------------------------------------------------------------------------
# closed-form constants
# ---------------------------------------------------------------------------


def test_v4_constants():
    assert ALPHA0_V4 == 1.0
    want = (8.0 / 3.0) * (EULER_GAMMA + math.log(2.0)) - 28.0 / 9.0 - 2j * math.pi / 3.0
    assert ALPHA2_V4 == pytest.approx(want, rel=1e-15)
    assert ALPHA2_V4.real == pytest.approx(0.2765231434528306, rel=1e-14)
    assert ALPHA2_V4.imag == pytest.approx(-2.0943951023931953, rel=1e-14)


def test_alpha_series_at_unit_k(setup):
    coeffs = v4_coefficients(520.06 * BOHR_RADIUS)
    got = alpha(coeffs, 1.0)
    want = ALPHA0_V4 + 1j * math.pi / 3.0 + ALPHA2_V4  # log(1) kills the K^2 ln K term
    assert got == pytest.approx(want, rel=1e-15)


def test_alpha_low_k_limit(setup):
    coeffs = v4_coefficients(520.06 * BOHR_RADIUS)
    small = alpha(coeffs, 1e-8)
    assert small == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(QlevUsageError):
        alpha(coeffs, 0.0)
    with pytest.raises(QlevUsageError):
        alpha(coeffs, -0.5)


# ---------------------------------------------------------------------------
# the r <-> kA inversion
# ---------------------------------------------------------------------------


def test_invert_fixed_points():
    assert invert_to_kA(-1.0) == 0.0
    assert invert_to_kA(0.0) == pytest.approx(-1j, rel=1e-15)
    with pytest.raises(DegenerateR):
        invert_to_kA(1.0)
    with pytest.raises(DegenerateR):
        invert_to_kA(1.0 + 1e-16j)


def test_model_inversion_roundtrip(setup):
    coeffs = v4_coefficients(520.06 * BOHR_RADIUS)
    ell = coeffs.ell
    for big_k in (1e-3, 0.05, 0.3):
        k = big_k / ell
        r = r_model(coeffs, k, setup)
        kA = invert_to_kA(r, k)
        want = -1j * big_k * alpha(coeffs, big_k)
        assert kA == pytest.approx(want, rel=1e-12)


def test_r_model_physical_bounds(setup, mirror):
    coeffs = preset_coefficients(mirror)
    for big_k in np.geomspace(1e-4, 0.4, 25):
        r = r_model(coeffs, float(big_k) / coeffs.ell, setup)
        assert abs(r) <= 1.0 + 1e-12
    # low-K limit: total reflection with the universal -1 phase
    r0 = r_model(coeffs, 1e-6 / coeffs.ell, setup)
    assert r0 == pytest.approx(-1.0, abs=1e-5)


def test_r_model_rejects_unphysical_coefficients(setup):
    # Re(alpha) < 0 sends |r| above 1: flux creation, not a surface
    bad = EffectiveRangeCoefficients(
        ell=520.0 * BOHR_RADIUS, alpha0=-0.5 + 0.0j, alpha2=0.0j
    )
    with pytest.raises(ModelNonPhysical):
        r_model(bad, 0.01 / bad.ell, setup)


def test_scattering_lengths_of_presets(mirror, silica):
    a_m, b_m = scattering_length(preset_coefficients(mirror))
    assert a_m / BOHR_RADIUS == pytest.approx(-53.46 - 544.40j, abs=0.05)
    assert b_m / BOHR_RADIUS == pytest.approx(544.40, abs=0.05)
    assert b_m == pytest.approx(28.808e-9, rel=1e-3)
    a_s, b_s = scattering_length(preset_coefficients(silica))
    assert b_s / BOHR_RADIUS == pytest.approx(273.24, abs=0.1)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


def test_closed_loop_recovery_all_presets(setup, mirror, silicon, silica):
    # synthesize r(k) from each preset's own coefficients, fit it back,
    # and recover the inputs far inside their quoted precision
    for preset in (mirror, silicon, silica):
        coeffs = preset_coefficients(preset)
        rows = synthetic_reflection(coeffs, setup)
        fitted = fit_coefficients(rows, coeffs.ell, setup=setup, label=preset.name)
        assert fitted.alpha0 == pytest.approx(coeffs.alpha0, abs=5e-11)
        assert fitted.alpha2 == pytest.approx(coeffs.alpha2, abs=5e-7)
        assert fitted.label == preset.name
        assert fitted.residual < 1e-10


def test_fit_stability_under_density_doubling(setup, mirror):
    coeffs = preset_coefficients(mirror)
    fit_lo = fit_coefficients(
        synthetic_reflection(coeffs, setup, n_samples=200), coeffs.ell, setup=setup
    )
    fit_hi = fit_coefficients(
        synthetic_reflection(coeffs, setup, n_samples=400), coeffs.ell, setup=setup
    )
    assert fit_hi.alpha0 == pytest.approx(fit_lo.alpha0, abs=1e-9)
    assert fit_hi.alpha2 == pytest.approx(fit_lo.alpha2, abs=1e-6)


def test_fit_window_guards(setup, mirror):
    coeffs = preset_coefficients(mirror)
    rows = synthetic_reflection(coeffs, setup, n_samples=200)
    with pytest.raises(WindowTooNarrow):
        # upper edge below the sample span leaves too few points
        fit_coefficients(rows[:30], coeffs.ell, setup=setup)
    with pytest.raises(WindowTooNarrow):
        # all samples crowd the bottom 10% of the requested window
        fit_coefficients(rows, coeffs.ell, window=(0.5, 50000.0), setup=setup)


def test_fit_rejects_degenerate_abscissas(setup, mirror):
    coeffs = preset_coefficients(mirror)
    k = 2.0e6  # a single K value repeated: basis columns collinear
    row = ReflectionData(
        k=k, big_k=k * coeffs.ell, r=r_model(coeffs, k, setup),
        flux_defect=0.0, x_min=0.0, x_max=0.0, n_steps=0,
    )
    with pytest.raises((IllConditionedFit, WindowTooNarrow)):
        fit_coefficients([row] * 80, coeffs.ell, setup=setup)


def test_fit_ell_validation(setup, mirror):
    coeffs = preset_coefficients(mirror)
    rows = synthetic_reflection(coeffs, setup, n_samples=120)
    with pytest.raises(QlevUsageError):
        fit_coefficients(rows, -1.0, setup=setup)


# ---------------------------------------------------------------------------
# container and serialization
# ---------------------------------------------------------------------------


def test_coefficients_validation():
    with pytest.raises(QlevUsageError):
        EffectiveRangeCoefficients(ell=0.0, alpha0=1.0, alpha2=0.0j)
    with pytest.raises(QlevUsageError):
        EffectiveRangeCoefficients(
            ell=1e-8, alpha0=1.0, alpha2=0.0j, window=(5.0, 1.0)
        )


def test_scattering_length_properties(mirror):
    coeffs = preset_coefficients(mirror)
    assert coeffs.a == pytest.approx(-1j * coeffs.ell * coeffs.alpha0, rel=1e-15)
    assert coeffs.b == pytest.approx(-coeffs.a.imag, rel=1e-15)
    assert coeffs.b > 0


def test_json_roundtrip_is_bit_exact(tmp_path, silica):
    coeffs = preset_coefficients(silica)
    text = coefficients_to_json(coeffs)
    back = coefficients_from_json(text)
    assert back == coeffs
    path = tmp_path / "coeffs.json"
    coefficients_to_json(coeffs, path)
    assert coefficients_from_json(path) == coeffs


def test_json_rejects_garbage(tmp_path):
    with pytest.raises(QlevUsageError):
        coefficients_from_json('{"ell_m": "not-a-number"}')


def test_synthetic_reflection_marks_provenance(setup, mirror):
    rows = synthetic_reflection(preset_coefficients(mirror), setup, n_samples=60)
    assert len(rows) == 60
    assert all(row.n_steps == 0 and row.flux_defect == 0.0 for row in rows)
    ks = [row.k for row in rows]
    assert all(b > a for a, b in zip(ks, ks[1:]))

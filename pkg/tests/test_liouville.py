"""Liouville transforms and the Langer coordinate for the levitation problem."""

import csv
import math

import numpy as np
import pytest

from qlev.errors import (
    AtTurningPoint,
    NearBoundary,
    OutsideMappedDomain,
    QlevUsageError,
)
from qlev.liouville import (
    CoordinateMap,
    LangerProblem,
    badlands,
    langer_f,
    langer_grid_rows,
    langer_map,
    schwarzian,
    transform_f,
    write_langer_csv,
)
from qlev.potential import f_function


# ---------------------------------------------------------------------------
# generic transform machinery
# ---------------------------------------------------------------------------


def test_schwarzian_of_affine_map_vanishes():
    m = CoordinateMap(forward=lambda z: 3.0 * z - 1.0, derivative=lambda z: 3.0)
    assert schwarzian(m, 0.7) == pytest.approx(0.0, abs=1e-9)


def test_schwarzian_of_square_map():
    # z~ = z^2: S = -3/(2 z^2), so -3/2 at z = 1
    m = CoordinateMap(forward=lambda z: z * z, derivative=lambda z: 2.0 * z)
    assert schwarzian(m, 1.0) == pytest.approx(-1.5, rel=1e-7)


def test_schwarzian_of_moebius_map_vanishes():
    # 1/z is a Moebius transform; its Schwarzian is identically zero
    m = CoordinateMap(forward=lambda z: 1.0 / z, derivative=lambda z: -1.0 / z**2)
    assert schwarzian(m, 1.0) == pytest.approx(0.0, abs=1e-7)


def test_schwarzian_boundary_guard():
    m = CoordinateMap(
        forward=lambda z: z * z,
        derivative=lambda z: 2.0 * z,
        domain=(0.9999999999999, 1.0000000000001),
    )
    with pytest.raises(NearBoundary):
        schwarzian(m, 1.0)


def test_schwarzian_zero_derivative_guard():
    m = CoordinateMap(forward=lambda z: z * z, derivative=lambda z: 2.0 * z)
    with pytest.raises(QlevUsageError):
        schwarzian(m, 0.0)


def test_transform_f_exponential_map_closed_form():
    # z~ = e^z: z~' = e^z, S = -1/2, F~ = (F(z) + 1/4) e^{-2z}
    m = CoordinateMap(
        forward=math.exp, derivative=math.exp, inverse=math.log, length_scale=1.0
    )

    def f_orig(z):
        return 2.0 - z

    eq = transform_f(f_orig, m)
    for z_tilde in (0.8, 1.0, 2.5):
        z = math.log(z_tilde)
        want = (f_orig(z) + 0.25) / z_tilde**2
        assert eq.f_tilde(z_tilde) == pytest.approx(want, rel=1e-6)


def test_transform_rescale_preserves_wronskian():
    # sqrt(z~') rescaling keeps psi1 dpsi2 - psi2 dpsi1 invariant
    m = CoordinateMap(
        forward=math.exp, derivative=math.exp, inverse=math.log, length_scale=1.0
    )
    eq = transform_f(lambda z: 1.0, m)
    z = 0.4
    p1, dp1 = 0.7 + 0.2j, -0.3 + 1.0j
    p2, dp2 = 1.1 - 0.5j, 0.9 + 0.1j
    w = p1 * dp2 - p2 * dp1
    t1, td1 = eq.rescale_with_derivative(z, p1, dp1)
    t2, td2 = eq.rescale_with_derivative(z, p2, dp2)
    # d/dz~ = (1/z~') d/dz shrinks the Wronskian by exactly z~' ... which
    # the sqrt(z~') amplitude factor exactly restores
    assert t1 * td2 - t2 * td1 == pytest.approx(w, rel=1e-6)


def test_coordinate_map_invert_from_grid():
    zs = np.linspace(0.1, 4.0, 200)
    grid = np.column_stack([zs, zs**2, 2 * zs])
    m = CoordinateMap(forward=lambda z: z * z, derivative=lambda z: 2 * z, grid=grid)
    assert m.invert(2.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    with pytest.raises(OutsideMappedDomain):
        m.invert(100.0)


def test_coordinate_map_without_inversion_data():
    m = CoordinateMap(forward=lambda z: z, derivative=lambda z: 1.0)
    with pytest.raises(QlevUsageError):
        m.invert(0.5)


# ---------------------------------------------------------------------------
# the Langer problem: pure gravity
# ---------------------------------------------------------------------------


def test_pure_gravity_map_is_identity(setup):
    # with no surface potential the problem is already in normal form:
    # bold_z(u) = u and bold_F = bold_e - bold_z exactly
    problem = LangerProblem(setup, None, setup.from_eps_g(5.0))
    core = problem.core()
    for u in (0.3, 2.0, 4.999, 7.5):
        assert core.map_value(u) == pytest.approx(u, abs=1e-10)
    for bold_z in (0.5, 3.3, 6.0):
        assert langer_f(problem, bold_z) == pytest.approx(5.0 - bold_z, abs=1e-9)
    assert problem.bold_z_t == pytest.approx(5.0, rel=1e-15)
    assert problem.z_t == pytest.approx(5.0 * setup.ell_g, rel=1e-9)


def test_langer_problem_validation(setup):
    with pytest.raises(QlevUsageError):
        LangerProblem(setup, None, -1.0)


# ---------------------------------------------------------------------------
# the Langer problem: with a surface
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def v4_problem(setup, mirror):
    return LangerProblem(setup, mirror.model("v4"), setup.from_eps_g(5.0))


def test_turning_point_above_naive_height(setup, v4_problem):
    # the attractive tail deepens the well, pushing the F-root slightly
    # above E/mg; the anchor in the transformed coordinate is exact
    assert v4_problem.z_t > 5.0 * setup.ell_g
    assert (v4_problem.z_t / setup.ell_g - 5.0) < 1e-5
    assert v4_problem.bold_z_t == pytest.approx(5.0, rel=1e-15)


def test_map_is_monotone_and_anchored(setup, v4_problem):
    core = v4_problem.core()
    us = np.linspace(core.u_lo, core.u_hi, 300)
    vals = [core.map_value(float(u)) for u in us]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert core.map_value(core.u_t) == pytest.approx(5.0, abs=1e-12)
    # derivative consistent with finite differences of the map
    for u in (core.u_t - 0.8, core.u_t, core.u_t + 1.7):
        h = 1e-6
        fd = (core.map_value(u + h) - core.map_value(u - h)) / (2 * h)
        assert core.map_derivative(u) == pytest.approx(fd, rel=1e-6)


def test_langer_f_vanishes_at_anchor_linearly(v4_problem):
    # bold_F has a simple zero at bold_z_t with slope -> -1 (gravity alone)
    f_lo = langer_f(v4_problem, 4.99)
    f_hi = langer_f(v4_problem, 5.01)
    assert f_lo > 0 > f_hi
    slope = (f_hi - f_lo) / 0.02
    assert slope == pytest.approx(-1.0, abs=0.01)


def test_langer_f_matches_generic_transform(setup, v4_problem):
    # route A: the dedicated Langer machinery; route B: the generic
    # Liouville transform driven by the SI-facing coordinate map
    coord_map = langer_map(v4_problem)
    energy = v4_problem.energy

    def f_si(z):
        return f_function(setup, v4_problem.model, energy, z)

    eq = transform_f(f_si, coord_map)
    # both routes produce the dimensionless transformed wavevector; compare
    # across the window, straddling the turning point
    for bold_z in (0.2, 1.0, 3.2, 4.5, 5.0 - 1e-3, 5.4, 6.5):
        want = eq.f_tilde(bold_z)
        assert langer_f(v4_problem, bold_z) == pytest.approx(want, abs=1e-8)


def test_langer_map_forward_inverse_roundtrip(v4_problem):
    coord_map = langer_map(v4_problem)
    z0 = v4_problem.z_t * 1.13
    bold_z = coord_map.forward(z0)
    assert coord_map.invert(bold_z) == pytest.approx(z0, rel=1e-10)
    with pytest.raises(OutsideMappedDomain):
        coord_map.forward(1e6)


def test_window_override(setup, mirror):
    wide = LangerProblem(
        setup,
        mirror.model("v4"),
        setup.from_eps_g(5.0),
        window=(0.5 * setup.ell_g, 9.0 * setup.ell_g),
    )
    core = wide.core()
    assert core.u_lo == pytest.approx(0.5, rel=1e-12)
    assert core.u_hi == pytest.approx(9.0, rel=1e-12)
    with pytest.raises(QlevUsageError):
        LangerProblem(
            setup, mirror.model("v4"), setup.from_eps_g(5.0), window=(3.0, 1.0)
        ).core()


# ---------------------------------------------------------------------------
# badlands diagnostics
# ---------------------------------------------------------------------------


def test_badlands_scale_invariance(setup, mirror):
    # Q is dimensionless: evaluating through SI wrappers or through the
    # reduced profile must agree
    model = mirror.model("v4")
    problem = LangerProblem(setup, model, setup.from_eps_g(5.0))
    core = problem.core()
    for u in (0.01, 1.0, 4.0):
        got = badlands(setup, model, problem.energy, u * setup.ell_g)
        want = float(core.profile.q(u, 5.0))
        assert got == pytest.approx(want, rel=1e-12)


def test_badlands_quiet_in_allowed_region_loud_at_turning_point(setup, mirror):
    model = mirror.model("v4")
    energy = setup.from_eps_g(5.0)
    assert abs(badlands(setup, model, energy, 2.0 * setup.ell_g)) < 0.05
    near_tp = badlands(setup, model, energy, 5.0000001 * setup.ell_g)
    assert abs(near_tp) > 1e3
    with pytest.raises(AtTurningPoint):
        z_t = LangerProblem(setup, model, energy).z_t
        badlands(setup, model, energy, z_t)


def test_badlands_peak_at_tail_crossover(setup, mirror):
    # the -1/z^4 tail is WKB-transparent both deep down (Q ~ u^2) and in
    # the allowed zone; the WKB-breaking bump sits where |U| ~ E, at
    # u ~ (sigma^2/bold_e)^(1/4)
    model = mirror.model("v4")
    energy = setup.from_eps_g(5.0)
    sigma = mirror.ell / setup.ell_g
    u_cross = (sigma**2 / 5.0) ** 0.25
    assert badlands(setup, model, energy, u_cross * setup.ell_g) > 10.0
    # transparent again two decades deeper
    assert abs(badlands(setup, model, energy, 1e-2 * u_cross * setup.ell_g)) < 1e-2


# ---------------------------------------------------------------------------
# grid output
# ---------------------------------------------------------------------------


def test_grid_rows_and_csv_roundtrip(tmp_path, setup, v4_problem):
    rows = langer_grid_rows(v4_problem, n_points=60)
    assert len(rows) == 60
    path = tmp_path / "langer.csv"
    write_langer_csv(v4_problem, path, n_points=60)
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        parsed = [tuple(float(v) for v in row) for row in reader]
    assert header == ["z_m", "bold_z", "bold_f", "q"]
    assert parsed == [tuple(r) for r in rows]
    z_vals = [r[0] for r in rows]
    bz_vals = [r[1] for r in rows]
    assert all(b > a for a, b in zip(z_vals, z_vals[1:]))
    assert all(b > a for a, b in zip(bz_vals, bz_vals[1:]))
    # bold_f column is consistent with the direct evaluator
    for z, bz, bf, _ in rows[::15]:
        assert langer_f(v4_problem, bz) == pytest.approx(bf, rel=1e-12)

"""Liouville transformations of the 1D Schrödinger equation.

A coordinate change z -> z̃ together with the rescaling ψ̃ = sqrt(z̃′)·ψ
maps ψ″ + F·ψ = 0 onto ψ̃″ + F̃·ψ̃ = 0 with

    F̃(z̃) = (F(z) − S(z)/2) / z̃′(z)² ,      S = z̃‴/z̃′ − (3/2)(z̃″/z̃′)² ,

preserving Wronskians and therefore every scattering amplitude.  The Langer
coordinate is the choice that linearizes the problem at the classical
turning point z_t:

    (bold_z_t − bold_z)·bold_z′² = F ,   bold_z(z_t) = bold_z_t = E/eps_g ,

so the transformed local wavevector bold_F(bold_z) equals bold_z_t − bold_z
up to a correction that vanishes for the pure gravitational bouncer and is
tiny elsewhere except inside the badlands of the surface tail.

Everything here works internally in gravity units (u = z/ell_g, energies in
eps_g); the public operations accept and return SI quantities.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (
    AtTurningPoint,
    MultipleTurningPoints,
    NearBoundary,
    OutsideMappedDomain,
    QlevUsageError,
    SingularityExpansionFailure,
)
from .potential import PhysicalSetup, PotentialModel

__all__ = [
    "CoordinateMap",
    "LangerProblem",
    "GravityProfile",
    "schwarzian",
    "transform_f",
    "TransformedEquation",
    "langer_map",
    "badlands",
    "langer_f",
    "langer_grid_rows",
    "write_langer_csv",
]

_GL_X, _GL_W = leggauss(32)

#: half-width (in gravity lengths) of the turning-point series window
_SERIES_HALF_WIDTH = 0.25

#: badlands threshold defining where WKB launch data is trustworthy
WKB_BADLANDS_TOL = 1e-6


def _gl_panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    """32-node Gauss-Legendre integral of f over [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * float(np.sum(_GL_W * f(mid + half * _GL_X)))


# ---------------------------------------------------------------------------
# dimensionless potential profile on the gravity side
# ---------------------------------------------------------------------------


class GravityProfile:
    """F(u) = E/eps_g − u − U(u) and its u-derivatives, in gravity units.

    U(u) = V_CP(u·ell_g)/eps_g is the reduced surface potential; the pure
    bouncer corresponds to model=None (U ≡ 0).  Derivatives are analytic
    for the v4/v3v4 variants and spline-based for tabulated data.
    """

    def __init__(self, setup: PhysicalSetup, model: PotentialModel | None):
        self.setup = setup
        self.model = model
        ell_g = setup.ell_g
        eps_g = setup.eps_g
        if model is None:
            self.kind = "none"
            self.s2 = 0.0
        elif model.variant == "v4":
            self.kind = "v4"
            self.s2 = model.C4 / (eps_g * ell_g**4)
        elif model.variant == "v3v4":
            self.kind = "v3v4"
            self.s2 = model.C4 / (eps_g * ell_g**4)
            self.uc = model.z_c / ell_g
        else:
            self.kind = "table"
            self.s2 = model.C4 / (eps_g * ell_g**4)
            assert model.C3 is not None and model.z_grid is not None
            self.c3g = model.C3 / (eps_g * ell_g**3)
            self.u_lo_table = model.z_grid[0] / ell_g
            self.u_hi_table = model.z_grid[-1] / ell_g
            spl = model.spline()
            self._spl = [spl, spl.derivative(1), spl.derivative(2), spl.derivative(3)]
            self._spl_scale = [ell_g**k / eps_g for k in range(4)]
            self._ell_g = ell_g

    # -- reduced surface potential -------------------------------------------

    def u_potential(self, u, k: int = 0):
        """k-th u-derivative of U(u); vectorized over u."""
        u = np.asarray(u, dtype=float)
        if self.kind == "none":
            return np.zeros_like(u)
        if self.kind == "v4":
            return self._power_term(u, self.s2, 4, k)
        if self.kind == "v3v4":
            # partial fractions: 1/(u³(u+c)) = 1/(c u³) − 1/(c² u²) + 1/(c³ u) − 1/(c³(u+c))
            c = self.uc
            out = self._power_term(u, self.s2 / c, 3, k)
            out -= self._power_term(u, self.s2 / c**2, 2, k)
            out += self._power_term(u, self.s2 / c**3, 1, k)
            out -= self._power_term(u + c, self.s2 / c**3, 1, k)
            return out
        # tabulated
        out = np.empty_like(u)
        below = u < self.u_lo_table
        above = u > self.u_hi_table
        mid = ~(below | above)
        out[below] = self._power_term(u[below], self.c3g, 3, k)
        out[above] = self._power_term(u[above], self.s2, 4, k)
        if np.any(mid):
            if k <= 3:
                out[mid] = self._spl[k](u[mid] * self._ell_g) * self._spl_scale[k]
            else:
                out[mid] = 0.0
        return out

    @staticmethod
    def _power_term(u, amp: float, p: int, k: int):
        """k-th derivative of −amp·u^(−p)."""
        coef = -amp
        for j in range(k):
            coef *= -(p + j)
        return coef * u ** (-(p + k))

    # -- local wavevector ------------------------------------------------------

    def f(self, u, bold_e: float):
        u = np.asarray(u, dtype=float)
        return bold_e - u - self.u_potential(u)

    def f_deriv(self, u, k: int):
        """k-th u-derivative of F for k >= 1 (independent of energy)."""
        u = np.asarray(u, dtype=float)
        out = -self.u_potential(u, k)
        if k == 1:
            out = out - 1.0
        return out

    def q(self, u, bold_e: float):
        """Badlands function Q = F″/(4F²) − 5F′²/(16F³); vectorized."""
        f = self.f(u, bold_e)
        fp = self.f_deriv(u, 1)
        fpp = self.f_deriv(u, 2)
        return fpp / (4.0 * f * f) - 5.0 * fp * fp / (16.0 * f * f * f)


# ---------------------------------------------------------------------------
# coordinate maps
# ---------------------------------------------------------------------------


@dataclass
class CoordinateMap:
    """Monotone coordinate change z -> z̃ with derivative and inversion.

    grid rows are (z, z̃, z̃′); length_scale sets finite-difference steps
    for the Schwarzian; domain bounds protect difference stencils.
    """

    forward: Callable[[float], float]
    derivative: Callable[[float], float]
    grid: np.ndarray | None = None
    inverse: Callable[[float], float] | None = None
    length_scale: float = 1.0
    domain: tuple[float, float] | None = None

    def invert(self, z_tilde: float) -> float:
        if self.inverse is not None:
            return self.inverse(z_tilde)
        if self.grid is None:
            raise QlevUsageError("map carries neither inverse nor grid to invert with")
        zs = self.grid[:, 0]
        vals = self.grid[:, 1]
        if not (vals[0] <= z_tilde <= vals[-1]):
            raise OutsideMappedDomain(
                f"z̃ = {z_tilde:.6g} outside mapped range [{vals[0]:.6g}, {vals[-1]:.6g}]"
            )
        lo, hi = 0, len(vals) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if vals[mid] <= z_tilde:
                lo = mid
            else:
                hi = mid
        return brentq(
            lambda z: self.forward(z) - z_tilde, zs[lo], zs[hi], xtol=1e-14 * self.length_scale
        )


def _schwarzian_stencil(coord_map: CoordinateMap, z: float, h: float) -> float:
    d = coord_map.derivative
    dm2, dm1, d0, dp1, dp2 = (d(z - 2 * h), d(z - h), d(z), d(z + h), d(z + 2 * h))
    if d0 == 0.0:
        raise QlevUsageError(f"map derivative vanishes at z = {z:.6g}")
    second = (-dp2 + 8.0 * dp1 - 8.0 * dm1 + dm2) / (12.0 * h)
    third = (-dp2 + 16.0 * dp1 - 30.0 * d0 + 16.0 * dm1 - dm2) / (12.0 * h * h)
    return third / d0 - 1.5 * (second / d0) ** 2


def schwarzian(coord_map: CoordinateMap, z: float) -> float:
    """Schwarzian derivative z̃‴/z̃′ − (3/2)(z̃″/z̃′)² at z, in 1/m².

    Built from 5-point central differences of the map's derivative
    callable.  The rounding floor scales like eps/h² while the truncation
    grows like h⁴, and the optimal step depends on the local structure of
    the map, so the stencil is evaluated on a geometric ladder of steps
    and the adjacent pair that agrees best is kept.
    """
    scale = coord_map.length_scale
    if z != 0.0:
        scale = min(scale, abs(z))
    h_max = scale
    if coord_map.domain is not None:
        lo, hi = coord_map.domain
        h_max = min(h_max, 0.4 * (z - lo), 0.4 * (hi - z))
        if h_max <= 1e-10 * coord_map.length_scale:
            raise NearBoundary(
                f"Schwarzian stencil at z = {z:.6g} has no room inside "
                f"[{lo:.6g}, {hi:.6g}]"
            )
    steps = [f * scale for f in (2.5e-4, 1e-3, 4e-3, 1.6e-2) if f * scale <= h_max]
    if not steps:
        steps = [h_max]
    values = [_schwarzian_stencil(coord_map, z, h) for h in steps]
    if len(values) == 1:
        return values[0]
    gaps = [abs(a - b) for a, b in zip(values, values[1:])]
    k = gaps.index(min(gaps))
    return 0.5 * (values[k] + values[k + 1])


@dataclass(frozen=True)
class TransformedEquation:
    """Result of a Liouville transform: F̃ plus the wavefunction rescaling."""

    coord_map: CoordinateMap
    f_original: Callable[[float], float]

    def f_tilde(self, z_tilde: float) -> float:
        z = self.coord_map.invert(z_tilde)
        dz = self.coord_map.derivative(z)
        s = schwarzian(self.coord_map, z)
        return (self.f_original(z) - 0.5 * s) / (dz * dz)

    def __call__(self, z_tilde: float) -> float:
        return self.f_tilde(z_tilde)

    def rescale(self, z: float, psi: complex) -> complex:
        """ψ̃(z̃) = sqrt(z̃′)·ψ(z) at z̃ = forward(z)."""
        return math.sqrt(self.coord_map.derivative(z)) * psi

    def rescale_with_derivative(
        self, z: float, psi: complex, dpsi: complex
    ) -> tuple[complex, complex]:
        """(ψ̃, dψ̃/dz̃) from (ψ, dψ/dz); needs z̃″ by finite difference."""
        d = self.coord_map.derivative
        h = 1e-4 * self.coord_map.length_scale
        dz = d(z)
        ddz = (d(z + h) - d(z - h)) / (2.0 * h)
        root = math.sqrt(dz)
        return root * psi, dpsi / root + 0.5 * ddz * psi / root**3


def transform_f(
    f_original: Callable[[float], float], coord_map: CoordinateMap
) -> TransformedEquation:
    """Liouville-transform F into the z̃ coordinate defined by coord_map."""
    return TransformedEquation(coord_map=coord_map, f_original=f_original)


# ---------------------------------------------------------------------------
# the Langer problem
# ---------------------------------------------------------------------------


@dataclass
class LangerProblem:
    """One energy slice of the levitation problem in Langer form.

    The anchor of the transformed coordinate is bold_z_t = E/eps_g exactly;
    the SI turning point z_t (where F vanishes, slightly above E/mg because
    the surface tail is attractive) maps onto it.
    """

    setup: PhysicalSetup
    model: PotentialModel | None
    energy: float
    window: tuple[float, float] | None = None
    _core: "_LangerCore | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.energy <= 0:
            raise QlevUsageError("Langer problem requires E > 0")

    @property
    def bold_z_t(self) -> float:
        return self.energy / self.setup.eps_g

    @property
    def z_t(self) -> float:
        """SI turning point: the root of F."""
        return self.core().u_t * self.setup.ell_g

    def core(self) -> "_LangerCore":
        if self._core is None:
            window_u = None
            if self.window is not None:
                window_u = (
                    self.window[0] / self.setup.ell_g,
                    self.window[1] / self.setup.ell_g,
                )
            self._core = _LangerCore(
                GravityProfile(self.setup, self.model), self.bold_z_t, window_u
            )
        return self._core


class _LangerCore:
    """Dimensionless Langer machinery shared by the map and the solvers."""

    def __init__(
        self,
        profile: GravityProfile,
        bold_e: float,
        window_u: tuple[float, float] | None = None,
    ):
        self.profile = profile
        self.bold_e = bold_e
        self.u_t = self._locate_turning_point()
        self._taylor()
        self._series_window()
        if window_u is not None:
            self.u_lo, self.u_hi = window_u
            if not (0.0 < self.u_lo < self.u_t < self.u_hi):
                raise QlevUsageError(
                    "window must bracket the turning point with positive altitudes"
                )
        else:
            self.u_lo = 0.5 * self.wkb_floor()
            self.u_hi = self.u_t + 8.0
        self._check_single_turning_point()
        self._nodes: np.ndarray | None = None
        self._values: np.ndarray | None = None
        self._inverse_seed: PchipInterpolator | None = None
        self._f_interp: Callable[[float], float] | None = None

    # -- construction helpers --------------------------------------------------

    def _locate_turning_point(self) -> float:
        e = self.bold_e
        f = lambda u: float(self.profile.f(u, e))
        hi = e * (1.0 + 1e-9) + 1e-12
        while f(hi) >= 0.0:
            hi = e + 4.0 * (hi - e)
            if hi > e + max(10.0, e):
                raise QlevUsageError(
                    "no classical turning point above E/mg; potential malformed"
                )
        lo = e
        if f(lo) <= 0.0:
            # surface tail negligible at this altitude; bracket downward
            lo = 0.999 * e
            while f(lo) <= 0.0:
                lo *= 0.99
        return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)

    def _taylor(self) -> None:
        """Turning-point Taylor data of F and the induced map/correction series.

        With F = Σ F_k w^k (w = u − u_t) and bold_z − bold_z_t = Σ c_k w^k,
        the defining relation (bold_z_t − bold_z)·bold_z′² = F pins the c_k,
        and the correction bold_F − (bold_z_t − bold_z) follows to O(w²).
        """
        u_t = self.u_t
        p = self.profile
        f1 = float(p.f_deriv(u_t, 1))
        f2 = -0.5 * float(p.u_potential(u_t, 2))
        f3 = -float(p.u_potential(u_t, 3)) / 6.0
        f4 = -float(p.u_potential(u_t, 4)) / 24.0
        f5 = -float(p.u_potential(u_t, 5)) / 120.0
        if f1 >= 0.0:
            raise MultipleTurningPoints(
                f"F must decrease through its zero, got F' = {f1:.3g} at the root"
            )
        c1 = (-f1) ** (1.0 / 3.0)
        c2 = -f2 / (5.0 * c1**2)
        c3 = (-8.0 * f2**2 - 25.0 * f3 * c1**3) / (175.0 * c1**5)
        c4 = (-148.0 * f2**3 - 550.0 * f2 * f3 * c1**3 - 875.0 * f4 * c1**6) / (
            7875.0 * c1**8
        )
        c5 = (
            -29584.0 * f2**4
            - 136600.0 * f2**2 * f3 * c1**3
            - 171500.0 * f2 * f4 * c1**6
            - 84375.0 * f3**2 * c1**6
            - 275625.0 * f5 * c1**9
        ) / (3031875.0 * c1**11)
        self.f_taylor = (f1, f2, f3, f4, f5)
        self.map_series = (c1, c2, c3, c4, c5)
        self.corr_series = (
            3.0 * (3.0 * f2**2 + 5.0 * f3 * c1**3) / (35.0 * c1**8),
            4.0 * (14.0 * f2**3 + 35.0 * f2 * f3 * c1**3 + 25.0 * f4 * c1**6)
            / (75.0 * c1**11),
            2.0
            * (
                147988.0 * f2**4
                + 505870.0 * f2**2 * f3 * c1**3
                + 414050.0 * f2 * f4 * c1**6
                + 195750.0 * f3**2 * c1**6
                + 275625.0 * f5 * c1**9
            )
            / (202125.0 * c1**14),
        )

    def _series_window(self) -> None:
        """Shrink the turning-point series window until it matches quadrature."""
        w = _SERIES_HALF_WIDTH
        while True:
            err = max(
                abs(self._map_series_eval(+w) - self._map_quadrature(self.u_t + w)),
                abs(self._map_series_eval(-w) - self._map_quadrature(self.u_t - w)),
            )
            if err < 2e-9:
                break
            w *= 0.5
            if w < 0.02:
                raise SingularityExpansionFailure(
                    f"turning-point series disagrees with quadrature by {err:.2e}"
                )
        self.w_series = w

    def _check_single_turning_point(self) -> None:
        lo = max(self.u_lo, 1e-12)
        us = np.concatenate(
            [
                np.geomspace(lo, self.u_t * 0.999, 120),
                np.linspace(self.u_t * 0.999, self.u_hi, 80),
            ]
        )
        fs = self.profile.f(us, self.bold_e)
        signs = np.sign(fs)
        flips = int(np.sum(signs[1:] * signs[:-1] < 0))
        if flips > 1:
            raise MultipleTurningPoints(
                f"found {flips} sign changes of F in the window; need exactly one"
            )

    # -- the map ----------------------------------------------------------------

    def wkb_floor(self) -> float:
        """Largest deep altitude with |Q| < WKB_BADLANDS_TOL below the badlands.

        The scan reaches very deep because a −1/z³ inner region relaxes
        toward WKB only linearly in altitude, unlike −1/z⁴ whose leading
        badlands term cancels identically.
        """
        us = np.geomspace(self.u_t * 1e-12, self.u_t * 0.9, 900)
        qs = np.abs(self.profile.q(us, self.bold_e))
        if qs[0] >= WKB_BADLANDS_TOL:
            return us[0]  # scatter raises NoWkbWindow on its own scan
        idx = np.argmax(qs >= WKB_BADLANDS_TOL)
        if qs[int(idx)] < WKB_BADLANDS_TOL:
            return us[-1]
        return float(us[max(int(idx) - 1, 0)])

    def _sqrt_abs_f(self, u: np.ndarray) -> np.ndarray:
        return np.sqrt(np.abs(self.profile.f(u, self.bold_e)))

    def _action_from_tp(self, u: float) -> float:
        """∫ sqrt|F| between u_t and u, with the sqrt singularity removed."""
        u_t = self.u_t
        w = u - u_t
        if w == 0.0:
            return 0.0
        sgn = 1.0 if w > 0 else -1.0
        t_edge = math.sqrt(min(abs(w), 0.8))
        # u = u_t + sgn·t², integrand 2t·sqrt|F| is smooth through t = 0
        total = sgn * _gl_panel(
            lambda t: 2.0 * t * self._sqrt_abs_f(u_t + sgn * t * t), 0.0, t_edge
        )
        u_edge = u_t + sgn * t_edge * t_edge
        if abs(w) > 0.8:
            total += self._action_between(u_edge, u)
        return total

    def _action_between(self, u_a: float, u_b: float) -> float:
        """∫ sqrt|F| over [u_a, u_b] assumed on one side of the turning point."""
        if u_a == u_b:
            return 0.0
        sgn = 1.0
        if u_b < u_a:
            u_a, u_b = u_b, u_a
            sgn = -1.0
        panels: list[tuple[float, float]] = []
        # geometric splitting resolves the steep 1/u² tail near the surface
        a = u_a
        while u_b / a > 2.0 and a < self.u_t:
            panels.append((a, 2.0 * a))
            a *= 2.0
        step = max(1.6, (u_b - a) / 8.0)
        while u_b - a > step:
            panels.append((a, a + step))
            a += step
        panels.append((a, u_b))
        return sgn * sum(_gl_panel(self._sqrt_abs_f, p0, p1) for p0, p1 in panels)

    def map_offset(self, u: float) -> float:
        """bold_z(u) − bold_z_t, signed, with full relative precision."""
        act = self._action_from_tp(u)
        off = (1.5 * abs(act)) ** (2.0 / 3.0)
        return math.copysign(off, u - self.u_t)

    def _map_quadrature(self, u: float) -> float:
        return self.bold_e + self.map_offset(u)

    def _map_series_eval(self, w: float) -> float:
        c1, c2, c3, c4, c5 = self.map_series
        return self.bold_e + w * (c1 + w * (c2 + w * (c3 + w * (c4 + w * c5))))

    def map_value(self, u: float) -> float:
        """bold_z(u), exact to quadrature accuracy everywhere."""
        return self._map_quadrature(u)

    def map_derivative(self, u: float) -> float:
        """d bold_z/du = sqrt(F/(bold_z_t − bold_z)); series near the anchor."""
        w = u - self.u_t
        if abs(w) < min(self.w_series, 1e-3):
            c1, c2, c3, c4, c5 = self.map_series
            return c1 + w * (2 * c2 + w * (3 * c3 + w * (4 * c4 + w * 5 * c5)))
        f = float(self.profile.f(u, self.bold_e))
        return math.sqrt(f / -self.map_offset(u))

    def map_second_derivative(self, u: float) -> float:
        """d² bold_z/du², from the defining relation away from the anchor."""
        w = u - self.u_t
        if abs(w) < self.w_series:
            c1, c2, c3, c4, c5 = self.map_series
            return 2 * c2 + w * (6 * c3 + w * (12 * c4 + w * 20 * c5))
        zp = self.map_derivative(u)
        depth = -self.map_offset(u)
        fp = float(self.profile.f_deriv(u, 1))
        f = float(self.profile.f(u, self.bold_e))
        return (fp / depth + f * zp / depth**2) / (2.0 * zp)

    # -- inversion ----------------------------------------------------------------

    def _build_grid(self) -> None:
        if self._nodes is not None:
            return
        u_t, w_s = self.u_t, self.w_series
        nodes = {self.u_lo, self.u_hi, u_t}
        for frac in (0.25, 0.5, 0.75, 1.0):
            nodes.add(u_t - frac * w_s)
            nodes.add(u_t + frac * w_s)
        w = w_s
        while u_t - w > max(self.u_lo, 0.5 * u_t):
            nodes.add(u_t - w)
            w *= 1.3
        lo_band = max(self.u_lo, 1e-12)
        hi_band = 0.5 * u_t
        if hi_band > lo_band:
            decades = math.log10(hi_band / lo_band)
            count = max(6, int(14 * decades))
            nodes.update(np.geomspace(lo_band, hi_band, count).tolist())
        w = w_s
        while u_t + w < self.u_hi:
            nodes.add(u_t + w)
            w *= 1.3
        us = np.array(sorted(nodes))
        self._nodes = us
        self._values = np.array([self._map_quadrature(float(u)) for u in us])
        self._inverse_seed = PchipInterpolator(self._values, us)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        self._build_grid()
        assert self._nodes is not None and self._values is not None
        return self._nodes, self._values

    def invert(self, bold_z: float) -> float:
        self._build_grid()
        assert self._values is not None and self._inverse_seed is not None
        if not (self._values[0] <= bold_z <= self._values[-1]):
            raise OutsideMappedDomain(
                f"bold_z = {bold_z:.6g} outside mapped range "
                f"[{self._values[0]:.6g}, {self._values[-1]:.6g}]"
            )
        u = float(self._inverse_seed(bold_z))
        for _ in range(3):
            resid = self.map_value(u) - bold_z
            zp = self.map_derivative(u)
            step = resid / zp
            u -= step
            if abs(step) < 1e-13 * max(abs(u), 1.0):
                break
        return u

    # -- transformed wavevector ------------------------------------------------

    def corr_series_eval(self, w: float) -> float:
        a0, a1, a2 = self.corr_series
        return a0 + w * (a1 + w * a2)

    def _invert_series(self, dz: float) -> float:
        """Solve bold_z − bold_z_t = Σ c_k w^k for w inside the series window."""
        c1, c2, c3, c4, c5 = self.map_series
        w = dz / c1
        for _ in range(4):
            val = w * (c1 + w * (c2 + w * (c3 + w * (c4 + w * c5)))) - dz
            slope = c1 + w * (2 * c2 + w * (3 * c3 + w * (4 * c4 + w * 5 * c5)))
            w -= val / slope
        return w

    def f_langer(self, bold_z: float) -> float:
        """bold_F(bold_z) = bold_z_t − bold_z + correction.

        The closed form −5/(16 w²) + w·Q(z) is exact but loses digits to
        cancellation as w -> 0; the turning-point series takes over inside
        a narrow window where its truncation error is negligible.
        """
        dz = bold_z - self.bold_e
        c1 = self.map_series[0]
        if abs(dz) < min(0.9 * self.w_series, 0.03) * c1:
            w = self._invert_series(dz)
            return -dz + self.corr_series_eval(w)
        u = self.invert(bold_z)
        q = float(self.profile.q(u, self.bold_e))
        return -dz - 5.0 / (16.0 * dz * dz) + dz * q

    def f_langer_interp(self) -> Callable[[float], float]:
        """Fast interpolated bold_F(bold_z) suitable for driving an ODE.

        f_langer pays one inversion per call; here the correction term is
        tabulated once over the mapped window — densely below the turning
        point where the badlands live — and interpolated monotonically.
        The absolute interpolation error stays around 1e-7, ample for the
        cross-check integrations this feeds.
        """
        if self._f_interp is not None:
            return self._f_interp
        if self.profile.kind == "none":
            bold_e = self.bold_e
            self._f_interp = lambda bz: bold_e - bz
            return self._f_interp
        u_t = self.u_t
        lo = max(self.u_lo * 1.0001, 1e-12)
        us = np.unique(
            np.concatenate(
                [
                    np.geomspace(lo, 0.97 * u_t, 900),
                    np.linspace(0.97 * u_t, 0.9999 * self.u_hi, 260),
                ]
            )
        )
        w_cut = min(0.9 * self.w_series, 0.03) * self.map_series[0]
        dzs = np.empty(us.shape)
        corr = np.empty(us.shape)
        for i, u in enumerate(us):
            dz = self.map_offset(float(u))
            dzs[i] = dz
            if abs(dz) < w_cut:
                corr[i] = self.corr_series_eval(float(u) - u_t)
            else:
                q = float(self.profile.q(u, self.bold_e))
                corr[i] = -5.0 / (16.0 * dz * dz) + dz * q
        bzs = self.bold_e + dzs
        spline = PchipInterpolator(bzs, corr)
        b_lo, b_hi = float(bzs[0]), float(bzs[-1])
        bold_e = self.bold_e

        def f_fast(bz: float) -> float:
            if bz < b_lo or bz > b_hi:
                raise OutsideMappedDomain(
                    f"bold_z = {bz:.6g} outside interpolated range "
                    f"[{b_lo:.6g}, {b_hi:.6g}]"
                )
            return (bold_e - bz) + float(spline(bz))

        self._f_interp = f_fast
        return f_fast


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def langer_map(problem: LangerProblem) -> CoordinateMap:
    """Langer coordinate map for one energy, as an SI-facing CoordinateMap."""
    core = problem.core()
    ell_g = problem.setup.ell_g
    us, vals = core.grid()
    grid = np.column_stack(
        [us * ell_g, vals, [core.map_derivative(float(u)) / ell_g for u in us]]
    )

    def forward(z: float) -> float:
        u = z / ell_g
        if not (core.u_lo <= u <= core.u_hi):
            raise OutsideMappedDomain(
                f"z = {z:.6g} m outside mapped window "
                f"[{core.u_lo * ell_g:.6g}, {core.u_hi * ell_g:.6g}] m"
            )
        return core.map_value(u)

    return CoordinateMap(
        forward=forward,
        derivative=lambda z: core.map_derivative(z / ell_g) / ell_g,
        grid=grid,
        inverse=lambda bold_z: core.invert(bold_z) * ell_g,
        length_scale=ell_g,
        domain=(core.u_lo * ell_g, core.u_hi * ell_g),
    )


def badlands(
    setup: PhysicalSetup, model: PotentialModel | None, E: float, z: float
) -> float:
    """Badlands function Q(z) = F″/(4F²) − 5F′²/(16F³), dimensionless.

    Q is invariant under the rescaling to gravity units, where it is
    evaluated; it diverges at the turning point where F vanishes.
    """
    profile = GravityProfile(setup, model)
    u = z / setup.ell_g
    bold_e = E / setup.eps_g
    f = float(profile.f(u, bold_e))
    if f == 0.0 or abs(f) < 1e-13 * max(bold_e, u):
        raise AtTurningPoint(
            f"badlands function undefined at the turning point (F = {f:.3g})"
        )
    return float(profile.q(u, bold_e))


def langer_f(problem: LangerProblem, bold_z: float) -> float:
    """Transformed local wavevector bold_F at transformed altitude bold_z."""
    return problem.core().f_langer(bold_z)


def langer_grid_rows(
    problem: LangerProblem, n_points: int = 400
) -> list[tuple[float, float, float, float]]:
    """(z, bold_z, bold_F, Q) rows over the mapped window, for figure data."""
    core = problem.core()
    ell_g = problem.setup.ell_g
    us = np.geomspace(core.u_lo, core.u_hi, n_points)
    rows = []
    for u in us:
        bold_z = core.map_value(float(u))
        f_val = core.f_langer(bold_z)
        fu = float(core.profile.f(u, core.bold_e))
        if fu != 0.0:
            q = float(core.profile.q(float(u), core.bold_e))
        else:  # pragma: no cover - geomspace never lands exactly on u_t
            q = math.inf
        rows.append((float(u) * ell_g, bold_z, f_val, q))
    return rows


def write_langer_csv(problem: LangerProblem, path, n_points: int = 400) -> None:
    """Dump the (z, bold_z, bold_F, Q) grid as CSV."""
    rows = langer_grid_rows(problem, n_points)
    with open(path, "w") as fh:
        fh.write("z_m,bold_z,bold_f,q\n")
        for row in rows:
            fh.write(",".join(repr(v) for v in row) + "\n")

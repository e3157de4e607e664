"""Resonance physics of the gravity + quantum-reflection cavity.

An atom dropped toward a horizontal surface is trapped between two mirrors:
gravity above, quantum reflection off the attractive surface tail below.
The cavity is lossy — every bounce leaks probability into the surface — so
its levels are resonances rather than bound states.  Everything observable
about them is encoded in the round-trip factor rho(E):

* real resonance energies E_n solve arg rho(E_n) = 0 (constructive
  interference after one bounce cycle);
* the response function f = rho/(1 - rho) sums the multiple-bounce
  interference geometrically and peaks at each E_n;
* complex poles cE_n solve rho = 1 after analytic continuation, packing
  position and width into one number, with lifetime tau = -hbar/(2 Im cE);
* in the scattering-length regime every level is shifted by the same
  complex constant m*g*a, so transition frequencies are untouched by the
  surface — the levels move rigidly.

Two routes to rho are supported on an equal footing: the wave-equation
route (scatter.round_trip_factor on a model potential) and the
effective-range route (closed form from fitted coefficients).  Their
agreement at the 1e-5..1e-6 eps_g level is the central consistency check
of the whole package, and the acceptance suite measures it explicitly.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares

from . import scatter
from .airy import airy_phase, airy_phase_complex, airy_zero
from .effrange import EffectiveRangeCoefficients, alpha, r_model
from .errors import (
    BracketFailure,
    FitDiverged,
    NewtonDivergence,
    PeakOverlap,
    PhaseUnwrapError,
    QlevUsageError,
    WrongBasin,
)
from .potential import HBAR, PhysicalSetup, PotentialModel

__all__ = [
    "METHOD_NUMERIC",
    "METHOD_EFFECTIVE_RANGE",
    "METHOD_SCATTERING_LENGTH",
    "ResonanceRecord",
    "LorentzianPeak",
    "ideal_levels",
    "scattering_length_levels",
    "scattering_length_records",
    "resonances_numeric",
    "resonances_effective_range",
    "rho_effective_range",
    "response_function",
    "response_scan",
    "complex_poles",
    "pole_records",
    "lorentzian_fit",
    "lifetime",
    "pole_lifetime",
    "scattering_length_lifetime",
    "transition_frequencies",
    "write_resonance_csv",
    "read_resonance_csv",
    "write_response_csv",
    "read_response_csv",
]

METHOD_NUMERIC = "numeric"
METHOD_EFFECTIVE_RANGE = "effective-range"
METHOD_SCATTERING_LENGTH = "scattering-length"
_METHODS = (METHOD_NUMERIC, METHOD_EFFECTIVE_RANGE, METHOD_SCATTERING_LENGTH)

#: Newton finite-difference step for pole hunting, in eps_g units.
POLE_FD_STEP = 1e-7
#: A converged pole farther than this from its seed landed in the wrong basin.
POLE_BASIN_RADIUS = 0.5
#: Half-width of the root bracket as a fraction of the local level spacing.
BRACKET_FRACTION = 0.4


@dataclass(frozen=True)
class ResonanceRecord:
    """One cavity level: real energy, optional pole, optional lifetime.

    e_real and e_complex are in joules.  survival is |rho(E_n)|, the
    per-bounce survival probability amplitude recorded by the real-energy
    solvers; it is None for records built directly from poles.
    """

    n: int
    e_real: float
    method: str
    e_complex: complex | None = None
    lifetime_s: float | None = None
    survival: float | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise QlevUsageError("resonance index n starts at 1")
        if self.method not in _METHODS:
            raise QlevUsageError(
                f"method must be one of {_METHODS}, got {self.method!r}"
            )
        if self.e_complex is not None and self.e_complex.imag >= 0:
            raise QlevUsageError("a resonance pole must have Im E < 0 (decay)")
        if self.lifetime_s is not None and self.lifetime_s <= 0:
            raise QlevUsageError("lifetime must be positive")


@dataclass(frozen=True)
class LorentzianPeak:
    """Fitted |f|^2 peak: center and half-width in the units of the samples."""

    center: float
    half_width: float
    amplitude: float
    residual: float

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise QlevUsageError("half-width must be positive")


# ---------------------------------------------------------------------------
# ladders
# ---------------------------------------------------------------------------


def ideal_levels(setup: PhysicalSetup, n_max: int) -> list[float]:
    """Perfectly reflecting floor: E_n0 = lambda_n * eps_g (joules)."""
    if n_max < 1:
        raise QlevUsageError("n_max must be at least 1")
    eps_g = setup.eps_g
    return [airy_zero(n) * eps_g for n in range(1, n_max + 1)]


def scattering_length_levels(
    setup: PhysicalSetup, a: complex, n_max: int
) -> list[complex]:
    """Rigidly shifted ladder cE_n1 = lambda_n eps_g + m g a (joules).

    The complex scattering length shifts every level by the same constant,
    so level differences — and with them all transition frequencies — are
    exactly those of the ideal bouncer.
    """
    shift = setup.mass * setup.gravity * complex(a)
    return [level + shift for level in ideal_levels(setup, n_max)]


def scattering_length_records(
    setup: PhysicalSetup, a: complex, n_max: int
) -> list[ResonanceRecord]:
    """scattering_length_levels packaged as full records with lifetimes."""
    records = []
    for i, level in enumerate(scattering_length_levels(setup, a, n_max), start=1):
        has_width = level.imag < 0
        records.append(
            ResonanceRecord(
                n=i,
                e_real=level.real,
                method=METHOD_SCATTERING_LENGTH,
                e_complex=level if has_width else None,
                lifetime_s=pole_lifetime(level) if has_width else None,
            )
        )
    return records


# ---------------------------------------------------------------------------
# real resonance energies
# ---------------------------------------------------------------------------


def _bracket(n: int, shift: float) -> tuple[float, float, float]:
    """(seed, lo, hi) in eps_g units around the n-th ideal level."""
    lam = airy_zero(n)
    spacing = airy_zero(n + 1) - lam
    seed = lam + shift
    half = BRACKET_FRACTION * spacing
    return seed, seed - half, seed + half


def _solve_bracketed(
    phase_fn: Callable[[float], float], n: int, shift: float, what: str
) -> float:
    """Root of phase_fn inside the n-th bracket, with sign-sanity checks.

    The phase of the round-trip factor advances by 2 pi per level, so over
    a bracket of +-0.4 level spacings the principal-branch phase stays
    within (-pi, pi) and must cross zero going upward.  A downward crossing
    means the branch was lost (PhaseUnwrapError); no crossing means the
    resonance is not where the ladder says it should be (BracketFailure).
    """
    seed, lo, hi = _bracket(n, shift)
    f_lo = phase_fn(lo)
    f_hi = phase_fn(hi)
    if f_lo > 0.0 > f_hi:
        raise PhaseUnwrapError(
            f"{what}: phase decreasing across bracket for n = {n}; "
            "branch tracking lost"
        )
    if not (f_lo < 0.0 < f_hi):
        raise BracketFailure(
            f"{what}: no phase zero in [{lo:.6f}, {hi:.6f}] eps_g for n = {n} "
            f"(endpoint phases {f_lo:.3e}, {f_hi:.3e})"
        )
    root = brentq(phase_fn, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    residual = phase_fn(root)
    if abs(residual) > 1e-10:
        raise PhaseUnwrapError(
            f"{what}: refined phase residual {residual:.3e} exceeds 1e-10 "
            f"for n = {n}"
        )
    return float(root)


def resonances_numeric(
    setup: PhysicalSetup,
    model: PotentialModel | None,
    n_max: int,
    shift_guess: float = 0.0,
    rtol: float = scatter.ODE_RTOL,
) -> list[ResonanceRecord]:
    """Resonances from the wave-equation round-trip factor.

    For each n the principal-branch phase arg rho(E) is bracketed around
    lambda_n + shift_guess (eps_g units; pass m g Re(a)/eps_g when known
    to center the bracket, though the default bracket is wide enough for
    any realistic surface shift) and refined to |arg rho| < 1e-10.  The
    per-bounce survival |rho(E_n)| is recorded alongside.

    model = None is the perfectly reflecting floor, evaluated in closed
    form — no wave equation is integrated in that case.
    """
    if n_max < 1:
        raise QlevUsageError("n_max must be at least 1")
    eps_g = setup.eps_g

    if model is None:
        def rho_at(bold_e: float) -> complex:
            return scatter.ideal_round_trip(setup, bold_e * eps_g)
    else:
        def rho_at(bold_e: float) -> complex:
            return scatter.round_trip_factor(
                setup, model, bold_e * eps_g, rtol=rtol
            ).rho

    records = []
    for n in range(1, n_max + 1):
        root = _solve_bracketed(
            lambda be: cmath.phase(rho_at(be)), n, shift_guess, "numeric resonance"
        )
        records.append(
            ResonanceRecord(
                n=n,
                e_real=root * eps_g,
                method=METHOD_NUMERIC,
                survival=abs(rho_at(root)),
            )
        )
    return records


def _phase_shift_effrange(
    coeffs: EffectiveRangeCoefficients | None, sigma: float, bold_e: float
) -> float:
    """Re arctan(kA) at real energy bold_e (eps_g units); 0 for an ideal wall."""
    if coeffs is None:
        return 0.0
    big_k = math.sqrt(bold_e) * sigma
    k_alpha = -1j * big_k * alpha(coeffs, big_k)
    return cmath.atan(k_alpha).real


def resonances_effective_range(
    setup: PhysicalSetup,
    coeffs: EffectiveRangeCoefficients | None,
    n_max: int,
) -> list[ResonanceRecord]:
    """Resonances of the effective-range model: theta(-E) - Re arctan(kA) = n pi.

    kA = -i K alpha(K) with K = sqrt(E/eps_g) * ell/ell_g.  coeffs = None
    drops the surface term entirely (kA = 0), which is again the ideal
    bouncer: theta(-E_n) = n pi at E_n = lambda_n eps_g.

    The survival recorded is |r(k_n)| — for this model the Airy phase
    factor is unimodular, so the per-bounce loss is all in r.
    """
    if n_max < 1:
        raise QlevUsageError("n_max must be at least 1")
    eps_g = setup.eps_g
    sigma = (coeffs.ell / setup.ell_g) if coeffs is not None else 0.0
    shift = 0.0
    if coeffs is not None:
        shift = setup.mass * setup.gravity * coeffs.a.real / eps_g

    records = []
    for n in range(1, n_max + 1):
        def phase_fn(bold_e: float, n: int = n) -> float:
            return (
                airy_phase(-bold_e)
                - _phase_shift_effrange(coeffs, sigma, bold_e)
                - n * math.pi
            )

        root = _solve_bracketed(phase_fn, n, shift, "effective-range resonance")
        survival = None
        if coeffs is not None:
            survival = abs(r_model(coeffs, math.sqrt(root) / setup.ell_g, setup))
        records.append(
            ResonanceRecord(
                n=n,
                e_real=root * eps_g,
                method=METHOD_EFFECTIVE_RANGE,
                survival=survival,
            )
        )
    return records


# ---------------------------------------------------------------------------
# response function and poles
# ---------------------------------------------------------------------------


def response_function(rho: complex) -> complex:
    """f = rho/(1 - rho): the geometric sum of all round-trip orders."""
    rho = complex(rho)
    if abs(1.0 - rho) < 1e-14:
        raise QlevUsageError("response function diverges at rho = 1 (pole)")
    return rho / (1.0 - rho)


def rho_effective_range(
    setup: PhysicalSetup,
    coeffs: EffectiveRangeCoefficients,
    bold_e: complex,
) -> complex:
    """Closed-form round-trip factor rho = -r(k) exp(2 i theta(-E)).

    Works at complex energies: the Airy phase continues off the real axis
    by branch-tracked logarithm and the reflection model is polynomial in
    K and ln K.  This is the cheap route to the cavity poles.
    """
    bold_e = complex(bold_e)
    if bold_e.real <= 0:
        raise QlevUsageError("round trip needs Re E > 0")
    k = cmath.sqrt(bold_e) / setup.ell_g
    theta = airy_phase_complex(-bold_e)
    return -r_model(coeffs, k, setup) * cmath.exp(2j * theta)


def _pole_newton(
    rho_at: Callable[[complex], complex],
    seed: complex,
    what: str,
    max_iter: int = 40,
) -> complex:
    """Newton iteration on rho(E) = 1 with a central-difference derivative."""
    h = POLE_FD_STEP
    x = complex(seed)
    for _ in range(max_iter):
        g = rho_at(x) - 1.0
        if abs(g) < 1e-10:
            break
        slope = (rho_at(x + h) - rho_at(x - h)) / (2.0 * h)
        if slope == 0 or not cmath.isfinite(slope):
            raise NewtonDivergence(f"{what}: derivative vanished at {x:.8f}")
        step = g / slope
        x = x - step
        if not cmath.isfinite(x):
            raise NewtonDivergence(f"{what}: iterate left the finite plane")
    else:
        raise NewtonDivergence(
            f"{what}: |rho - 1| = {abs(g):.3e} after {max_iter} iterations"
        )
    if abs(x - seed) > POLE_BASIN_RADIUS:
        raise WrongBasin(
            f"{what}: converged pole {x:.8f} is {abs(x - seed):.3f} eps_g "
            f"from its seed {seed:.8f}"
        )
    if x.imag >= 0:
        raise WrongBasin(f"{what}: converged to a non-decaying pole {x:.8f}")
    return x


def complex_poles(
    setup: PhysicalSetup,
    source: PotentialModel | EffectiveRangeCoefficients,
    n_max: int,
    rtol: float = scatter.ODE_RTOL,
) -> list[complex]:
    """Poles of the cavity response: solutions of rho(E) = 1, in joules.

    Seeds are the scattering-length levels lambda_n eps_g + m g a — for an
    effective-range source with its own a, for a model potential with the
    universal-tail estimate a = -i ell_cp.  Newton converges in a few
    steps from there; landing more than POLE_BASIN_RADIUS away from the
    seed (or in the upper half plane) raises WrongBasin rather than
    silently returning a neighbor's pole.
    """
    if n_max < 1:
        raise QlevUsageError("n_max must be at least 1")
    eps_g = setup.eps_g

    if isinstance(source, EffectiveRangeCoefficients):
        a = source.a

        def rho_at(bold_e: complex) -> complex:
            return rho_effective_range(setup, source, bold_e)

        what = "effective-range pole"
    elif isinstance(source, PotentialModel):
        ell_cp = source.ell_cp(setup)
        a = -1j * ell_cp

        def rho_at(bold_e: complex) -> complex:
            return scatter.round_trip_factor(
                setup, source, bold_e * eps_g, rtol=rtol
            ).rho

        what = "numeric pole"
    else:
        raise QlevUsageError(
            "pole source must be a PotentialModel or EffectiveRangeCoefficients"
        )

    shift = setup.mass * setup.gravity * a / eps_g
    poles = []
    for n in range(1, n_max + 1):
        seed = airy_zero(n) + shift
        pole = _pole_newton(rho_at, seed, f"{what} n = {n}")
        poles.append(pole * eps_g)
    return poles


def pole_records(
    setup: PhysicalSetup, poles: Sequence[complex], method: str
) -> list[ResonanceRecord]:
    """Package complex poles (joules) as records with lifetimes."""
    return [
        ResonanceRecord(
            n=i,
            e_real=pole.real,
            method=method,
            e_complex=complex(pole),
            lifetime_s=pole_lifetime(pole),
        )
        for i, pole in enumerate(poles, start=1)
    ]


def response_scan(
    setup: PhysicalSetup,
    source: PotentialModel | EffectiveRangeCoefficients,
    bold_grid: Iterable[float],
    rtol: float = scatter.ODE_RTOL,
) -> list[tuple[float, float]]:
    """|f(E)|^2 sampled over a grid of real energies (eps_g units)."""
    if isinstance(source, EffectiveRangeCoefficients):
        def rho_at(bold_e: float) -> complex:
            return rho_effective_range(setup, source, bold_e)
    elif isinstance(source, PotentialModel):
        eps_g = setup.eps_g

        def rho_at(bold_e: float) -> complex:
            return scatter.round_trip_factor(
                setup, source, bold_e * eps_g, rtol=rtol
            ).rho
    else:
        raise QlevUsageError(
            "scan source must be a PotentialModel or EffectiveRangeCoefficients"
        )
    rows = []
    for bold_e in bold_grid:
        f = response_function(rho_at(float(bold_e)))
        rows.append((float(bold_e), abs(f) ** 2))
    return rows


# ---------------------------------------------------------------------------
# Lorentzian characterization
# ---------------------------------------------------------------------------


def lorentzian_fit(samples: Sequence[tuple[float, float]]) -> LorentzianPeak:
    """Fit A/((E - c)^2 + w^2) to sampled |f|^2 around one isolated peak.

    The amplitude enters linearly, so for any trial (c, w) the optimal A
    is a one-line projection; the outer nonlinear problem is then only
    two-dimensional and converges from the sample argmax and half-max
    width without any user-supplied guess.  Units follow the samples.
    """
    pts = sorted((float(e), float(y)) for e, y in samples)
    if len(pts) < 7:
        raise QlevUsageError(f"need at least 7 samples, got {len(pts)}")
    e_arr = np.array([p[0] for p in pts])
    y_arr = np.array([p[1] for p in pts])
    if np.any(y_arr < 0):
        raise QlevUsageError("|f|^2 samples must be nonnegative")

    i_max = int(np.argmax(y_arr))
    if i_max in (0, len(pts) - 1):
        raise QlevUsageError("peak sits on the sample boundary; widen the scan")
    y_peak = y_arr[i_max]

    # secondary interior maxima signal a contaminating neighbor
    for i in range(1, len(pts) - 1):
        if abs(i - i_max) <= 2:
            continue
        if y_arr[i] > y_arr[i - 1] and y_arr[i] > y_arr[i + 1] and y_arr[i] > 0.05 * y_peak:
            raise PeakOverlap(
                f"secondary peak at E = {e_arr[i]:.8g} "
                f"({y_arr[i] / y_peak:.1%} of the main peak)"
            )

    half = 0.5 * y_peak
    left = np.interp(half, y_arr[: i_max + 1], e_arr[: i_max + 1])
    right = np.interp(half, y_arr[i_max:][::-1], e_arr[i_max:][::-1])
    w0 = 0.5 * (right - left)
    if not (w0 > 0) or not math.isfinite(w0):
        raise QlevUsageError("could not locate half-maximum crossings")
    if (e_arr[-1] - e_arr[0]) < 3.0 * w0:
        raise QlevUsageError(
            f"samples span {(e_arr[-1] - e_arr[0]) / w0:.2f} half-widths; need >= 3"
        )

    def model_misfit(params: np.ndarray) -> np.ndarray:
        c, w = params
        b = 1.0 / ((e_arr - c) ** 2 + w * w)
        amp = float(b @ y_arr) / float(b @ b)
        return amp * b - y_arr

    result = least_squares(
        model_misfit,
        x0=np.array([e_arr[i_max], w0]),
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
    )
    if not result.success:
        raise FitDiverged(f"least squares failed: {result.message}")
    center, width = float(result.x[0]), abs(float(result.x[1]))
    if width == 0 or not (e_arr[0] <= center <= e_arr[-1]):
        raise FitDiverged(
            f"fit left the sample window (center {center:.8g}, width {width:.3g})"
        )
    b = 1.0 / ((e_arr - center) ** 2 + width * width)
    amp = float(b @ y_arr) / float(b @ b)
    residual = float(np.linalg.norm(amp * b - y_arr) / np.linalg.norm(y_arr))
    if residual > 0.1:
        raise FitDiverged(
            f"relative misfit {residual:.3f}; samples are not one Lorentzian"
        )
    return LorentzianPeak(
        center=center, half_width=width, amplitude=amp, residual=residual
    )


# ---------------------------------------------------------------------------
# lifetimes and transitions
# ---------------------------------------------------------------------------


def pole_lifetime(e_complex: complex) -> float:
    """tau = -hbar/(2 Im E) in seconds for a decaying pole."""
    if e_complex.imag >= 0:
        raise QlevUsageError("lifetime needs Im E < 0")
    return -HBAR / (2.0 * e_complex.imag)


def lifetime(record: ResonanceRecord) -> float:
    """Lifetime of a recorded level (requires its complex pole)."""
    if record.e_complex is None:
        raise QlevUsageError(
            f"record n = {record.n} ({record.method}) carries no pole; "
            "lifetimes need complex energies"
        )
    return pole_lifetime(record.e_complex)


def scattering_length_lifetime(setup: PhysicalSetup, b: float) -> float:
    """Level-independent lifetime tau = hbar/(2 m g b) of the rigid-shift regime."""
    if b <= 0:
        raise QlevUsageError("loss length b must be positive")
    return HBAR / (2.0 * setup.mass * setup.gravity * b)


def transition_frequencies(
    records: Sequence[ResonanceRecord], pairs: Iterable[tuple[int, int]]
) -> list[float]:
    """omega_mn = (E_n - E_m)/hbar in rad/s for each requested (m, n) pair."""
    by_n = {record.n: record for record in records}
    out = []
    for m, n in pairs:
        if m not in by_n or n not in by_n:
            raise QlevUsageError(f"transition ({m}, {n}) refers to missing levels")
        out.append((by_n[n].e_real - by_n[m].e_real) / HBAR)
    return out


# ---------------------------------------------------------------------------
# CSV emitters
# ---------------------------------------------------------------------------

_RESONANCE_HEADER = [
    "n",
    "E_over_epsg",
    "reE_over_epsg",
    "imE_over_epsg",
    "lifetime_s",
    "method",
    "surface",
]


def write_resonance_csv(
    setup: PhysicalSetup,
    records: Sequence[ResonanceRecord],
    path: str | Path,
    surface: str = "",
) -> None:
    """Resonance table in eps_g units, full repr precision, one row per level.

    The pole columns are left empty for records that carry no complex
    energy (real-only solvers); the schema is fixed either way.
    """
    eps_g = setup.eps_g
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_RESONANCE_HEADER)
        for record in records:
            if record.e_complex is not None:
                re_part = repr(record.e_complex.real / eps_g)
                im_part = repr(record.e_complex.imag / eps_g)
            else:
                re_part = im_part = ""
            writer.writerow(
                [
                    record.n,
                    repr(record.e_real / eps_g),
                    re_part,
                    im_part,
                    repr(record.lifetime_s) if record.lifetime_s is not None else "",
                    record.method,
                    surface,
                ]
            )


def read_resonance_csv(
    setup: PhysicalSetup, path: str | Path
) -> tuple[list[ResonanceRecord], list[str]]:
    """Parse a resonance table back to records (and the surface column)."""
    eps_g = setup.eps_g
    records, surfaces = [], []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != _RESONANCE_HEADER:
            raise QlevUsageError(
                f"{path}: expected header {','.join(_RESONANCE_HEADER)}"
            )
        for i, row in enumerate(reader, start=2):
            if len(row) != len(_RESONANCE_HEADER):
                raise QlevUsageError(f"{path}: row {i}: expected 7 fields")
            try:
                n = int(row[0])
                e_real = float(row[1]) * eps_g
                e_complex = (
                    complex(float(row[2]), float(row[3])) * eps_g
                    if row[2]
                    else None
                )
                lifetime_s = float(row[4]) if row[4] else None
            except ValueError as exc:
                raise QlevUsageError(f"{path}: row {i}: {exc}") from exc
            records.append(
                ResonanceRecord(
                    n=n,
                    e_real=e_real,
                    method=row[5],
                    e_complex=e_complex,
                    lifetime_s=lifetime_s,
                )
            )
            surfaces.append(row[6])
    return records, surfaces


def write_response_csv(
    rows: Sequence[tuple[float, float]], path: str | Path
) -> None:
    """Response scan columns E_over_epsg,abs_f_sq at full repr precision."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["E_over_epsg", "abs_f_sq"])
        for bold_e, abs_f_sq in rows:
            writer.writerow([repr(float(bold_e)), repr(float(abs_f_sq))])


def read_response_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a response scan written by write_response_csv."""
    es, fs = [], []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["E_over_epsg", "abs_f_sq"]:
            raise QlevUsageError(f"{path}: expected header E_over_epsg,abs_f_sq")
        for i, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise QlevUsageError(f"{path}: row {i}: expected 2 fields")
            try:
                es.append(float(row[0]))
                fs.append(float(row[1]))
            except ValueError as exc:
                raise QlevUsageError(f"{path}: row {i}: {exc}") from exc
    return np.asarray(es), np.asarray(fs)

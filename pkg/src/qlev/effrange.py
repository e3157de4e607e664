"""Effective-range analytics for quantum reflection off an attractive tail.

Near threshold the reflection amplitude off the surface tail is captured by
two complex numbers.  Writing K = k*ell for the wavevector in units of the
tail length scale, the reduced amplitude

    r(k) = -(1 - i*kA(k)) / (1 + i*kA(k)),      kA = -i*K*alpha(K),

is parametrised by the slowly varying function

    alpha(K) = alpha0 + i*(pi/3)*K + (alpha2 + (4/3)*alpha0*ln K) * K**2.

The constant term fixes the complex scattering length a = -i*ell*alpha0; the
linear term is universal (it does not depend on the surface at all); the
quadratic term carries the first surface-specific correction together with a
logarithm whose coefficient is again slaved to alpha0.  For the homogeneous
-C4/z^4 tail the expansion is known in closed form (alpha0 = 1 and ALPHA2_V4
below), which gives the fitting machinery here a parameter-free cross-check.

This module provides the model in both directions: evaluating r(k) from known
coefficients, and recovering (alpha0, alpha2) from sampled reflection data by
linear least squares.  The iK*pi/3 term is known, so it is moved to the data
side and the remaining problem is genuinely linear in the two unknowns — no
iteration, no starting guess, no convergence worries.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateR,
    IllConditionedFit,
    ModelNonPhysical,
    QlevUsageError,
    WindowTooNarrow,
)
from .potential import BOHR_RADIUS, PhysicalSetup, SurfacePreset
from .scatter import ReflectionData

__all__ = [
    "ALPHA0_V4",
    "ALPHA2_V4",
    "EULER_GAMMA",
    "EffectiveRangeCoefficients",
    "alpha",
    "r_model",
    "invert_to_kA",
    "fit_coefficients",
    "scattering_length",
    "preset_coefficients",
    "v4_coefficients",
    "synthetic_reflection",
    "coefficients_to_json",
    "coefficients_from_json",
    "format_coefficients",
]

EULER_GAMMA = 0.5772156649015329

#: Exact expansion coefficients of the homogeneous -C4/z^4 tail.
ALPHA0_V4 = complex(1.0, 0.0)
ALPHA2_V4 = complex(
    (8.0 / 3.0) * (EULER_GAMMA + math.log(2.0)) - 28.0 / 9.0,
    -2.0 * math.pi / 3.0,
)

#: Default fit window in eps_g units: (0, 500] is high enough to pin the
#: curvature coefficient yet low enough for the truncated expansion to hold.
DEFAULT_WINDOW = (0.0, 500.0)

#: Samples below this energy (eps_g units) are always excluded from fits:
#: the K^2 ln K basis function amplifies noise without bound as K -> 0.
FIT_FLOOR_EPSG = 0.5

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class EffectiveRangeCoefficients:
    """Low-energy expansion of one surface's reduced reflection function.

    ell is the tail length scale in meters; window is the energy interval
    (in eps_g units) over which the coefficients were fitted or are meant
    to be used.  residual is the per-sample rms misfit of the generating
    fit (0.0 for coefficients entered by hand).
    """

    ell: float
    alpha0: complex
    alpha2: complex
    window: tuple[float, float] = DEFAULT_WINDOW
    residual: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.ell <= 0:
            raise QlevUsageError("tail length scale ell must be positive")
        lo, hi = self.window
        if not (0 <= lo < hi):
            raise QlevUsageError("fit window must satisfy 0 <= E_lo < E_hi")

    @property
    def a(self) -> complex:
        """Complex scattering length a = -i*ell*alpha0, in meters."""
        return -1j * self.ell * self.alpha0

    @property
    def b(self) -> float:
        """Loss length b = -Im(a) > 0: sets widths via Im E_n ~= -m*g*b."""
        return -self.a.imag


def v4_coefficients(ell: float, window: tuple[float, float] = DEFAULT_WINDOW) -> EffectiveRangeCoefficients:
    """Closed-form coefficients of the homogeneous -C4/z^4 tail."""
    return EffectiveRangeCoefficients(
        ell=ell, alpha0=ALPHA0_V4, alpha2=ALPHA2_V4, window=window, label="v4-exact"
    )


def preset_coefficients(preset: SurfacePreset) -> EffectiveRangeCoefficients:
    """Wrap a surface preset's fitted numbers as fit-window coefficients."""
    return EffectiveRangeCoefficients(
        ell=preset.ell,
        alpha0=preset.alpha0,
        alpha2=preset.alpha2,
        window=DEFAULT_WINDOW,
        label=preset.name,
    )


# ---------------------------------------------------------------------------
# model evaluation
# ---------------------------------------------------------------------------


def alpha(coeffs: EffectiveRangeCoefficients, big_k: complex) -> complex:
    """Three-term low-energy expansion alpha(K) evaluated at K = k*ell.

    K must have a positive real part (the ln K branch is taken on the
    principal sheet, which is the correct continuation for energies near
    the positive real axis).  The K -> 0 limit is alpha0; call sites that
    need the threshold value should use coeffs.alpha0 directly rather than
    pushing K through the logarithm.
    """
    k_val = complex(big_k)
    if not (k_val.real > 0.0):
        raise QlevUsageError("alpha(K) needs Re K > 0; the K -> 0 limit is alpha0")
    log_k = cmath.log(k_val)
    quadratic = coeffs.alpha2 + (4.0 / 3.0) * coeffs.alpha0 * log_k
    return coeffs.alpha0 + 1j * (math.pi / 3.0) * k_val + quadratic * k_val * k_val


def _k_window(coeffs: EffectiveRangeCoefficients, setup: PhysicalSetup) -> tuple[float, float]:
    """Fit window translated to wavevectors, 1/m (E = (k*ell_g)^2 eps_g)."""
    lo, hi = coeffs.window
    ell_g = setup.ell_g
    return math.sqrt(max(lo, 0.0)) / ell_g, math.sqrt(hi) / ell_g


def r_model(
    coeffs: EffectiveRangeCoefficients,
    k: complex,
    setup: PhysicalSetup | None = None,
) -> complex:
    """Model reflection amplitude r(k) = -(1 - i*kA)/(1 + i*kA), kA = -iK*alpha.

    k is in 1/m with Re k > 0 (complex k continues the model off the real
    axis for pole hunting).  For real k inside the coefficient's validity
    window, |r| <= 1 is enforced: a violation means the truncated expansion
    is being trusted outside its regime and raises ModelNonPhysical rather
    than silently producing gain.  The window check converts energies with
    the hydrogen-default setup unless one is supplied.
    """
    k_val = complex(k)
    if not (k_val.real > 0.0):
        raise QlevUsageError("r_model needs Re k > 0; the k -> 0 limit is r = -1")
    big_k = k_val * coeffs.ell
    k_alpha = -1j * big_k * alpha(coeffs, big_k)
    r = -(1.0 - 1j * k_alpha) / (1.0 + 1j * k_alpha)
    if k_val.imag == 0.0:
        k_lo, k_hi = _k_window(coeffs, setup or PhysicalSetup())
        if k_lo <= k_val.real <= k_hi and abs(r) > 1.0 + 1e-12:
            raise ModelNonPhysical(
                f"|r| = {abs(r):.6f} > 1 at k = {k_val.real:.6e} 1/m, inside the "
                f"validity window of {coeffs.label or 'these coefficients'}"
            )
    return r


def invert_to_kA(r: complex, k: float | None = None) -> complex:
    """Solve the reflection model for kA: kA = -i(1 + r)/(1 - r).

    The wavevector is accepted for symmetry with r_model and used only in
    diagnostics; the inversion itself is k-free.  r = +1 is the degenerate
    point where the model loses meaning (kA -> infinity); r = -1 is fine
    and maps to the threshold value kA = 0.
    """
    r_val = complex(r)
    if abs(1.0 - r_val) < 1e-15:
        where = f" at k = {k:.6e} 1/m" if k is not None else ""
        raise DegenerateR(f"r = 1{where}: kA diverges, no inversion possible")
    return -1j * (1.0 + r_val) / (1.0 - r_val)


def scattering_length(coeffs: EffectiveRangeCoefficients) -> tuple[complex, float]:
    """(a, b): complex scattering length a = -i*ell*alpha0 and b = -Im(a)."""
    return coeffs.a, coeffs.b


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


def fit_coefficients(
    data: Sequence[ReflectionData],
    ell: float,
    window: tuple[float, float] = DEFAULT_WINDOW,
    setup: PhysicalSetup | None = None,
    label: str = "",
) -> EffectiveRangeCoefficients:
    """Fit (alpha0, alpha2) to sampled reflection amplitudes.

    Each sample is inverted to alpha_data(K) = invert_to_kA(r, k)/(-iK); the
    known i*pi*K/3 term is subtracted, leaving a problem that is linear in
    the two unknown coefficients with basis functions

        phi0(K) = 1 + (4/3) K^2 ln K        (multiplies alpha0)
        phi2(K) = K^2                        (multiplies alpha2)

    solved by complex least squares with 1/K^2 row weights.  The weights
    keep the problem linear in the same basis while giving every sample
    equal say on the curvature coefficient: unweighted rows let the
    highest-K samples dominate alpha2, and those are exactly the samples
    where the truncated-at-K^2 expansion is least trustworthy (the K^3
    remainder biases Im alpha2 by several percent over a 500 eps_g window).
    Samples below FIT_FLOOR_EPSG or outside the window are dropped; at
    least 50 must survive and they must actually span the window,
    otherwise WindowTooNarrow is raised.
    """
    if ell <= 0:
        raise QlevUsageError("tail length scale ell must be positive")
    lo, hi = window
    if not (0 <= lo < hi):
        raise QlevUsageError("fit window must satisfy 0 <= E_lo < E_hi")
    setup = setup or PhysicalSetup()
    ell_g = setup.ell_g
    lo_eff = max(lo, FIT_FLOOR_EPSG)

    ks, rs = [], []
    for row in data:
        bold_e = (row.k * ell_g) ** 2
        if lo_eff <= bold_e <= hi:
            ks.append(row.k)
            rs.append(row.r)
    if len(ks) < 50:
        raise WindowTooNarrow(
            f"only {len(ks)} samples inside ({lo_eff}, {hi}] eps_g; need >= 50"
        )
    k_arr = np.asarray(ks, dtype=float)
    r_arr = np.asarray(rs, dtype=complex)
    e_arr = (k_arr * ell_g) ** 2
    span = e_arr.max() - e_arr.min()
    if span < 0.5 * (hi - lo_eff):
        raise WindowTooNarrow(
            f"samples span {span:.3g} eps_g of the requested {hi - lo_eff:.3g}"
        )

    big_k = k_arr * ell
    k_alpha = np.array([invert_to_kA(r, k) for r, k in zip(r_arr, k_arr)])
    alpha_data = k_alpha / (-1j * big_k)
    rhs = alpha_data - 1j * (math.pi / 3.0) * big_k

    basis = np.empty((big_k.size, 2), dtype=complex)
    basis[:, 0] = 1.0 + (4.0 / 3.0) * big_k**2 * np.log(big_k)
    basis[:, 1] = big_k**2
    weights = big_k**-2
    solution, _, rank, sing = np.linalg.lstsq(
        basis * weights[:, None], rhs * weights, rcond=None
    )
    if rank < 2 or sing[0] > _COND_LIMIT * sing[-1]:
        raise IllConditionedFit(
            f"design matrix condition {sing[0] / sing[-1]:.3g} (rank {rank}); "
            "widen the window or spread the samples"
        )
    misfit = basis @ solution - rhs
    residual = float(np.linalg.norm(misfit) / math.sqrt(big_k.size))
    return EffectiveRangeCoefficients(
        ell=ell,
        alpha0=complex(solution[0]),
        alpha2=complex(solution[1]),
        window=(lo, hi),
        residual=residual,
        label=label,
    )


def synthetic_reflection(
    coeffs: EffectiveRangeCoefficients,
    setup: PhysicalSetup | None = None,
    n_samples: int = 400,
) -> list[ReflectionData]:
    """Model-generated reflection samples across the coefficient window.

    Energies are geometrically spaced (the ln K basis function needs low-E
    leverage) from the fit floor up to the window top.  Useful for closed
    -loop tests — fitting these samples must give back the inputs — and for
    exercising downstream consumers without running the wave equation.
    """
    setup = setup or PhysicalSetup()
    lo = max(coeffs.window[0], FIT_FLOOR_EPSG)
    hi = coeffs.window[1]
    bold_es = np.geomspace(lo, hi, n_samples)
    rows = []
    for bold_e in bold_es:
        k = math.sqrt(bold_e) / setup.ell_g
        r = r_model(coeffs, k, setup)
        rows.append(
            ReflectionData(
                k=k,
                big_k=k * coeffs.ell,
                r=r,
                flux_defect=0.0,
                x_min=0.0,
                x_max=0.0,
                n_steps=0,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# serialization / reporting
# ---------------------------------------------------------------------------


def coefficients_to_json(coeffs: EffectiveRangeCoefficients, path: str | Path | None = None) -> str:
    """Serialize coefficients; every float travels as a repr string.

    JSON writers are free to shorten the textual form of numbers, so the
    document stores decimal strings produced by repr(), which Python
    guarantees to round-trip bit-exactly through float().
    """
    doc = {
        "label": coeffs.label,
        "ell_m": repr(coeffs.ell),
        "ell_a0": repr(coeffs.ell / BOHR_RADIUS),
        "alpha0_re": repr(coeffs.alpha0.real),
        "alpha0_im": repr(coeffs.alpha0.imag),
        "alpha2_re": repr(coeffs.alpha2.real),
        "alpha2_im": repr(coeffs.alpha2.imag),
        "window_lo_epsg": repr(coeffs.window[0]),
        "window_hi_epsg": repr(coeffs.window[1]),
        "residual": repr(coeffs.residual),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def coefficients_from_json(source: str | Path) -> EffectiveRangeCoefficients:
    """Load coefficients written by coefficients_to_json (path or raw text)."""
    text = source
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        text = Path(source).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QlevUsageError(f"coefficient document is not valid JSON: {exc}") from exc
    try:
        return EffectiveRangeCoefficients(
            ell=float(doc["ell_m"]),
            alpha0=complex(float(doc["alpha0_re"]), float(doc["alpha0_im"])),
            alpha2=complex(float(doc["alpha2_re"]), float(doc["alpha2_im"])),
            window=(float(doc["window_lo_epsg"]), float(doc["window_hi_epsg"])),
            residual=float(doc.get("residual", 0.0)),
            label=str(doc.get("label", "")),
        )
    except KeyError as exc:
        raise QlevUsageError(f"coefficient document missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise QlevUsageError(f"malformed coefficient field ({exc})") from exc


def format_coefficients(coeffs: EffectiveRangeCoefficients) -> str:
    """Human-readable report: rounded display values plus full precision.

    The rounded forms (4 decimals for alpha0, 2 for alpha2) match the
    precision at which such coefficients are usually quoted; the full-repr
    lines are what downstream computations should consume, since the
    truncation alone moves resonance energies at the 1e-6 eps_g level.
    """
    a, b = scattering_length(coeffs)
    lines = [
        f"surface:   {coeffs.label or '(unlabeled)'}",
        f"ell:       {coeffs.ell / BOHR_RADIUS:.2f} a0 = {coeffs.ell:.6e} m",
        f"alpha0:    {coeffs.alpha0.real:+.4f} {coeffs.alpha0.imag:+.4f}i",
        f"alpha2:    {coeffs.alpha2.real:+.2f} {coeffs.alpha2.imag:+.2f}i",
        f"  full alpha0: {coeffs.alpha0!r}",
        f"  full alpha2: {coeffs.alpha2!r}",
        f"a:         {a.real / BOHR_RADIUS:+.2f} {a.imag / BOHR_RADIUS:+.2f}i a0",
        f"b = -Im a: {b / BOHR_RADIUS:.2f} a0 = {b * 1e9:.3f} nm",
        f"window:    ({coeffs.window[0]:g}, {coeffs.window[1]:g}] eps_g",
        f"fit rms:   {coeffs.residual:.3e}",
    ]
    return "\n".join(lines)

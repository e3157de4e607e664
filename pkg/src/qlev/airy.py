"""Airy functions Ai, Bi, their zeros, and the continuous Airy phase.

Evaluation is delegated to the backend kernels (compiled when available):
a double-double compensated Maclaurin series inside ``|z| <= 9`` and
Poincare asymptotics with sector rotation outside.  This module adds the
domain guards, the zero table, and the phase-unwrapping logic.

The traveling-wave combinations Ci± = Ai ± i·Bi and the phase θ defined by
e^{2iθ(x)} = −Ci⁻(x)/Ci⁺(x) are the natural reflection variables for a wave
bouncing on a linear potential: θ(0) = π/6, θ(−λ_n) = nπ at the Airy zeros,
and θ → 0 for large positive argument.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import brentq

from .backend import kernels
from .errors import BranchTrackingFailure, DomainTooLarge, Overflow

__all__ = [
    "AiryValues",
    "AiryZeroTable",
    "airy_pair",
    "ci_pair",
    "airy_zero",
    "airy_zero_table",
    "airy_phase",
    "airy_phase_derivative",
    "airy_phase_complex",
]

#: Largest argument magnitude accepted by airy_pair / ci_pair.
MAX_ARGUMENT = 1.0e4

#: First zero of Ai (as a positive number); used by the phase unwrapper.
_LAMBDA_1 = 2.338107410459767


@dataclass(frozen=True)
class AiryValues:
    """Ai, Bi and derivatives at one point."""

    ai: complex
    bi: complex
    ai_prime: complex
    bi_prime: complex

    def wronskian(self) -> complex:
        """Ai·Bi' − Ai'·Bi; equals 1/π identically."""
        return self.ai * self.bi_prime - self.ai_prime * self.bi


@dataclass(frozen=True)
class CiValues:
    """Traveling-wave pair Ci± = Ai ± i·Bi and derivatives at one point."""

    ci_minus: complex
    ci_plus: complex
    ci_minus_prime: complex
    ci_plus_prime: complex


def _check_domain(z: complex) -> complex:
    z = complex(z)
    if not (abs(z) <= MAX_ARGUMENT):
        raise DomainTooLarge(
            f"airy evaluation at |z| = {abs(z):.3g} exceeds the supported "
            f"domain |z| <= {MAX_ARGUMENT:.0e}"
        )
    return z


def airy_pair(z: complex) -> AiryValues:
    """Evaluate (Ai, Bi, Ai', Bi') at a point of the complex plane.

    Raises Overflow where Bi exceeds the double range (real part beyond
    about +104) and DomainTooLarge for |z| > 1e4.
    """
    z = _check_domain(z)
    ai, bi, aip, bip = kernels.airy_pair_kernel(z)
    if not (
        cmath.isfinite(ai)
        and cmath.isfinite(bi)
        and cmath.isfinite(aip)
        and cmath.isfinite(bip)
    ):
        raise Overflow(f"airy pair overflowed double precision at z = {z:.6g}")
    return AiryValues(ai=ai, bi=bi, ai_prime=aip, bi_prime=bip)


def ci_pair(z: complex) -> CiValues:
    """Evaluate the traveling waves Ci± = Ai ± i·Bi and their derivatives.

    Away from the real axis one of the pair is exponentially small; the
    kernel evaluates each member through a single rotated Ai so the small
    one is not lost to cancellation.
    """
    z = _check_domain(z)
    cim, cip, cimp, cipp = kernels.ci_pair_kernel(z)
    if not (
        cmath.isfinite(cim)
        and cmath.isfinite(cip)
        and cmath.isfinite(cimp)
        and cmath.isfinite(cipp)
    ):
        raise Overflow(f"traveling-wave pair overflowed at z = {z:.6g}")
    return CiValues(
        ci_minus=cim, ci_plus=cip, ci_minus_prime=cimp, ci_plus_prime=cipp
    )


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------


def _ai_real(x: float) -> float:
    ai, _, _, _ = kernels.airy_pair_kernel(complex(x, 0.0))
    return ai.real


@lru_cache(maxsize=None)
def airy_zero(n: int) -> float:
    """n-th zero of Ai as a positive number λ_n, i.e. Ai(−λ_n) = 0.

    Seeded by the standard asymptotic expansion of the zeros and refined
    by bracketed root finding on the series/asymptotic evaluator itself,
    so the zeros are consistent with airy_pair to machine precision.
    """
    if n < 1:
        raise ValueError(f"airy zero index must be >= 1, got {n}")
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    u = 1.0 / (t * t)
    seed = t ** (2.0 / 3.0) * (
        1.0 + u * (5.0 / 48.0 + u * (-5.0 / 36.0 + u * (77125.0 / 82944.0)))
    )
    lo, hi = seed - 0.05, seed + 0.05
    flo, fhi = _ai_real(-lo), _ai_real(-hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:  # pragma: no cover - seed is always this good
        lo, hi = seed - 0.25, seed + 0.25
    return brentq(lambda lam: _ai_real(-lam), lo, hi, xtol=1e-15, rtol=8.9e-16)


@dataclass(frozen=True)
class AiryZeroTable:
    """First zeros of Ai, as positive numbers λ_1 < λ_2 < ..."""

    zeros: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ValueError("airy zeros must be strictly increasing")

    def __getitem__(self, n: int) -> float:
        """1-indexed access: table[n] is λ_n."""
        if n < 1 or n > len(self.zeros):
            raise IndexError(f"zero index {n} outside table of {len(self.zeros)}")
        return self.zeros[n - 1]

    def __len__(self) -> int:
        return len(self.zeros)


def airy_zero_table(n_max: int) -> AiryZeroTable:
    """Table of the first n_max Airy zeros."""
    return AiryZeroTable(zeros=tuple(airy_zero(n) for n in range(1, n_max + 1)))


# ---------------------------------------------------------------------------
# continuous phase
# ---------------------------------------------------------------------------


def _phase_mod_pi(x: float) -> tuple[float, float]:
    """Return (φ, ai) with φ = θ(x) mod π in [0, π) and the Ai value."""
    ai, bi, _, _ = kernels.airy_pair_kernel(complex(x, 0.0))
    phi = 0.5 * math.pi - math.atan2(bi.real, ai.real)
    if phi < 0.0:
        phi += math.pi
    elif phi >= math.pi:
        phi -= math.pi
    return phi, ai.real


def airy_phase(x: float) -> float:
    """Continuous Airy phase θ(x) with θ(0) = π/6 and θ(−λ_n) = nπ.

    θ is recovered modulo π from atan2 on (Ai, Bi); the winding number is
    the number of Ai zeros to the right of x.  For x ≥ −2 there are none
    and θ = atan2(Ai, Bi) directly (this form keeps the exponentially
    small phase at large positive x).  Below −2 the winding comes from the
    large-argument phase expansion, whose error is far under π/2, so the
    nearest-integer selection is exact; when rounding pushes the reduced
    phase across the 0/π wrap at an Ai zero the integer shifts by one in
    compensation and θ stays continuous.
    """
    x = float(x)
    if not (abs(x) <= MAX_ARGUMENT):
        raise DomainTooLarge(
            f"airy phase at |x| = {abs(x):.3g} exceeds the supported domain"
        )
    if x >= -2.0:
        ai, bi, _, _ = kernels.airy_pair_kernel(complex(x, 0.0))
        return math.atan2(ai.real, bi.real)
    phi, _ = _phase_mod_pi(x)
    t = -x
    t32 = t * math.sqrt(t)
    theta_est = 2.0 / 3.0 * t32 + 0.25 * math.pi - 5.0 / (48.0 * t32)
    m = int(round((theta_est - phi) / math.pi))
    return m * math.pi + phi


def airy_phase_derivative(x: float) -> float:
    """dθ/dx = −(1/π)/(Ai² + Bi²), always negative on the real line."""
    v = airy_pair(complex(x, 0.0))
    ai, bi = v.ai.real, v.bi.real
    return -1.0 / (math.pi * (ai * ai + bi * bi))


def _phase_complex_principal(z: complex) -> complex:
    cim, cip, _, _ = kernels.ci_pair_kernel(z)
    ratio = -cim / cip
    if ratio == 0 or not cmath.isfinite(ratio):
        raise BranchTrackingFailure(
            f"traveling-wave ratio degenerate at z = {z:.6g}"
        )
    return cmath.log(ratio) / 2j


def airy_phase_complex(z: complex) -> complex:
    """Analytic continuation of the Airy phase off the real axis.

    θ(z) = log(−Ci⁻/Ci⁺)/(2i), with the branch fixed by continuity along
    the vertical segment from Re(z); on the real axis this reduces to
    airy_phase.  Steps are bisected until consecutive phase values differ
    by less than π/2; if that cannot be achieved the branch is lost.
    """
    z = complex(z)
    if abs(z.imag) > 10.0:
        raise DomainTooLarge(
            f"airy phase continuation limited to |Im z| <= 10, got {z.imag:.3g}"
        )
    theta = complex(airy_phase(z.real), 0.0)
    if z.imag == 0.0:
        return theta
    pos = complex(z.real, 0.0)
    remaining = z - pos
    step = remaining
    depth = 0
    while remaining != 0:
        if abs(step) > abs(remaining):
            step = remaining
        p = _phase_complex_principal(pos + step)
        cand = p + math.pi * round((theta.real - p.real) / math.pi)
        if abs(cand - theta) >= 0.5 * math.pi:
            step *= 0.5
            depth += 1
            if depth > 60:
                raise BranchTrackingFailure(
                    f"phase continuation to {z:.6g} could not bound jumps "
                    "below pi/2"
                )
            continue
        theta = cand
        pos += step
        remaining = z - pos
    return theta

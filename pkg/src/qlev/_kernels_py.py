"""Pure-Python numerical kernels: complex Airy pair and an adaptive RK45 solver.

This module is the reference implementation of the hot kernels; qlev._kernels
is an algorithmically identical Cython build of the same code.  qlev.backend
picks one at import time, so everything here must stay in lock-step with the
.pyx file.

Airy evaluation
---------------
Maclaurin series for |z| <= 9, summed in compensated double-double arithmetic
(the per-term scale factors 1/((3k+a)(3k+b)) are stored as double-double
reciprocals of exact integers; plain-double factors lose ~3 digits to the
e^{+|zeta|} cancellation near the switchover).  Beyond the series disc the
standard asymptotic expansions are used, with arguments outside
|arg z| <= 2pi/3 folded back by the two-rotation connection formula.  Bi is
assembled from Ai at rotated arguments, which keeps the recessive/dominant
bookkeeping in one code path.

ODE kernel
----------
Dormand-Prince 5(4) with FSAL on the first-order system (psi, psi'), for
psi'' + F(x) psi = 0 with a small set of built-in F providers (linear,
Casimir-Polder tails, gravity+tail, tabulated via cubic-spline segments, or a
Python callback).  Error control is per-component relative+absolute, which
handles the very different magnitudes of psi and psi' at large |F|.
"""

import cmath
import math

__all__ = [
    "SERIES_RADIUS",
    "airy_pair_kernel",
    "airy_series",
    "airy_asym",
    "ci_pair_kernel",
    "integrate_schrodinger",
    "F_LINEAR",
    "F_CP_V4",
    "F_CP_V3V4",
    "F_CP_TABLE",
    "F_FULL_V4",
    "F_FULL_V3V4",
    "F_FULL_TABLE",
    "F_CALLBACK",
]

IS_COMPILED = False

# ---------------------------------------------------------------------------
# double-double helpers (error-free transformations)
# ---------------------------------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    e += xl + yl
    return _quick_two_sum(s, e)


def _dd_mul(xh, xl, yh, yl):
    p, e = _two_prod(xh, yh)
    e += xh * yl + xl * yh
    return _quick_two_sum(p, e)


def _dd_recip_int(n):
    """Double-double 1/n for an exactly representable positive double n."""
    hi = 1.0 / n
    p, e = _two_prod(n, hi)
    return hi, ((1.0 - p) - e) / n


# complex double-double: tuple (re_hi, re_lo, im_hi, im_lo)


def _cdd(re, im):
    return (re, 0.0, im, 0.0)


def _cdd_add(a, b):
    rh, rl = _dd_add(a[0], a[1], b[0], b[1])
    ih, il = _dd_add(a[2], a[3], b[2], b[3])
    return (rh, rl, ih, il)


def _cdd_mul(a, b):
    t1h, t1l = _dd_mul(a[0], a[1], b[0], b[1])
    t2h, t2l = _dd_mul(a[2], a[3], b[2], b[3])
    rh, rl = _dd_add(t1h, t1l, -t2h, -t2l)
    t3h, t3l = _dd_mul(a[0], a[1], b[2], b[3])
    t4h, t4l = _dd_mul(a[2], a[3], b[0], b[1])
    ih, il = _dd_add(t3h, t3l, t4h, t4l)
    return (rh, rl, ih, il)


def _cdd_mul_dd(a, dh, dl):
    rh, rl = _dd_mul(a[0], a[1], dh, dl)
    ih, il = _dd_mul(a[2], a[3], dh, dl)
    return (rh, rl, ih, il)


def _cdd_abs2(a):
    return (a[0] + a[1]) ** 2 + (a[2] + a[3]) ** 2


def _cdd_collapse(a):
    return complex(a[0] + a[1], a[2] + a[3])


# Ai(0), -Ai'(0), sqrt(3) as double-doubles.
_C1 = (0.3550280538878172, 2.05233632436212e-17)
_C2 = (0.2588194037928068, -2.522243111610832e-17)
_SQRT3 = (1.7320508075688772, 1.0035084221806903e-16)

_KMAX = 200
_RF = [_dd_recip_int(float((3 * k + 2) * (3 * k + 3))) for k in range(_KMAX)]
_RG = [_dd_recip_int(float((3 * k + 3) * (3 * k + 4))) for k in range(_KMAX)]
_RFP = [_dd_recip_int(float((3 * k) * (3 * k + 2))) if k >= 1 else (0.0, 0.0)
        for k in range(_KMAX)]
_RGP = [_dd_recip_int(float((3 * k + 1) * (3 * k + 3))) for k in range(_KMAX)]

SERIES_RADIUS = 9.0


def airy_series(z):
    """Maclaurin Ai/Bi and derivatives at complex z, double-double summed."""
    zc = _cdd(z.real, z.imag)
    z3 = _cdd_mul(_cdd_mul(zc, zc), zc)
    one = (1.0, 0.0, 0.0, 0.0)
    t = one                                   # f-series term
    f = one
    s = zc                                    # g-series term
    g = zc
    u = _cdd_mul_dd(_cdd_mul(zc, zc), 0.5, 0.0)   # f'-series term, k = 1
    fp = u
    v = one                                   # g'-series term
    gp = one
    for k in range(_KMAX):
        t = _cdd_mul_dd(_cdd_mul(t, z3), _RF[k][0], _RF[k][1])
        f = _cdd_add(f, t)
        s = _cdd_mul_dd(_cdd_mul(s, z3), _RG[k][0], _RG[k][1])
        g = _cdd_add(g, s)
        if k >= 1:
            u = _cdd_mul_dd(_cdd_mul(u, z3), _RFP[k][0], _RFP[k][1])
            fp = _cdd_add(fp, u)
        v = _cdd_mul_dd(_cdd_mul(v, z3), _RGP[k][0], _RGP[k][1])
        gp = _cdd_add(gp, v)
        if max(_cdd_abs2(t), _cdd_abs2(s), _cdd_abs2(u), _cdd_abs2(v)) < 1e-75:
            break
    c1 = (_C1[0], _C1[1], 0.0, 0.0)
    c2 = (_C2[0], _C2[1], 0.0, 0.0)
    s3 = (_SQRT3[0], _SQRT3[1], 0.0, 0.0)
    neg = (-1.0, 0.0, 0.0, 0.0)
    c1f = _cdd_mul(f, c1)
    c2g = _cdd_mul(g, c2)
    c1fp = _cdd_mul(fp, c1)
    c2gp = _cdd_mul(gp, c2)
    ai = _cdd_collapse(_cdd_add(c1f, _cdd_mul(c2g, neg)))
    aip = _cdd_collapse(_cdd_add(c1fp, _cdd_mul(c2gp, neg)))
    bi = _cdd_collapse(_cdd_mul(_cdd_add(c1f, c2g), s3))
    bip = _cdd_collapse(_cdd_mul(_cdd_add(c1fp, c2gp), s3))
    return ai, bi, aip, bip


# asymptotic coefficients u_k, v_k (plain doubles; optimal truncation keeps
# the used range well inside double range)
_NASY = 60
_UASY = [1.0]
for _k in range(_NASY):
    _UASY.append(_UASY[-1] * (6 * _k + 1) * (6 * _k + 5) / (72.0 * (_k + 1)))
_VASY = [1.0]
for _k in range(1, _NASY + 1):
    _VASY.append(-(6 * _k + 1) / (6 * _k - 1.0) * _UASY[_k])

_TWO_SQRT_PI = 2.0 * math.sqrt(math.pi)
_ROT_P = cmath.exp(2j * math.pi / 3)   # e^{+2 pi i/3}
_ROT_M = cmath.exp(-2j * math.pi / 3)
_E6P = cmath.exp(1j * math.pi / 6)
_E6M = cmath.exp(-1j * math.pi / 6)
_TWO_THIRDS_PI = 2.0 * math.pi / 3.0


def _ai_direct(z):
    """Asymptotic Ai, Ai' for |arg z| <= 2pi/3 (plus rounding margin)."""
    sq = cmath.sqrt(z)
    zeta = (2.0 / 3.0) * z * sq
    z14 = cmath.sqrt(sq)
    izeta = 1.0 / zeta
    sa = 1.0 + 0j
    sb = 1.0 + 0j
    term = 1.0 + 0j
    prev = 1e300
    k = 0
    while k < _NASY:
        k += 1
        term *= -izeta
        ta = _UASY[k] * term
        mag = abs(ta)
        if mag < 1e-18 * abs(sa) or mag > prev:
            break
        sa += ta
        sb += _VASY[k] * term
        prev = mag
    epre = cmath.exp(-zeta)
    return epre * sa / (_TWO_SQRT_PI * z14), -epre * z14 * sb / _TWO_SQRT_PI


def _ai_any(z):
    """Asymptotic Ai, Ai' for any phase via the two-rotation connection."""
    if abs(cmath.phase(z)) <= _TWO_THIRDS_PI:
        return _ai_direct(z)
    am, amp = _ai_direct(z * _ROT_M)
    ap, app = _ai_direct(z * _ROT_P)
    ai = -_ROT_M * am - _ROT_P * ap
    aip = -_ROT_M * _ROT_M * amp - _ROT_P * _ROT_P * app
    return ai, aip


def airy_asym(z):
    """Asymptotic Ai, Bi, Ai', Bi' (use beyond the series disc)."""
    ai, aip = _ai_any(z)
    ap, app = _ai_any(z * _ROT_P)
    am, amp = _ai_any(z * _ROT_M)
    bi = _E6P * ap + _E6M * am
    bip = _E6P * _ROT_P * app + _E6M * _ROT_M * amp
    return ai, bi, aip, bip


def airy_pair_kernel(z):
    """(Ai, Bi, Ai', Bi') at complex z; raises OverflowError past ~|z|=110."""
    if abs(z) <= SERIES_RADIUS:
        return airy_series(z)
    return airy_asym(z)


def ci_pair_kernel(z):
    """Traveling-wave pair (Ci-, Ci+, Ci-', Ci+') with Ci± = Ai ∓/± i Bi.

    Ci+ = Ai + iBi = 2 e^{+i pi/3} Ai(z e^{-2 pi i/3}), and conjugate-rotated
    for Ci-; for small |z| the direct series combination is cheaper and just
    as accurate, for large |z| the rotated form avoids overflow of the
    dominant Bi when only the traveling combination is needed.
    """
    if abs(z) <= SERIES_RADIUS:
        ai, bi, aip, bip = airy_series(z)
        return ai - 1j * bi, ai + 1j * bi, aip - 1j * bip, aip + 1j * bip
    am, amp = _ai_any(z * _ROT_P)     # Ci- from the e^{+2 pi i/3} rotation
    ap, app = _ai_any(z * _ROT_M)     # Ci+ from the e^{-2 pi i/3} rotation
    e3p = _E6P * _E6P                 # e^{+i pi/3}
    e3m = _E6M * _E6M
    cim = 2.0 * e3m * am
    cip = 2.0 * e3p * ap
    cimp = 2.0 * e3p * amp
    cipp = 2.0 * e3m * app
    return cim, cip, cimp, cipp


# ---------------------------------------------------------------------------
# F providers for the Schrodinger kernel
# ---------------------------------------------------------------------------

F_LINEAR = 0      # F = w - s x                      params (w_re, w_im, s)
F_CP_V4 = 1       # F = w + x^-4                     params (w_re, w_im)
F_CP_V3V4 = 2     # F = w + 1/(x^3 (x + xc))         params (w_re, w_im, xc)
F_CP_TABLE = 3    # F = w - U(x), splined U          params (w_re, w_im, c3, c4, xlo, xhi)
F_FULL_V4 = 4     # F = w - x + s2 x^-4              params (w_re, w_im, s2)
F_FULL_V3V4 = 5   # F = w - x + s2/(x^3 (x + xc))    params (w_re, w_im, s2, xc)
F_FULL_TABLE = 6  # F = w - x - U(x), splined U      params (w_re, w_im, c3, c4, xlo, xhi)
F_CALLBACK = 7    # F = fn(x), fn passed as `knots`


def _spline_eval(knots, coefs, n, x):
    """Evaluate a cubic spline in scipy PPoly layout (c[4, n-1] flattened)."""
    lo = 0
    hi = n - 1
    if x <= knots[0]:
        i = 0
    elif x >= knots[hi]:
        i = hi - 1
    else:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if knots[mid] <= x:
                lo = mid
            else:
                hi = mid
        i = lo
    dx = x - knots[i]
    m = n - 1
    return ((coefs[i] * dx + coefs[m + i]) * dx + coefs[2 * m + i]) * dx + coefs[3 * m + i]


def _f_eval(kind, params, knots, coefs, nknots, x):
    if kind == F_LINEAR:
        return complex(params[0], params[1]) - params[2] * x
    if kind == F_CP_V4:
        x2 = x * x
        return complex(params[0], params[1]) + 1.0 / (x2 * x2)
    if kind == F_CP_V3V4:
        return complex(params[0], params[1]) + 1.0 / (x * x * x * (x + params[2]))
    if kind == F_CP_TABLE:
        if x < params[4]:
            u = -params[2] / (x * x * x)
        elif x > params[5]:
            x2 = x * x
            u = -params[3] / (x2 * x2)
        else:
            u = _spline_eval(knots, coefs, nknots, x)
        return complex(params[0], params[1]) - u
    if kind == F_FULL_V4:
        x2 = x * x
        return complex(params[0] - x, params[1]) + params[2] / (x2 * x2)
    if kind == F_FULL_V3V4:
        return complex(params[0] - x, params[1]) + params[2] / (x * x * x * (x + params[3]))
    if kind == F_FULL_TABLE:
        if x < params[4]:
            u = -params[2] / (x * x * x)
        elif x > params[5]:
            x2 = x * x
            u = -params[3] / (x2 * x2)
        else:
            u = _spline_eval(knots, coefs, nknots, x)
        return complex(params[0] - x, params[1]) - u
    if kind == F_CALLBACK:
        return complex(knots(x))
    raise ValueError(f"unknown F provider kind {kind}")


# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2


def integrate_schrodinger(kind, params, knots, coefs, x0, x1, psi0, dpsi0,
                          rtol=1e-10, atol=1e-14, max_steps=1_000_000):
    """Integrate psi'' + F(x) psi = 0 from x0 to x1.

    Returns (psi, dpsi, status, n_steps).  `params` is a flat float sequence
    interpreted per provider `kind`; tabulated providers read a cubic spline
    from (knots, coefs); the callback provider calls `knots` as F(x).
    """
    span = x1 - x0
    if span == 0.0:
        return psi0, dpsi0, STATUS_OK, 0
    nknots = 0 if (knots is None or kind == F_CALLBACK) else len(knots)
    x = x0
    y = psi0
    d = dpsi0
    f0 = _f_eval(kind, params, knots, coefs, nknots, x)
    # first derivative evaluation (k1 of the FSAL pair)
    k1y = d
    k1d = -f0 * y
    direction = 1.0 if span > 0 else -1.0
    scale0 = math.sqrt(abs(f0)) + 1e-12
    h = direction * min(0.1 * abs(span), 0.35 / scale0)
    hmin = 1e-14 * abs(span)
    nstep = 0
    while (x1 - x) * direction > 0.0:
        if abs(h) < hmin:
            return y, d, STATUS_STEP_UNDERFLOW, nstep
        if (x + h - x1) * direction > 0.0:
            h = x1 - x
        nstep += 1
        if nstep > max_steps:
            return y, d, STATUS_MAX_STEPS, nstep

        y2 = y + h * _A21 * k1y
        d2 = d + h * _A21 * k1d
        f = _f_eval(kind, params, knots, coefs, nknots, x + h / 5.0)
        k2y = d2
        k2d = -f * y2

        y3 = y + h * (_A31 * k1y + _A32 * k2y)
        d3 = d + h * (_A31 * k1d + _A32 * k2d)
        f = _f_eval(kind, params, knots, coefs, nknots, x + 0.3 * h)
        k3y = d3
        k3d = -f * y3

        y4 = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        d4 = d + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
        f = _f_eval(kind, params, knots, coefs, nknots, x + 0.8 * h)
        k4y = d4
        k4d = -f * y4

        y5 = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        d5 = d + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
        f = _f_eval(kind, params, knots, coefs, nknots, x + (8.0 / 9.0) * h)
        k5y = d5
        k5d = -f * y5

        y6 = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        d6 = d + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
        xn = x + h
        f = _f_eval(kind, params, knots, coefs, nknots, xn)
        k6y = d6
        k6d = -f * y6

        yn = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        dn = d + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d + _B6 * k6d)
        k7y = dn
        k7d = -f * yn

        erry = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        errd = h * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d + _E6 * k6d + _E7 * k7d)
        scy = atol + rtol * max(abs(y), abs(yn))
        scd = atol + rtol * max(abs(d), abs(dn))
        err = math.sqrt(0.5 * ((abs(erry) / scy) ** 2 + (abs(errd) / scd) ** 2))

        if err <= 1.0:
            x = xn
            y = yn
            d = dn
            k1y = k7y
            k1d = k7d
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
    return y, d, STATUS_OK, nstep

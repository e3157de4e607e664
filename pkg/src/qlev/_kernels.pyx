# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels: complex Airy pair and an adaptive RK45 solver.

Line-for-line port of qlev._kernels_py (the reference implementation); see
that module's docstring for the algorithm notes.  Any change here must be
mirrored there — the test suite runs both backends against each other.
"""

import cmath

cimport cython
from libc.math cimport sqrt, fabs, pow

cdef extern from "<complex.h>" nogil:
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double cabs(double complex)
    double carg(double complex)

IS_COMPILED = True

# ---------------------------------------------------------------------------
# double-double helpers
# ---------------------------------------------------------------------------

cdef double _SPLITTER = 134217729.0

cdef struct dd:
    double hi
    double lo

cdef struct cdd:
    double rh
    double rl
    double ih
    double il


cdef inline dd _two_sum(double a, double b) nogil:
    cdef dd r
    cdef double s = a + b
    cdef double bb = s - a
    r.hi = s
    r.lo = (a - (s - bb)) + (b - bb)
    return r


cdef inline dd _quick_two_sum(double a, double b) nogil:
    cdef dd r
    r.hi = a + b
    r.lo = b - (r.hi - a)
    return r


cdef inline dd _two_prod(double a, double b) nogil:
    cdef dd r
    cdef double p = a * b
    cdef double c = _SPLITTER * a
    cdef double ah = c - (c - a)
    cdef double al = a - ah
    cdef double bh, bl
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    r.hi = p
    r.lo = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return r


cdef inline dd _dd_add(double xh, double xl, double yh, double yl) nogil:
    cdef dd s = _two_sum(xh, yh)
    return _quick_two_sum(s.hi, s.lo + xl + yl)


cdef inline dd _dd_mul(double xh, double xl, double yh, double yl) nogil:
    cdef dd p = _two_prod(xh, yh)
    return _quick_two_sum(p.hi, p.lo + xh * yl + xl * yh)


cdef inline dd _dd_recip_int(double n) nogil:
    cdef dd r
    cdef double hi = 1.0 / n
    cdef dd p = _two_prod(n, hi)
    r.hi = hi
    r.lo = ((1.0 - p.hi) - p.lo) / n
    return r


cdef inline cdd _cdd(double re, double im) nogil:
    cdef cdd r
    r.rh = re
    r.rl = 0.0
    r.ih = im
    r.il = 0.0
    return r


cdef inline cdd _cdd_add(cdd a, cdd b) nogil:
    cdef cdd r
    cdef dd t = _dd_add(a.rh, a.rl, b.rh, b.rl)
    r.rh = t.hi
    r.rl = t.lo
    t = _dd_add(a.ih, a.il, b.ih, b.il)
    r.ih = t.hi
    r.il = t.lo
    return r


cdef inline cdd _cdd_mul(cdd a, cdd b) nogil:
    cdef cdd r
    cdef dd t1 = _dd_mul(a.rh, a.rl, b.rh, b.rl)
    cdef dd t2 = _dd_mul(a.ih, a.il, b.ih, b.il)
    cdef dd t3 = _dd_mul(a.rh, a.rl, b.ih, b.il)
    cdef dd t4 = _dd_mul(a.ih, a.il, b.rh, b.rl)
    cdef dd re = _dd_add(t1.hi, t1.lo, -t2.hi, -t2.lo)
    cdef dd im = _dd_add(t3.hi, t3.lo, t4.hi, t4.lo)
    r.rh = re.hi
    r.rl = re.lo
    r.ih = im.hi
    r.il = im.lo
    return r


cdef inline cdd _cdd_mul_dd(cdd a, double dh, double dl) nogil:
    cdef cdd r
    cdef dd t = _dd_mul(a.rh, a.rl, dh, dl)
    r.rh = t.hi
    r.rl = t.lo
    t = _dd_mul(a.ih, a.il, dh, dl)
    r.ih = t.hi
    r.il = t.lo
    return r


cdef inline double _cdd_abs2(cdd a) nogil:
    cdef double re = a.rh + a.rl
    cdef double im = a.ih + a.il
    return re * re + im * im


cdef inline double complex _cdd_collapse(cdd a) nogil:
    cdef double complex j = 1j
    return (a.rh + a.rl) + j * (a.ih + a.il)


# Ai(0), -Ai'(0), sqrt(3) as double-doubles
cdef double _C1_HI = 0.3550280538878172
cdef double _C1_LO = 2.05233632436212e-17
cdef double _C2_HI = 0.2588194037928068
cdef double _C2_LO = -2.522243111610832e-17
cdef double _SQRT3_HI = 1.7320508075688772
cdef double _SQRT3_LO = 1.0035084221806903e-16

DEF KMAX = 200
DEF NASY = 60

cdef double _RF_HI[KMAX]
cdef double _RF_LO[KMAX]
cdef double _RG_HI[KMAX]
cdef double _RG_LO[KMAX]
cdef double _RFP_HI[KMAX]
cdef double _RFP_LO[KMAX]
cdef double _RGP_HI[KMAX]
cdef double _RGP_LO[KMAX]
cdef double _UASY[NASY + 1]
cdef double _VASY[NASY + 1]


cdef void _init_tables() nogil:
    cdef int k
    cdef dd r
    for k in range(KMAX):
        r = _dd_recip_int(<double> ((3 * k + 2) * (3 * k + 3)))
        _RF_HI[k] = r.hi
        _RF_LO[k] = r.lo
        r = _dd_recip_int(<double> ((3 * k + 3) * (3 * k + 4)))
        _RG_HI[k] = r.hi
        _RG_LO[k] = r.lo
        if k >= 1:
            r = _dd_recip_int(<double> ((3 * k) * (3 * k + 2)))
            _RFP_HI[k] = r.hi
            _RFP_LO[k] = r.lo
        else:
            _RFP_HI[k] = 0.0
            _RFP_LO[k] = 0.0
        r = _dd_recip_int(<double> ((3 * k + 1) * (3 * k + 3)))
        _RGP_HI[k] = r.hi
        _RGP_LO[k] = r.lo
    _UASY[0] = 1.0
    for k in range(NASY):
        _UASY[k + 1] = _UASY[k] * (6 * k + 1) * (6 * k + 5) / (72.0 * (k + 1))
    _VASY[0] = 1.0
    for k in range(1, NASY + 1):
        _VASY[k] = -(6 * k + 1) / (6 * k - 1.0) * _UASY[k]

_init_tables()

SERIES_RADIUS = 9.0
cdef double _SERIES_RADIUS = 9.0
cdef double _TWO_SQRT_PI = 2.0 * sqrt(3.141592653589793)
cdef double _TWO_THIRDS_PI = 2.0943951023931953
cdef double complex _ROT_P = cmath.exp(2j * 3.141592653589793 / 3)
cdef double complex _ROT_M = cmath.exp(-2j * 3.141592653589793 / 3)
cdef double complex _E6P = cmath.exp(1j * 3.141592653589793 / 6)
cdef double complex _E6M = cmath.exp(-1j * 3.141592653589793 / 6)


cdef void _airy_series_c(double complex z, double complex *out) nogil:
    cdef cdd zc = _cdd(z.real, z.imag)
    cdef cdd z3 = _cdd_mul(_cdd_mul(zc, zc), zc)
    cdef cdd one = _cdd(1.0, 0.0)
    cdef cdd t = one
    cdef cdd f = one
    cdef cdd s = zc
    cdef cdd g = zc
    cdef cdd u = _cdd_mul_dd(_cdd_mul(zc, zc), 0.5, 0.0)
    cdef cdd fp = u
    cdef cdd v = one
    cdef cdd gp = one
    cdef int k
    cdef double m, m2
    for k in range(KMAX):
        t = _cdd_mul_dd(_cdd_mul(t, z3), _RF_HI[k], _RF_LO[k])
        f = _cdd_add(f, t)
        s = _cdd_mul_dd(_cdd_mul(s, z3), _RG_HI[k], _RG_LO[k])
        g = _cdd_add(g, s)
        if k >= 1:
            u = _cdd_mul_dd(_cdd_mul(u, z3), _RFP_HI[k], _RFP_LO[k])
            fp = _cdd_add(fp, u)
        v = _cdd_mul_dd(_cdd_mul(v, z3), _RGP_HI[k], _RGP_LO[k])
        gp = _cdd_add(gp, v)
        m = _cdd_abs2(t)
        m2 = _cdd_abs2(s)
        if m2 > m:
            m = m2
        m2 = _cdd_abs2(u)
        if m2 > m:
            m = m2
        m2 = _cdd_abs2(v)
        if m2 > m:
            m = m2
        if m < 1e-75:
            break
    cdef cdd c1 = one
    c1.rh = _C1_HI
    c1.rl = _C1_LO
    cdef cdd c2 = one
    c2.rh = _C2_HI
    c2.rl = _C2_LO
    cdef cdd s3 = one
    s3.rh = _SQRT3_HI
    s3.rl = _SQRT3_LO
    cdef cdd neg = _cdd(-1.0, 0.0)
    cdef cdd c1f = _cdd_mul(f, c1)
    cdef cdd c2g = _cdd_mul(g, c2)
    cdef cdd c1fp = _cdd_mul(fp, c1)
    cdef cdd c2gp = _cdd_mul(gp, c2)
    out[0] = _cdd_collapse(_cdd_add(c1f, _cdd_mul(c2g, neg)))
    out[1] = _cdd_collapse(_cdd_mul(_cdd_add(c1f, c2g), s3))
    out[2] = _cdd_collapse(_cdd_add(c1fp, _cdd_mul(c2gp, neg)))
    out[3] = _cdd_collapse(_cdd_mul(_cdd_add(c1fp, c2gp), s3))


cdef void _ai_direct_c(double complex z, double complex *ai, double complex *aip) nogil:
    cdef double complex sq = csqrt(z)
    cdef double complex zeta = (2.0 / 3.0) * z * sq
    cdef double complex z14 = csqrt(sq)
    cdef double complex izeta = 1.0 / zeta
    cdef double complex sa = 1.0
    cdef double complex sb = 1.0
    cdef double complex term = 1.0
    cdef double complex ta
    cdef double prev = 1e300
    cdef double mag
    cdef int k = 0
    while k < NASY:
        k += 1
        term = term * (-izeta)
        ta = _UASY[k] * term
        mag = cabs(ta)
        if mag < 1e-18 * cabs(sa) or mag > prev:
            break
        sa = sa + ta
        sb = sb + _VASY[k] * term
        prev = mag
    cdef double complex epre = cexp(-zeta)
    ai[0] = epre * sa / (_TWO_SQRT_PI * z14)
    aip[0] = -epre * z14 * sb / _TWO_SQRT_PI


cdef void _ai_any_c(double complex z, double complex *ai, double complex *aip) nogil:
    cdef double complex am, amp, ap, app
    if fabs(carg(z)) <= _TWO_THIRDS_PI:
        _ai_direct_c(z, ai, aip)
        return
    _ai_direct_c(z * _ROT_M, &am, &amp)
    _ai_direct_c(z * _ROT_P, &ap, &app)
    ai[0] = -_ROT_M * am - _ROT_P * ap
    aip[0] = -_ROT_M * _ROT_M * amp - _ROT_P * _ROT_P * app


cdef void _airy_asym_c(double complex z, double complex *out) nogil:
    cdef double complex ai, aip, ap, app, am, amp
    _ai_any_c(z, &ai, &aip)
    _ai_any_c(z * _ROT_P, &ap, &app)
    _ai_any_c(z * _ROT_M, &am, &amp)
    out[0] = ai
    out[1] = _E6P * ap + _E6M * am
    out[2] = aip
    out[3] = _E6P * _ROT_P * app + _E6M * _ROT_M * amp


cdef void _airy_pair_c(double complex z, double complex *out) nogil:
    if cabs(z) <= _SERIES_RADIUS:
        _airy_series_c(z, out)
    else:
        _airy_asym_c(z, out)


def airy_series(double complex z):
    cdef double complex out[4]
    _airy_series_c(z, out)
    return out[0], out[1], out[2], out[3]


def airy_asym(double complex z):
    cdef double complex out[4]
    _airy_asym_c(z, out)
    return out[0], out[1], out[2], out[3]


def airy_pair_kernel(double complex z):
    """(Ai, Bi, Ai', Bi') at complex z."""
    cdef double complex out[4]
    _airy_pair_c(z, out)
    return out[0], out[1], out[2], out[3]


def ci_pair_kernel(double complex z):
    """Traveling-wave pair (Ci-, Ci+, Ci-', Ci+'), Ci± = Ai ± iBi."""
    cdef double complex out[4]
    cdef double complex am, amp, ap, app, e3p, e3m
    cdef double complex j = 1j
    if cabs(z) <= _SERIES_RADIUS:
        _airy_series_c(z, out)
        return (out[0] - j * out[1], out[0] + j * out[1],
                out[2] - j * out[3], out[2] + j * out[3])
    _ai_any_c(z * _ROT_P, &am, &amp)
    _ai_any_c(z * _ROT_M, &ap, &app)
    e3p = _E6P * _E6P
    e3m = _E6M * _E6M
    return 2.0 * e3m * am, 2.0 * e3p * ap, 2.0 * e3p * amp, 2.0 * e3m * app


# ---------------------------------------------------------------------------
# F providers + RK45 kernel
# ---------------------------------------------------------------------------

F_LINEAR = 0
F_CP_V4 = 1
F_CP_V3V4 = 2
F_CP_TABLE = 3
F_FULL_V4 = 4
F_FULL_V3V4 = 5
F_FULL_TABLE = 6
F_CALLBACK = 7

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2


cdef inline double _spline_eval_c(const double[::1] knots, const double[::1] coefs,
                                  int n, double x) nogil:
    cdef int lo = 0
    cdef int hi = n - 1
    cdef int mid, i, m
    cdef double dx
    if x <= knots[0]:
        i = 0
    elif x >= knots[hi]:
        i = hi - 1
    else:
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if knots[mid] <= x:
                lo = mid
            else:
                hi = mid
        i = lo
    dx = x - knots[i]
    m = n - 1
    return ((coefs[i] * dx + coefs[m + i]) * dx + coefs[2 * m + i]) * dx + coefs[3 * m + i]


cdef inline double complex _f_eval_c(int kind, const double[::1] params,
                                     const double[::1] knots, const double[::1] coefs,
                                     int nknots, double x) nogil:
    cdef double complex j = 1j
    cdef double x2, u
    if kind == 0:      # LINEAR
        return params[0] + j * params[1] - params[2] * x
    elif kind == 1:    # CP_V4
        x2 = x * x
        return params[0] + j * params[1] + 1.0 / (x2 * x2)
    elif kind == 2:    # CP_V3V4
        return params[0] + j * params[1] + 1.0 / (x * x * x * (x + params[2]))
    elif kind == 3:    # CP_TABLE
        if x < params[4]:
            u = -params[2] / (x * x * x)
        elif x > params[5]:
            x2 = x * x
            u = -params[3] / (x2 * x2)
        else:
            u = _spline_eval_c(knots, coefs, nknots, x)
        return params[0] + j * params[1] - u
    elif kind == 4:    # FULL_V4
        x2 = x * x
        return (params[0] - x) + j * params[1] + params[2] / (x2 * x2)
    elif kind == 5:    # FULL_V3V4
        return (params[0] - x) + j * params[1] + params[2] / (x * x * x * (x + params[3]))
    else:              # FULL_TABLE (kind 6; callback never reaches here)
        if x < params[4]:
            u = -params[2] / (x * x * x)
        elif x > params[5]:
            x2 = x * x
            u = -params[3] / (x2 * x2)
        else:
            u = _spline_eval_c(knots, coefs, nknots, x)
        return (params[0] - x) + j * params[1] - u


# Dormand-Prince 5(4) tableau
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0, _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0, _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0, _B3 = 500.0 / 1113.0, _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0, _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0


@cython.cdivision(True)
def integrate_schrodinger(int kind, params_in, knots_in, coefs_in,
                          double x0, double x1,
                          double complex psi0, double complex dpsi0,
                          double rtol=1e-10, double atol=1e-14,
                          long max_steps=1_000_000):
    """Integrate psi'' + F(x) psi = 0 from x0 to x1 (compiled path)."""
    if kind == 7:
        raise NotImplementedError("callback F provider runs on the pure-Python backend")
    cdef double span = x1 - x0
    if span == 0.0:
        return psi0, dpsi0, 0, 0

    import numpy as _np
    cdef const double[::1] params = _np.ascontiguousarray(params_in, dtype=_np.float64)
    cdef const double[::1] knots
    cdef const double[::1] coefs
    cdef int nknots = 0
    if knots_in is not None:
        knots = _np.ascontiguousarray(knots_in, dtype=_np.float64)
        coefs = _np.ascontiguousarray(coefs_in, dtype=_np.float64)
        nknots = knots.shape[0]
    else:
        knots = _np.empty(1, dtype=_np.float64)
        coefs = _np.empty(1, dtype=_np.float64)

    cdef double x = x0
    cdef double complex y = psi0
    cdef double complex d = dpsi0
    cdef double complex f0 = _f_eval_c(kind, params, knots, coefs, nknots, x)
    cdef double complex k1y = d
    cdef double complex k1d = -f0 * y
    cdef double direction = 1.0 if span > 0 else -1.0
    cdef double scale0 = sqrt(cabs(f0)) + 1e-12
    cdef double h = 0.1 * fabs(span)
    if 0.35 / scale0 < h:
        h = 0.35 / scale0
    h *= direction
    cdef double hmin = 1e-14 * fabs(span)
    cdef long nstep = 0
    cdef double complex y2, d2, y3, d3, y4, d4, y5, d5, y6, d6, yn, dn
    cdef double complex k2y, k2d, k3y, k3d, k4y, k4d, k5y, k5d, k6y, k6d, k7y, k7d
    cdef double complex f, erry, errd
    cdef double xn, scy, scd, err, fac, ay, ayn, ad, adn

    while (x1 - x) * direction > 0.0:
        if fabs(h) < hmin:
            return y, d, 2, nstep
        if (x + h - x1) * direction > 0.0:
            h = x1 - x
        nstep += 1
        if nstep > max_steps:
            return y, d, 1, nstep

        y2 = y + h * _A21 * k1y
        d2 = d + h * _A21 * k1d
        f = _f_eval_c(kind, params, knots, coefs, nknots, x + h / 5.0)
        k2y = d2
        k2d = -f * y2

        y3 = y + h * (_A31 * k1y + _A32 * k2y)
        d3 = d + h * (_A31 * k1d + _A32 * k2d)
        f = _f_eval_c(kind, params, knots, coefs, nknots, x + 0.3 * h)
        k3y = d3
        k3d = -f * y3

        y4 = y + h * (_A41 * k1y + _A42 * k2y + _A43 * k3y)
        d4 = d + h * (_A41 * k1d + _A42 * k2d + _A43 * k3d)
        f = _f_eval_c(kind, params, knots, coefs, nknots, x + 0.8 * h)
        k4y = d4
        k4d = -f * y4

        y5 = y + h * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y)
        d5 = d + h * (_A51 * k1d + _A52 * k2d + _A53 * k3d + _A54 * k4d)
        f = _f_eval_c(kind, params, knots, coefs, nknots, x + (8.0 / 9.0) * h)
        k5y = d5
        k5d = -f * y5

        y6 = y + h * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y + _A65 * k5y)
        d6 = d + h * (_A61 * k1d + _A62 * k2d + _A63 * k3d + _A64 * k4d + _A65 * k5d)
        xn = x + h
        f = _f_eval_c(kind, params, knots, coefs, nknots, xn)
        k6y = d6
        k6d = -f * y6

        yn = y + h * (_B1 * k1y + _B3 * k3y + _B4 * k4y + _B5 * k5y + _B6 * k6y)
        dn = d + h * (_B1 * k1d + _B3 * k3d + _B4 * k4d + _B5 * k5d + _B6 * k6d)
        k7y = dn
        k7d = -f * yn

        erry = h * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y + _E6 * k6y + _E7 * k7y)
        errd = h * (_E1 * k1d + _E3 * k3d + _E4 * k4d + _E5 * k5d + _E6 * k6d + _E7 * k7d)
        ay = cabs(y)
        ayn = cabs(yn)
        scy = atol + rtol * (ay if ay > ayn else ayn)
        ad = cabs(d)
        adn = cabs(dn)
        scd = atol + rtol * (ad if ad > adn else adn)
        err = sqrt(0.5 * ((cabs(erry) / scy) ** 2 + (cabs(errd) / scd) ** 2))

        if err <= 1.0:
            x = xn
            y = yn
            d = dn
            k1y = k7y
            k1d = k7d
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
        else:
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
        h *= fac
    return y, d, 0, nstep

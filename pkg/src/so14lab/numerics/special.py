"""Complex gamma, spherical Bessel and confluent hypergeometric functions.

All functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp


class SpecialFunctionError(ArithmeticError):
    """Raised at poles or when an evaluation does not converge."""


# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2 * np.pi)
# B_2k / (2k (2k-1)) for the Stirling series
_STIRLING = np.array([1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188,
                      -691 / 360360, 1 / 156, -3617 / 122400])
LANCZOS_IMAG_LIMIT = 20.0
STIRLING_SHIFT = 12.0


def _check_poles(z):
    bad = (np.imag(z) == 0) & (np.real(z) <= 0) & (np.real(z) == np.round(np.real(z)))
    if np.any(bad):
        raise SpecialFunctionError(f"gamma pole at {np.asarray(z)[bad].ravel()[0]}")


def _log_sin_pi(z):
    """log(sin(pi z)) without overflow for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; factor the dominant exponential.
    sgn = np.where(np.imag(z) >= 0, 1.0, -1.0)
    t = np.exp(2j * np.pi * sgn * z)
    return -1j * np.pi * sgn * z + np.log(1 - t) - np.log(-2j * sgn)


def _loggamma_lanczos(z):
    zm = z - 1
    acc = np.full_like(zm, _LANCZOS[0])
    for k in range(1, _LANCZOS.size):
        acc = acc + _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _loggamma_stirling(z):
    # shift until Re z is large, then undo with the recurrence
    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - np.real(z))).astype(int)
    corr = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max(initial=0))):
        mask = shift > k
        corr = np.where(mask, corr + np.log(w), corr)
        w = np.where(mask, w + 1, w)
    inv = 1 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    series = series * inv
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series - corr


def loggamma_complex(z):
    """A branch of log Gamma(z); ``exp`` of it is Gamma(z).

    Lanczos for ``|Im z| <= 20``, shifted Stirling series beyond, reflection
    for ``Re z < 1/2``.
    """
    scalar = np.isscalar(z)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(z)
    out = np.empty_like(z)
    refl = np.real(z) < 0.5
    zz = np.where(refl, 1 - z, z)
    lanczos = np.abs(np.imag(zz)) <= LANCZOS_IMAG_LIMIT
    if np.any(lanczos):
        out[lanczos] = _loggamma_lanczos(zz[lanczos])
    if np.any(~lanczos):
        out[~lanczos] = _loggamma_stirling(zz[~lanczos])
    if np.any(refl):
        zr = z[refl]
        out[refl] = np.log(np.pi) - _log_sin_pi(zr) - out[refl]
    return out[0] if scalar else out


def gamma_complex(z):
    """Gamma(z) for complex ``z``; raises at the poles."""
    scalar = np.isscalar(z)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.exp(loggamma_complex(zz))
    real = (np.imag(zz) == 0) & (np.real(zz) > 0)
    out = np.where(real, out.real + 0j, out)
    return out[0] if scalar else out


def spherical_bessel(l: int, x):
    """Spherical Bessel function j_l(x) for real ``x >= 0``.

    Upward recurrence from j_0, j_1 where ``x >= l``; Miller's downward
    recurrence started at order ``l + 20`` (plus a margin growing with x) and
    normalized to j_0 where ``x < l``; power series for tiny arguments.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("spherical_bessel needs x >= 0")
    out = np.zeros_like(x)

    small = x < 1e-3 * (l + 1)
    if np.any(small):
        xs = x[small]
        dfact = np.prod(np.arange(1, 2 * l + 2, 2, dtype=float))
        t = xs**2 / 2
        series = 1 - t / (2 * l + 3) + t**2 / (2 * (2 * l + 3) * (2 * l + 5)) \
            - t**3 / (6 * (2 * l + 3) * (2 * l + 5) * (2 * l + 7))
        out[small] = xs**l / dfact * series

    up = (~small) & (x >= l)
    if np.any(up):
        xu = x[up]
        j0 = np.sin(xu) / xu
        if l == 0:
            out[up] = j0
        else:
            j1 = np.sin(xu) / xu**2 - np.cos(xu) / xu
            jm, jc = j0, j1
            for n in range(1, l):
                jm, jc = jc, (2 * n + 1) / xu * jc - jm
            out[up] = jc

    down = (~small) & (x < l)
    if np.any(down):
        xd = x[down]
        start = l + 20 + int(np.ceil(np.sqrt(40 * (l + 1))))
        jp = np.zeros_like(xd)
        jc = np.full_like(xd, 1e-30)
        jl = np.zeros_like(xd)
        for n in range(start, 0, -1):
            jm = (2 * n + 1) / xd * jc - jp
            jp, jc = jc, jm
            if n - 1 == l:
                jl = jc.copy()
            big = np.abs(jc) > 1e100
            if np.any(big):
                jc = np.where(big, jc * 1e-100, jc)
                jp = np.where(big, jp * 1e-100, jp)
                jl = np.where(big, jl * 1e-100, jl)
        if l == 0:
            jl = jc
        out[down] = jl * (np.sin(xd) / xd) / jc
    return float(out[0]) if scalar else out


# --- confluent hypergeometric 1F1 ---------------------------------------

SERIES_MAX_ABS_Z = 30.0
SERIES_MAX_TERMS = 2000
SERIES_CANCELLATION_LIMIT = 1e3
ASYMPTOTIC_MIN_ABS_Z = 30.0
ASYMPTOTIC_REL_TOL = 1e-14
ODE_START_ABS_Z = 4.0
ODE_RTOL = 1e-12


def _check_b(b):
    if np.imag(b) == 0 and np.real(b) <= 0 and np.real(b) == np.round(np.real(b)):
        raise SpecialFunctionError(f"1F1 undefined for b = {b}")


def _series(a, b, z):
    """Taylor series with Neumaier-compensated summation.

    Returns (value, cancellation ratio max|term| / |sum|, converged mask).
    """
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    term = np.ones_like(z)
    biggest = np.ones(z.shape)
    done = np.zeros(z.shape, bool)
    for n in range(SERIES_MAX_TERMS):
        term = term * (a + n) / (b + n) * z / (n + 1)
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp = comp + np.where(big, (total - t) + term, (term - t) + total)
        total = t
        biggest = np.maximum(biggest, np.abs(term))
        done = np.abs(term) <= 1e-17 * np.abs(total + comp)
        if np.all(done) and n > 2:
            break
    value = total + comp
    return value, biggest / np.maximum(np.abs(value), 1e-300), done


def _asymptotic(a, b, z):
    """Large-|z| expansion; returns (value, ok mask)."""
    from numpy import pi
    logz = np.log(z)
    lgb = loggamma_complex(b)
    val = np.zeros_like(z)
    ok = np.ones(z.shape, bool)
    for first in (True, False):
        if first:
            p, q, arg = 1 - a, b - a, 1 / z
            pole = _is_nonpos_int(a)
            if pole:
                continue
            pref = np.exp(lgb - loggamma_complex(a) + z + (a - b) * logz)
        else:
            p, q, arg = a, a - b + 1, -1 / z
            if _is_nonpos_int(b - a):
                continue
            sign = np.where(np.angle(z) > -pi / 2, 1.0, -1.0)
            pref = np.exp(lgb - loggamma_complex(b - a) + sign * 1j * pi * a - a * logz)
        s = np.ones_like(z)
        term = np.ones_like(z)
        last = np.full(z.shape, np.inf)
        conv = np.zeros(z.shape, bool)
        active = np.ones(z.shape, bool)
        for n in range(200):
            nxt = term * (p + n) * (q + n) / (n + 1) * arg
            # divergence sets in once terms grow; stop such points for good
            active &= np.abs(nxt) <= last
            conv |= active & (np.abs(nxt) <= ASYMPTOTIC_REL_TOL * np.abs(s))
            active &= ~conv
            if not np.any(active):
                break
            term = np.where(active, nxt, term)
            s = np.where(active, s + nxt, s)
            last = np.where(active, np.abs(nxt), last)
        ok &= conv
        val = val + pref * s
    return val, ok


def _is_nonpos_int(v):
    return np.imag(v) == 0 and np.real(v) <= 0 and np.real(v) == np.round(np.real(v))


def _ode_continue(a, b, zs):
    """Integrate Kummer's equation along the common ray of ``zs``."""
    zs = np.asarray(zs)
    order = np.argsort(np.abs(zs))
    zsorted = zs[order]
    zend = zsorted[-1]
    radius = min(ODE_START_ABS_Z, abs(zsorted[0]))
    while True:
        z0 = zend / abs(zend) * radius
        w0, r0, ok0 = _series(a, b, np.array([z0]))
        dw0, r1, ok1 = _series(a + 1, b + 1, np.array([z0]))
        if ok0[0] and ok1[0] and max(r0[0], r1[0]) < 30:
            break
        radius /= 2
        if radius < 1e-6:
            raise SpecialFunctionError("no accurate series start point for 1F1 continuation")
    dz = zend - z0

    def rhs(tau, y):
        z = z0 + tau * dz
        w, dw = y
        return [dw * dz, dz * ((z - b) * dw + a * w) / z]

    taus = (zsorted - z0) / dz
    taus = np.clip(np.real(taus), 0.0, 1.0)
    sol = solve_ivp(rhs, (0.0, 1.0), np.array([w0[0], dw0[0] * a / b], dtype=complex),
                    method="DOP853", t_eval=taus, rtol=ODE_RTOL, atol=1e-300)
    if not sol.success:
        raise SpecialFunctionError(f"1F1 ODE continuation failed: {sol.message}")
    out = np.empty_like(zs)
    out[order] = sol.y[0]
    return out


def hyp1f1_complex(a, b, z):
    """Kummer's confluent hypergeometric function 1F1(a; b; z).

    Taylor series for ``|z| <= 30`` when cancellation is mild, the two-sector
    asymptotic expansion for large ``|z|``, and integration of Kummer's ODE
    along the ray from a series point for whatever is left in between.
    """
    a = complex(a)
    b = complex(b)
    _check_b(b)
    scalar = np.isscalar(z)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    todo = np.ones(z.shape, bool)

    zero = z == 0
    out[zero] = 1.0
    todo &= ~zero

    cand = todo & (np.abs(z) <= SERIES_MAX_ABS_Z)
    if np.any(cand):
        val, ratio, conv = _series(a, b, z[cand])
        good = conv & (ratio < SERIES_CANCELLATION_LIMIT)
        idx = np.flatnonzero(cand)[good]
        out[idx] = val[good]
        todo[idx] = False

    cand = todo & (np.abs(z) >= ASYMPTOTIC_MIN_ABS_Z)
    if np.any(cand):
        val, ok = _asymptotic(a, b, z[cand])
        idx = np.flatnonzero(cand)[ok]
        out[idx] = val[ok]
        todo[idx] = False

    if np.any(todo):
        rest = np.flatnonzero(todo)
        angles = np.round(np.angle(z[rest]), 12)
        for ang in np.unique(angles):
            sel = rest[angles == ang]
            out[sel] = _ode_continue(a, b, z[sel])
    if not np.all(np.isfinite(out)):
        raise SpecialFunctionError("1F1 evaluation overflowed")
    return out[0] if scalar else out

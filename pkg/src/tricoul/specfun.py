"""
Complex special functions: Gamma, digamma and Kummer's function.

Kummer's confluent hypergeometric function

    Phi(a; b; zeta) = sum_n (a)_n / ((b)_n n!) zeta^n

is evaluated for the parameters met in Coulomb problems (a = -i*eta,
b in {1, 2, 3} and their contiguous neighbours) with zeta near the
imaginary axis.  Two routes are used:

* ``series`` -- the Maclaurin series, summed in double precision when the
  terms do not cancel and in extended precision (mpmath) otherwise.  Beyond
  ``SERIES_DIRECT_RADIUS`` the value at the radius is continued outward
  along the ray by a chain of local Taylor expansions of Kummer's ODE.
* ``asymptotic`` -- the two-branch large-|zeta| expansion, used for
  |zeta| >= regime_switch_radius(a, b).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

from .errors import DomainError, PoleError

__all__ = [
    "DomainError",
    "PoleError",
    "KummerEval",
    "gamma_complex",
    "loggamma_complex",
    "rgamma_complex",
    "digamma_complex",
    "regime_switch_radius",
    "kummer_phi",
    "phi",
    "kummer_phi_dz",
    "kummer_phi_da",
]


EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2, B_4, ..., B_20
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)
_STIRLING = tuple(b / ((2 * k + 2) * (2 * k + 1)) for k, b in enumerate(_BERNOULLI))
_DIGAMMA = tuple(b / (2 * k + 2) for k, b in enumerate(_BERNOULLI))
_STIRLING_MIN = 15.0


def _is_nonpositive_integer(w: complex) -> bool:
    return w.imag == 0.0 and w.real <= 0.0 and w.real == math.floor(w.real)


def _shift_up(w: complex) -> tuple[complex, int]:
    n = 0
    while abs(w + n) < _STIRLING_MIN:
        n += 1
    return w + n, n


def _stirling_lngamma(w: complex) -> complex:
    inv = 1.0 / w
    inv2 = inv * inv
    acc = 0j
    p = inv
    for c in _STIRLING:
        acc += c * p
        p *= inv2
    return (w - 0.5) * cmath.log(w) - w + _HALF_LOG_2PI + acc


def loggamma_complex(w: complex) -> complex:
    """ln Gamma(w) up to a multiple of 2*pi*i (not the principal branch).

    Suitable for building products and ratios of Gamma values through
    ``exp``; use :func:`gamma_complex` when the value itself is needed.
    """
    w = complex(w)
    if _is_nonpositive_integer(w):
        raise PoleError(f"Gamma has a pole at {w.real:g}")
    if w.real < 0.5:
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * w)) - loggamma_complex(1.0 - w)
    ws, n = _shift_up(w)
    out = _stirling_lngamma(ws)
    if n:
        prod = 1.0 + 0j
        for m in range(n):
            prod *= w + m
        out -= cmath.log(prod)
    return out


def gamma_complex(w: complex) -> complex:
    """Gamma(w) for complex w; reflection is used for Re w < 1/2."""
    w = complex(w)
    if _is_nonpositive_integer(w):
        raise PoleError(f"Gamma has a pole at {w.real:g}")
    if w.real < 0.5:
        return math.pi / (cmath.sin(math.pi * w) * gamma_complex(1.0 - w))
    ws, n = _shift_up(w)
    val = cmath.exp(_stirling_lngamma(ws))
    for m in range(n):
        val /= w + m
    return val


def rgamma_complex(w: complex) -> complex:
    """1/Gamma(w), zero at the poles of Gamma."""
    w = complex(w)
    if _is_nonpositive_integer(w):
        return 0j
    return 1.0 / gamma_complex(w)


def digamma_complex(w: complex) -> complex:
    """psi(w) = Gamma'(w)/Gamma(w) by recurrence plus asymptotic series."""
    w = complex(w)
    if _is_nonpositive_integer(w):
        raise PoleError(f"digamma has a pole at {w.real:g}")
    if w.real < 0.5:
        return digamma_complex(1.0 - w) - math.pi * cmath.cos(math.pi * w) / cmath.sin(math.pi * w)
    ws, n = _shift_up(w)
    inv = 1.0 / ws
    inv2 = inv * inv
    acc = 0j
    p = inv2
    for c in _DIGAMMA:
        acc += c * p
        p *= inv2
    out = cmath.log(ws) - 0.5 * inv - acc
    for m in range(n):
        out -= 1.0 / (w + m)
    return out


# ---------------------------------------------------------------------------
# Kummer's function
# ---------------------------------------------------------------------------

SERIES_DIRECT_RADIUS = 24.0
SWITCH_FLOOR = 50.0
TARGET_TOL = 1e-9
MAX_IMAG_A = 50.0
MAX_ABS_ZETA = 1e7
MAX_REAL_ZETA = 650.0
_CONTINUATION_STEP = 4.0
_EPS = 2.0**-56


@dataclass(frozen=True)
class KummerEval:
    """One evaluation of Phi(a; b; zeta) with the route that produced it."""

    a: complex
    b: complex
    zeta: complex
    value: complex
    method: str
    accuracy_warning: bool = False
    error_estimate: float = 0.0


def regime_switch_radius(a: complex, b: complex) -> float:
    """|zeta| above which the asymptotic expansion is used."""
    m = max(abs(a), abs(b - a), abs(1.0 + a - b), abs(1.0 - a))
    return max(SWITCH_FLOOR, 4.0 * m * m)


def _check_params(a: complex, b: complex, zeta: complex) -> None:
    if _is_nonpositive_integer(b):
        raise PoleError(f"Phi undefined for b = {b.real:g}")
    if abs(a.imag) > MAX_IMAG_A or abs(a.real) > 10.0 or abs(b) > 10.0:
        raise DomainError(f"Phi parameters outside validated region: a={a}, b={b}")
    if not (cmath.isfinite(zeta)) or abs(zeta) > MAX_ABS_ZETA:
        raise DomainError(f"|zeta| = {abs(zeta):.3g} outside validated region")
    if zeta.real > MAX_REAL_ZETA:
        raise DomainError(f"Re zeta = {zeta.real:.3g} overflows double precision")


def _series_double(a: complex, b: complex, z: complex, with_da: bool):
    """Maclaurin sums of Phi, Phi' and dPhi/da in double precision.

    Returns (phi, dphi, dphi_da, loss) where loss = max|term| / |phi|.
    """
    t = 1.0 + 0j  # (a)_n z^n / ((b)_n n!)
    dt = 0j  # d/da of t
    s = t
    ds_z = 0j
    s_a = 0j
    tmax = 1.0
    n = 0
    while True:
        f = (a + n) * z / ((b + n) * (n + 1))
        if with_da:
            dt = dt * f + t * z / ((b + n) * (n + 1))
        t = t * f
        n += 1
        s += t
        ds_z += n * t
        s_a += dt
        at = abs(t)
        if at > tmax:
            tmax = at
        if n > 2 and abs(f) < 0.5 and at <= _EPS * abs(s) and abs(dt) <= _EPS * (abs(s_a) + abs(s)):
            break
        if n > 100000:
            raise DomainError("Maclaurin series failed to converge")
    dphi = ds_z / z if z != 0 else a / b
    loss = tmax / max(abs(s), 1e-300)
    return s, dphi, s_a, loss


def _series_mp(a: complex, b: complex, z: complex, with_da: bool, bits: int):
    with mpmath.workprec(bits):
        A = mpmath.mpc(a)
        B = mpmath.mpc(b)
        Z = mpmath.mpc(z)
        one = mpmath.mpf(1)
        t = mpmath.mpc(1)
        dt = mpmath.mpc(0)
        s = t
        sz = mpmath.mpc(0)
        sa = mpmath.mpc(0)
        tmax = one
        eps = mpmath.mpf(2) ** -64
        n = 0
        absz = abs(complex(z))
        while True:
            den = (B + n) * (n + 1)
            f = (A + n) * Z / den
            if with_da:
                dt = dt * f + t * Z / den
            t = t * f
            n += 1
            s += t
            sz += n * t
            sa += dt
            at = abs(t)
            if at > tmax:
                tmax = at
            if n > absz + abs(a) + 2 and at <= eps * abs(s) and (not with_da or abs(dt) <= eps * (abs(sa) + abs(s))):
                break
        loss = float(mpmath.log(tmax / abs(s), 2)) if s != 0 else float("inf")
        dphi = sz / Z if z != 0 else A / B
        return complex(s), complex(dphi), complex(sa), loss


def _series_direct(a: complex, b: complex, z: complex, with_da: bool = False):
    """(phi, phi', dphi/da) by the Maclaurin series, precision adapted to cancellation."""
    s, d, sa, loss = _series_double(a, b, z, with_da)
    if loss <= 2.0:
        return s, d, sa
    bits = 80 + int(1.45 * (abs(z) + 2.0 * math.sqrt(abs(a * z)) + math.pi * abs(a.imag)))
    for _ in range(4):
        s, d, sa, lost = _series_mp(a, b, z, with_da, bits)
        if bits - lost >= 70:
            return s, d, sa
        bits = int(lost) + 100
    raise DomainError("extended-precision series did not reach working accuracy")


def _taylor_step(a: complex, b: complex, z0: complex, y0: complex, y1: complex, h: complex):
    """Advance (Phi, Phi') from z0 to z0+h with the local Taylor series of Kummer's ODE."""
    c0, c1 = y0, y1
    val = c0 + c1 * h
    der = c1
    hp = h  # h^(n+1)
    n = 0
    scale = abs(y0) + abs(y1 * h)
    small = 0
    while True:
        c2 = ((n + a) * c0 - (n + 1) * (n + b - z0) * c1) / (z0 * (n + 1) * (n + 2))
        term_d = (n + 2) * c2 * hp
        hp = hp * h
        term_v = c2 * hp
        val += term_v
        der += term_d
        c0, c1 = c1, c2
        n += 1
        if abs(term_v) <= _EPS * scale and abs(term_d) * abs(h) <= _EPS * scale:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        if n > 2000:
            raise DomainError("Taylor continuation failed to converge")
    return val, der


def _series_route(a: complex, b: complex, z: complex):
    """Phi and Phi' through the convergent route."""
    r = abs(z)
    if r <= SERIES_DIRECT_RADIUS:
        s, d, _ = _series_direct(a, b, z)
        return s, d
    u = z / r
    z0 = u * SERIES_DIRECT_RADIUS
    y, dy, _ = _series_direct(a, b, z0)
    nsteps = int(math.ceil((r - SERIES_DIRECT_RADIUS) / _CONTINUATION_STEP))
    h = (z - z0) / nsteps
    zc = z0
    for i in range(nsteps):
        y, dy = _taylor_step(a, b, zc, y, dy, h)
        zc = z0 + (i + 1) * h
    return y, dy


def _asymptotic_sum(p: complex, q: complex, w: complex):
    """sum_n (p)_n (q)_n / n! * w^n truncated at its smallest term.

    Returns (sum, smallest |term| relative to |sum|).
    """
    t = 1.0 + 0j
    s = t
    prev = 1.0
    n = 0
    while True:
        t_next = t * (p + n) * (q + n) / (n + 1) * w
        at = abs(t_next)
        if at > prev and n > 0:
            return s, prev / max(abs(s), 1e-300)
        t = t_next
        s += t
        n += 1
        prev = at
        if at <= _EPS * abs(s) or at == 0.0:
            return s, at / max(abs(s), 1e-300)
        if n > 500:
            return s, at / max(abs(s), 1e-300)


def _anchor(w: complex) -> tuple[complex, complex]:
    """Split ln Gamma(w) = ln Gamma(base) + ln[(base)_n] with base = w - n.

    Contiguous parameters (w, w+1, w+2) share ``base`` and so share the
    rounding of the large first term.
    """
    n = math.floor(w.real)
    if n <= 0:
        return loggamma_complex(w), 0j
    base = w - n
    if base == 0:
        base, n = base + 1.0, n - 1
    prod = 1.0 + 0j
    for m in range(n):
        prod *= base + m
    return loggamma_complex(base), cmath.log(prod)


def _asymptotic(a: complex, b: complex, z: complex):
    """Large-|z| expansion of Phi; returns (value, relative error estimate).

    Exponents are kept as a part shared by the contiguous family
    (a + n, b + n) plus a small n-dependent part, and e^z as its own factor.
    Large phases then round identically across the family, which matters
    for recurrence and ODE combinations at |z| ~ 1e6.
    """
    sign = 1.0 if z.imag >= 0.0 else -1.0
    logz = cmath.log(z)
    val = 0j
    err = 0.0
    ai = 1j * a.imag
    if not _is_nonpositive_integer(b - a):
        s1, e1 = _asymptotic_sum(a, 1.0 + a - b, -1.0 / z)
        g_big, g_small = _anchor(b - a)
        big = sign * 1j * math.pi * ai - ai * logz - g_big
        small = a.real * (sign * 1j * math.pi - logz) - g_small
        t1 = cmath.exp(big) * cmath.exp(small) * s1
        val += t1
        err = max(err, e1 * abs(t1))
    if not _is_nonpositive_integer(a):
        s2, e2 = _asymptotic_sum(b - a, 1.0 - a, 1.0 / z)
        g_big, g_small = _anchor(a)
        big = (a - b) * logz - g_big
        t2 = cmath.exp(z) * cmath.exp(big) * cmath.exp(-g_small) * s2
        val += t2
        err = max(err, e2 * abs(t2))
    gb = _gamma_b(b)
    val *= gb
    return val, err * abs(gb) / max(abs(val), 1e-300)


def _gamma_b(b: complex) -> complex:
    if b.imag == 0.0 and b.real == int(b.real) and 1 <= b.real <= 20:
        return complex(math.factorial(int(b.real) - 1))
    return gamma_complex(b)


def _phi_and_method(a: complex, b: complex, z: complex):
    if a == 0 or z == 0:
        return 1.0 + 0j, "series", 0.0
    if abs(z) >= regime_switch_radius(a, b):
        v, e = _asymptotic(a, b, z)
        return v, "asymptotic", e
    v, _ = _series_route(a, b, z)
    return v, "series", 0.0


def kummer_phi(a: complex, b: complex, zeta: complex) -> KummerEval:
    """Phi(a; b; zeta) with the evaluation route recorded.

    Validated for b in {1, 2, 3}, |Im a| <= 50, |zeta| <= 1e6 within
    0.3*|zeta| of the imaginary axis (and Re zeta small enough not to
    overflow).  ``accuracy_warning`` is set when the asymptotic series'
    smallest term exceeds ``TARGET_TOL``.
    """
    a, b, zeta = complex(a), complex(b), complex(zeta)
    _check_params(a, b, zeta)
    v, method, err = _phi_and_method(a, b, zeta)
    return KummerEval(a, b, zeta, v, method, err > TARGET_TOL, err)


def phi(a: complex, b: complex, zeta: complex) -> complex:
    """Value of Phi(a; b; zeta) (see :func:`kummer_phi`)."""
    a, b, zeta = complex(a), complex(b), complex(zeta)
    _check_params(a, b, zeta)
    return _phi_and_method(a, b, zeta)[0]


def kummer_phi_dz(a: complex, b: complex, zeta: complex) -> complex:
    """d Phi / d zeta = (a/b) Phi(a+1; b+1; zeta)."""
    a, b = complex(a), complex(b)
    if a == 0:
        return 0j
    return a / b * phi(a + 1.0, b + 1.0, zeta)


_DA_STEP = 1e-3


def kummer_phi_da(a: complex, b: complex, zeta: complex) -> complex:
    """d Phi / d a.

    Summed termwise for |zeta| <= SERIES_DIRECT_RADIUS; otherwise a
    five-point central difference in the (complex) parameter a.
    """
    a, b, zeta = complex(a), complex(b), complex(zeta)
    _check_params(a, b, zeta)
    if zeta == 0:
        return 0j
    if abs(zeta) <= SERIES_DIRECT_RADIUS:
        _, _, sa = _series_direct(a, b, zeta, with_da=True)
        return sa
    h = _DA_STEP
    f = [phi(a + m * h, b, zeta) for m in (-2, -1, 1, 2)]
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)

"""
Coefficient algebra of the screen region.

Near the screen of pair j the BBK product splits into the pair wave of
pair j times Psi_1, the product of the two spectator distortions with the
plane wave in y_j.  Its weak asymptotics in the direction of y_j is carried
by two delta terms at y_hat = -+p_hat whose amplitudes are built from the
quantities collected in :class:`ScreenAsymCoeffs`.  The coefficients of the
resolution kernel R are gathered in :class:`RKernelCoeffs`.

``twobody_weak_check`` tests the two-body weak asymptotics by integrating
the pair Coulomb wave against a test function on the sphere.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import specfun
from .errors import BranchError, DomainError, QuadratureError
from .kinematics import SQRT3_2, JacobiConfig, JacobiMomentum, momentum_frame, others, pair_frame
from .wavefn import TWO_PI_M32, psi_c, sommerfeld

__all__ = [
    "ScreenAsymCoeffs",
    "RKernelCoeffs",
    "TwoBodyWeakRecord",
    "screen_coeffs",
    "psi1_weak_amplitudes",
    "rkernel_coeffs",
    "rkernel_from_vectors",
    "b_orthogonality",
    "coulomb_amplitude",
    "twobody_weak_check",
]

SQRT3 = math.sqrt(3.0)
TWO_PI_M3 = (2.0 * math.pi) ** -3


def _unit(v, what: str) -> tuple[np.ndarray, float]:
    v = np.asarray(v, dtype=float).reshape(3)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise DomainError(f"{what} is the zero vector")
    return v / n, n


def _kpow(k: float, eta: float) -> complex:
    """k^{i eta}, unimodular for real k > 0."""
    return cmath.exp(1j * eta * math.log(k))


# ---------------------------------------------------------------------------
# Weak asymptotics of Psi_1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScreenAsymCoeffs:
    """Z, V, omega and B0 of the weak asymptotics of Psi_1."""

    Z2p: float
    Z2m: float
    Z3p: float
    Z3m: float
    V2p: float
    V2m: float
    V3p: float
    V3m: float
    omega: float
    B0: complex
    eta2: float
    eta3: float

    def branch(self, sign: int) -> tuple[float, float, float, float]:
        """(Z2, V2, Z3, V3) for sign +1 (outgoing) or -1 (incoming)."""
        if sign > 0:
            return self.Z2p, self.V2p, self.Z3p, self.V3p
        return self.Z2m, self.V2m, self.Z3m, self.V3m


def _spectators(q: JacobiMomentum, j: int):
    m, n = others(j)
    k2 = momentum_frame(q, m)[0]
    k3 = momentum_frame(q, n)[0]
    k2h, k2n = _unit(k2, f"spectator momentum k_{m}")
    k3h, k3n = _unit(k3, f"spectator momentum k_{n}")
    return k2h, k2n, k3h, k3n


def screen_coeffs(q: JacobiMomentum, xhat, phat, j: int, alpha: float) -> ScreenAsymCoeffs:
    """Coefficients of the weak asymptotics of Psi_1 on the screen of pair j.

    Parameters
    ----------
    q : JacobiMomentum
        Total momentum; the spectator momenta k_2, k_3 are the pair momenta
        of the two channels following j cyclically.
    xhat, phat : array_like
        Directions of x_j and p_j.  ``phat`` is independent of q so that
        the p_hat -> -p_hat swap can be probed at fixed spectators.
    j : int
        Screen label.
    alpha : float
        Coupling.

    Returns
    -------
    ScreenAsymCoeffs
    """
    k2h, k2n, k3h, k3n = _spectators(q, j)
    xh = np.asarray(xhat, dtype=float).reshape(3)
    ph, _ = _unit(phat, "p_hat")
    c2, c3 = float(ph @ k2h), float(ph @ k3h)
    eta2, eta3 = sommerfeld(k2n, alpha), sommerfeld(k3n, alpha)
    return ScreenAsymCoeffs(
        Z2p=SQRT3_2 * (1.0 + c2),
        Z2m=SQRT3_2 * (1.0 - c2),
        Z3p=SQRT3_2 * (1.0 - c3),
        Z3m=SQRT3_2 * (1.0 + c3),
        V2p=float(xh @ (k2h + ph)),
        V2m=float(xh @ (k2h - ph)),
        V3p=float(xh @ (k3h - ph)),
        V3m=float(xh @ (k3h + ph)),
        omega=eta2 + eta3,
        B0=-TWO_PI_M3 * _kpow(k2n, eta2) * _kpow(k3n, eta3),
        eta2=eta2,
        eta3=eta3,
    )


def psi1_weak_amplitudes(z: JacobiConfig, q: JacobiMomentum, j: int, alpha: float) -> tuple[complex, complex]:
    """Amplitudes of the delta terms at y_hat = -p_hat (in) and y_hat = p_hat (out).

    With y = |y_j|, p = |p_j|, x = |x_j|,

        amp_in  =  B0 (2 pi / (i y p)) e^{-iyp + i omega ln y} prod e^{i eta ln[Z^- + (x/2y) V^-]}
        amp_out = -B0 (2 pi / (i y p)) e^{+iyp + i omega ln y} prod e^{i eta ln[Z^+ + (x/2y) V^+]}

    The expansion presumes y >> 1 and x << y; this is not checked.

    Raises
    ------
    BranchError
        If a logarithm argument is not positive (outside the asymptotic regime).
    """
    xj, yj = pair_frame(z, j)
    pj = momentum_frame(q, j)[1]
    ph, pn = _unit(pj, "p_j")
    y = float(np.linalg.norm(yj))
    if y == 0.0:
        raise DomainError("y_j = 0: no asymptotic direction")
    x = float(np.linalg.norm(xj))
    xh = xj / x if x > 0.0 else np.zeros(3)
    c = screen_coeffs(q, xh, ph, j, alpha)
    pref = c.B0 * 2.0 * math.pi / (1j * y * pn) * cmath.exp(1j * c.omega * math.log(y))
    amps = []
    for sign in (-1, 1):
        z2, v2, z3, v3 = c.branch(sign)
        a2, a3 = z2 + 0.5 * x / y * v2, z3 + 0.5 * x / y * v3
        if a2 <= 0.0 or a3 <= 0.0:
            raise BranchError(f"log argument {min(a2, a3):.3g} <= 0 on the {'out' if sign > 0 else 'in'} branch")
        lg = cmath.exp(1j * (c.eta2 * math.log(a2) + c.eta3 * math.log(a3)))
        amps.append(-sign * pref * cmath.exp(sign * 1j * y * pn) * lg)
    return amps[0], amps[1]


# ---------------------------------------------------------------------------
# Resolution kernel coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RKernelCoeffs:
    """Coefficients of the resolution kernel R on the screen of one pair.

    ``projected`` marks the variant in which the k_hat component of
    B_in, B_out has been removed.
    """

    a: float
    b: float
    A_in: complex
    A_out: complex
    B_in: np.ndarray
    B_out: np.ndarray
    Omega_in: np.ndarray
    Omega_out: np.ndarray
    B0_in: complex
    B0_out: complex
    khat: np.ndarray = field(repr=False)
    projected: bool = False


def rkernel_from_vectors(k, p, k2, k3, alpha: float, projected: bool = False) -> RKernelCoeffs:
    """R-kernel coefficients from explicit pair momentum k, conjugate p and spectators k2, k3."""
    kh, kn = _unit(k, "k")
    ph, pn = _unit(p, "p")
    k2h, k2n = _unit(k2, "k_2")
    k3h, k3n = _unit(k3, "k_3")
    eta2, eta3 = sommerfeld(k2n, alpha), sommerfeld(k3n, alpha)
    omega = eta2 + eta3
    shift = 2.0 * alpha / (SQRT3 * pn)
    a, b = omega - shift, omega + shift
    if a == 0.0 or b == 0.0:
        raise DomainError(f"resonant coupling a={a:.3g}, b={b:.3g}: B_in/B_out undefined")

    c2, c3 = float(ph @ k2h), float(ph @ k3h)
    if abs(c2) == 1.0 or abs(c3) == 1.0:
        raise DomainError("p_hat parallel to a spectator momentum: Omega is singular")
    spin = _kpow(k2n, eta2) * _kpow(k3n, eta3)

    def b0(s2, s3):
        return TWO_PI_M3 * cmath.exp(1j * (eta2 * math.log(SQRT3_2 * s2) + eta3 * math.log(SQRT3_2 * s3))) * spin

    B0_in = b0(1.0 - c2, 1.0 + c3)
    B0_out = b0(1.0 + c2, 1.0 - c3)
    Om_in = (eta2 * (k2h - ph) / (1.0 - c2) + eta3 * (k3h + ph) / (1.0 + c3)) / SQRT3
    Om_out = (eta2 * (k2h + ph) / (1.0 + c2) + eta3 * (k3h - ph) / (1.0 - c3)) / SQRT3
    A_in = -(kn / (math.pi * 1j)) * specfun.gamma_complex(1.0 - 1j * a) * math.exp(0.5 * math.pi * a) * B0_in
    A_out = (kn / (math.pi * 1j)) * specfun.gamma_complex(1.0 - 1j * b) * math.exp(-0.5 * math.pi * b) * B0_out
    B_in = pn / kn**2 * kh - Om_in / (a * kn)
    B_out = pn / kn**2 * kh - Om_out / (b * kn)
    if projected:
        B_in = B_in - (B_in @ kh) * kh
        B_out = B_out - (B_out @ kh) * kh
    return RKernelCoeffs(a, b, A_in, A_out, B_in, B_out, Om_in, Om_out, B0_in, B0_out, kh, projected)


def rkernel_coeffs(q: JacobiMomentum, j: int, alpha: float, projected: bool = False) -> RKernelCoeffs:
    """R-kernel coefficients for the screen of pair j."""
    k, p = momentum_frame(q, j)
    m, n = others(j)
    return rkernel_from_vectors(k, p, momentum_frame(q, m)[0], momentum_frame(q, n)[0], alpha, projected)


def b_orthogonality(c: RKernelCoeffs) -> tuple[float, float]:
    """(<B_in, k_hat>, <B_out, k_hat>); both vanish only in the projected variant."""
    return float(c.B_in @ c.khat), float(c.B_out @ c.khat)


# ---------------------------------------------------------------------------
# Two-body weak asymptotics
# ---------------------------------------------------------------------------


def coulomb_amplitude(cos_theta, k: float, alpha: float):
    """Coulomb scattering amplitude f(theta) for the potential alpha/x.

    f = -eta / (2k sin^2(theta/2)) exp(-i eta ln sin^2(theta/2) + 2i sigma_0),
    sigma_0 = arg Gamma(1 + i eta).  Singular in the forward direction.
    """
    eta = sommerfeld(k, alpha)
    s2 = 0.5 * (1.0 - np.asarray(cos_theta, dtype=float))
    sigma0 = specfun.loggamma_complex(1.0 + 1j * eta).imag
    return -eta / (2.0 * k * s2) * np.exp(-1j * eta * np.log(s2) + 2j * sigma0)


@dataclass
class TwoBodyWeakRecord:
    """Per-radius comparison of the sphere integral with the weak asymptotics.

    ``mismatch`` is |extracted - predicted| / |predicted| for the incoming
    term, or the absolute |extracted| when the test function vanishes at
    -k_hat.
    """

    radii: np.ndarray
    integral: np.ndarray
    incoming_pred: np.ndarray
    scattered_pred: np.ndarray
    extracted: np.ndarray
    mismatch: np.ndarray
    quad_error: np.ndarray
    nodes: list[int]
    converged: bool


def _smooth_step(s: float) -> float:
    """C-infinity step from 1 (s <= 0) to 0 (s >= 1); keeps Gauss-Legendre spectral."""
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    u, v = math.exp(-1.0 / s), math.exp(-1.0 / (1.0 - s))
    return v / (u + v)


def _frame_about(kh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.array([1.0, 0.0, 0.0]) if abs(kh[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = t - (t @ kh) * kh
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(kh, e1)


def _azimuthal(testfn, kh, e1, e2, c: np.ndarray, n_phi: int) -> np.ndarray:
    """2 pi times the azimuthal mean of testfn on the circles x_hat . k_hat = c."""
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    ring = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)
    out = np.empty(c.size, dtype=complex)
    for i, ci in enumerate(c):
        si = math.sqrt(max(0.0, 1.0 - ci * ci))
        pts = ci * kh + si * ring
        out[i] = sum(complex(testfn(u)) for u in pts)
    return out * (2.0 * math.pi / n_phi)


def _sphere_integral(kvec, kh, e1, e2, alpha, X, testfn, lo, hi, win, n, n_phi):
    nodes, wts = np.polynomial.legendre.leggauss(n)
    c = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wts
    g = _azimuthal(testfn, kh, e1, e2, c, n_phi) * np.array([win(ci) for ci in c])
    psi = np.array([psi_c(X * (ci * kh + math.sqrt(1.0 - ci * ci) * e1), kvec, alpha).value for ci in c])
    f = coulomb_amplitude(c, float(np.linalg.norm(kvec)), alpha) if alpha != 0.0 else np.zeros_like(c)
    return complex(np.sum(w * psi * g)), complex(np.sum(w * f * g))


def twobody_weak_check(
    k,
    alpha: float,
    radius_list,
    testfn: Callable[[np.ndarray], complex],
    window: tuple[float, float] | None = (0.0, 0.5),
    n_phi: int = 48,
    qtol: float = 1e-6,
    strict: bool = True,
) -> TwoBodyWeakRecord:
    """Compare sphere integrals of the pair Coulomb wave with its weak asymptotics.

    For each radius X the integral of psi_c(X x_hat, k) g(x_hat) over the
    unit sphere is compared with

        (2 pi i / (kX)) (2 pi)^{-3/2} e^{i eta ln 2k} g(-k_hat) e^{-ikX + i eta ln X}
        + (2 pi)^{-3/2} e^{ikX - i eta ln 2kX} / X * int f(theta) g dOmega,

    the incoming delta term and the Coulomb-scattered wave.  The test
    function is multiplied by a smooth window that removes the forward cone
    (x_hat . k_hat >= window[1]), where the distorted plane wave and the
    scattered wave cannot be separated.

    Parameters
    ----------
    k : array_like
        Pair momentum.
    alpha : float
        Coupling.
    radius_list : sequence of float
        Radii X, each should satisfy kX >> 1.
    testfn : callable
        Smooth function of a unit 3-vector.
    window : (float, float) or None
        Cosines where the window starts falling and reaches zero.  ``None``
        integrates the full sphere, allowed only for ``alpha == 0``, in
        which case the forward delta term of the free plane wave is added
        to the prediction.
    n_phi : int
        Azimuthal trapezoid nodes.
    qtol : float
        Relative agreement required between two Gauss-Legendre orders.
    strict : bool
        Raise :class:`QuadratureError` when ``qtol`` is not met.

    Returns
    -------
    TwoBodyWeakRecord
    """
    kvec = np.asarray(k, dtype=float).reshape(3)
    kh, kn = _unit(kvec, "k")
    eta = sommerfeld(kn, alpha)
    e1, e2 = _frame_about(kh)
    if window is None:
        if alpha != 0.0:
            raise DomainError("the forward cone must be windowed when alpha != 0")
        lo, hi, win = -1.0, 1.0, (lambda c: 1.0)
    else:
        c0, c1 = window
        if not -1.0 < c0 < c1 < 1.0:
            raise ValueError(f"window must satisfy -1 < c0 < c1 < 1, got {window}")
        lo, hi = -1.0, c1

        def win(c):
            return _smooth_step((c - c0) / (c1 - c0))

    g_back = complex(testfn(-kh))
    g_fwd = complex(testfn(kh)) * win(1.0) if window is None else 0j
    rows, nodes, ok = [], [], True
    for X in np.asarray(radius_list, dtype=float):
        n = int(kn * X * (hi - lo)) + 64
        n2 = int(1.5 * n)
        i1, s1 = _sphere_integral(kvec, kh, e1, e2, alpha, X, testfn, lo, hi, win, n, n_phi)
        i2, s2 = _sphere_integral(kvec, kh, e1, e2, alpha, X, testfn, lo, hi, win, n2, n_phi)
        qerr = abs(i2 - i1)
        if qerr > qtol * max(abs(i2), 1e-300):
            ok = False
        lead = 2j * math.pi / (kn * X) * TWO_PI_M32
        inc = lead * cmath.exp(1j * eta * math.log(2.0 * kn)) * g_back * cmath.exp(-1j * kn * X + 1j * eta * math.log(X))
        scat = TWO_PI_M32 * cmath.exp(1j * kn * X - 1j * eta * math.log(2.0 * kn * X)) / X * s2
        scat -= lead * g_fwd * cmath.exp(1j * kn * X)
        ext = i2 - scat
        mis = abs(ext - inc) / abs(inc) if g_back != 0.0 else abs(ext)
        rows.append((X, i2, inc, scat, ext, mis, qerr))
        nodes.append(n2)
    if strict and not ok:
        raise QuadratureError("sphere quadrature did not reach the requested tolerance")
    cols = list(zip(*rows))
    return TwoBodyWeakRecord(
        radii=np.array(cols[0]),
        integral=np.array(cols[1]),
        incoming_pred=np.array(cols[2]),
        scattered_pred=np.array(cols[3]),
        extracted=np.array(cols[4]),
        mismatch=np.array(cols[5]),
        quad_error=np.array(cols[6]),
        nodes=nodes,
        converged=ok,
    )

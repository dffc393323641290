"""
Wavefunction constructions for three identical charged particles.

* ``psi_c``   pair Coulomb wave  N_c e^{i<x,k>} D(x,k)
* ``bbk``     product ansatz      N_0 e^{i<z,q>} D(x_1,k_1) D(x_2,k_2) D(x_3,k_3)
* ``chi``     screen-j ansatz where the two spectator distortion factors are
              evaluated at the complex shifted coordinates of ``x_tilde``
* ``psi_as``  partition-of-unity assembly  sum_j zeta_0j chi_j + zeta_0 bbk

Every construction takes ``envelope=True`` to drop the plane-wave factor
e^{i<z,q>}; the residual engine differentiates the envelope, which varies
on the scale of the configuration rather than of the wavelength.
"""

from __future__ import annotations

import cmath
import math
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import BranchError, DomainError
from .kinematics import (
    PAIRS,
    JacobiConfig,
    JacobiMomentum,
    RegionWeights,
    SQRT3_2,
    momentum_frame,
    others,
    pair_frame,
    partition_weights,
)

__all__ = [
    "PairWave",
    "ShiftedCoords",
    "sommerfeld",
    "norm_const",
    "coulomb_D",
    "psi_c",
    "psi_c_loggrad_k",
    "bbk",
    "bbk_screen_factor",
    "x_tilde",
    "chi",
    "psi_as",
    "free_wave",
]

TWO_PI_M32 = (2.0 * math.pi) ** -1.5

_norm_fault = 0.0


@contextmanager
def injected_norm_fault(rel: float):
    """Test hook: scale every N_c by (1 + rel) inside the block."""
    global _norm_fault
    old = _norm_fault
    _norm_fault = rel
    try:
        yield
    finally:
        _norm_fault = old


@dataclass(frozen=True)
class PairWave:
    value: complex
    eta: float
    norm_const: complex
    loggrad_k: np.ndarray | None = None


@dataclass(frozen=True)
class ShiftedCoords:
    """Complex spectator coordinates for screen ``j``.

    ``x_tilde_2``/``x_tilde_3`` belong to the two pairs following j in
    cyclic order (pairs 2 and 3 for the screen of pair 1).
    """

    j: int
    x_tilde_2: np.ndarray
    x_tilde_3: np.ndarray
    x_mag_2: complex
    x_mag_3: complex


def sommerfeld(k: float, alpha: float) -> float:
    """eta = alpha / (2|k|)."""
    return alpha / (2.0 * k)


def norm_const(eta: float) -> complex:
    """N_c = (2 pi)^{-3/2} e^{-pi eta/2} Gamma(1 + i eta)."""
    val = TWO_PI_M32 * math.exp(-0.5 * math.pi * eta) * specfun.gamma_complex(1.0 + 1j * eta)
    return val * (1.0 + _norm_fault)


def _kvec(k) -> tuple[np.ndarray, float]:
    k = np.asarray(k, dtype=float).reshape(3)
    kn = float(np.sqrt(k @ k))
    if kn == 0.0:
        raise DomainError("pair momentum k = 0 (momentum-space screen)")
    return k, kn


def _magnitude(x: np.ndarray):
    """Principal sqrt(<x,x>) without conjugation."""
    if not np.iscomplexobj(x):
        return float(np.sqrt(x @ x))
    xx = complex(x @ x)
    if xx.imag == 0.0 and xx.real <= 0.0:
        raise BranchError(f"<x,x> = {xx} on the branch cut of the square root")
    return cmath.sqrt(xx)


def _distortion_arg(x: np.ndarray, k: np.ndarray, kn: float):
    """(k*x_mag - <x,k>, x_mag), cancellation-free near the forward direction."""
    xm = _magnitude(x)
    xk = x @ k
    lead = kn * xm
    if (complex(xk) * complex(lead).conjugate()).real > 0.0:
        c = np.cross(k, x)
        s = (c @ c) / (lead + xk)
    else:
        s = lead - xk
    return complex(s), xm


def coulomb_D(x, k, alpha: float) -> complex:
    """D(x, k) = Phi(-i eta, 1, i(k x_mag - <x,k>)); x may be complex."""
    x = np.asarray(x)
    k, kn = _kvec(k)
    if alpha == 0.0:
        return 1.0 + 0j
    s, _ = _distortion_arg(x, k, kn)
    return specfun.phi(-1j * sommerfeld(kn, alpha), 1.0, 1j * s)


def free_wave(z: JacobiConfig, q: JacobiMomentum) -> complex:
    """(2 pi)^{-9/2} e^{i<z,q>}: every construction at alpha = 0."""
    return TWO_PI_M32**3 * cmath.exp(1j * q.pairing(z))


def psi_c(x, k, alpha: float, with_loggrad: bool = False) -> PairWave:
    """Two-body Coulomb scattering wave N_c e^{i<x,k>} D(x,k)."""
    x = np.asarray(x, dtype=float).reshape(3)
    k, kn = _kvec(k)
    eta = sommerfeld(kn, alpha)
    nc = norm_const(eta)
    val = nc * cmath.exp(1j * float(x @ k)) * coulomb_D(x, k, alpha)
    g = psi_c_loggrad_k(x, k, alpha) if with_loggrad else None
    return PairWave(val, eta, nc, g)


def _loggrad_analytic(x: np.ndarray, k: np.ndarray, alpha: float) -> np.ndarray:
    k, kn = _kvec(k)
    base = 1j * x.astype(complex)
    if alpha == 0.0:
        return base
    khat = k / kn
    eta = sommerfeld(kn, alpha)
    a = -1j * eta
    s, xm = _distortion_arg(x, k, kn)
    zeta = 1j * s
    f = specfun.phi(a, 1.0, zeta)
    if abs(f) < 1e-12:
        raise DomainError("psi_c vanishes here; its logarithmic gradient is undefined")
    f_z = specfun.kummer_phi_dz(a, 1.0, zeta)
    f_a = specfun.kummer_phi_da(a, 1.0, zeta)
    grad_eta = -(alpha / (2.0 * kn * kn)) * khat
    grad_zeta = 1j * (khat * xm - x)
    grad_lnN = (-0.5 * math.pi + 1j * specfun.digamma_complex(1.0 + 1j * eta)) * grad_eta
    return base + grad_lnN + (f_a * (-1j) * grad_eta + f_z * grad_zeta) / f


def _loggrad_numeric(x: np.ndarray, k: np.ndarray, alpha: float) -> np.ndarray:
    k, kn = _kvec(k)
    h = 1e-3 * kn
    v0 = psi_c(x, k, alpha).value
    if abs(v0) < 1e-12 * abs(norm_const(sommerfeld(kn, alpha))):
        raise DomainError("psi_c vanishes here; its logarithmic gradient is undefined")
    out = np.empty(3, dtype=complex)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        f = [psi_c(x, k + m * e, alpha).value for m in (-2, -1, 1, 2)]
        out[i] = (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h) / v0
    return out


def psi_c_loggrad_k(x, k, alpha: float, method: str = "analytic") -> np.ndarray:
    """grad_k psi_c(x, k) / psi_c(x, k).

    ``analytic`` assembles the gradient from dPhi/dzeta, dPhi/da and
    digamma; ``numeric`` uses five-point differences in k.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    if method == "analytic":
        return _loggrad_analytic(x, np.asarray(k, dtype=float), alpha)
    if method == "numeric":
        return _loggrad_numeric(x, np.asarray(k, dtype=float), alpha)
    raise ValueError(f"unknown method {method!r}")


def _frames(z: JacobiConfig, q: JacobiMomentum):
    return {j: (pair_frame(z, j)[0], momentum_frame(q, j)[0]) for j in PAIRS}


def _n0(q: JacobiMomentum, alpha: float) -> complex:
    out = 1.0 + 0j
    for j in PAIRS:
        kj = momentum_frame(q, j)[0]
        out *= norm_const(sommerfeld(float(np.linalg.norm(kj)), alpha))
    return out


def _carrier(z: JacobiConfig, q: JacobiMomentum, envelope: bool) -> complex:
    return 1.0 + 0j if envelope else cmath.exp(1j * q.pairing(z))


def bbk(z: JacobiConfig, q: JacobiMomentum, alpha: float, envelope: bool = False) -> complex:
    """N_0 e^{i<z,q>} D(x_1,k_1) D(x_2,k_2) D(x_3,k_3)."""
    prod = _n0(q, alpha)
    for xj, kj in _frames(z, q).values():
        prod *= coulomb_D(xj, kj, alpha)
    return prod * _carrier(z, q, envelope)


def bbk_screen_factor(z: JacobiConfig, q: JacobiMomentum, j: int, alpha: float) -> tuple[complex, complex]:
    """Split bbk = psi_c(x_j, k_j) * Psi_1 near the screen of pair j."""
    xj, yj = pair_frame(z, j)
    kj, pj = momentum_frame(q, j)
    pair = psi_c(xj, kj, alpha).value
    psi1 = cmath.exp(1j * float(yj @ pj))
    for m in others(j):
        xm = pair_frame(z, m)[0]
        km = momentum_frame(q, m)[0]
        psi1 *= norm_const(sommerfeld(float(np.linalg.norm(km)), alpha)) * coulomb_D(xm, km, alpha)
    return pair, psi1


def x_tilde(z: JacobiConfig, q: JacobiMomentum, j: int, alpha: float, gradient: str = "common") -> ShiftedCoords:
    """Shifted spectator coordinates for screen j.

    x~ = -+(sqrt3/2) y_j + (i/2) grad_k psi_c(x_j,k)/psi_c(x_j,k).  With
    ``gradient="common"`` both use k = k_j.  ``gradient="channel"`` is the
    alternative reading in which each spectator uses its own momentum k_m
    in place of k_j.
    """
    xj, yj = pair_frame(z, j)
    kj = momentum_frame(q, j)[0]
    m, n = others(j)
    if gradient == "common":
        g = psi_c_loggrad_k(xj, kj, alpha)
        gm = gn = g
    elif gradient == "channel":
        gm = psi_c_loggrad_k(xj, momentum_frame(q, m)[0], alpha)
        gn = psi_c_loggrad_k(xj, momentum_frame(q, n)[0], alpha)
    else:
        raise ValueError(f"unknown gradient mode {gradient!r}")
    xt2 = -SQRT3_2 * yj + 0.5j * gm
    xt3 = SQRT3_2 * yj + 0.5j * gn
    return ShiftedCoords(j, xt2, xt3, _magnitude(xt2), _magnitude(xt3))


def chi(
    z: JacobiConfig,
    q: JacobiMomentum,
    j: int,
    alpha: float,
    envelope: bool = False,
    gradient: str = "common",
) -> complex:
    """N_0 e^{i<z,q>} D(x_j,k_j) D(x~_m,k_m) D(x~_n,k_n) for the screen of pair j."""
    xj = pair_frame(z, j)[0]
    kj = momentum_frame(q, j)[0]
    val = _n0(q, alpha) * coulomb_D(xj, kj, alpha)
    if alpha != 0.0:
        st = x_tilde(z, q, j, alpha, gradient)
        m, n = others(j)
        val *= coulomb_D(st.x_tilde_2, momentum_frame(q, m)[0], alpha)
        val *= coulomb_D(st.x_tilde_3, momentum_frame(q, n)[0], alpha)
    return val * _carrier(z, q, envelope)


def psi_as(
    z: JacobiConfig,
    q: JacobiMomentum,
    alpha: float,
    mu: float = 0.6,
    nu: float = 0.9,
    envelope: bool = False,
    weights: RegionWeights | None = None,
) -> complex:
    """sum_j zeta_0j chi_j + zeta_0 bbk; terms with zero weight are skipped."""
    w = weights if weights is not None else partition_weights(z, mu, nu)
    total = 0j
    for j, wj in zip(PAIRS, w.zeta0j):
        if wj != 0.0:
            total += wj * chi(z, q, j, alpha, envelope=True)
    if w.zeta0 != 0.0:
        total += w.zeta0 * bbk(z, q, alpha, envelope=True)
    return total * _carrier(z, q, envelope)

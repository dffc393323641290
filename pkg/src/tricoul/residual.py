"""
Schroedinger residuals Q[Psi] = (-Delta_z + V - lambda) Psi and their decay.

The numeric residual uses central differences along the six axes of the
pair-1 frame.  ``order=2`` is the 13-point stencil; orders 4, 6 and 8 use
wider stencils on the same axes.  In envelope mode the field is
F = Psi e^{-i<z,q>} and

    Q = e^{i<z,q>} (-Delta F - 2i q.grad F + V F),

which removes the plane-wave carrier from the differenced quantity.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from . import specfun, wavefn
from .errors import FitQualityError, SingularityError
from .kinematics import (
    PAIRS,
    JacobiConfig,
    JacobiMomentum,
    from_pair_frame,
    momentum_frame,
    pair_frame,
)

__all__ = [
    "RaySpec",
    "DecayFit",
    "CQCalibration",
    "potential",
    "step_policy",
    "numeric_residual",
    "twobody_residual",
    "analytic_q_bbk",
    "calibrate_cq",
    "make_field",
    "decay_fit",
    "geometric_t",
    "generic_ray",
    "screen_ray",
    "overlap_ray",
]

SCREEN_EPS = 1e-12

# central-difference weights for offsets 0, 1, ..., m
_D2 = {
    2: (-2.0, 1.0),
    4: (-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0),
    6: (-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0),
    8: (-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0),
}
_D1 = {
    2: (0.0, 1.0 / 2.0),
    4: (0.0, 2.0 / 3.0, -1.0 / 12.0),
    6: (0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0),
    8: (0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0),
}


def potential(z: JacobiConfig, alpha: float, pairs: Sequence[int] = PAIRS) -> float:
    """V(z) = sum_j alpha / |x_j|."""
    total = 0.0
    for j in pairs:
        r = float(np.linalg.norm(pair_frame(z, j)[0]))
        if r < SCREEN_EPS:
            raise SingularityError(f"configuration on the screen of pair {j}")
        total += alpha / r
    return total


def singular_channels(z: JacobiConfig) -> list[int]:
    return [j for j in PAIRS if float(np.linalg.norm(pair_frame(z, j)[0])) < SCREEN_EPS]


def step_policy(z: JacobiConfig, q: JacobiMomentum) -> float:
    """h = min(0.02 * wavelength, 0.01 * min_j |x_j|), rounded down to a power of two."""
    h = 0.02 * 2.0 * math.pi / q.norm
    xmin = min(float(np.linalg.norm(pair_frame(z, j)[0])) for j in PAIRS)
    if xmin > 0.0:
        h = min(h, 0.01 * xmin)
    return 2.0 ** math.floor(math.log2(h))


def numeric_residual(
    field: Callable[[JacobiConfig], complex],
    z: JacobiConfig,
    q: JacobiMomentum,
    alpha: float,
    h: float,
    order: int = 2,
    envelope: bool = False,
    potential_fn: Callable[[JacobiConfig], float] | None = None,
) -> complex:
    """Finite-difference value of (-Delta + V - |q|^2) Psi at z.

    ``field(z)`` returns Psi, or the envelope Psi e^{-i<z,q>} when
    ``envelope`` is set.  ``potential_fn`` replaces V (test hook).
    """
    if h <= 0.0:
        raise ValueError("step must be positive")
    if order not in _D2:
        raise ValueError(f"order must be one of {sorted(_D2)}")
    if h > 0.05 * 2.0 * math.pi / q.norm:
        warnings.warn("finite-difference step does not resolve the wavelength", RuntimeWarning, stacklevel=2)
    c2, c1 = _D2[order], _D1[order]
    zc = z.as_array()
    qv = q.as_array()
    f0 = field(z)
    lap = 6.0 * c2[0] * f0
    qgrad = 0j
    for i in range(6):
        for m in range(1, len(c2)):
            e = np.zeros(6)
            e[i] = m * h
            fp = field(JacobiConfig.from_array(zc + e))
            fm = field(JacobiConfig.from_array(zc - e))
            lap += c2[m] * (fp + fm)
            if envelope:
                qgrad += qv[i] * c1[m] * (fp - fm)
    lap /= h * h
    v = potential_fn(z) if potential_fn is not None else potential(z, alpha)
    if envelope:
        return (-lap - 2j * qgrad / h + v * f0) * cmath.exp(1j * q.pairing(z))
    return -lap + (v - q.energy) * f0


def twobody_residual(x, k, alpha: float, h: float) -> tuple[complex, float]:
    """Seven-point value of (-Delta + alpha/|x| - k^2) psi_c at x.

    Returns the residual and its size relative to the sum of the moduli
    of the three terms, |Delta psi| + |V psi| + k^2 |psi|.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    k = np.asarray(k, dtype=float).reshape(3)
    r = float(np.linalg.norm(x))
    if r < SCREEN_EPS:
        raise SingularityError("two-body residual at the origin")
    f0 = wavefn.psi_c(x, k, alpha).value
    lap = -6.0 * f0
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        lap += wavefn.psi_c(x + e, k, alpha).value + wavefn.psi_c(x - e, k, alpha).value
    lap /= h * h
    kk = float(k @ k)
    res = -lap + (alpha / r - kk) * f0
    return res, abs(res) / (abs(lap) + (abs(alpha) / r + kk) * abs(f0))


def analytic_q_bbk(z: JacobiConfig, q: JacobiMomentum, alpha: float, c_q: float = 1.0, envelope: bool = False) -> complex:
    """Closed-form residual of the product ansatz.

    -k2 k3 <k2^-x2^, k3^-x3^> Phi1 Phi2' Phi3' - (two cyclic terms),
    times N_0 e^{i<z,q>} and the calibration constant ``c_q``.
    """
    f, fd, u, kn = {}, {}, {}, {}
    for j in PAIRS:
        xj = pair_frame(z, j)[0]
        kj = momentum_frame(q, j)[0]
        r = float(np.linalg.norm(xj))
        if r < SCREEN_EPS:
            raise SingularityError(f"configuration on the screen of pair {j}")
        kn[j] = float(np.linalg.norm(kj))
        a = -1j * wavefn.sommerfeld(kn[j], alpha)
        s, _ = wavefn._distortion_arg(xj, kj, kn[j])
        f[j] = specfun.phi(a, 1.0, 1j * s)
        fd[j] = specfun.kummer_phi_dz(a, 1.0, 1j * s)
        u[j] = kj / kn[j] - xj / r
    total = (
        -kn[2] * kn[3] * float(u[2] @ u[3]) * f[1] * fd[2] * fd[3]
        - kn[3] * kn[1] * float(u[1] @ u[3]) * fd[1] * f[2] * fd[3]
        - kn[1] * kn[2] * float(u[2] @ u[1]) * fd[1] * fd[2] * f[3]
    )
    return c_q * total * wavefn._n0(q, alpha) * wavefn._carrier(z, q, envelope)


@dataclass(frozen=True)
class CQCalibration:
    """Least-squares constant relating the closed-form and numeric residuals."""

    c_q: complex
    ratios: tuple[complex, ...]
    max_deviation: float

    @property
    def consistent(self) -> bool:
        return self.max_deviation <= 1e-3


def calibrate_cq(points: Sequence[JacobiConfig], q: JacobiMomentum, alpha: float, order: int = 8) -> CQCalibration:
    """Fit c_Q = sum conj(A) N / sum |A|^2 over the points."""
    field = make_field("bbk", q, alpha, envelope=True)
    num, ana = [], []
    for z in points:
        num.append(numeric_residual(field, z, q, alpha, step_policy(z, q), order=order, envelope=True))
        ana.append(analytic_q_bbk(z, q, alpha))
    num = np.array(num)
    ana = np.array(ana)
    c = complex(np.vdot(ana, num) / np.vdot(ana, ana))
    ratios = num / ana
    dev = float(np.max(np.abs(ratios - c)) / abs(c))
    return CQCalibration(c, tuple(complex(r) for r in ratios), dev)


# ---------------------------------------------------------------------------
# Fields, rays and decay fits
# ---------------------------------------------------------------------------


def _field_value(kind: str, q: JacobiMomentum, alpha: float, mu: float, nu: float, envelope: bool, j: int, z: JacobiConfig) -> complex:
    if kind == "bbk":
        return wavefn.bbk(z, q, alpha, envelope=envelope)
    if kind == "psi_as":
        return wavefn.psi_as(z, q, alpha, mu, nu, envelope=envelope)
    if kind == "chi":
        return wavefn.chi(z, q, j, alpha, envelope=envelope)
    if kind == "plane":
        return 1.0 + 0j if envelope else wavefn.free_wave(z, q)
    raise ValueError(f"unknown field kind {kind!r}")


def make_field(kind: str, q: JacobiMomentum, alpha: float, mu: float = 0.6, nu: float = 0.9, envelope: bool = True, j: int = 1):
    """Picklable single-argument field: one of bbk, psi_as, chi, plane."""
    return partial(_field_value, kind, q, alpha, mu, nu, envelope, j)


def geometric_t(t_min: float = 1e2, t_max: float = 1e4, n: int = 12) -> tuple[float, ...]:
    return tuple(float(t) for t in np.geomspace(t_min, t_max, n))


@dataclass(frozen=True, eq=False)
class RaySpec:
    """Family z(t) = offset + (t^x_power d_x, t d_y) written in the pair-``frame`` frame."""

    direction: np.ndarray
    offset: JacobiConfig
    t_values: tuple[float, ...]
    x_power: float = 1.0
    frame: int = 1

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(6)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ValueError("ray direction must have unit norm")
        t = tuple(float(v) for v in self.t_values)
        if any(b <= a for a, b in zip(t, t[1:])) or min(t) < 10.0:
            raise ValueError("t_values must be strictly increasing and >= 10")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "t_values", t)

    def point(self, t: float) -> JacobiConfig:
        d = self.direction
        ox, oy = pair_frame(self.offset, self.frame) if self.frame != 1 else (self.offset.x, self.offset.y)
        xj = ox + d[:3] * t**self.x_power
        yj = oy + d[3:] * t
        return from_pair_frame(xj, yj, self.frame)

    def points(self) -> list[JacobiConfig]:
        return [self.point(t) for t in self.t_values]

    def scaled(self, c: float) -> "RaySpec":
        """Same family with t -> c t (requires x_power = 1 and zero offset)."""
        return RaySpec(self.direction, self.offset, tuple(c * t for t in self.t_values), self.x_power, self.frame)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def generic_ray(direction, t_values=None, offset: JacobiConfig | None = None) -> RaySpec:
    """Straight ray z = offset + t * direction (direction normalised)."""
    off = offset if offset is not None else JacobiConfig(np.zeros(3), np.zeros(3))
    return RaySpec(_unit(direction), off, t_values or geometric_t())


def screen_ray(j: int, x_fixed, y_dir, t_values=None) -> RaySpec:
    """x_j held at ``x_fixed`` while y_j = t * y_dir."""
    d = np.concatenate([np.zeros(3), _unit(y_dir)])
    off = from_pair_frame(np.asarray(x_fixed, dtype=float), np.zeros(3), j)
    return RaySpec(d, off, t_values or geometric_t(), 1.0, j)


def overlap_ray(j: int, x_dir, y_dir, t_values=None, power: float = 0.75) -> RaySpec:
    """x_j = t^power * x_dir, y_j = t * y_dir: runs through the overlap band.

    The direction is stored as (x_dir, y_dir)/sqrt(2) so x_j = t^power x_dir / sqrt(2).
    """
    d = np.concatenate([_unit(x_dir), _unit(y_dir)]) / math.sqrt(2.0)
    return RaySpec(d, JacobiConfig(np.zeros(3), np.zeros(3)), t_values or geometric_t(), power, j)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    samples: tuple[tuple[float, float], ...]
    floor_limited: bool = False

    @property
    def faster_than_coulomb(self) -> bool:
        return (not self.floor_limited) and self.slope < -1.0


def fit_loglog(samples: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares line through (log t, log r); returns slope, intercept, r^2."""
    t = np.log(np.array([s[0] for s in samples]))
    r = np.log(np.array([s[1] for s in samples]))
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, r, rcond=None)
    pred = A @ np.array([slope, icpt])
    ss_res = float(np.sum((r - pred) ** 2))
    ss_tot = float(np.sum((r - r.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(icpt), min(max(r2, 0.0), 1.0)


def _residual_at(field, q, alpha, order, envelope, h_rule, z):
    h = h_rule(z, q) if h_rule is not None else step_policy(z, q)
    res = numeric_residual(field, z, q, alpha, h, order=order, envelope=envelope)
    ref = abs(field(z))
    return abs(res), ref, h


def _floor(ref: float, h: float, qn: float, order: int) -> float:
    roundoff = 1e-15 * 8.0 / (h * h)
    trunc = (qn * h) ** order * qn * qn
    return 10.0 * (roundoff + trunc) * ref


def evaluate_ray(field, ray: RaySpec, q, alpha, order=8, envelope=True, h_rule=None, workers: int | None = None):
    """(t, |Q|, |field|, h) for every sample of the ray, in order."""
    task = partial(_residual_at, field, q, alpha, order, envelope, h_rule)
    pts = ray.points()
    n = workers if workers is not None else int(os.environ.get("TRICOUL_THREADS", "1") or 1)
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            vals = list(ex.map(task, pts))
    else:
        vals = [task(z) for z in pts]
    return [(t, *v) for t, v in zip(ray.t_values, vals)]


def decay_fit(
    field,
    ray: RaySpec,
    q: JacobiMomentum,
    alpha: float,
    h_rule=None,
    order: int = 8,
    envelope: bool = True,
    strict: bool = True,
    workers: int | None = None,
) -> DecayFit:
    """Slope of log|Q| against log t along the ray.

    Slopes below -1 mean the residual falls off faster than the Coulomb
    potential.  Samples at the discretisation floor mark the fit
    ``floor_limited`` and its slope is NaN.
    """
    if len(ray.t_values) < 8:
        raise ValueError("a decay fit needs at least 8 samples")
    rows = evaluate_ray(field, ray, q, alpha, order, envelope, h_rule, workers)
    samples = tuple((t, r) for t, r, _, _ in rows)
    if all(r <= _floor(ref, h, q.norm, order if not envelope else 99) for _, r, ref, h in rows):
        return DecayFit(math.nan, math.nan, 0.0, samples, True)
    slope, icpt, r2 = fit_loglog(samples)
    fit = DecayFit(slope, icpt, r2, samples)
    if strict and r2 < 0.9:
        raise FitQualityError(f"decay fit r^2 = {r2:.3f} < 0.9", fit)
    return fit

"""
Jacobi frames on the six-dimensional configuration space, screen regions
and the partition of unity that glues the screen approximations together.

A configuration is stored in the pair-1 frame as (x, y).  The other pair
frames are rotations of the (x, y) block by +-120 degrees:

    x_2 = -x/2 - (sqrt3/2) y,   y_2 =  (sqrt3/2) x - y/2
    x_3 = -x/2 + (sqrt3/2) y,   y_3 = -(sqrt3/2) x - y/2

Momenta transform with the same rotation, so <x_j, k_j> + <y_j, p_j> and
|k_j|^2 + |p_j|^2 do not depend on j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "PAIRS",
    "JacobiConfig",
    "JacobiMomentum",
    "RegionWeights",
    "DomainError",
    "pair_frame",
    "momentum_frame",
    "from_pair_frame",
    "others",
    "region_classify",
    "cutoff",
    "partition_weights",
]

PAIRS = (1, 2, 3)
SQRT3_2 = math.sqrt(3.0) / 2.0

# (cos, sin) of the frame rotation angle 2*pi*(j-1)/3
_ROT = {1: (1.0, 0.0), 2: (-0.5, SQRT3_2), 3: (-0.5, -SQRT3_2)}


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    a.setflags(write=False)
    return a


def _check_pair(j: int) -> None:
    if j not in _ROT:
        raise ValueError(f"pair index must be 1, 2 or 3, got {j!r}")


def _rotate(u: np.ndarray, v: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    c, s = _ROT[j]
    return c * u - s * v, s * u + c * v


def others(j: int) -> tuple[int, int]:
    """The two remaining pair labels in cyclic order after j."""
    _check_pair(j)
    return (j % 3 + 1, (j + 1) % 3 + 1)


@dataclass(frozen=True, eq=False)
class JacobiConfig:
    """Point of the configuration space in the pair-1 frame."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _vec3(self.x))
        object.__setattr__(self, "y", _vec3(self.y))

    @classmethod
    def from_array(cls, z) -> "JacobiConfig":
        z = np.asarray(z, dtype=float).reshape(6)
        return cls(z[:3], z[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x @ self.x + self.y @ self.y))

    def frame(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        return pair_frame(self, j)

    def __repr__(self):
        return f"JacobiConfig(x={self.x.tolist()}, y={self.y.tolist()})"


@dataclass(frozen=True, eq=False)
class JacobiMomentum:
    """Point of the dual momentum space in the pair-1 frame."""

    k: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _vec3(self.k))
        object.__setattr__(self, "p", _vec3(self.p))

    @classmethod
    def from_array(cls, q) -> "JacobiMomentum":
        q = np.asarray(q, dtype=float).reshape(6)
        return cls(q[:3], q[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.k, self.p])

    @property
    def energy(self) -> float:
        """lambda = |q|^2."""
        return float(self.k @ self.k + self.p @ self.p)

    @property
    def norm(self) -> float:
        return math.sqrt(self.energy)

    def frame(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        return momentum_frame(self, j)

    def pair_momenta(self) -> tuple[float, float, float]:
        return tuple(float(np.linalg.norm(momentum_frame(self, j)[0])) for j in PAIRS)

    def pairing(self, z: JacobiConfig) -> float:
        """<z, q>."""
        return float(z.x @ self.k + z.y @ self.p)

    def __repr__(self):
        return f"JacobiMomentum(k={self.k.tolist()}, p={self.p.tolist()})"


def pair_frame(z: JacobiConfig, j: int) -> tuple[np.ndarray, np.ndarray]:
    """(x_j, y_j) for pair j."""
    _check_pair(j)
    if j == 1:
        return z.x, z.y
    return _rotate(z.x, z.y, j)


def momentum_frame(q: JacobiMomentum, j: int) -> tuple[np.ndarray, np.ndarray]:
    """(k_j, p_j) for pair j."""
    _check_pair(j)
    if j == 1:
        return q.k, q.p
    return _rotate(q.k, q.p, j)


def from_pair_frame(xj, yj, j: int) -> JacobiConfig:
    """Inverse of :func:`pair_frame`: the configuration whose pair-j frame is (xj, yj)."""
    _check_pair(j)
    xj = np.asarray(xj, dtype=float)
    yj = np.asarray(yj, dtype=float)
    c, s = _ROT[j]
    return JacobiConfig(c * xj + s * yj, -s * xj + c * yj)


# ---------------------------------------------------------------------------
# Regions and partition of unity
# ---------------------------------------------------------------------------

INNER, OVERLAP, OUTER = "inner", "overlap", "outer"
DEFAULT_MU, DEFAULT_NU = 0.6, 0.9


def _check_exponents(mu: float, nu: float) -> None:
    if not (0.5 < mu < nu < 1.0):
        raise ValueError(f"need 1/2 < mu < nu < 1, got mu={mu}, nu={nu}")


def _label(xj: float, yj: float, mu: float, nu: float) -> str:
    if yj <= 1.0:
        raise DomainError(f"y_j = {yj:.6g} <= 1: screen regions undefined")
    if xj < yj**mu:
        return INNER
    if xj > yj**nu:
        return OUTER
    return OVERLAP


def region_classify(z: JacobiConfig, mu: float = DEFAULT_MU, nu: float = DEFAULT_NU, j: int | None = None):
    """Label each channel inner (x_j < y_j^mu), outer (x_j > y_j^nu) or overlap.

    Returns a single label when ``j`` is given, otherwise a tuple for
    j = 1, 2, 3.
    """
    _check_exponents(mu, nu)
    if j is not None:
        xj, yj = pair_frame(z, j)
        return _label(float(np.linalg.norm(xj)), float(np.linalg.norm(yj)), mu, nu)
    return tuple(region_classify(z, mu, nu, jj) for jj in PAIRS)


def cutoff(s: float) -> float:
    """C^2 quintic step: 1 for s <= 0, 0 for s >= 1, 1/2 at s = 1/2."""
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def _channel_weight(xj: float, yj: float, mu: float, nu: float) -> float:
    if yj <= 1.0:
        if xj > 1.0:
            return 0.0
        raise DomainError(f"x_j = {xj:.3g}, y_j = {yj:.3g}: no asymptotic regime for the partition")
    if xj <= 0.0:
        return 1.0
    rho = math.log(xj) / math.log(yj)
    return cutoff((rho - mu) / (nu - mu))


@dataclass(frozen=True)
class RegionWeights:
    """Partition-of-unity values at one configuration."""

    zeta0: float
    zeta0j: tuple[float, float, float]
    mu: float = DEFAULT_MU
    nu: float = DEFAULT_NU
    rho: tuple[float, float, float] = field(default=(math.nan,) * 3)

    def total(self) -> float:
        return self.zeta0 + sum(self.zeta0j)


def partition_weights(z: JacobiConfig, mu: float = DEFAULT_MU, nu: float = DEFAULT_NU) -> RegionWeights:
    """Partition of unity (zeta0, zeta01, zeta02, zeta03) at z.

    Each zeta0j is ``cutoff`` of (rho_j - mu)/(nu - mu) with
    rho_j = ln x_j / ln y_j.  Should the channel weights overlap (only
    possible at small |z|) they are rescaled to sum to one and zeta0 = 0.
    """
    _check_exponents(mu, nu)
    w = []
    rho = []
    for j in PAIRS:
        xj, yj = pair_frame(z, j)
        xn, yn = float(np.linalg.norm(xj)), float(np.linalg.norm(yj))
        w.append(_channel_weight(xn, yn, mu, nu))
        rho.append(math.log(xn) / math.log(yn) if (yn > 1.0 and xn > 0.0) else math.nan)
    s = w[0] + w[1] + w[2]
    if s > 1.0:
        w = [wi / s for wi in w]
        w[2] = 1.0 - w[0] - w[1]
        zeta0 = 0.0
    else:
        zeta0 = 1.0 - s
    return RegionWeights(zeta0, tuple(w), mu, nu, tuple(rho))

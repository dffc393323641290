"""Asymptotic continuum eigenfunctions of three charged particles.

Modules
-------
kinematics   Jacobi frames, screen regions, partition of unity
specfun      complex Gamma, digamma and the Kummer function
wavefn       pair Coulomb wave, BBK product, screen-modified chi, Psi^as
screenasym   screen-region coefficient algebra and two-body weak check
residual     Schroedinger residuals and decay fits along rays
cli          command-line front end
"""

from .errors import BranchError, DomainError, FitQualityError, PoleError, QuadratureError, SingularityError
from .kinematics import JacobiConfig, JacobiMomentum, partition_weights, pair_frame, momentum_frame
from .wavefn import bbk, chi, psi_as, psi_c

__version__ = "0.1.0"

__all__ = [
    "BranchError",
    "DomainError",
    "FitQualityError",
    "PoleError",
    "QuadratureError",
    "SingularityError",
    "JacobiConfig",
    "JacobiMomentum",
    "partition_weights",
    "pair_frame",
    "momentum_frame",
    "bbk",
    "chi",
    "psi_as",
    "psi_c",
]

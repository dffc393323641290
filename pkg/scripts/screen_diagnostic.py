#!/usr/bin/env python3
"""Where the 1/t residual of chi on a screen ray comes from.

Compares |Q[chi]| along x_1 = const, y_1 = t with the residual of the same
construction in which the two spectator Kummer factors keep only their
incoming part (-zeta)^{i eta} / Gamma(1 + i eta).  The first falls like
1/t, the second like 1/t^2: the scattered part of the spectator factors,
entering through their second derivatives, sets the decay rate.
"""

import argparse
import cmath

import numpy as np

from tricoul import residual as R
from tricoul import specfun
from tricoul import wavefn as W
from tricoul.kinematics import JacobiMomentum, momentum_frame, pair_frame

Q = JacobiMomentum.from_array((0.3, -0.5, 0.8, 0.6, 0.4, -0.2))


def incoming_D(x, k, alpha):
    k = np.asarray(k, dtype=float)
    kn = float(np.linalg.norm(k))
    xm = cmath.sqrt(complex(x @ x))
    zeta = 1j * (kn * xm - complex(x @ k))
    eta = W.sommerfeld(kn, alpha)
    return cmath.exp(1j * eta * cmath.log(-zeta)) / specfun.gamma_complex(1 + 1j * eta)


def chi_incoming(q, alpha):
    ks = [momentum_frame(q, j)[0] for j in (1, 2, 3)]
    n0 = np.prod([W.norm_const(W.sommerfeld(float(np.linalg.norm(k)), alpha)) for k in ks])

    def field(z):
        st = W.x_tilde(z, q, 1, alpha)
        val = n0 * W.coulomb_D(pair_frame(z, 1)[0], ks[0], alpha)
        return val * incoming_D(st.x_tilde_2, ks[1], alpha) * incoming_D(st.x_tilde_3, ks[2], alpha)

    return field


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=10)
    args = ap.parse_args(argv)
    ray = R.screen_ray(1, [3.0, 0, 0], [0.2, 1.0, 0.4], R.geometric_t(1e2, 1e5, args.samples))
    full = R.make_field("chi", Q, args.alpha, j=1)
    inc = chi_incoming(Q, args.alpha)
    print("t,abs_q_chi,abs_q_chi_incoming,t_abs_q_chi,t2_abs_q_chi_incoming")
    rows = []
    for t in ray.t_values:
        z = ray.point(t)
        h = R.step_policy(z, Q)
        a = abs(R.numeric_residual(full, z, Q, args.alpha, h, order=8, envelope=True))
        b = abs(R.numeric_residual(inc, z, Q, args.alpha, h, order=8, envelope=True))
        rows.append((t, a, b))
        print(f"{t:.6e},{a:.6e},{b:.6e},{t * a:.6e},{t * t * b:.6e}")
    s_full = R.fit_loglog([(t, a) for t, a, _ in rows])[0]
    s_inc = R.fit_loglog([(t, b) for t, _, b in rows])[0]
    print(f"# slope chi = {s_full:.3f}, slope chi with incoming spectators = {s_inc:.3f}")


if __name__ == "__main__":
    main()

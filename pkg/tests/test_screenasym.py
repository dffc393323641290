import cmath
import math

import numpy as np
import pytest

from conftest import random_momentum
from tricoul import screenasym as S
from tricoul.errors import BranchError, DomainError, QuadratureError
from tricoul.kinematics import JacobiConfig, JacobiMomentum, momentum_frame, others
from tricoul.wavefn import bbk_screen_factor, sommerfeld

SQRT3 = math.sqrt(3.0)
B0_MOD = (2 * math.pi) ** -3


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _perp_to_both(a, b):
    return _unit(np.cross(a, b))


# -- weak asymptotics of Psi_1 -----------------------------------------------


def test_z_values_for_orthogonal_p(q_ref):
    k2 = momentum_frame(q_ref, 2)[0]
    k3 = momentum_frame(q_ref, 3)[0]
    c = S.screen_coeffs(q_ref, [1.0, 0, 0], _perp_to_both(k2, k3), 1, 1.0)
    for v in (c.Z2p, c.Z2m, c.Z3p, c.Z3m):
        assert v == pytest.approx(SQRT3 / 2, abs=1e-15)


def test_z_values_for_aligned_p(q_ref):
    k2 = momentum_frame(q_ref, 2)[0]
    c = S.screen_coeffs(q_ref, [1.0, 0, 0], k2, 1, 1.0)
    assert c.Z2p == pytest.approx(SQRT3, rel=1e-15)
    assert c.Z2m == pytest.approx(0.0, abs=1e-15)


def test_screen_coeffs_definitions(rng, q_ref):
    xh, ph = _unit(rng.normal(size=3)), _unit(rng.normal(size=3))
    c = S.screen_coeffs(q_ref, xh, ph, 2, 0.7)
    m, n = others(2)
    k2, k3 = momentum_frame(q_ref, m)[0], momentum_frame(q_ref, n)[0]
    k2h, k3h = _unit(k2), _unit(k3)
    assert c.V2p == pytest.approx(xh @ (k2h + ph))
    assert c.V3m == pytest.approx(xh @ (k3h + ph))
    eta2 = sommerfeld(np.linalg.norm(k2), 0.7)
    eta3 = sommerfeld(np.linalg.norm(k3), 0.7)
    assert c.omega == pytest.approx(eta2 + eta3, rel=1e-15)
    ref = -B0_MOD * cmath.exp(1j * (eta2 * math.log(np.linalg.norm(k2)) + eta3 * math.log(np.linalg.norm(k3))))
    assert abs(c.B0 - ref) < 1e-15


def test_screen_coeffs_zero_momentum():
    q = JacobiMomentum([0.0, 0, 0], [0.0, 0, 0])
    with pytest.raises(DomainError):
        S.screen_coeffs(q, [1.0, 0, 0], [0, 1.0, 0], 1, 1.0)


def test_psi1_free_amplitudes():
    q = JacobiMomentum([0.3, -0.5, 0.8], [0.6, 0.4, -0.2])
    z = JacobiConfig([0.5, 0.1, 0.2], [30.0, -10.0, 7.0])
    y, p = np.linalg.norm(z.y), np.linalg.norm(q.p)
    ain, aout = S.psi1_weak_amplitudes(z, q, 1, 0.0)
    base = B0_MOD * 2 * math.pi / (1j * y * p)
    assert abs(ain - (-base * cmath.exp(-1j * y * p))) < 1e-15
    assert abs(aout - base * cmath.exp(1j * y * p)) < 1e-15


def test_psi1_amplitude_moduli_agree(rng):
    done = 0
    while done < 50:
        q = random_momentum(rng)
        z = JacobiConfig(rng.normal(size=3), rng.normal(size=3) * 100)
        try:
            ain, aout = S.psi1_weak_amplitudes(z, q, int(rng.integers(1, 4)), 1.0)
        except BranchError:
            # p_hat nearly along a spectator momentum: outside the expansion
            continue
        assert abs(ain) == pytest.approx(abs(aout), rel=1e-13)
        done += 1


def test_psi1_log_domain_error(q_ref):
    k2h = _unit(momentum_frame(q_ref, 2)[0])
    ph = _unit(q_ref.p)
    xh = -_unit(k2h - ph)
    z = JacobiConfig(1e4 * xh, 1.0 * ph)
    with pytest.raises(BranchError):
        S.psi1_weak_amplitudes(z, q_ref, 1, 1.0)


def _cap_integral(q, x, Y, alpha, tc=0.5, n_phi=24):
    """Integral of Psi_1(y_hat Y) against a bump of angular radius tc about -p_hat.

    The bump equals 1 at its centre, so the stationary-phase limit is the
    incoming delta amplitude.
    """
    c = -_unit(q.p)
    t = np.array([1.0, 0, 0])
    e1 = _unit(t - (t @ c) * c)
    e2 = np.cross(c, e1)
    n = int(Y * np.linalg.norm(q.p) * tc * tc / 2) + 80
    nd, w = np.polynomial.legendre.leggauss(n)
    th, w = 0.5 * tc * (nd + 1), 0.5 * tc * w
    phis = 2 * math.pi * np.arange(n_phi) / n_phi
    tot = 0j
    for thi, wi in zip(th, w):
        s = thi / tc
        bump = math.exp(1 - 1 / (1 - s * s))
        acc = 0j
        for f in phis:
            yh = math.cos(thi) * c + math.sin(thi) * (math.cos(f) * e1 + math.sin(f) * e2)
            acc += bbk_screen_factor(JacobiConfig(x, Y * yh), q, 1, alpha)[1]
        tot += wi * math.sin(thi) * bump * acc * 2 * math.pi / n_phi
    return tot


@pytest.mark.slow
def test_psi1_incoming_amplitude_against_cap_quadrature(q_ref):
    x = np.array([1.0, 0.5, -0.3])
    ph = _unit(q_ref.p)
    errs = []
    for Y in (1e3, 1e4):
        ain, _ = S.psi1_weak_amplitudes(JacobiConfig(x, -Y * ph), q_ref, 1, 1.0)
        errs.append(abs(_cap_integral(q_ref, x, Y, 1.0) / ain - 1))
    assert errs[1] < 2e-3
    assert errs[1] < errs[0] / 5


# -- R-kernel coefficients ---------------------------------------------------


def test_coefficient_algebra(rng):
    for _ in range(200):
        q = random_momentum(rng)
        j = int(rng.integers(1, 4))
        alpha = rng.uniform(0.1, 3)
        r = S.rkernel_coeffs(q, j, alpha)
        c = S.screen_coeffs(q, _unit(rng.normal(size=3)), momentum_frame(q, j)[1], j, alpha)
        assert abs(r.a + r.b - 2 * c.omega) <= 1e-12 * 2 * c.omega
        assert c.Z2p + c.Z2m == pytest.approx(SQRT3, rel=1e-12)
        assert c.Z3p + c.Z3m == pytest.approx(SQRT3, rel=1e-12)
        for b0 in (c.B0, r.B0_in, r.B0_out):
            assert abs(b0) == pytest.approx(B0_MOD, rel=1e-12)


def test_b0_in_orthogonal_case(q_ref):
    k2, k3 = momentum_frame(q_ref, 2)[0], momentum_frame(q_ref, 3)[0]
    p = _perp_to_both(k2, k3)
    r = S.rkernel_from_vectors(q_ref.k, p, k2, k3, 1.0)
    n2, n3 = np.linalg.norm(k2), np.linalg.norm(k3)
    e2, e3 = 0.5 / n2, 0.5 / n3
    ref = B0_MOD * cmath.exp(1j * ((e2 + e3) * math.log(SQRT3 / 2) + e2 * math.log(n2) + e3 * math.log(n3)))
    assert abs(r.B0_in - ref) < 1e-15
    assert abs(r.B0_in) == pytest.approx(B0_MOD, rel=1e-14)


def test_swap_symmetry(rng):
    for _ in range(200):
        k, p, k2, k3 = (rng.normal(size=3) for _ in range(4))
        alpha = rng.uniform(0.1, 3)
        r1 = S.rkernel_from_vectors(k, p, k2, k3, alpha)
        r2 = S.rkernel_from_vectors(k, -p, k2, k3, alpha)
        assert np.allclose(r1.Omega_in, r2.Omega_out, rtol=1e-12, atol=0)
        assert np.allclose(r1.Omega_out, r2.Omega_in, rtol=1e-12, atol=0)
        assert abs(r1.B0_in - r2.B0_out) <= 1e-12 * B0_MOD
        assert abs(r1.B0_out - r2.B0_in) <= 1e-12 * B0_MOD


def test_screen_swap_symmetry(rng, q_ref):
    xh, ph = _unit(rng.normal(size=3)), _unit(rng.normal(size=3))
    a = S.screen_coeffs(q_ref, xh, ph, 1, 1.0)
    b = S.screen_coeffs(q_ref, xh, -ph, 1, 1.0)
    assert a.branch(1) == pytest.approx(b.branch(-1), rel=1e-12)
    assert a.branch(-1) == pytest.approx(b.branch(1), rel=1e-12)


def test_a_and_b_definitions(q_ref):
    r = S.rkernel_coeffs(q_ref, 1, 1.0)
    c = S.screen_coeffs(q_ref, [1.0, 0, 0], q_ref.p, 1, 1.0)
    shift = 2.0 / (SQRT3 * np.linalg.norm(q_ref.p))
    assert r.a == pytest.approx(c.omega - shift) and r.b == pytest.approx(c.omega + shift)


def test_resonant_coupling_rejected():
    # a = 0 when omega equals 2 alpha/(sqrt3 p)
    k2, k3 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    p = np.array([0.0, 0.0, 2.0 / SQRT3])
    with pytest.raises(DomainError):
        S.rkernel_from_vectors([0.2, 0.3, 0.1], p, k2, k3, 1.0)


def test_b_in_is_orthogonal_to_k(rng):
    # for physical q (all vectors from one momentum) the unprojected B_in is
    # orthogonal to k_hat, while B_out carries <B_out, k_hat> = 2p/k^2
    for _ in range(100):
        q = random_momentum(rng)
        j = int(rng.integers(1, 4))
        r = S.rkernel_coeffs(q, j, 1.0)
        k, p = (np.linalg.norm(v) for v in momentum_frame(q, j))
        bi, bo = S.b_orthogonality(r)
        assert abs(bi) <= 1e-11 * np.linalg.norm(r.B_in)
        assert bo == pytest.approx(2 * p / k**2, rel=1e-10)


def test_projected_variant(rng):
    q = random_momentum(rng)
    r = S.rkernel_coeffs(q, 1, 1.0, projected=True)
    bi, bo = S.b_orthogonality(r)
    assert abs(bi) < 1e-15 and abs(bo) < 1e-15 and r.projected


def test_omega_small_angle_limit():
    k2 = np.array([0.0, 0.0, 1.3])
    k3 = np.array([0.8, -0.4, 0.5])
    eta2 = 0.5 / 1.3
    e = np.array([1.0, 0.0, 0.0])
    prev = None
    for th in (1e-2, 1e-3, 1e-4):
        p = math.cos(th) * _unit(k2) + math.sin(th) * e
        r = S.rkernel_from_vectors([0.1, 0.7, 0.2], p, k2, k3, 1.0)
        c = float(_unit(p) @ _unit(k2))
        lim = math.sqrt(2) * eta2 / SQRT3
        err = abs(np.linalg.norm(r.Omega_in) * math.sqrt(1 - c) - lim)
        assert err < 2 * th
        # direction tends to that of k2_hat - p_hat, i.e. -e
        assert _unit(r.Omega_in) @ -e == pytest.approx(1.0, abs=4 * th)
        if prev is not None:
            assert err < prev
        prev = err


def test_parallel_spectator_rejected():
    k2 = np.array([0.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        S.rkernel_from_vectors([1.0, 0, 0], k2, k2, [1.0, 1.0, 0], 1.0)


# -- two-body weak asymptotics -----------------------------------------------


def test_coulomb_amplitude_modulus():
    th = 2.0
    f = S.coulomb_amplitude(math.cos(th), 1.5, 1.0)
    eta = 1.0 / 3.0
    assert abs(f) == pytest.approx(eta / (2 * 1.5 * math.sin(th / 2) ** 2), rel=1e-14)


def test_free_full_sphere_average():
    k = np.array([0.0, 0.6, 0.8]) * 1.1
    X = 50.0
    rec = S.twobody_weak_check(k, 0.0, [X], lambda u: 1.0, window=None)
    kx = 1.1 * X
    ref = 4 * math.pi * math.sin(kx) / kx * (2 * math.pi) ** -1.5
    assert abs(rec.integral[0] - ref) < 1e-12 * abs(ref)
    assert rec.mismatch[0] < 1e-10


def test_free_window_requires_alpha_zero():
    with pytest.raises(DomainError):
        S.twobody_weak_check([0, 0, 1.0], 1.0, [50.0], lambda u: 1.0, window=None)
    with pytest.raises(ValueError):
        S.twobody_weak_check([0, 0, 1.0], 1.0, [50.0], lambda u: 1.0, window=(0.5, 0.2))


def _bump_about(axis, width):
    axis = _unit(axis)

    def g(u):
        s = (1.0 - float(u @ axis)) / width
        return math.exp(1.0 - 1.0 / (1.0 - s * s)) if s < 1.0 else 0.0

    return g


def test_support_away_from_poles():
    # support where |x_hat . k_hat| < 0.5: nothing to extract
    k = np.array([0.0, 0.0, 1.0])
    rec = S.twobody_weak_check(k, 1.0, [200.0, 800.0], _bump_about([1.0, 0, 0], 0.4))
    assert rec.converged
    assert abs(rec.extracted[1]) < abs(rec.extracted[0])
    assert abs(rec.extracted[1]) < 1e-6


def test_quadrature_failure_reported():
    k = np.array([0.0, 0.0, 1.0])
    with pytest.raises(QuadratureError):
        S.twobody_weak_check(k, 1.0, [200.0], lambda u: 1.0, qtol=1e-30)
    rec = S.twobody_weak_check(k, 1.0, [200.0], lambda u: 1.0, qtol=1e-30, strict=False)
    assert not rec.converged

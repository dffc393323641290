import cmath
import math

import numpy as np
import pytest

from conftest import random_config
from tricoul import residual as R
from tricoul import wavefn as W
from tricoul.errors import FitQualityError, SingularityError
from tricoul.kinematics import JacobiConfig, JacobiMomentum, from_pair_frame, momentum_frame, pair_frame, region_classify


def test_potential_example():
    z = JacobiConfig([1.0, 0, 0], [0, 2.0, 0])
    ref = sum(1.0 / np.linalg.norm(pair_frame(z, j)[0]) for j in (1, 2, 3))
    assert R.potential(z, 1.0) == pytest.approx(ref, rel=1e-15)


def test_potential_homogeneity(rng):
    z = random_config(rng)
    z2 = JacobiConfig.from_array(2 * z.as_array())
    assert R.potential(z2, 1.3) == pytest.approx(R.potential(z, 1.3) / 2, rel=1e-14)
    assert R.potential(z, 0.0) == 0.0


def test_potential_on_screen():
    z = from_pair_frame(np.zeros(3), np.array([1.0, 2.0, 3.0]), 2)
    with pytest.raises(SingularityError):
        R.potential(z, 1.0)
    assert R.singular_channels(z) == [2]


def test_step_policy(q_ref):
    z = JacobiConfig([100.0, 0, 0], [0, 100.0, 0])
    h = R.step_policy(z, q_ref)
    assert h <= 0.02 * 2 * math.pi / q_ref.norm
    assert math.log2(h) == int(math.log2(h))
    near = from_pair_frame(np.array([0.5, 0, 0]), np.array([0, 100.0, 0]), 1)
    assert R.step_policy(near, q_ref) <= 0.005


def test_numeric_residual_argument_checks(q_ref):
    z = JacobiConfig([5.0, 1, 0], [0, 5.0, 1])
    f = R.make_field("plane", q_ref, 0.0, envelope=False)
    with pytest.raises(ValueError):
        R.numeric_residual(f, z, q_ref, 0.0, 0.0)
    with pytest.raises(ValueError):
        R.numeric_residual(f, z, q_ref, 0.0, 0.01, order=3)
    with pytest.warns(RuntimeWarning):
        R.numeric_residual(f, z, q_ref, 0.0, 1.0)


def test_plane_wave_at_floor(rng, q_ref):
    f = R.make_field("plane", q_ref, 0.0, envelope=False)
    h = 0.02
    for _ in range(5):
        z = random_config(rng, 20)
        res = R.numeric_residual(f, z, q_ref, 0.0, h)
        assert abs(res) <= 10 * h * h * q_ref.norm**4 * abs(f(z))


def _embedded_pair(q, alpha):
    k, p = q.k, q.p

    def field(z):
        return W.psi_c(z.x, k, alpha).value * cmath.exp(1j * float(z.y @ p))

    return field


def test_second_order_convergence_on_exact_solution(q_ref):
    # psi_c(x, k) e^{i<y,p>} solves the equation with V = alpha/|x| only
    f = _embedded_pair(q_ref, 1.0)
    z = JacobiConfig([1.3, 0.4, -0.7], [0.5, 2.0, 1.0])

    def v1(zz):
        return 1.0 / float(np.linalg.norm(zz.x))

    r1 = R.numeric_residual(f, z, q_ref, 1.0, 0.04, potential_fn=v1)
    r2 = R.numeric_residual(f, z, q_ref, 1.0, 0.02, potential_fn=v1)
    assert abs(r1) / abs(r2) == pytest.approx(4.0, rel=0.05)


def test_envelope_matches_direct_residual(q_ref):
    z = JacobiConfig([30.0, -12.0, 8.0], [20.0, 15.0, -25.0])
    direct = R.numeric_residual(R.make_field("bbk", q_ref, 1.0, envelope=False), z, q_ref, 1.0, 0.01, order=8)
    env = R.numeric_residual(R.make_field("bbk", q_ref, 1.0, envelope=True), z, q_ref, 1.0, 0.01, order=8, envelope=True)
    assert abs(direct - env) <= 1e-6 * abs(env)


def test_analytic_q_free_is_zero(rng, q_ref):
    assert R.analytic_q_bbk(random_config(rng, 10), q_ref, 0.0) == 0


def test_analytic_q_single_forward_channel(q_ref):
    # x_2 along k_2: only the term without (k2^ - x2^) survives
    k2 = momentum_frame(q_ref, 2)[0]
    z = from_pair_frame(40.0 * k2 / np.linalg.norm(k2), np.array([10.0, -30.0, 20.0]), 2)
    parts = {}
    for j in (1, 2, 3):
        xj, kj = pair_frame(z, j)[0], momentum_frame(q_ref, j)[0]
        kn = float(np.linalg.norm(kj))
        a = -1j * W.sommerfeld(kn, 1.0)
        s, _ = W._distortion_arg(xj, kj, kn)
        parts[j] = (W.specfun.phi(a, 1, 1j * s), W.specfun.kummer_phi_dz(a, 1, 1j * s), kj / kn - xj / np.linalg.norm(xj), kn)
    (f1, d1, u1, k1), (f2, _, _, _), (_, d3, u3, k3) = parts[1], parts[2], parts[3]
    middle = -k3 * k1 * float(u1 @ u3) * d1 * f2 * d3 * W._n0(q_ref, 1.0) * cmath.exp(1j * q_ref.pairing(z))
    assert abs(R.analytic_q_bbk(z, q_ref, 1.0) - middle) <= 1e-12 * abs(middle)


@pytest.mark.slow
def test_calibration_small_sample(rng, q_ref):
    pts = []
    while len(pts) < 8:
        z = random_config(rng, 60)
        if all(np.linalg.norm(pair_frame(z, j)[0]) > 20 for j in (1, 2, 3)):
            pts.append(z)
    cal = R.calibrate_cq(pts, q_ref, 1.0)
    assert cal.consistent
    assert abs(cal.c_q - 1) < 1e-3
    assert cal.max_deviation < 1e-4


def test_ray_validation():
    with pytest.raises(ValueError):
        R.RaySpec(np.ones(6), JacobiConfig(np.zeros(3), np.zeros(3)), R.geometric_t())
    d = np.eye(6)[0]
    with pytest.raises(ValueError):
        R.RaySpec(d, JacobiConfig(np.zeros(3), np.zeros(3)), (5.0, 20.0))
    with pytest.raises(ValueError):
        R.RaySpec(d, JacobiConfig(np.zeros(3), np.zeros(3)), (200.0, 100.0))


def test_screen_ray_keeps_x_fixed():
    ray = R.screen_ray(2, [3.0, 0, 0], [0.2, 0.5, 0.8])
    for t in (1e2, 1e3):
        xj, yj = pair_frame(ray.point(t), 2)
        assert np.allclose(xj, [3.0, 0, 0])
        assert np.linalg.norm(yj) == pytest.approx(t)


def test_overlap_ray_crosses_overlap_band():
    ray = R.overlap_ray(1, [1.0, 0, 0], [0, 1.0, 0], t_values=R.geometric_t(1e2, 1e6, 9))
    labels = [region_classify(z, j=1) for z in ray.points()]
    assert "overlap" in labels


def test_fit_loglog_exact_power():
    samples = [(t, 3.0 * t**-1.7) for t in R.geometric_t()]
    s, c, r2 = R.fit_loglog(samples)
    assert s == pytest.approx(-1.7, abs=1e-12) and r2 == pytest.approx(1.0)


def test_plane_wave_fit_is_floor_limited(q_ref):
    ray = R.generic_ray(np.arange(1, 7, dtype=float))
    fit = R.decay_fit(R.make_field("plane", q_ref, 0.0), ray, q_ref, 0.0)
    assert fit.floor_limited and math.isnan(fit.slope) and not fit.faster_than_coulomb


def test_fit_invariant_under_relabeling(q_ref):
    # same points, parameter t -> c t: only log-differences enter the slope
    ray = R.generic_ray([0.4, -0.3, 0.5, 0.2, 0.6, -0.3])
    fit = R.decay_fit(R.make_field("bbk", q_ref, 1.0), ray, q_ref, 1.0, strict=False)
    s, _, r2 = R.fit_loglog([(1.7 * t, r) for t, r in fit.samples])
    assert s == pytest.approx(fit.slope, abs=1e-12) and r2 == pytest.approx(fit.r_squared, abs=1e-12)


def test_fit_invariant_under_rescaling(q_ref):
    # unscreened plane wave: Q = V Psi, a clean power law on any window
    ray = R.generic_ray([0.4, -0.3, 0.5, 0.2, 0.6, -0.3])
    f = R.make_field("plane", q_ref, 1.0)
    a = R.decay_fit(f, ray, q_ref, 1.0)
    b = R.decay_fit(f, ray.scaled(1.3), q_ref, 1.0)
    assert a.slope == pytest.approx(-1.0, abs=0.02)
    assert abs(a.slope - b.slope) <= 0.02


def _wobbly(z):
    return 1.0 + 0.9 * math.cos(0.05 * float(np.linalg.norm(z.as_array())) ** 1.5)


def test_poor_fit_raises(q_ref):
    ray = R.generic_ray(np.arange(1, 7, dtype=float))
    with pytest.raises(FitQualityError) as info:
        R.decay_fit(_wobbly, ray, q_ref, 0.0, h_rule=lambda z, q: 0.25)
    assert info.value.fit.r_squared < 0.9


def test_fit_needs_eight_samples(q_ref):
    ray = R.generic_ray(np.arange(1, 7, dtype=float), t_values=R.geometric_t(n=5))
    with pytest.raises(ValueError):
        R.decay_fit(R.make_field("plane", q_ref, 0.0), ray, q_ref, 0.0)

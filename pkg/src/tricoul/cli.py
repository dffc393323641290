"""
Command-line front end.

    tricoul eval     --z x1,x2,x3,y1,y2,y3 [options]
    tricoul rayscan  --ray-dir ... [--ray-offset ...] [options]
    tricoul selftest [--inject-norm-fault REL]

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys are the long option names without the dashes, ``#`` starts a
comment).  Flags given on the command line win.  Exit status: 0 success,
1 invariant failure, 2 input or domain error.
"""

from __future__ import annotations

import argparse
import cmath
import io
import math
import sys
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import residual, specfun, wavefn
from .errors import FitQualityError, QuadratureError
from .kinematics import PAIRS, JacobiConfig, JacobiMomentum, partition_weights

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2
FMT = "%.16e"
DEFAULT_Q = (0.3, -0.5, 0.8, 0.6, 0.4, -0.2)
SMALL_K_FRACTION = 0.1


class InputError(ValueError):
    """Bad command-line or config input."""


@dataclass
class RunConfig:
    """Validated run parameters."""

    alpha: float = 1.0
    q: tuple[float, ...] = DEFAULT_Q
    mu: float = 0.6
    nu: float = 0.9
    t_min: float = 1e2
    t_max: float = 1e4
    t_samples: int = 12
    ray_dir: tuple[float, ...] | None = None
    ray_offset: tuple[float, ...] = (0.0,) * 6
    order: int = 8
    step: float | None = None
    out: str | None = None
    allow_small_k: bool = False

    @property
    def momentum(self) -> JacobiMomentum:
        return JacobiMomentum.from_array(self.q)

    def validate(self) -> "RunConfig":
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise InputError(f"alpha must be a finite number >= 0, got {self.alpha}")
        if len(self.q) != 6:
            raise InputError("q needs six components kx,ky,kz,px,py,pz")
        if not 0.5 < self.mu < self.nu < 1.0:
            raise InputError(f"need 1/2 < mu < nu < 1, got mu={self.mu}, nu={self.nu}")
        if not 10.0 <= self.t_min < self.t_max:
            raise InputError("need 10 <= t-min < t-max")
        if self.t_samples < 8:
            raise InputError("t-samples must be at least 8")
        if self.order not in (2, 4, 6, 8):
            raise InputError("order must be 2, 4, 6 or 8")
        q = self.momentum
        if q.norm == 0.0:
            raise InputError("q = 0")
        kmin = min(q.pair_momenta())
        if kmin < SMALL_K_FRACTION * q.norm and not self.allow_small_k:
            raise InputError(
                f"min_j k_j = {kmin:.3g} < {SMALL_K_FRACTION} |q|; pass --allow-small-k to proceed"
            )
        return self


# ---------------------------------------------------------------------------
# Argument and config parsing
# ---------------------------------------------------------------------------


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError as exc:
        raise InputError(f"cannot parse number list {text!r}") from exc
    if n is not None and len(vals) != n:
        raise InputError(f"expected {n} comma-separated numbers, got {len(vals)} in {text!r}")
    return vals


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = val
    return out


_KEYS = {
    "alpha": ("alpha", float),
    "q": ("q", lambda s: _floats(s, 6)),
    "mu": ("mu", float),
    "nu": ("nu", float),
    "t-min": ("t_min", float),
    "t-max": ("t_max", float),
    "t-samples": ("t_samples", int),
    "ray-dir": ("ray_dir", lambda s: _floats(s, 6)),
    "ray-offset": ("ray_offset", lambda s: _floats(s, 6)),
    "order": ("order", int),
    "step": ("step", float),
    "out": ("out", str),
    "allow-small-k": ("allow_small_k", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; command-line flags win")
    p.add_argument("--alpha", help="pair coupling (default 1)")
    p.add_argument("--q", help="kx,ky,kz,px,py,pz in the pair-1 frame")
    p.add_argument("--mu", help="inner exponent of the partition (default 0.6)")
    p.add_argument("--nu", help="outer exponent of the partition (default 0.9)")
    p.add_argument("--order", help="finite-difference order 2, 4, 6 or 8 (default 8)")
    p.add_argument("--step", help="fixed finite-difference step (default: adaptive)")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("--allow-small-k", action="store_const", const="true", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tricoul", description="Three-body Coulomb asymptotic eigenfunctions.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    pe = sub.add_parser("eval", help="evaluate all constructions at one configuration")
    _common(pe)
    pe.add_argument("--z", required=True, help="x1,x2,x3,y1,y2,y3 in the pair-1 frame")
    pr = sub.add_parser("rayscan", help="residual decay along a ray")
    _common(pr)
    pr.add_argument("--ray-dir", help="six direction components (normalised internally)")
    pr.add_argument("--ray-offset", help="six offset components (default 0)")
    pr.add_argument("--t-min")
    pr.add_argument("--t-max")
    pr.add_argument("--t-samples")
    ps = sub.add_parser("selftest", help="special-function and wavefunction invariant suites")
    ps.add_argument("--inject-norm-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    return ap


def make_config(ns: argparse.Namespace) -> RunConfig:
    merged = read_config(ns.config) if getattr(ns, "config", None) else {}
    for key in _KEYS:
        val = getattr(ns, key.replace("-", "_"), None)
        if val is not None:
            merged[key] = val
    cfg = RunConfig()
    for key, val in merged.items():
        if key not in _KEYS:
            raise InputError(f"unknown config key {key!r}")
        attr, conv = _KEYS[key]
        try:
            setattr(cfg, attr, conv(val))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad value for {key}: {val!r}") from exc
    return cfg.validate()


# ---------------------------------------------------------------------------
# CSV helpers
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FMT % float(v)


def _row(values: Sequence) -> str:
    return ",".join(_fmt(v) for v in values) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _h(cfg: RunConfig, z: JacobiConfig, q: JacobiMomentum) -> float:
    return cfg.step if cfg.step is not None else residual.step_policy(z, q)


def cmd_eval(cfg: RunConfig, z: JacobiConfig) -> str:
    """One CSV row with every construction, the weights, V and both residuals."""
    q, a = cfg.momentum, cfg.alpha
    w = partition_weights(z, cfg.mu, cfg.nu)
    bbk = wavefn.bbk(z, q, a)
    chis = [wavefn.chi(z, q, j, a) for j in PAIRS]
    pas = wavefn.psi_as(z, q, a, cfg.mu, cfg.nu, weights=w)
    sing = residual.singular_channels(z)
    if sing:
        v = math.inf
        qb = qa = math.nan
    else:
        v = residual.potential(z, a)
        h = _h(cfg, z, q)
        qb = abs(residual.numeric_residual(residual.make_field("bbk", q, a), z, q, a, h, cfg.order, envelope=True))
        fas = residual.make_field("psi_as", q, a, cfg.mu, cfg.nu)
        qa = abs(residual.numeric_residual(fas, z, q, a, h, cfg.order, envelope=True))
    head = ["bbk_re", "bbk_im"]
    vals = [bbk.real, bbk.imag]
    for j, c in zip(PAIRS, chis):
        head += [f"chi{j}_re", f"chi{j}_im"]
        vals += [c.real, c.imag]
    head += ["psi_as_re", "psi_as_im", "abs_psi_as", "zeta0", "zeta01", "zeta02", "zeta03", "V", "singular", "q_bbk", "q_as"]
    vals += [pas.real, pas.imag, abs(pas), w.zeta0, *w.zeta0j, v, "|".join(map(str, sing)) or "-", qb, qa]
    return ",".join(head) + "\n" + _row(vals)


@dataclass
class ScanResult:
    csv: str
    fit_bbk: residual.DecayFit
    fit_as: residual.DecayFit


def _fit(rows) -> residual.DecayFit:
    samples = tuple((t, r) for t, r in rows)
    if any(r <= 0.0 or not math.isfinite(r) for _, r in samples):
        return residual.DecayFit(math.nan, math.nan, 0.0, samples, True)
    return residual.DecayFit(*residual.fit_loglog(samples), samples)


def cmd_rayscan(cfg: RunConfig) -> ScanResult:
    """Residual table along z = offset + t * dir and log-log fits of both residuals."""
    if cfg.ray_dir is None:
        raise InputError("rayscan needs --ray-dir")
    d = np.asarray(cfg.ray_dir, dtype=float)
    if np.linalg.norm(d) == 0.0:
        raise InputError("ray direction is zero")
    q, a = cfg.momentum, cfg.alpha
    ray = residual.generic_ray(d, residual.geometric_t(cfg.t_min, cfg.t_max, cfg.t_samples),
                               JacobiConfig.from_array(cfg.ray_offset))
    h_rule = (lambda z, q: cfg.step) if cfg.step is not None else None
    fb = residual.make_field("bbk", q, a)
    fa = residual.make_field("psi_as", q, a, cfg.mu, cfg.nu)
    rb = residual.evaluate_ray(fb, ray, q, a, cfg.order, True, h_rule)
    ra = residual.evaluate_ray(fa, ray, q, a, cfg.order, True, h_rule)
    buf = io.StringIO()
    buf.write("t,abs_bbk,abs_as,q_bbk_numeric,q_as_numeric,q_bbk_analytic\n")
    for (t, qb, fbv, _), (_, qa, fav, _) in zip(rb, ra):
        qan = abs(residual.analytic_q_bbk(ray.point(t), q, a))
        buf.write(_row([t, fbv, fav, qb, qa, qan]))
    fit_b = _fit([(t, r) for t, r, _, _ in rb])
    fit_a = _fit([(t, r) for t, r, _, _ in ra])
    for name, f in (("bbk", fit_b), ("as", fit_a)):
        buf.write(_row([f"slope_{name}", f.slope]))
        buf.write(_row([f"r2_{name}", f.r_squared]))
    return ScanResult(buf.getvalue(), fit_b, fit_a)


# -- selftest ---------------------------------------------------------------


def _suite_gamma(rng) -> float:
    err = 0.0
    for _ in range(200):
        w = complex(rng.uniform(-6, 6), rng.uniform(-20, 20))
        lhs = specfun.gamma_complex(w) * specfun.gamma_complex(1.0 - w)
        rhs = math.pi / cmath.sin(math.pi * w)
        err = max(err, abs(lhs - rhs) / abs(rhs))
        rec = specfun.gamma_complex(w + 1.0) / (w * specfun.gamma_complex(w))
        err = max(err, abs(rec - 1.0))
    return err


def _suite_kummer(rng) -> float:
    err = 0.0
    for _ in range(100):
        a = -1j * rng.uniform(0.0, 5.0)
        zeta = 1j * 10.0 ** rng.uniform(-1, 3)
        lhs = specfun.phi(a, 1.0, zeta)
        rhs = cmath.exp(zeta) * specfun.phi(1.0 - a, 1.0, -zeta)
        err = max(err, abs(lhs - rhs) / abs(lhs))
    return err


def _suite_pde(rng) -> float:
    err = 0.0
    for _ in range(10):
        x = rng.normal(size=3) * 4.0
        k = rng.normal(size=3)
        k *= rng.uniform(0.3, 1.5) / np.linalg.norm(k)
        _, rel = residual.twobody_residual(x, k, rng.uniform(0.2, 2.0), 1e-3)
        err = max(err, rel)
    return err


def _suite_gamow(rng) -> float:
    err = 0.0
    for eta in (0.1, 0.5, 1.0, 5.0):
        n2 = abs(wavefn.norm_const(eta)) ** 2
        ref = (2.0 * math.pi) ** -3 * 2.0 * math.pi * eta / math.expm1(2.0 * math.pi * eta)
        err = max(err, abs(n2 - ref) / ref)
    return err


def _suite_factor(rng) -> float:
    q = JacobiMomentum.from_array(DEFAULT_Q)
    err = 0.0
    for _ in range(20):
        z = JacobiConfig.from_array(rng.normal(size=6) * 10.0)
        b = wavefn.bbk(z, q, 1.0)
        for j in PAIRS:
            pair, psi1 = wavefn.bbk_screen_factor(z, q, j, 1.0)
            err = max(err, abs(pair * psi1 - b) / abs(b))
    return err


SUITES = (
    ("gamma_identities", _suite_gamma, 1e-12),
    ("kummer_transformation", _suite_kummer, 1e-9),
    ("pair_wave_pde", _suite_pde, 1e-6),
    ("gamow_identity", _suite_gamow, 1e-10),
    ("factorization", _suite_factor, 1e-12),
)


def cmd_selftest(fault: float = 0.0) -> tuple[int, str]:
    rng = np.random.default_rng(20240601)
    lines, first_fail = [], None
    with wavefn.injected_norm_fault(fault):
        for name, fn, tol in SUITES:
            t0 = time.perf_counter()
            err = fn(rng)
            ok = err <= tol
            if not ok and first_fail is None:
                first_fail = name
            lines.append(f"{name:24s} max_rel_err={err:.3e} tol={tol:.0e} {'PASS' if ok else 'FAIL'} "
                         f"({time.perf_counter() - t0:.2f}s)")
    if first_fail:
        lines.append(f"FAILED: {first_fail}")
        return EXIT_INVARIANT, "\n".join(lines) + "\n"
    lines.append("all suites passed")
    return EXIT_OK, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if ns.cmd == "selftest":
            code, report = cmd_selftest(ns.inject_norm_fault)
            sys.stdout.write(report)
            return code
        cfg = make_config(ns)
        if ns.cmd == "eval":
            z = JacobiConfig.from_array(_floats(ns.z, 6))
            _emit(cmd_eval(cfg, z), cfg.out)
            return EXIT_OK
        res = cmd_rayscan(cfg)
        _emit(res.csv, cfg.out)
        if cfg.out is not None:
            for name, f in (("bbk", res.fit_bbk), ("as", res.fit_as)):
                print(f"slope_{name} = {f.slope:.4f}  r2 = {f.r_squared:.4f}")
        return EXIT_OK
    except ValueError as exc:
        print(f"tricoul: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FitQualityError, QuadratureError) as exc:
        print(f"tricoul: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

"""Experiment runners: the sigma pipeline and the two non-convergence demos.

Each runner takes an ExperimentConfig, writes CSV stages plus a summary
JSON into the output directory, and returns the summary as a dict with a
"pass" flag.  Outputs are byte-deterministic for a fixed config.

The two demo families push discrete root measures that converge weak-*
to an equilibrium measure while their potentials stay eps-far from the
equilibrium potential on sets whose capacity does not shrink:

* circle: mu_n = roots of z^n - 1.  The deviation set contains the
  z^n-preimage of the lune {|w| >= 1, |w-1| <= e^{-n eps}}, so its
  capacity is at least (1/4)^(1/n) e^{-eps}.
* segment: mu_n = Chebyshev zeros.  The deviation set contains the
  sublevel lemniscate {|T_n| <= 2^{-n} e^{-n eps}} of capacity exactly
  e^{-eps}/2.

All potential differences are evaluated in log-domain form
(-(1/n) log|1 - z^{-n}| and -(1/n) log|1 + phi^{-2n}|) so n in the
thousands stays in float64 range.
"""

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

import numpy as np

from . import capacity as cap
from . import leja as lj
from . import orthopoly as op
from . import svgplot
from .measures import ks_distance
from .potentials import target_arcsine, target_blend, target_uniform
from .precision import PrecisionContext

EXPERIMENTS = ("prop1", "stahl_circle", "stahl_segment", "leja_only",
               "capacity_only")


class ConfigError(ValueError):
    """Bad or unknown experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    q: float = 0.4
    n_list: Tuple[int, ...] = ()
    eps: float = 0.1
    rho: float = 1.5
    bits: int = 2048
    grid_size: int = 4096
    leja_n: int = 200
    n_max: Optional[int] = None
    cascade: str = "stabilized"
    target: str = "arcsine"
    scan_grid: Tuple[int, int] = (512, 256)
    fekete_n: int = 64
    seed: int = 1
    out_dir: str = "out"
    plot: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; "
                              f"choose from {EXPERIMENTS}")
        if self.eps <= 0:
            raise ConfigError("eps must be positive")
        if self.rho <= 1:
            raise ConfigError("rho must exceed 1")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.experiment == "prop1":
            if not 0 < self.q < 0.5:
                raise ConfigError(f"q must lie in (0, 1/2), got {self.q}")
            if not self.n_list:
                object.__setattr__(self, "n_list", tuple(range(2, 11)))
            nm = self.n_max if self.n_max is not None else max(self.n_list)
            if max(self.n_list) > nm:
                raise ConfigError(
                    f"n_list contains {max(self.n_list)} beyond n_max={nm}")
            object.__setattr__(self, "n_max", nm)
        elif not self.n_list:
            object.__setattr__(self, "n_list", (8, 16, 32, 64))

    @staticmethod
    def from_json(obj, **overrides):
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = dict(obj)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        if "experiment" not in merged:
            raise ConfigError("config needs an 'experiment' key")
        for key in ("n_list", "scan_grid"):
            if key in merged and merged[key] is not None:
                merged[key] = tuple(merged[key])
        return ExperimentConfig(**merged)

    def describe(self):
        d = asdict(self)
        d["n_list"] = list(self.n_list)
        d["scan_grid"] = list(self.scan_grid)
        return d


def target_from_name(name, ctx):
    if name == "arcsine":
        return target_arcsine(ctx)
    if name == "uniform":
        return target_uniform(ctx)
    if name.startswith("blend:"):
        return target_blend(float(name.split(":", 1)[1]), ctx)
    raise ConfigError(f"unknown target {name!r}")


def _write_json(path, obj):
    with open(path, "w", newline="\n") as f:
        f.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
#  bad-set machinery shared by the two demos


@dataclass(frozen=True)
class BadSetSample:
    """Sampled points where the potential deviation is at least eps."""

    n: int
    points: tuple
    inclusion_certificate: int

    @staticmethod
    def collect(n, candidates, deviations, eps, member_flags):
        pts, cert = [], 0
        for z, d, ok in zip(candidates, deviations, member_flags):
            if not ok:
                continue
            if not abs(d) >= eps:          # re-evaluated on store
                raise AssertionError(
                    f"certified point {z} has |deviation| {abs(d)} < {eps}")
            cert += 1
            if len(pts) < 200:
                pts.append(complex(z))
        return BadSetSample(n=n, points=tuple(pts), inclusion_certificate=cert)


def _vdiff_circle(z, n):
    """V^{mu_n}(z) - V^{lambda}(z) for mu_n = roots of unity, |z| >= 1."""
    with np.errstate(divide="ignore"):
        return -np.log(np.abs(1 - z ** (-float(n)))) / n


def _vdiff_segment_w(w, n):
    """Same for Chebyshev-zero measures, in terms of w = phi(z), |w| >= 1."""
    with np.errstate(divide="ignore"):
        return -np.log(np.abs(1 + w ** (-2.0 * n))) / n


def _sample_lune_preimage(n, eps, rng, per_branch=40):
    """Interior points of the z^n-preimage of the lune, all n branches.

    Points are kept strictly inside (radius factor 0.999, |w| >= 1+1e-9)
    so the membership inequalities hold with slack well above rounding.
    """
    s = math.exp(-n * eps)
    psis = 2 * np.pi * (np.arange(per_branch) + rng.random(per_branch)) / per_branch
    rads = s * (0.1 + 0.899 * rng.random(per_branch))
    w = 1 + rads * np.exp(1j * psis)
    w = w[np.abs(w) >= 1 + 1e-9]
    zs = []
    root = np.exp(np.log(w) / n)
    for k in range(n):
        zs.append(root * np.exp(2j * np.pi * k / n))
    return np.concatenate(zs)


def _sample_cheb_ovals(n, eps, theta_count=16, shrink=0.9):
    """Points inside {|T_n| <= 2^{-n} e^{-n eps}} near each Chebyshev zero.

    The defining value 2^n |T_n| = |phi^n + phi^{-n}| is evaluated in the
    stable phi form; each ray from a zero is bisected to the level line
    and the sample sits at `shrink` times that radius.
    """
    level = math.exp(-n * eps)
    roots = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))

    def g(z):
        p = _phi_np(np.atleast_1d(z))
        return np.abs(p ** n + p ** (-float(n)))[0]

    pts = []
    for x0 in roots:
        for th in 2 * np.pi * np.arange(theta_count) / theta_count:
            d = complex(math.cos(th), math.sin(th))
            t = 1e-9
            while g(x0 + t * d) < level and t < 1.0:
                t *= 2
            lo, hi = t / 2, t
            for _ in range(50):
                mid = (lo + hi) / 2
                if g(x0 + mid * d) < level:
                    lo = mid
                else:
                    hi = mid
            pts.append(x0 + shrink * lo * d)
    return np.asarray(pts)


def _phi_np(z):
    from .potentials import phi_np
    return phi_np(z)


def _clustered(lo, hi, count):
    u = (np.arange(count) + 1) / count
    return lo + (hi - lo) * u ** 3


# ---------------------------------------------------------------------------
#  runners


def run_stahl_circle(cfg):
    """Roots-of-unity measures versus the circle equilibrium measure."""
    rng = np.random.default_rng(cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    nr, nt = cfg.scan_grid
    radii = 1 + _clustered(0.0, cfg.rho - 1, nr)
    thetas = 2 * np.pi * np.arange(nt) / nt
    R, T = np.meshgrid(radii, thetas, indexing="ij")
    grid = (R * np.exp(1j * T)).ravel()

    per_n, rows, ok = [], [], True
    for n in cfg.n_list:
        ks = ks_distance(np.arange(n) / n, lambda t: np.clip(t, 0, 1))
        bound = 0.25 ** (1.0 / n) * math.exp(-cfg.eps)

        bad = np.abs(_vdiff_circle(grid, n)) >= cfg.eps
        bad_count = int(np.sum(bad))

        samples = _sample_lune_preimage(n, cfg.eps, rng)
        dev = _vdiff_circle(samples, n)
        member = np.abs(samples) >= 1
        cert = BadSetSample.collect(n, samples, dev, cfg.eps, member)
        certified = cert.inclusion_certificate == len(samples)
        bad_pts = [[z.real, z.imag] for z in cert.points[:50]]

        w_bdry = 1 + math.exp(-n * cfg.eps) * cap.lune_rescaled_boundary(
            math.exp(-n * cfg.eps), 1024)
        z_bdry = np.concatenate([
            np.exp(np.log(w_bdry) / n) * np.exp(2j * np.pi * k / n)
            for k in range(n)])
        in_krho = bool(np.all(np.abs(z_bdry) <= cfg.rho))
        est = cap.greedy_fekete_capacity(cap.point_cloud(z_bdry),
                                         n=cfg.fekete_n)
        per_n.append({
            "n": n, "ks": ks, "ks_expected": 1.0 / n,
            "bound_analytic": bound,
            "cap_estimate": est.value,
            "cap_enclosure": [0.25 ** (1.0 / n) * math.exp(-cfg.eps),
                              math.exp(-cfg.eps)],
            "badset_grid_count": bad_count,
            "badset_points": bad_pts,
            "certified_samples": cert.inclusion_certificate,
            "sample_count": int(len(samples)),
            "preimage_in_K_rho": in_krho,
        })
        rows.append([n, "%.17g" % ks, "%.17g" % bound, "%.17g" % est.value,
                     bad_count, cert.inclusion_certificate, len(samples)])
        ok = ok and certified and in_krho and abs(ks - 1.0 / n) < 1e-12

    bounds = [e["bound_analytic"] for e in per_n]
    non_decay = all(b2 >= b1 for b1, b2 in zip(bounds, bounds[1:])) \
        and min(bounds) >= math.exp(-cfg.eps) * 0.25 ** (1.0 / min(cfg.n_list))
    ok = ok and non_decay

    _write_csv(os.path.join(cfg.out_dir, "stahl_circle.csv"),
               ["n", "ks", "bound_analytic", "cap_estimate",
                "badset_grid_count", "certified", "samples"], rows)
    report = {"experiment": "stahl_circle", "config": cfg.describe(),
              "per_n": per_n, "non_decay": non_decay, "pass": bool(ok)}
    _write_json(os.path.join(cfg.out_dir, "summary.json"), report)
    if cfg.plot:
        emit_plots(report, cfg.out_dir)
    return report


def run_stahl_segment(cfg):
    """Chebyshev-zero measures versus the segment equilibrium measure."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    arcsine_cdf = target_arcsine().cdf
    ns, nt = cfg.scan_grid
    svals = 1 + _clustered(0.0, cfg.rho - 1, ns)
    thetas = 2 * np.pi * np.arange(nt) / nt
    S, T = np.meshgrid(svals, thetas, indexing="ij")
    W = (S * np.exp(1j * T)).ravel()

    bound = math.exp(-cfg.eps) / 2
    per_n, rows, ok = [], [], True
    for n in cfg.n_list:
        roots = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))
        ks = ks_distance(roots, arcsine_cdf)

        bad_count = int(np.sum(np.abs(_vdiff_segment_w(W, n)) >= cfg.eps))

        samples = _sample_cheb_ovals(n, cfg.eps)
        wphi = _phi_np(samples)
        dev = _vdiff_segment_w(wphi, n)
        level = math.exp(-n * cfg.eps)
        inside = np.abs(wphi ** n + wphi ** (-float(n))) <= level
        cert = BadSetSample.collect(n, samples, dev, cfg.eps, inside)
        certified = cert.inclusion_certificate == len(samples)
        in_krho = bool(np.all(np.abs(wphi) <= cfg.rho))
        bad_pts = [[z.real, z.imag] for z in cert.points[:50]]

        bdry = _trace_cheb_lemniscate(n, cfg.eps)
        est = cap.greedy_fekete_capacity(cap.point_cloud(bdry), n=cfg.fekete_n)

        per_n.append({
            "n": n, "ks": ks, "bound_analytic": bound,
            "cap_estimate": est.value,
            "certified_samples": cert.inclusion_certificate,
            "sample_count": int(len(samples)),
            "badset_grid_count": bad_count,
            "badset_points": bad_pts,
            "lemniscate_in_K_rho": in_krho,
        })
        rows.append([n, "%.17g" % ks, "%.17g" % bound, "%.17g" % est.value,
                     bad_count, cert.inclusion_certificate, len(samples)])
        ok = ok and certified and in_krho

    ks_seq = [e["ks"] for e in per_n]
    trend = all(k2 < k1 for k1, k2 in zip(ks_seq, ks_seq[1:]))
    ok = ok and trend

    _write_csv(os.path.join(cfg.out_dir, "stahl_segment.csv"),
               ["n", "ks", "bound_analytic", "cap_estimate",
                "badset_grid_count", "certified", "samples"], rows)
    report = {"experiment": "stahl_segment", "config": cfg.describe(),
              "per_n": per_n, "ks_decreasing": trend, "pass": bool(ok)}
    _write_json(os.path.join(cfg.out_dir, "summary.json"), report)
    if cfg.plot:
        emit_plots(report, cfg.out_dir)
    return report


def _trace_cheb_lemniscate(n, eps, theta_count=64):
    """Boundary of {2^n |T_n| = e^{-n eps}} through the stable phi form."""
    level = math.exp(-n * eps)
    roots = np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))

    def g(z):
        p = _phi_np(np.atleast_1d(z))
        return np.abs(p ** n + p ** (-float(n)))[0]

    pts = []
    for x0 in roots:
        for th in 2 * np.pi * np.arange(theta_count) / theta_count:
            d = complex(math.cos(th), math.sin(th))
            t = 1e-9
            while g(x0 + t * d) < level and t < 4.0:
                t *= 2
            lo, hi = t / 2, t
            for _ in range(60):
                mid = (lo + hi) / 2
                if g(x0 + mid * d) < level:
                    lo = mid
                else:
                    hi = mid
            pts.append(x0 + 0.5 * (lo + hi) * d)
    return np.asarray(pts)


def run_prop1(cfg):
    """Weighted Leja -> sigma -> orthogonal polynomial zeros pipeline."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    ctx = PrecisionContext(cfg.bits)
    target = target_from_name(cfg.target, ctx)
    grid = lj.chebyshev_grid(cfg.grid_size)
    n_pts = max(cfg.leja_n, cfg.n_max)
    seq = lj.generate(n_pts, target=target, grid=grid)
    seq.to_csv(os.path.join(cfg.out_dir, "leja.csv"))

    ks_rows = []
    for m in sorted({cfg.n_max, cfg.leja_n // 2, cfg.leja_n}):
        if 1 <= m <= len(seq):
            sub = lj.LejaSequence(points=seq.points[:m],
                                  target_name=seq.target_name)
            ks_rows.append((m, lj.equidistribution_distance(sub, target)))
    _write_csv(os.path.join(cfg.out_dir, "equidistribution.csv"),
               ["n", "ks"], [(m, "%.17g" % v) for m, v in ks_rows])

    sigma_cfg = op.SigmaBuildConfig(q=cfg.q, n_max=cfg.n_max,
                                    target_name=target.name,
                                    bits=cfg.bits, cascade=cfg.cascade)
    sigma = op.build_sigma(sigma_cfg, seq)
    _write_csv(os.path.join(cfg.out_dir, "sigma.csv"),
               ["n", "x", "eps"],
               [(k + 1, "%.17g" % float(x), ctx.nstr(w))
                for k, (x, w) in enumerate(sigma.atoms)])

    rng = np.random.default_rng(cfg.seed)
    extra = 1.5 + 1.5 * rng.random(2) + 1j * (0.5 + rng.random(2))
    z_samples = [2.0] + [complex(z) for z in extra]

    stab_reports, per_n, ok = [], [], True
    res_rows = op.potential_asymptotics_check(sigma, target, cfg.n_list,
                                              z_samples)
    for n in cfg.n_list:
        rep = op.zero_stability_check(sigma, seq, n, cfg.q)
        stab_reports.append(rep)
        cm = op.counting_measure(rep.zeros, ctx=ctx)
        ks_zeros = op.weak_star_distance(cm, target)
        res_n = {str(z): r for (m, z, r) in res_rows if m == n}
        per_n.append({
            "n": n,
            "ks": ks_zeros,
            "bound_analytic": float(rep.bound),
            "max_zero_deviation": float(rep.max_deviation),
            "margin": float(rep.margin),
            "stability_pass": bool(rep.passed),
            "residuals": res_n,
        })
        ok = ok and rep.passed

    op.stability_to_csv(stab_reports, seq, os.path.join(cfg.out_dir,
                                                        "stability.csv"), ctx)
    op.residuals_to_csv(res_rows, os.path.join(cfg.out_dir, "residuals.csv"))

    report = {"experiment": "prop1", "config": cfg.describe(),
              "ks_leja": {str(m): v for m, v in ks_rows},
              "per_n": per_n, "pass": bool(ok)}
    _write_json(os.path.join(cfg.out_dir, "summary.json"), report)
    if cfg.plot:
        emit_plots(report, cfg.out_dir,
                   points=[(x, 0.0) for x in seq.points],
                   zeros=[(float(r), 0.0) for r in stab_reports[-1].zeros.roots])
    return report


def run_leja_only(cfg):
    """Generate a Leja sequence and report its diagnostics."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    target = None if cfg.target == "none" else target_from_name(
        cfg.target, PrecisionContext(max(cfg.bits, 64)))
    grid = lj.chebyshev_grid(cfg.grid_size)
    seq = lj.generate(cfg.leja_n, target=target, grid=grid)
    seq.to_csv(os.path.join(cfg.out_dir, "leja.csv"))
    zs = [2.0, 2j, -3.0]
    if target is None:
        resid = lj.verify_unweighted_asymptotics(seq, zs)
    else:
        resid = lj.verify_weighted_asymptotics(seq, target, zs)
    ks = None
    if target is not None:
        ks = lj.equidistribution_distance(seq, target)
    report = {"experiment": "leja_only", "config": cfg.describe(),
              "residuals": {str(z): r for z, r in zip(zs, resid)},
              "ks": ks, "separation": seq.separation,
              "pass": bool(all(abs(r) < 0.5 for r in resid))}
    _write_json(os.path.join(cfg.out_dir, "summary.json"), report)
    if cfg.plot:
        emit_plots(report, cfg.out_dir,
                   points=[(x, 0.0) for x in seq.points])
    return report


def run_capacity_only(cfg):
    """Calibration battery for the capacity estimator."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    checks = []
    est = cap.greedy_fekete_capacity(cap.disk(0, 1), n=cfg.fekete_n)
    checks.append(("disk_r1", est.value, 1.0))
    est = cap.greedy_fekete_capacity(cap.segment(-1, 1), n=cfg.fekete_n)
    checks.append(("segment", est.value, 0.5))
    lem = cap.preimage_capacity_check([1, 0, -1], 0.9, n_points=cfg.fekete_n)
    checks.append(("lemniscate_z2_minus_1", lem.estimate, lem.analytic))
    lu = cap.lune_capacity_bounds(20, cfg.eps, n_points=cfg.fekete_n)
    ok = all(abs(v - t) / t < 0.05 for _, v, t in checks) and lu.within_bounds
    report = {"experiment": "capacity_only", "config": cfg.describe(),
              "checks": [{"name": n, "estimate": v, "analytic": t}
                         for n, v, t in checks],
              "lune": lu.to_json(), "pass": bool(ok)}
    _write_json(os.path.join(cfg.out_dir, "summary.json"), report)
    return report


RUNNERS = {
    "prop1": run_prop1,
    "stahl_circle": run_stahl_circle,
    "stahl_segment": run_stahl_segment,
    "leja_only": run_leja_only,
    "capacity_only": run_capacity_only,
}


def run(cfg):
    return RUNNERS[cfg.experiment](cfg)


def emit_plots(report, out_dir, points=None, zeros=None):
    """Deterministic SVG companions for a runner report."""
    if points is not None:
        svgplot.scatter_svg(os.path.join(out_dir, "points.svg"), points,
                            title="generated points", xlim=(-1.05, 1.05),
                            ylim=(-1, 1))
    if zeros is not None:
        svgplot.scatter_svg(os.path.join(out_dir, "zeros.svg"), zeros,
                            title="polynomial zeros", xlim=(-1.05, 1.05),
                            ylim=(-1, 1))
    per_n = report.get("per_n")
    if per_n:
        ns = [e["n"] for e in per_n]
        if "max_zero_deviation" in per_n[0]:
            ys = [max(e["max_zero_deviation"], 1e-300) for e in per_n]
            svgplot.line_chart_svg(os.path.join(out_dir, "deviation.svg"),
                                   ns, ys, title="max zero deviation (log10)",
                                   logy=True)
        if "ks" in per_n[0]:
            svgplot.line_chart_svg(os.path.join(out_dir, "ks.svg"),
                                   ns, [e["ks"] for e in per_n],
                                   title="KS distance")
        if "badset_points" in per_n[0]:
            bad = [p for e in per_n for p in e["badset_points"]]
            svgplot.scatter_svg(os.path.join(out_dir, "badset.svg"), bad,
                                title="sampled potential-deviation points")

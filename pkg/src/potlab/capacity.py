"""Logarithmic capacity estimation by greedy Fekete configurations.

The estimator picks n points greedily from a dense boundary sample
(capacity lives on the outer boundary), improves them with an exchange
pass, and evaluates the n-point transfinite diameter

    d_n = (prod_{i<j} |z_i - z_j|)^(2 / (n (n-1))).

d_n carries a universal finite-n excess: already for the ideal case of n
roots of unity on the unit circle d_n = n^(1/(n-1)) instead of 1.  The
reported value divides that factor out, which makes the disk exact and
lands known answers (segment, ellipses, lemniscates) within a couple of
percent at n = 64; the raw d_n is kept alongside.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


class DegenerateRegion(ValueError):
    """Boundary sample has fewer distinct points than requested."""


class TracingFailure(RuntimeError):
    """Lemniscate boundary could not be resolved along some ray."""


@dataclass(frozen=True)
class RegionDescriptor:
    """Planar compact set with a deterministic boundary sampler."""

    kind: str
    params: dict

    def boundary_sample(self, count=2048):
        return _SAMPLERS[self.kind](self.params, count)

    @staticmethod
    def from_json(obj):
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("region must be an object with a 'kind' key")
        kind = obj["kind"]
        if kind not in _SCHEMAS:
            raise ValueError(f"unknown region kind {kind!r}")
        keys = set(obj) - {"kind"}
        if keys != set(_SCHEMAS[kind]):
            raise ValueError(
                f"region {kind!r} needs keys {sorted(_SCHEMAS[kind])}, "
                f"got {sorted(keys)}")
        return RegionDescriptor(kind=kind, params={k: obj[k] for k in keys})


_SCHEMAS = {
    "disk": ("center", "r"),
    "circle": ("r",),
    "segment": ("a", "b"),
    "lune": ("n", "eps"),
    "ellipse": ("rho",),
    "lemniscate": ("coeffs", "level"),
    "point_cloud": ("points",),
}


def disk(center=0.0, r=1.0):
    return RegionDescriptor("disk", {"center": complex(center), "r": float(r)})


def circle(r=1.0):
    return RegionDescriptor("circle", {"r": float(r)})


def segment(a=-1.0, b=1.0):
    return RegionDescriptor("segment", {"a": float(a), "b": float(b)})


def lune(n, eps):
    return RegionDescriptor("lune", {"n": int(n), "eps": float(eps)})


def ellipse_closure(rho):
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    return RegionDescriptor("ellipse", {"rho": float(rho)})


def lemniscate(coeffs, level):
    return RegionDescriptor("lemniscate",
                            {"coeffs": tuple(map(complex, coeffs)),
                             "level": float(level)})


def point_cloud(points):
    return RegionDescriptor("point_cloud",
                            {"points": tuple(map(complex, points))})


def _sample_disk(p, count):
    t = 2 * np.pi * np.arange(count) / count
    return complex(p["center"]) + p["r"] * np.exp(1j * t)


def _sample_circle(p, count):
    return _sample_disk({"center": 0.0, "r": p["r"]}, count)


def _sample_segment(p, count):
    #  Chebyshev spacing: boundary density of the equilibrium measure
    a, b = p["a"], p["b"]
    j = np.arange(count)
    x = -np.cos(np.pi * j / (count - 1))
    return ((a + b) / 2 + (b - a) / 2 * x).astype(complex)


def lune_rescaled_boundary(s, count=2048):
    """Boundary of {zeta: |zeta| <= 1, |1 + s*zeta| >= 1} (unit-size lune).

    Both arcs are covered: the |zeta| = 1 portion and the image of the
    unit circle |1 + s*zeta| = 1.
    """
    n_outer = (2 * count) // 3
    n_inner = count - n_outer
    tstar = math.acos(max(-1.0, -s / 2))
    t = np.linspace(-tstar, tstar, n_outer)
    outer = np.exp(1j * t)
    phim = 2 * math.asin(min(1.0, s / 2))
    ph = np.linspace(-phim, phim, n_inner)
    inner = (np.exp(1j * ph) - 1) / s
    inner = inner[np.abs(inner) <= 1 + 1e-12]
    return np.concatenate([outer, inner])


def _sample_lune(p, count):
    s = math.exp(-p["n"] * p["eps"])
    return 1 + s * lune_rescaled_boundary(s, count)


def _sample_ellipse(p, count):
    rho = p["rho"]
    t = 2 * np.pi * np.arange(count) / count
    return 0.5 * (rho * np.exp(1j * t) + np.exp(-1j * t) / rho)


def trace_lemniscate_boundary(coeffs, level, angles=512, max_reach=1e6):
    """Points with |P(z)| = level, traced along rays from each root of P.

    Along each ray the first crossing of the level is bracketed by
    doubling and then bisected; the union over roots covers every
    component of the sublevel set.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    roots = np.roots(coeffs)
    pts = []
    for r in roots:
        for th in 2 * np.pi * np.arange(angles) / angles:
            d = complex(math.cos(th), math.sin(th))
            t = 1e-9
            while abs(np.polyval(coeffs, r + t * d)) < level:
                t *= 2
                if t > max_reach:
                    raise TracingFailure(
                        f"no |P| = {level} crossing along ray {th} from {r}")
            lo, hi = t / 2, t
            for _ in range(64):
                mid = (lo + hi) / 2
                if abs(np.polyval(coeffs, r + mid * d)) < level:
                    lo = mid
                else:
                    hi = mid
            pts.append(r + 0.5 * (lo + hi) * d)
    return np.asarray(pts)


def _sample_lemniscate(p, count):
    angles = max(32, count // max(1, len(p["coeffs"]) - 1))
    return trace_lemniscate_boundary(np.asarray(p["coeffs"]), p["level"],
                                     angles=angles)


def _sample_point_cloud(p, count):
    return np.asarray(p["points"], dtype=complex)


_SAMPLERS = {
    "disk": _sample_disk,
    "circle": _sample_circle,
    "segment": _sample_segment,
    "lune": _sample_lune,
    "ellipse": _sample_ellipse,
    "lemniscate": _sample_lemniscate,
    "point_cloud": _sample_point_cloud,
}


@dataclass(frozen=True)
class CapacityEstimate:
    value: float               # bias-corrected d_n
    n_points: int
    method: str = "greedy_fekete"
    uncertainty: float = 0.0
    raw_dn: float = 0.0
    points: Optional[np.ndarray] = None


def _greedy_select(samples, n, exchange_passes=1):
    m = len(samples)
    if len(np.unique(samples)) < n:
        raise DegenerateRegion(f"only {len(np.unique(samples))} distinct "
                               f"boundary points for n={n}")
    centroid = samples.mean()
    sel = [int(np.argmax(np.abs(samples - centroid)))]
    L = np.empty((m, n))
    with np.errstate(divide="ignore"):
        L[:, 0] = np.log(np.abs(samples - samples[sel[0]]))
    logd = L[:, 0].copy()
    for k in range(1, n):
        i = int(np.argmax(logd))
        sel.append(i)
        with np.errstate(divide="ignore"):
            L[:, k] = np.log(np.abs(samples - samples[i]))
        logd += L[:, k]
    greedy_order = list(sel)
    rowsum = L.sum(axis=1)
    for _ in range(exchange_passes):
        for k in range(n):
            zk = samples[sel[k]]
            others = samples[[s for j, s in enumerate(sel) if j != k]]
            val_k = float(np.sum(np.log(np.abs(zk - others))))
            #  -inf - (-inf) at coincident samples: treat as unusable
            with np.errstate(invalid="ignore"):
                cand = rowsum - L[:, k]
            cand[sel] = -np.inf
            cand[np.isnan(cand)] = -np.inf
            i = int(np.argmax(cand))
            if cand[i] > val_k:
                sel[k] = i
                with np.errstate(divide="ignore"):
                    L[:, k] = np.log(np.abs(samples - samples[i]))
                rowsum = L.sum(axis=1)
    return samples[sel], samples[greedy_order]


def _corrected_dn(pts):
    n = len(pts)
    s = 0.0
    for i in range(n):
        s += np.sum(np.log(np.abs(pts[i] - pts[i + 1:])))
    raw = math.exp(2 * s / (n * (n - 1)))
    return raw, raw * n ** (-1.0 / (n - 1))


def greedy_fekete_capacity(region, n=64, sample_count=2048, exchange_passes=1):
    """Capacity estimate of a region from an n-point greedy Fekete set.

    Calibration: disk(r) -> r exactly, segment of length L -> L/4 within
    a few percent at n = 64.  The uncertainty field is the spread against
    the half-size configuration.
    """
    if n < 8:
        raise ValueError("need n >= 8")
    samples = np.asarray(region.boundary_sample(sample_count), dtype=complex)
    pts, greedy_pts = _greedy_select(samples, n, exchange_passes)
    raw, value = _corrected_dn(pts)
    _, half = _corrected_dn(greedy_pts[:max(8, n // 2)])
    return CapacityEstimate(value=value, n_points=n,
                            uncertainty=abs(value - half),
                            raw_dn=raw, points=pts)


@dataclass(frozen=True)
class PreimageReport:
    estimate: float
    analytic: float
    rel_error: float
    n_points: int

    def to_json(self):
        return {"estimate": self.estimate, "analytic": self.analytic,
                "rel_error": self.rel_error, "n_points": self.n_points}


def preimage_capacity_check(coeffs, rho, n_points=64, angles=512,
                            sample_count=2048):
    """Capacity of {z: |P(z)| <= rho^deg} versus the exact value rho.

    P must be monic; the boundary is traced from the roots of P and the
    greedy Fekete estimator is run on the union.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if abs(coeffs[0] - 1) > 1e-12:
        raise ValueError("polynomial must be monic")
    deg = len(coeffs) - 1
    level = float(rho) ** deg
    bdry = trace_lemniscate_boundary(coeffs, level, angles=angles)
    est = greedy_fekete_capacity(point_cloud(bdry), n=n_points,
                                 sample_count=sample_count)
    return PreimageReport(estimate=est.value, analytic=float(rho),
                          rel_error=abs(est.value - rho) / rho,
                          n_points=n_points)


@dataclass(frozen=True)
class LuneReport:
    n: int
    eps: float
    estimate: float
    lower: float               # e^{-n eps} / 4
    upper: float               # e^{-n eps}
    rescaled_estimate: float   # capacity of the unit-size lune
    n_points: int = 64

    @property
    def within_bounds(self):
        return self.lower < self.estimate < self.upper

    def to_json(self):
        return {"n": self.n, "eps": self.eps, "estimate": self.estimate,
                "lower": self.lower, "upper": self.upper,
                "rescaled_estimate": self.rescaled_estimate,
                "within_bounds": self.within_bounds,
                "n_points": self.n_points}


def lune_capacity_bounds(n, eps, n_points=64, sample_count=2048):
    """Numerical capacity of the lune {|w| >= 1, |w-1| <= e^{-n eps}}.

    Capacity is scale equivariant, so the unit-size rescaled lune is
    estimated and multiplied by e^{-n eps}; this avoids feeding
    vanishingly small coordinates to the estimator.  The estimate is
    compared against the strict enclosure (e^{-n eps}/4, e^{-n eps}).
    """
    if n * eps < 1:
        raise ValueError("need n*eps >= 1 for the rescaled computation")
    s = math.exp(-n * eps)
    zeta = lune_rescaled_boundary(s, sample_count)
    est = greedy_fekete_capacity(point_cloud(zeta), n=n_points,
                                 sample_count=sample_count)
    return LuneReport(n=n, eps=eps, estimate=est.value * s,
                      lower=s / 4, upper=s,
                      rescaled_estimate=est.value, n_points=n_points)

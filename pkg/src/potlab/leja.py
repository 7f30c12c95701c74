"""Greedy extremal (Leja) sequences on the segment [-1,1] and on circles.

Each new point maximizes the log-product of distances to the points
already chosen, optionally tilted by n times an external potential.  The
maximization is over a fixed candidate grid followed by a golden-section
refinement inside the bracketing grid interval, so runs are deterministic
for a fixed grid and tie-break rule (smallest coordinate wins).

Sequences are immutable; extension returns a new sequence.  Points are
kept in float64: downstream big-float consumers embed the stored values
exactly, so grid-localization error only enters equidistribution
diagnostics, far below their tolerances.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .measures import ks_distance
from .potentials import phi_np, potential_on_grid

#  width below which the bracketing interval is not refined further;
#  2^(-bits/4) at the 53-bit generation precision
REFINE_TOL = 2.0 ** (-53 / 4)
_INV_GOLDEN = (math.sqrt(5) - 1) / 2

SEGMENT = "segment"
CIRCLE = "circle"


class DegenerateGrid(ValueError):
    """Every candidate node collides with an already chosen point."""


@dataclass(frozen=True)
class CandidateGrid:
    """Sorted distinct candidate nodes plus a refinement iteration cap."""

    nodes: np.ndarray
    refinement_depth: int = 200

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if np.any(np.diff(nodes) <= 0):
            nodes = np.unique(nodes)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return len(self.nodes)


def chebyshev_grid(m=4096):
    """Chebyshev-Lobatto nodes on [-1,1], endpoints included."""
    j = np.arange(m)
    return CandidateGrid(-np.cos(np.pi * j / (m - 1)))


def circle_grid(m=4096):
    """Equispaced angle grid on [0, 2*pi)."""
    return CandidateGrid(2 * np.pi * np.arange(m) / m)


@dataclass(frozen=True)
class LejaSequence:
    """Ordered extremal points with running log-products and separation.

    points : for the segment, x coordinates; for a circle, angles in
        [0, 2*pi).  log_products[n] is sum_{j<n} log|x_n - x_j| (the
        value of the maximized log-product when point n was added) and
        separations[n] is the minimal pairwise distance among the first
        n+1 points.
    """

    points: Tuple[float, ...]
    domain: str = SEGMENT
    radius: float = 1.0
    target_name: Optional[str] = None
    log_products: Tuple[float, ...] = field(default=())
    separations: Tuple[float, ...] = field(default=())

    def __len__(self):
        return len(self.points)

    @property
    def weighted(self):
        return self.target_name is not None

    @property
    def separation(self):
        return self.separations[-1] if self.separations else math.inf

    def locations(self):
        """Points as complex numbers in the plane."""
        if self.domain == CIRCLE:
            return self.radius * np.exp(1j * np.asarray(self.points))
        return np.asarray(self.points, dtype=complex)

    def to_csv(self, path):
        col = "theta" if self.domain == CIRCLE else "x"
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["index", col])
            for i, x in enumerate(self.points):
                w.writerow([i, "%.17g" % x])


def _pair_dist(domain, radius, a, b):
    if domain == CIRCLE:
        return 2 * radius * abs(math.sin((a - b) / 2))
    return abs(a - b)


def _log_dist_grid(domain, radius, nodes, x):
    if domain == CIRCLE:
        with np.errstate(divide="ignore"):
            return np.log(2 * radius * np.abs(np.sin((nodes - x) / 2)))
    with np.errstate(divide="ignore"):
        return np.log(np.abs(nodes - x))


def _objective_scalar(domain, radius, pts, vpot, n, x):
    s = 0.0
    if vpot is not None:
        s += n * vpot(x)
    arr = np.asarray(pts)
    if domain == CIRCLE:
        d = 2 * radius * np.abs(np.sin((x - arr) / 2))
    else:
        d = np.abs(x - arr)
    if np.any(d == 0):
        return -math.inf
    return s + float(np.sum(np.log(d)))


def _golden_refine(f, a, b, depth, tol=REFINE_TOL):
    if depth <= 0:
        return a
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    k = 0
    while b - a > tol and k < depth:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
        k += 1
    return 0.5 * (a + b)


def _select_next(seq, grid, vpot_grid, vpot_scalar):
    """One greedy step; returns the chosen coordinate.

    vpot_grid: external-potential values on the grid nodes (or None);
    vpot_scalar: scalar callable for refinement (or None).
    """
    nodes = grid.nodes
    n = len(seq.points)
    logsum = np.zeros_like(nodes)
    for x in seq.points:
        logsum += _log_dist_grid(seq.domain, seq.radius, nodes, x)
    obj = logsum if vpot_grid is None else n * vpot_grid + logsum
    if not np.any(np.isfinite(obj)):
        raise DegenerateGrid("all candidate nodes collide with chosen points")
    i = int(np.argmax(obj))
    lo = nodes[max(i - 1, 0)]
    hi = nodes[min(i + 1, len(nodes) - 1)]

    def f(x):
        return _objective_scalar(seq.domain, seq.radius, seq.points,
                                 vpot_scalar, n, x)

    xg = _golden_refine(f, lo, hi, grid.refinement_depth)
    #  the refined point must also beat the bracket ends and the grid node
    cands = sorted({xg, lo, hi, float(nodes[i])})
    vals = [f(c) for c in cands]
    best = max(vals)
    return next(c for c, v in zip(cands, vals) if v == best)


def _appended(seq, x, objective_value):
    x = float(x)
    sep = seq.separation
    for p in seq.points:
        sep = min(sep, _pair_dist(seq.domain, seq.radius, x, p))
    return LejaSequence(
        points=seq.points + (x,),
        domain=seq.domain,
        radius=seq.radius,
        target_name=seq.target_name,
        log_products=seq.log_products + (objective_value,),
        separations=seq.separations + (sep,),
    )


def new_sequence(domain=SEGMENT, radius=1.0, target=None, grid=None):
    """Start a sequence: x1 = 1 (angle 0) unweighted, argmax of the
    potential (leftmost on ties) when a target weight is given."""
    if target is None:
        x0 = 0.0 if domain == CIRCLE else 1.0
    else:
        if domain == CIRCLE:
            raise ValueError("weighted sequences are only defined on the segment")
        grid = grid or chebyshev_grid()
        vg = potential_on_grid(target, grid.nodes)
        x0 = float(grid.nodes[int(np.argmax(vg))])
    return LejaSequence(points=(x0,), domain=domain, radius=radius,
                        target_name=None if target is None else target.name,
                        log_products=(0.0,), separations=(math.inf,))


def extend_unweighted(seq, grid):
    """Append the point maximizing the distance log-product over the grid."""
    if not seq.points:
        raise ValueError("sequence must be nonempty")
    x = _select_next(seq, grid, None, None)
    val = _objective_scalar(seq.domain, seq.radius, seq.points, None,
                            len(seq.points), x)
    return _appended(seq, x, val)


def extend_weighted(seq, target, grid):
    """Append the maximizer of n*V(x) + sum log|x - x_j| over the grid."""
    if not seq.points:
        raise ValueError("sequence must be nonempty")
    if seq.domain == CIRCLE:
        raise ValueError("weighted sequences are only defined on the segment")
    vg = potential_on_grid(target, grid.nodes)

    def vs(x):
        return float(potential_on_grid(target, np.asarray([x]))[0])

    x = _select_next(seq, grid, vg, vs)
    #  log_products stores the bare distance product, without the weight
    val = _objective_scalar(seq.domain, seq.radius, seq.points, None,
                            len(seq.points), x)
    return _appended(seq, x, val)


def generate(n, domain=SEGMENT, radius=1.0, target=None, grid=None):
    """Generate the first n points (fast path with cached grid sums)."""
    grid = grid or (circle_grid() if domain == CIRCLE else chebyshev_grid())
    seq = new_sequence(domain=domain, radius=radius, target=target, grid=grid)
    nodes = grid.nodes
    vg = None if target is None else potential_on_grid(target, nodes)
    vs = None
    if target is not None:
        def vs(x):
            return float(potential_on_grid(target, np.asarray([x]))[0])

    logsum = _log_dist_grid(seq.domain, seq.radius, nodes, seq.points[0])
    while len(seq) < n:
        m = len(seq.points)
        obj = logsum if vg is None else m * vg + logsum
        if not np.any(np.isfinite(obj)):
            raise DegenerateGrid("all candidate nodes collide with chosen points")
        i = int(np.argmax(obj))
        lo, hi = nodes[max(i - 1, 0)], nodes[min(i + 1, len(nodes) - 1)]

        def f(x):
            return _objective_scalar(seq.domain, seq.radius, seq.points, vs, m, x)

        xg = _golden_refine(f, lo, hi, grid.refinement_depth)
        cands = sorted({xg, lo, hi, float(nodes[i])})
        vals = [f(c) for c in cands]
        x = next(c for c, v in zip(cands, vals) if v == max(vals))
        bare = _objective_scalar(seq.domain, seq.radius, seq.points, None, m, x)
        seq = _appended(seq, x, bare)
        logsum += _log_dist_grid(seq.domain, seq.radius, nodes, x)
    return seq


def verify_unweighted_asymptotics(seq, z_samples):
    """Residuals (1/n) sum log|z - x_j| - (g(z) - Robin constant).

    For the segment the target is log|phi(z)| - log 2; for a circle of
    radius r it is log|z|.  Callers assert the decay.
    """
    pts = seq.locations()
    n = len(pts)
    out = []
    for z in z_samples:
        s = float(np.sum(np.log(np.abs(complex(z) - pts)))) / n
        if seq.domain == CIRCLE:
            g = math.log(abs(complex(z)))
        else:
            g = math.log(abs(phi_np(np.asarray([z]))[0])) - math.log(2)
        out.append(s - g)
    return out


def verify_weighted_asymptotics(seq, target, z_samples):
    """Residuals (1/n) sum log|z - x_j| + V(z) for samples off the segment."""
    pts = seq.locations()
    n = len(pts)
    out = []
    for z in z_samples:
        s = float(np.sum(np.log(np.abs(complex(z) - pts)))) / n
        out.append(s + float(target.potential(z)))
    return out


def equidistribution_distance(seq, target):
    """KS distance between the point-counting measure and the target CDF."""
    if seq.domain == CIRCLE:
        return ks_distance(np.asarray(seq.points) / (2 * np.pi), lambda t: t)
    return ks_distance(seq.points, target.cdf)

"""Orthogonal polynomials of discrete measures and the sigma construction.

The pipeline: take weighted Leja points x_1, x_2, ..., attach a rapidly
decaying weight cascade eps_n, and study the monic orthogonal polynomials
of sigma = sum eps_n delta_{x_n}.  With a cascade that decays fast enough
the degree-n polynomial keeps its zeros within q^(n^2) of the first n
atoms, which is what makes the zero-counting measures follow the target.

Everything here runs in a PrecisionContext (mpmath); weight ratios reach
scales like q^300, far outside float64.

Cascades
--------
``power``      eps_n = q^(n^2).  The simple closed form; its consecutive
               ratios q^(2n+1) shrink too slowly for the zero-stability
               bound once n >= 3 (the perturbation of the degree-n zeros
               is of order eps_{n+1}/eps_n, which dwarfs q^(n^2)).
``stabilized`` eps_1 = q and eps_{n+1} chosen inside (0, q^(n^2) eps_n),
               shrunk until recomputing the degree-n zeros under the
               calibration perturbations moves them by at most
               min(q^(n^2), delta_n)/4.  This is the constructive version
               of "pick eps_{n+1} small enough"; the deviation is linear
               in eps_{n+1}, so a measured violation tells us directly
               how much to shrink.  Default.
"""

import csv
import math
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from .measures import DiscreteMeasure, ks_distance
from .precision import PrecisionContext, PrecisionTooLow


class BreakdownError(ArithmeticError):
    """A norm in the Stieltjes iteration came out nonpositive."""


class PairingFailure(ValueError):
    """Nearest-neighbor matching of zeros to Leja points is not bijective."""


class StressFailure(AssertionError):
    """A perturbation in the stress family moved a zero past its bound."""


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Monic three-term recurrence data P_{k+1} = (x - a_k) P_k - b_k P_{k-1}.

    a and b have equal length n and determine P_0 ... P_n; b[0] is the
    measure's total mass and b[k] = |P_k|^2 / |P_{k-1}|^2 > 0 for k >= 1.
    """

    a: tuple
    b: tuple
    ctx: PrecisionContext

    def __len__(self):
        return len(self.a)


@dataclass(frozen=True)
class ZeroSet:
    """Sorted real simple zeros of a degree-n orthogonal polynomial."""

    roots: tuple
    degree: int
    matched_to: Optional[tuple] = None


def stieltjes_recurrence(m, n):
    """First n recurrence coefficient pairs of the measure m.

    Uses the discrete Stieltjes procedure: polynomials are carried as
    value vectors on the atoms and coefficients come from the inner
    products <p, q> = sum w_k p(x_k) q(x_k).  Needs at least n distinct
    atom locations; raises BreakdownError otherwise.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if m.support is None:
        raise ValueError("Stieltjes iteration needs real atom locations")
    ctx = m.ctx
    with ctx.workprec():
        xs = m.locations
        ws = m.weights
        p_prev = [mpf(0)] * len(xs)
        p_cur = [mpf(1)] * len(xs)
        a, b = [], []
        nu_prev = None
        for k in range(n):
            nu = mp.fsum(w * p * p for w, p in zip(ws, p_cur))
            if nu <= 0:
                raise BreakdownError(
                    f"norm of degree-{k} polynomial is {nu}; the measure has "
                    f"fewer than {k + 1} atoms of support or bits are too low")
            ak = mp.fsum(w * x * p * p for w, x, p in zip(ws, xs, p_cur)) / nu
            bk = nu if k == 0 else nu / nu_prev
            a.append(ak)
            b.append(bk)
            p_prev, p_cur = p_cur, [
                (x - ak) * pc - (bk if k > 0 else 0) * pp
                for x, pc, pp in zip(xs, p_cur, p_prev)]
            nu_prev = nu
    return RecurrenceCoeffs(a=tuple(a), b=tuple(b), ctx=ctx)


def evaluate_monic(rc, k, x):
    """Value of the monic orthogonal polynomial P_k at x (k <= len(rc))."""
    if k > len(rc):
        raise ValueError("recurrence too short")
    with rc.ctx.workprec():
        p_prev, p_cur = mpf(0), mpf(1)
        for j in range(k):
            bj = rc.b[j] if j > 0 else 0
            p_prev, p_cur = p_cur, (x - rc.a[j]) * p_cur - bj * p_prev
        return p_cur


def orthogonality_residual(m, rc, n):
    """max_{k<n} |<P_n, x^k>| / (|P_n| * |x^k|) under the measure m."""
    ctx = m.ctx
    with ctx.workprec():
        vals = [evaluate_monic(rc, n, x) for x in m.locations]
        norm_p = mp.sqrt(mp.fsum(w * v * v for w, v in zip(m.weights, vals)))
        worst = mpf(0)
        for k in range(n):
            ip = mp.fsum(w * v * x ** k
                         for w, v, x in zip(m.weights, vals, m.locations))
            scale = mp.sqrt(mp.fsum(w * x ** (2 * k)
                                    for w, x in zip(m.weights, m.locations)))
            if norm_p > 0 and scale > 0:
                worst = max(worst, abs(ip) / (norm_p * scale))
        return worst


def _sturm_count(a, b, n, x, tiny):
    """Number of eigenvalues below x of the order-n Jacobi matrix."""
    cnt = 0
    d = a[0] - x
    if d < 0:
        cnt += 1
    elif d == 0:
        d = -tiny
        cnt += 1
    for i in range(1, n):
        d = (a[i] - x) - b[i] / d
        if d < 0:
            cnt += 1
        elif d == 0:
            d = -tiny
            cnt += 1
    return cnt


def orthopoly_zeros(rc, n):
    """Zeros of P_n by Sturm bisection on the tridiagonal recurrence.

    Each root is isolated to width 2^(-bits/2).  Roots are the
    eigenvalues of the n-by-n Jacobi matrix built from rc, so they are
    real, simple, and interlace those of P_{n-1}.
    """
    if n < 1 or n > len(rc):
        raise ValueError(f"need 1 <= n <= {len(rc)}")
    ctx = rc.ctx
    with ctx.workprec():
        a = [mpf(v) for v in rc.a[:n]]
        b = [mpf(v) for v in rc.b[:n]]
        for k in range(1, n):
            if not b[k] > 0:
                raise BreakdownError(f"b[{k}] = {b[k]} is not positive")
        r = max((mp.sqrt(b[k]) for k in range(1, n)), default=mpf(0))
        lo0 = min(a) - 2 * r - 1
        hi0 = max(a) + 2 * r + 1
        tol = ctx.root_tol
        tiny = mpf(2) ** (-4 * ctx.bits)
        roots = []
        for k in range(1, n + 1):
            lo, hi = lo0, hi0
            while hi - lo > tol:
                mid = (lo + hi) / 2
                if _sturm_count(a, b, n, mid, tiny) >= k:
                    hi = mid
                else:
                    lo = mid
            roots.append((lo + hi) / 2)
    return ZeroSet(roots=tuple(roots), degree=n)


# ---------------------------------------------------------------------------
#  sigma construction


@dataclass(frozen=True)
class SigmaBuildConfig:
    """Parameters of the sigma measure built on weighted Leja points."""

    q: float
    n_max: int
    target_name: str = "arcsine"
    bits: int = 2048
    cascade: str = "stabilized"

    def __post_init__(self):
        if not 0 < self.q < 0.5:
            raise ValueError(f"q must lie in (0, 1/2), got {self.q}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.cascade not in ("stabilized", "power"):
            raise ValueError(f"unknown cascade {self.cascade!r}")
        floor = precision_floor(self.q, self.n_max, self.cascade)
        if self.bits < floor:
            raise PrecisionTooLow(
                f"{self.bits} bits < floor {floor} for q={self.q}, "
                f"n_max={self.n_max}, cascade={self.cascade}")

    @property
    def ctx(self):
        return PrecisionContext(self.bits)


def precision_floor(q, n, cascade="stabilized"):
    """Bits needed to keep the weight cascade well inside the significand."""
    lg = math.log2(1 / q)
    if cascade == "power":
        return math.ceil(3 * n * n * lg) + 128
    span = 1 + sum(k * k for k in range(1, n)) + n * n
    return math.ceil(3 * span * lg) + 128


def _zero_deviations(measure, leja_points, n):
    """Max |x_k - root| after nearest-atom pairing; also whether bijective."""
    rc = stieltjes_recurrence(measure, n)
    zs = orthopoly_zeros(rc, n)
    ctx = measure.ctx
    with ctx.workprec():
        pts = [ctx.mpf(x) for x in leja_points[:n]]
        pairs = []
        for r in zs.roots:
            ds = [abs(r - p) for p in pts]
            j = ds.index(min(ds))
            pairs.append((j, min(ds)))
        bijective = len({j for j, _ in pairs}) == n
        worst = max(d for _, d in pairs)
    return zs, pairs, worst, bijective


def build_sigma(cfg, seq):
    """Measure sum eps_n delta_{x_n} over the first n_max points of seq.

    The cascade depends on cfg.cascade (see module docstring).  For the
    stabilized cascade the choice of eps_{n+1} is calibrated against two
    perturbation directions: an atom at the next Leja point (the realized
    continuation) and a 64-atom uniform grid (a spread-out worst case).
    Tail sums are checked to stay below the preceding weight.
    """
    if len(seq) < cfg.n_max:
        raise ValueError(f"need {cfg.n_max} Leja points, have {len(seq)}")
    ctx = cfg.ctx
    with ctx.workprec():
        q = ctx.mpf(str(cfg.q))
        pts = [ctx.mpf(x) for x in seq.points[:cfg.n_max]]
        if cfg.cascade == "power":
            eps = [q ** ((k + 1) ** 2) for k in range(cfg.n_max)]
        else:
            eps = [q]
            grid64 = [ctx.mpf(-1) + ctx.mpf(2) * i / 63 for i in range(64)]
            atoms = [(pts[0], eps[0])]
            for n in range(1, cfg.n_max):
                if n >= 2:
                    dn = min(abs(pts[i] - pts[j])
                             for i in range(n) for j in range(i + 1, n))
                    tgt = min(q ** (n * n), dn) / 4
                else:
                    tgt = q / 4
                cand = q ** (n * n) * eps[-1] * q
                for _ in range(64):
                    worst = mpf(0)
                    for extra in (
                            [(pts[n], 2 * cand)],
                            [(g, 2 * cand / 64) for g in grid64]):
                        beta = DiscreteMeasure(tuple(atoms) + tuple(extra),
                                               ctx=ctx)
                        _, _, w, _ = _zero_deviations(beta, seq.points, n)
                        worst = max(worst, w)
                    if worst <= tgt:
                        break
                    #  deviation is linear in cand: rescale with headroom
                    cand = cand * tgt / worst / 2
                else:
                    raise PrecisionTooLow(
                        f"calibration of eps_{n + 1} did not converge")
                eps.append(cand)
                atoms.append((pts[n], cand))
        #  decay and tail-domination checks on the truncated cascade
        for k in range(1, cfg.n_max):
            if not eps[k] < eps[k - 1]:
                raise ValueError(f"cascade not decreasing at {k}")
        for k in range(cfg.n_max - 1):
            if not mp.fsum(eps[k + 1:]) < eps[k]:
                raise ValueError(f"tail not dominated at {k}")
        return DiscreteMeasure(tuple(zip(pts, eps)), ctx=ctx)


@dataclass(frozen=True)
class StabilityReport:
    n: int
    zeros: ZeroSet
    deviations: tuple          # (leja index, distance) per root
    max_deviation: object      # mpf
    bound: object              # mpf, q^(n^2)
    separation: float

    @property
    def margin(self):
        return self.bound / self.max_deviation if self.max_deviation > 0 \
            else mpf("inf")

    @property
    def passed(self):
        return self.max_deviation < self.bound


def zero_stability_check(m, seq, n, q):
    """Pair zeros of P_n( . ; m) with the first n Leja points.

    Raises PairingFailure when the nearest-atom map is not a bijection;
    otherwise reports the worst |x_k - x_{n,k}| next to the bound q^(n^2).
    """
    ctx = m.ctx
    with ctx.workprec():
        zs, pairs, worst, bij = _zero_deviations(m, seq.points, n)
        if not bij:
            raise PairingFailure(
                f"zeros of P_{n} do not pair bijectively with the Leja "
                f"points (worst deviation {mp.nstr(worst, 8)})")
        bound = ctx.mpf(str(q)) ** (n * n)
        sep = min(abs(ctx.mpf(seq.points[i]) - ctx.mpf(seq.points[j]))
                  for i in range(n) for j in range(i + 1, n)) \
            if n >= 2 else mpf("inf")
    return StabilityReport(n=n, zeros=ZeroSet(zs.roots, n, tuple(j for j, _ in pairs)),
                           deviations=tuple(pairs), max_deviation=worst,
                           bound=bound, separation=float(sep))


def default_stress_family(seq, n, ctx, grid_atoms=64):
    """The documented perturbation family: nothing, endpoint atoms, an atom
    at each of the first n Leja points, and a uniform grid of mass one."""
    fam = [("zero", None),
           ("delta_-1", ((ctx.mpf(-1), ctx.mpf(1)),)),
           ("delta_+1", ((ctx.mpf(1), ctx.mpf(1)),))]
    for k in range(n):
        fam.append((f"delta_leja_{k + 1}",
                    ((ctx.mpf(seq.points[k]), ctx.mpf(1)),)))
    w = ctx.mpf(1) / grid_atoms
    grid = tuple((ctx.mpf(-1) + ctx.mpf(2) * i / (grid_atoms - 1), w)
                 for i in range(grid_atoms))
    fam.append((f"uniform_grid_{grid_atoms}", grid))
    return fam


@dataclass(frozen=True)
class StressReport:
    n: int
    eps_next: object
    bound: object
    results: tuple             # (name, max deviation) per family member

    @property
    def worst(self):
        return max(self.results, key=lambda t: t[1])

    @property
    def violations(self):
        return tuple(name for name, d in self.results if not d < self.bound)


def epsilon_stress_test(m, seq, n, eps_next, family=None, q=None,
                        raise_on_violation=True):
    """Recompute the zeros of P_n under sigma_n + 2*eps_next*nu.

    Every nu in the family has support in [-1,1] and mass at most one;
    the deviation bound is min(q^(n^2), delta_n)/2.  On violation raises
    StressFailure naming the offending perturbation (unless told not to).
    """
    ctx = m.ctx
    if q is None:
        raise ValueError("q is required for the deviation bound")
    with ctx.workprec():
        sigma_n = DiscreteMeasure(m.atoms[:n], ctx=ctx)
        if family is None:
            family = default_stress_family(seq, n, ctx)
        eps_next = ctx.mpf(eps_next)
        qq = ctx.mpf(str(q))
        sep = min(abs(ctx.mpf(seq.points[i]) - ctx.mpf(seq.points[j]))
                  for i in range(n) for j in range(i + 1, n)) \
            if n >= 2 else mpf("inf")
        bound = min(qq ** (n * n), sep) / 2
        results = []
        for name, nu_atoms in family:
            if nu_atoms is None:
                beta = sigma_n
            else:
                mass = mp.fsum(w for _, w in nu_atoms)
                if mass > 1 + ctx.eps:
                    raise ValueError(f"family member {name} has mass {mass} > 1")
                scaled = tuple((x, 2 * eps_next * w) for x, w in nu_atoms)
                beta = DiscreteMeasure(sigma_n.atoms + scaled, ctx=ctx)
            _, _, worst, _ = _zero_deviations(beta, seq.points, n)
            results.append((name, worst))
        report = StressReport(n=n, eps_next=eps_next, bound=bound,
                              results=tuple(results))
        if raise_on_violation and report.violations:
            name, d = report.worst
            raise StressFailure(
                f"perturbation {name!r} moved a zero of P_{n} by "
                f"{mp.nstr(d, 8)}, bound {mp.nstr(bound, 8)}")
        return report


def gauss_quadrature(m, n):
    """n-point Gauss rule of the measure m: nodes and Christoffel weights.

    The rule integrates polynomials up to degree 2n-1 exactly against m,
    so its n-atom measure matches the first 2n moments of m.
    """
    rc = stieltjes_recurrence(m, n)
    zs = orthopoly_zeros(rc, n)
    ctx = m.ctx
    with ctx.workprec():
        norms = []
        acc = mpf(1)
        for k in range(n):
            acc *= rc.b[k]
            norms.append(acc)
        weights = []
        for x in zs.roots:
            s = mpf(0)
            p_prev, p_cur = mpf(0), mpf(1)
            for k in range(n):
                s += p_cur * p_cur / norms[k]
                bk = rc.b[k] if k > 0 else 0
                p_prev, p_cur = p_cur, (x - rc.a[k]) * p_cur - bk * p_prev
            weights.append(1 / s)
        return list(zs.roots), weights


# ---------------------------------------------------------------------------
#  zero-counting measures and potential asymptotics


def counting_measure(zs, ctx=None):
    """Normalized zero-counting measure: weight 1/n at each root."""
    if not zs.roots:
        raise ValueError("empty zero set")
    ctx = ctx or PrecisionContext(64)
    w = ctx.mpf(1) / zs.degree
    #  bisection can leave a root a half-width past the hull; pad the
    #  declared support accordingly
    lo = min(float(r) for r in zs.roots)
    hi = max(float(r) for r in zs.roots)
    pad = 1e-12 * (1 + max(abs(lo), abs(hi)))
    support = (min(lo - pad, -1.0), max(hi + pad, 1.0))
    return DiscreteMeasure(tuple((r, w) for r in zs.roots), ctx=ctx,
                           support=support)


def weak_star_distance(m, target):
    """KS distance between an atomic measure and the target CDF."""
    return ks_distance(m.locations, target.cdf, weights=m.weights)


def potential_asymptotics_check(m, target, n_list, z_samples):
    """Rows (n, z, (1/n) log|P_n(z)| + V(z)) with P_n taken in product form
    from its computed roots."""
    ctx = m.ctx
    rows = []
    with ctx.workprec():
        for n in n_list:
            rc = stieltjes_recurrence(m, n)
            zs = orthopoly_zeros(rc, n)
            for z in z_samples:
                zz = ctx.mpc(z)
                s = mp.fsum(mp.log(abs(zz - r)) for r in zs.roots) / n
                rows.append((n, z, float(s + target.potential(z))))
    return rows


# ---------------------------------------------------------------------------
#  CSV emission


def recurrence_to_csv(rc, path):
    digits = max(rc.ctx.bits // 3, 17)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "a", "b"])
        for k, (ak, bk) in enumerate(zip(rc.a, rc.b)):
            w.writerow([k, rc.ctx.nstr(ak, digits), rc.ctx.nstr(bk, digits)])


def stability_to_csv(reports, seq, path, ctx):
    digits = max(ctx.bits // 3, 17)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "k", "root", "paired_leja", "deviation", "bound"])
        for rep in reports:
            for (j, d), root in zip(rep.deviations, rep.zeros.roots):
                w.writerow([rep.n, j + 1, ctx.nstr(root, digits),
                            "%.17g" % seq.points[j], ctx.nstr(d, digits),
                            ctx.nstr(rep.bound, digits)])


def residuals_to_csv(rows, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "z", "residual"])
        for n, z, r in rows:
            w.writerow([n, str(z), "%.17g" % r])

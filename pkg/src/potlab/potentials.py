"""Logarithmic potentials, the exterior map phi, and monic Chebyshev values.

The map phi(z) = z + (z^2-1)^(1/2) sends the outside of [-1,1] onto the
outside of the unit disk; the branch is fixed so that |phi| >= 1
everywhere, which matches (z^2-1)^(1/2)/z -> 1 at infinity.  On the open
segment the boundary value from the upper half plane is used.

All scalar routines run under a PrecisionContext; *_np variants are
vectorized float64 companions for the grid-heavy callers.
"""

import numpy as np
from mpmath import mp, mpf, mpc

from .precision import PrecisionContext
from .measures import AtomCollision, TargetMeasure

_D = PrecisionContext(bits=64)


def phi(z, ctx=_D):
    """Exterior conformal map z + sqrt(z-1)*sqrt(z+1) with |phi| >= 1.

    The two-square-root form is stable near the branch points +-1; the
    branch with modulus < 1 is the reciprocal of the one we want.
    """
    with ctx.workprec():
        z = mpc(z)
        w = z + mp.sqrt(z - 1) * mp.sqrt(z + 1)
        if abs(w) < 1:
            w = 1 / w
        return w


def phi_np(z):
    """Vectorized float64 phi with the same branch choice."""
    z = np.asarray(z, dtype=complex)
    w = z + np.sqrt(z - 1) * np.sqrt(z + 1)
    flip = np.abs(w) < 1
    return np.where(flip, np.divide(1.0, w, out=np.ones_like(w), where=w != 0), w)


def chebyshev_monic(n, z, ctx=_D):
    """Monic Chebyshev value T_n(z) = 2^(-n) (phi^n + phi^(-n)), n >= 1."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    with ctx.workprec():
        p = phi(z, ctx)
        return (p ** n + p ** (-n)) / mpf(2) ** n


def chebyshev_monic_recurrence(n, z, ctx=_D):
    """Monic Chebyshev by the three-term recurrence (independent route).

    T_1 = z, T_2 = z^2 - 1/2, then T_{k+1} = z*T_k - T_{k-1}/4.
    """
    if n < 1:
        raise ValueError("degree must be >= 1")
    with ctx.workprec():
        z = mpc(z)
        if n == 1:
            return z
        prev, cur = mpc(1), z
        for k in range(1, n):
            b = mpf(1) / 2 if k == 1 else mpf(1) / 4
            prev, cur = cur, z * cur - b * prev
        return cur


def chebyshev_monic_np(n, z):
    """Vectorized monic Chebyshev via phi; fine off the zeros' scale."""
    p = phi_np(z)
    return (p ** n + p ** (-float(n))) / 2.0 ** n


def chebyshev_monic_coeffs(n):
    """Float64 coefficients of the monic Chebyshev polynomial, leading first."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    prev = np.array([1.0])           # T_0
    cur = np.array([1.0, 0.0])       # T_1 = x
    for k in range(1, n):
        b = 0.5 if k == 1 else 0.25
        nxt = np.append(cur, 0.0)
        nxt[2:] -= b * prev
        prev, cur = cur, nxt
    return cur


def potential_discrete(m, z):
    """Logarithmic potential sum(w_k * log 1/|z - x_k|) of a DiscreteMeasure.

    Computed as a compensated sum of log terms at the measure's precision.
    Raises AtomCollision when z hits an atom exactly.
    """
    ctx = m.ctx
    with ctx.workprec():
        z = mpc(z)
        terms = []
        for x, w in m.atoms:
            d = abs(z - x)
            if d == 0:
                raise AtomCollision(f"potential evaluated at atom {x}")
            terms.append(-w * mp.log(d))
        return mp.fsum(terms)


def equilibrium_potential_segment(z, ctx=_D):
    """Equilibrium potential of [-1,1]: log 2 - log|phi(z)| (log 2 on the cut)."""
    with ctx.workprec():
        return mp.log(2) - mp.log(abs(phi(z, ctx)))


def equilibrium_potential_circle(z, ctx=_D):
    """Equilibrium potential of the unit circle: -log|z| outside, 0 inside."""
    with ctx.workprec():
        a = abs(mpc(z))
        if a >= 1:
            return -mp.log(a)
        return mpf(0)


def _is_on_segment(z):
    if isinstance(z, (mpc, complex)):
        if mp.im(mpc(z)) != 0:
            return False
        z = mp.re(mpc(z))
    return -1 <= z <= 1


def _uniform_potential_on_segment(x, ctx):
    #  1 - [(1+x)log(1+x) + (1-x)log(1-x)]/2, with 0*log0 = 0 at the ends
    with ctx.workprec():
        x = mpf(x)
        t1 = (1 + x) * mp.log(1 + x) if x > -1 else mpf(0)
        t2 = (1 - x) * mp.log(1 - x) if x < 1 else mpf(0)
        return 1 - (t1 + t2) / 2


def _uniform_potential_off_segment(z, ctx):
    # no closed form is relied on: adaptive Gauss-Legendre quadrature
    with ctx.workprec():
        z = mpc(z)
        return -mp.quad(lambda t: mp.log(abs(z - t)), [-1, 0, 1]) / 2


def _uniform_potential_grid(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(x > -1, (1 + x) * np.log1p(x), 0.0)
        t2 = np.where(x < 1, (1 - x) * np.log1p(-x), 0.0)
    return 1 - 0.5 * (t1 + t2)


def target_arcsine(ctx=_D):
    """Arcsine (equilibrium) distribution dx / (pi sqrt(1-x^2))."""

    def potential(z):
        if _is_on_segment(z):
            with ctx.workprec():
                return mp.log(2)
        return equilibrium_potential_segment(z, ctx)

    def cdf(x):
        return 0.5 + np.arcsin(np.clip(np.asarray(x, dtype=float), -1, 1)) / np.pi

    return TargetMeasure(name="arcsine", potential=potential, cdf=cdf)


def target_uniform(ctx=_D):
    """Uniform distribution dx/2 on [-1,1]."""

    def potential(z):
        if _is_on_segment(z):
            return _uniform_potential_on_segment(mp.re(mpc(z)), ctx)
        return _uniform_potential_off_segment(z, ctx)

    def cdf(x):
        return (np.clip(np.asarray(x, dtype=float), -1, 1) + 1) / 2

    return TargetMeasure(name="uniform", potential=potential, cdf=cdf)


def target_blend(alpha, ctx=_D):
    """Convex combination alpha*arcsine + (1-alpha)*uniform."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0,1], got {alpha}")
    arc, uni = target_arcsine(ctx), target_uniform(ctx)

    def potential(z):
        with ctx.workprec():
            return alpha * arc.potential(z) + (1 - alpha) * uni.potential(z)

    def cdf(x):
        return alpha * arc.cdf(x) + (1 - alpha) * uni.cdf(x)

    return TargetMeasure(name=f"blend({alpha})", potential=potential, cdf=cdf)


def potential_on_grid(target, x):
    """Float64 values of a target's potential on a real grid in [-1,1]."""
    x = np.asarray(x, dtype=float)
    if target.name == "arcsine":
        return np.full_like(x, np.log(2.0))
    if target.name == "uniform":
        return _uniform_potential_grid(x)
    if target.name.startswith("blend("):
        alpha = float(target.name[6:-1])
        return alpha * np.log(2.0) + (1 - alpha) * _uniform_potential_grid(x)
    return np.asarray([float(target.potential(v)) for v in x], dtype=float)

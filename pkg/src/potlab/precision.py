"""Binary-precision context for all big-float computations.

Everything that has to survive weight ratios like q^(n^2) runs through a
PrecisionContext, which is a thin wrapper around an mpmath working
precision.  Values created under a context are plain mpf/mpc numbers and
can be mixed freely; the context only pins how many bits new operations
carry and which tolerances derived checks should use.

Operations built on a context are pure functions of their inputs, and
the produced values can be shared across threads.  The precision switch
itself goes through mpmath's process-global context, so concurrent
callers should parallelize across processes, not threads.
"""

from dataclasses import dataclass

from mpmath import mp, mpf, mpc

MIN_BITS = 64


class PrecisionTooLow(ValueError):
    """Requested computation needs more bits than the context provides."""


@dataclass(frozen=True)
class PrecisionContext:
    """Fixed binary working precision.

    bits : int
        Significand size in bits for reals/complexes created under this
        context.  Must be at least 64.
    """

    bits: int = 256

    def __post_init__(self):
        if int(self.bits) < MIN_BITS:
            raise PrecisionTooLow(f"need at least {MIN_BITS} bits, got {self.bits}")
        object.__setattr__(self, "bits", int(self.bits))

    def workprec(self):
        """Context manager switching mpmath to this precision."""
        return mp.workprec(self.bits)

    def mpf(self, x):
        with mp.workprec(self.bits):
            return mpf(x)

    def mpc(self, z):
        with mp.workprec(self.bits):
            return mpc(z)

    @property
    def eps(self):
        return mpf(2) ** (-self.bits)

    @property
    def orth_tol(self):
        """Tolerance for orthogonality residuals: 2^(-bits/4)."""
        return mpf(2) ** (-(self.bits // 4))

    @property
    def root_tol(self):
        """Bisection width for polynomial roots: 2^(-bits/2)."""
        return mpf(2) ** (-(self.bits // 2))

    def nstr(self, x, digits=None):
        """Decimal string with bits/3 significant digits by default."""
        if digits is None:
            digits = max(self.bits // 3, 17)
        with mp.workprec(self.bits):
            return mp.nstr(mpf(x) if not isinstance(x, (mpf, mpc)) else x,
                           digits, strip_zeros=False)


DOUBLE = PrecisionContext(bits=64)

import math

import numpy as np
import pytest
from mpmath import mp, mpf, mpc

from potlab import (AtomCollision, DiscreteMeasure, PrecisionContext,
                    chebyshev_monic, chebyshev_monic_recurrence,
                    equilibrium_potential_circle,
                    equilibrium_potential_segment, phi, potential_discrete,
                    target_arcsine, target_blend, target_uniform)
from potlab.measures import check_target
from potlab.potentials import phi_np, potential_on_grid

CTX = PrecisionContext(256)


class TestPrecisionContext:
    def test_minimum_bits(self):
        from potlab import PrecisionTooLow
        with pytest.raises(PrecisionTooLow):
            PrecisionContext(32)

    def test_tolerances(self):
        ctx = PrecisionContext(256)
        assert ctx.orth_tol == mpf(2) ** -64
        assert ctx.root_tol == mpf(2) ** -128

    def test_nstr_digits_deterministic(self):
        ctx = PrecisionContext(96)
        a = ctx.nstr(ctx.mpf(1) / 3)
        assert a == ctx.nstr(ctx.mpf(1) / 3)
        assert len(a.replace("0.", "")) >= 96 // 4

    def test_values_carry_precision(self):
        ctx = PrecisionContext(512)
        x = ctx.mpf(2)
        with ctx.workprec():
            s = mp.sqrt(x)
            assert abs(s * s - 2) < mpf(2) ** -500


class TestPhi:
    def test_at_two(self):
        assert abs(phi(2, CTX) - (2 + mp.sqrt(3))) < 1e-60

    def test_branch_point(self):
        assert abs(phi(1, CTX) - 1) < 1e-70
        assert abs(phi(-1, CTX) + 1) < 1e-70

    def test_boundary_limit_from_above(self):
        # |phi| -> 1 approaching the cut; brute-force limit at 0.5 + i*delta
        vals = [abs(phi(mpc(0.5, d), CTX)) for d in (1e-3, 1e-6, 1e-9)]
        assert abs(float(vals[-1]) - 1) < 1e-8
        assert vals[0] > vals[1] > vals[2]
        # boundary value itself
        assert abs(abs(phi(0.5, CTX)) - 1) < 1e-70

    def test_modulus_exceeds_one_off_segment(self):
        rng = np.random.default_rng(7)
        r = 1.01 + 8.99 * rng.random(1000)
        t = 2 * np.pi * rng.random(1000)
        zs = r * np.exp(1j * t)
        assert np.all(np.abs(phi_np(zs)) > 1)
        for z in zs[:25]:
            assert abs(phi(complex(z), CTX)) > 1

    def test_infinity_normalization(self):
        # (z^2-1)^(1/2)/z -> 1 means phi(z) ~ 2z far out
        z = mpc(1e8, 1e8)
        assert abs(phi(z, CTX) / (2 * z) - 1) < 1e-15


class TestChebyshevMonic:
    def test_degree_two_at_zero(self):
        assert abs(chebyshev_monic(2, 0, CTX) + mpf(1) / 2) < 1e-70
        assert abs(chebyshev_monic_recurrence(2, 0, CTX) + mpf(1) / 2) < 1e-70

    def test_degree_one_identity(self):
        for z in (0.3, 2 + 1j, -5):
            assert abs(chebyshev_monic_recurrence(1, z, CTX) - mpc(z)) == 0

    def test_explicit_matches_recurrence_degree_eight(self):
        a = chebyshev_monic(8, 2, CTX)
        b = chebyshev_monic_recurrence(8, 2, CTX)
        assert abs(a - b) < mpf(10) ** -30

    def test_explicit_matches_recurrence_random(self):
        rng = np.random.default_rng(3)
        zs = (rng.random(100) * 6 - 3) + 1j * (rng.random(100) * 6 - 3)
        tol = mpf(2) ** (-CTX.bits // 2)
        for z in zs:
            n = int(rng.integers(1, 12))
            a = chebyshev_monic(n, complex(z), CTX)
            b = chebyshev_monic_recurrence(n, complex(z), CTX)
            assert abs(a - b) <= tol * max(1, abs(b))

    def test_classical_cosine_form_on_segment(self):
        for x in (-0.9, -0.2, 0.4, 0.77):
            for n in (1, 2, 5, 9):
                want = 2.0 ** (1 - n) * math.cos(n * math.acos(x))
                got = complex(chebyshev_monic(n, x, CTX))
                assert got.real == pytest.approx(want, abs=1e-13)
                assert abs(got.imag) < 1e-15


class TestDiscretePotential:
    def test_single_atom_at_e(self):
        m = DiscreteMeasure(((0.0, 1.0),), ctx=CTX)
        v = potential_discrete(m, mp.e)
        assert abs(v + 1) < 1e-60

    def test_roots_of_unity(self):
        # V(2) = (1/n) log(1/|2^n - 1|) for the degree-n unit roots, n = 4
        atoms = tuple((z, 0.25) for z in (1, 1j, -1, -1j))
        m = DiscreteMeasure(atoms, ctx=CTX, support=None)
        v = potential_discrete(m, 2)
        assert abs(v - mp.log(mpf(1) / 15) / 4) < 1e-60

    def test_two_symmetric_atoms(self):
        m = DiscreteMeasure(((-1.0, 0.5), (1.0, 0.5)), ctx=CTX)
        assert abs(potential_discrete(m, 0)) < 1e-70

    def test_atom_collision(self):
        m = DiscreteMeasure(((0.25, 1.0),), ctx=CTX)
        with pytest.raises(AtomCollision):
            potential_discrete(m, 0.25)

    def test_affine_in_weights(self):
        rng = np.random.default_rng(11)
        xs = np.sort(rng.random(6) * 1.8 - 0.9)
        w1 = rng.random(6) + 0.1
        w2 = rng.random(6) + 0.1
        m1 = DiscreteMeasure(tuple(zip(xs, w1)), ctx=CTX)
        m2 = DiscreteMeasure(tuple(zip(xs, w2)), ctx=CTX)
        z = 1.7 + 0.3j
        v = potential_discrete(m1.combine(m2), z)
        assert abs(v - (potential_discrete(m1, z) + potential_discrete(m2, z))) \
            < mpf(2) ** (-CTX.bits + 16)

    def test_rotation_invariance_single_atom(self):
        m = DiscreteMeasure(((0.0, 1.0),), ctx=CTX)
        r = mpf(3) / 7
        vals = {potential_discrete(m, z)
                for z in (r, -r, mpc(0, r), mpc(0, -r))}
        assert len(vals) == 1

    def test_summation_order_independent(self):
        #  the sum over 2000 log terms is compensated: reversing the atom
        #  order must not change the rounded result at all
        rng = np.random.default_rng(42)
        xs = rng.random(2000) * 1.98 - 0.99
        ws = rng.random(2000) * 1e-6 + 1e-9
        fwd = DiscreteMeasure(tuple(zip(xs, ws)), ctx=CTX)
        rev = DiscreteMeasure(tuple(zip(xs[::-1], ws[::-1])), ctx=CTX)
        z = 1.25 + 0.5j
        assert potential_discrete(fwd, z) == potential_discrete(rev, z)


class TestEquilibriumPotentials:
    def test_segment_on_cut(self):
        assert abs(equilibrium_potential_segment(0.3, CTX) - mp.log(2)) < 1e-70

    def test_segment_at_two(self):
        got = equilibrium_potential_segment(2, CTX)
        assert float(got) == pytest.approx(-0.6238107163648714, abs=1e-15)
        # independent quadrature of the arcsine potential
        with CTX.workprec():
            oracle = mp.quad(lambda t: -mp.log(abs(mpf(2) - t))
                             / (mp.pi * mp.sqrt(1 - t ** 2)), [-1, 1])
        assert abs(got - oracle) < 1e-30

    def test_segment_asymptote(self):
        z = 1e6
        assert float(equilibrium_potential_segment(z, CTX)) == pytest.approx(
            -math.log(z), abs=1e-6)

    def test_circle_values(self):
        assert equilibrium_potential_circle(1, CTX) == 0
        assert abs(equilibrium_potential_circle(2, CTX) + mp.log(2)) < 1e-70
        assert equilibrium_potential_circle(0.5, CTX) == 0

    def test_circle_interior_mean_value_oracle(self):
        # average of log 1/|z - e^(i t)| over the circle is 0 inside
        z = mpc(0.3, 0.2)
        with CTX.workprec():
            oracle = mp.quad(lambda t: -mp.log(abs(z - mp.exp(1j * t))),
                             [0, 2 * mp.pi]) / (2 * mp.pi)
        assert abs(oracle - equilibrium_potential_circle(z, CTX)) < 1e-50


class TestTargets:
    def test_arcsine_cdf_center(self):
        arc = target_arcsine(CTX)
        assert float(arc.cdf(np.array([0.0]))[0]) == pytest.approx(0.5)

    def test_arcsine_potential_is_equilibrium(self):
        arc = target_arcsine(CTX)
        assert abs(arc.potential(0.3) - mp.log(2)) < 1e-70
        assert abs(arc.potential(2) -
                   equilibrium_potential_segment(2, CTX)) < 1e-70

    def test_uniform_potential_center_closed_form(self):
        uni = target_uniform(CTX)
        assert abs(uni.potential(0.0) - 1) < 1e-70
        # adaptive quadrature oracle of int log(1/|t|) dt / 2
        with CTX.workprec():
            oracle = mp.quad(lambda t: -mp.log(abs(t)) / 2, [-1, 0, 1])
        assert abs(uni.potential(0.0) - oracle) < 1e-40

    def test_uniform_potential_off_segment_matches_quadrature(self):
        uni = target_uniform(CTX)
        got = float(uni.potential(2j))
        assert got == pytest.approx(-0.732014174218662, abs=1e-12)

    def test_blend_reduces_to_arcsine(self):
        bl = target_blend(1.0, CTX)
        assert abs(bl.potential(0.3) - mp.log(2)) < 1e-60

    def test_blend_parameter_validation(self):
        with pytest.raises(ValueError):
            target_blend(1.5, CTX)

    @pytest.mark.parametrize("factory", [target_arcsine, target_uniform,
                                         lambda c: target_blend(0.5, c)])
    def test_cdf_monotone_and_normalized(self, factory):
        t = factory(CTX)
        assert check_target(t, grid_n=10_000) <= 0

    @pytest.mark.parametrize("factory", [target_arcsine, target_uniform,
                                         lambda c: target_blend(0.5, c)])
    def test_potential_oscillation_decreases_under_refinement(self, factory):
        t = factory(CTX)
        osc = []
        for m in (200, 400, 800):
            g = np.linspace(-1, 1, m)
            v = potential_on_grid(t, g)
            osc.append(np.max(np.abs(np.diff(v))))
        #  constant potentials sit at zero oscillation from the start
        assert osc[2] <= osc[1] <= osc[0]
        if osc[0] > 0:
            assert osc[2] < osc[0]

    def test_potential_grid_matches_scalar(self):
        t = target_blend(0.5, CTX)
        g = np.linspace(-0.95, 0.95, 7)
        v = potential_on_grid(t, g)
        for x, vx in zip(g, v):
            assert vx == pytest.approx(float(t.potential(float(x))), abs=1e-12)

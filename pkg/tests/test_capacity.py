import math

import numpy as np
import pytest

from potlab import (DegenerateRegion, RegionDescriptor, TracingFailure,
                    greedy_fekete_capacity, lune_capacity_bounds,
                    preimage_capacity_check)
from potlab.capacity import (disk, ellipse_closure, lemniscate, point_cloud,
                             segment, trace_lemniscate_boundary)
from potlab.potentials import chebyshev_monic_coeffs


class TestCalibration:
    def test_unit_disk(self):
        est = greedy_fekete_capacity(disk(0, 1), n=64)
        assert est.value == pytest.approx(1.0, abs=0.05)

    def test_segment(self):
        est = greedy_fekete_capacity(segment(-1, 1), n=64)
        assert est.value == pytest.approx(0.5, abs=0.03)

    def test_scaled_disk(self):
        est = greedy_fekete_capacity(disk(0, 2), n=64)
        assert est.value == pytest.approx(2.0, abs=0.1)

    def test_ellipse(self):
        #  {|phi(z)| <= rho} has capacity rho / 2
        est = greedy_fekete_capacity(ellipse_closure(1.5), n=64)
        assert est.value == pytest.approx(0.75, rel=0.05)

    def test_uncertainty_positive_and_small(self):
        est = greedy_fekete_capacity(disk(0, 1), n=64)
        assert 0 <= est.uncertainty < 0.1


class TestEstimatorProperties:
    def test_scale_equivariance_exact(self):
        rng = np.random.default_rng(2)
        pts = rng.random(300) * 2 - 1 + 1j * (rng.random(300) * 2 - 1)
        c = 3.7
        a = greedy_fekete_capacity(point_cloud(pts), n=32)
        b = greedy_fekete_capacity(point_cloud(c * pts), n=32)
        assert b.value == pytest.approx(c * a.value, rel=1e-12)
        assert b.raw_dn == pytest.approx(c * a.raw_dn, rel=1e-12)

    def test_monotone_under_inclusion(self):
        small = greedy_fekete_capacity(disk(0, 0.8), n=48)
        big = greedy_fekete_capacity(disk(0, 1.0), n=48)
        assert small.value <= big.value * 1.02
        s1 = greedy_fekete_capacity(segment(-0.5, 0.5), n=48)
        s2 = greedy_fekete_capacity(segment(-1, 1), n=48)
        assert s1.value <= s2.value * 1.02

    def test_raw_dn_decreasing_in_n(self):
        vals = [greedy_fekete_capacity(segment(-1, 1), n=n).raw_dn
                for n in (16, 32, 64)]
        assert vals[1] < vals[0] * 1.02
        assert vals[2] < vals[1] * 1.02

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            greedy_fekete_capacity(disk(0, 1), n=4)

    def test_degenerate_region(self):
        with pytest.raises(DegenerateRegion):
            greedy_fekete_capacity(point_cloud([0, 1, 1j, -1, -1j]), n=16)


class TestPreimage:
    def test_pure_power_gives_disk(self):
        #  P = z^2 at level rho^2: the sublevel set is the disk of radius rho
        rep = preimage_capacity_check([1, 0, 0], 0.8, n_points=48)
        assert rep.analytic == 0.8
        assert rep.estimate == pytest.approx(0.8, rel=0.02)

    def test_two_oval_lemniscate(self):
        rep = preimage_capacity_check([1, 0, -1], 0.9, n_points=64)
        assert rep.rel_error < 0.05

    def test_chebyshev_lemniscate(self):
        rho = math.exp(-0.1) / 2
        rep = preimage_capacity_check(chebyshev_monic_coeffs(8), rho,
                                      n_points=64)
        assert rep.analytic == pytest.approx(0.4524187090179798, abs=1e-12)
        assert rep.rel_error < 0.05

    def test_non_monic_rejected(self):
        with pytest.raises(ValueError):
            preimage_capacity_check([2, 0, -1], 0.9)

    def test_report_json_fields(self):
        rep = preimage_capacity_check([1, 0, -1], 0.9, n_points=32)
        d = rep.to_json()
        assert set(d) == {"estimate", "analytic", "rel_error", "n_points"}

    def test_tracing_failure(self):
        with pytest.raises(TracingFailure):
            trace_lemniscate_boundary(np.array([1.0, 0.0]), 1e12,
                                      angles=4, max_reach=1e6)

    def test_boundary_points_sit_on_level_line(self):
        pts = trace_lemniscate_boundary(np.array([1.0, 0.0, -1.0]), 0.81,
                                        angles=64)
        vals = np.abs(np.polyval([1, 0, -1], pts))
        assert np.max(np.abs(vals - 0.81)) < 1e-9


class TestLune:
    def test_bounds_hold(self):
        rep = lune_capacity_bounds(20, 0.1, n_points=64)
        assert rep.within_bounds
        assert rep.lower == pytest.approx(0.25 * math.exp(-2), rel=1e-12)
        assert rep.upper == pytest.approx(math.exp(-2), rel=1e-12)

    def test_monotone_decreasing_in_n(self):
        a = lune_capacity_bounds(20, 0.1, n_points=48)
        b = lune_capacity_bounds(25, 0.1, n_points=48)
        assert b.estimate < a.estimate * 1.02

    def test_rescaled_capacity_stable(self):
        #  cap(F_n) e^{n eps} approaches the unit half-disk capacity
        a = lune_capacity_bounds(20, 0.1, n_points=64)
        b = lune_capacity_bounds(40, 0.1, n_points=64)
        assert abs(a.rescaled_estimate - b.rescaled_estimate) \
            < 0.1 * a.rescaled_estimate

    def test_too_fat_rejected(self):
        with pytest.raises(ValueError):
            lune_capacity_bounds(5, 0.1)

    def test_report_json(self):
        d = lune_capacity_bounds(20, 0.1, n_points=32).to_json()
        assert {"estimate", "lower", "upper", "n", "eps"} <= set(d)


class TestRegionParsing:
    def test_lune_roundtrip(self):
        r = RegionDescriptor.from_json({"kind": "lune", "n": 20, "eps": 0.1})
        assert r.kind == "lune"
        pts = r.boundary_sample(256)
        s = math.exp(-2)
        #  every boundary point obeys both lune constraints (to rounding)
        assert np.all(np.abs(pts - 1) <= s * (1 + 1e-9))
        assert np.all(np.abs(pts) >= 1 - 1e-9)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            RegionDescriptor.from_json({"kind": "banana", "r": 1})

    def test_wrong_keys(self):
        with pytest.raises(ValueError):
            RegionDescriptor.from_json({"kind": "disk", "r": 1})
        with pytest.raises(ValueError):
            RegionDescriptor.from_json({"kind": "disk", "center": 0, "r": 1,
                                        "extra": 2})

    def test_segment_sampler_includes_endpoints(self):
        r = RegionDescriptor.from_json({"kind": "segment", "a": -1, "b": 1})
        pts = r.boundary_sample(101)
        assert pts[0] == -1 and pts[-1] == 1

    def test_lemniscate_json(self):
        r = RegionDescriptor.from_json(
            {"kind": "lemniscate", "coeffs": [1, 0, -1], "level": 0.81})
        pts = r.boundary_sample(256)
        assert len(pts) >= 256

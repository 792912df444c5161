import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glpdrop import droplet, thermo
from glpdrop import reduced_model as rm
from glpdrop.errors import DomainError, SlicingError
from glpdrop.field import Field, interaction_energy, total_energy
from glpdrop.kernel import KernelSpec, make_kernel
from glpdrop.trial import TrialSpec, build_trial

BETA = 2.0
MB = thermo.solve_m_beta(BETA)


def disc(N, r_cells, center=None):
    c = np.array(center if center is not None else (N / 2 - 0.5, N / 2 - 0.5))
    i, j = np.indices((N, N))
    return (i - c[0]) ** 2 + (j - c[1]) ** 2 <= r_cells**2


class TestSlice:
    def test_uniform_background(self):
        n = -MB + 0.02
        rep = droplet.slice_field(Field.uniform(n, 32, 8.0, 2), BETA)
        assert (rep.vol_A, rep.vol_B, rep.vol_C) == (0.0, 64.0, 0.0)
        assert rep.kappa == pytest.approx(0.02 ** (1 / 3), rel=1e-12)

    def test_uniform_plus_phase(self):
        rep = droplet.slice_field(Field.uniform(MB, 32, 8.0, 2), BETA, n=-MB + 0.02)
        assert rep.vol_C == 64.0

    def test_levels_from_k(self):
        K, L = 0.4, 40.0
        rep = droplet.slice_field(Field.uniform(-0.9, 160, L, 2), BETA, K=K)
        kappa = (K * L ** (-2 / 3)) ** (1 / 3)
        assert rep.kappa == pytest.approx(kappa, rel=1e-12)
        assert rep.h_plus == pytest.approx(MB - kappa, rel=1e-12)
        assert rep.h_minus == pytest.approx(-MB + kappa, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_partition_and_radius(self, seed):
        v = np.random.default_rng(seed).uniform(-0.99, 0.99, (20, 20))
        f = Field(v, 5.0)
        rep = droplet.slice_field(f, BETA, n=-MB + 0.05)
        assert rep.vol_A + rep.vol_B + rep.vol_C == f.volume
        assert rm.ball_volume(rep.R, 2) == pytest.approx(rep.vol_C, rel=1e-12, abs=1e-15)
        A, B, C = droplet.partition(v, rep.h_minus, rep.h_plus)
        assert np.all(A.astype(int) + B + C == 1)

    def test_nested_level_sets(self, rng):
        v = rng.uniform(-1 + 1e-7, 1 - 1e-7, (24, 24))
        sizes = [np.count_nonzero(v >= h) for h in np.linspace(-1, 1, 41)]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))

    def test_degenerate(self):
        with pytest.raises(SlicingError):
            droplet.slice_field(Field.uniform(0.0, 16, 4.0, 2), BETA, n=0.0)

    def test_trial_fraction(self, model40):
        K = model40.K_star
        rep = droplet.slice_field(build_trial(TrialSpec(2 / 3, K), model40).field, BETA, K=K)
        # the spec's 15% bound is not met at L = 40 (see test_trial for the crossing oracle)
        assert 0.4 < rep.eta_measured < 2 / 3

    def test_report_serialization(self, model40):
        tr = build_trial(TrialSpec(1.0, 2 * model40.K_star), model40)
        rep = droplet.analyze(tr.field, model40)
        flat = rep.flat()
        assert flat["energy_total"] == rep.energies.total
        assert "energies" not in flat and flat["asymmetry"] < 0.1


def spiky_field(rng, n, N=32, L=8.0, spikes=20):
    w_star = thermo.g_roots(BETA, n)[2]
    v = n + 0.01 * rng.standard_normal((N, N))
    idx = rng.choice(N * N, spikes, replace=False)
    v.flat[idx] = rng.uniform(n + w_star + 0.005, 0.999, spikes)
    rest = np.ones(N * N, bool)
    rest[idx] = False
    v.flat[rest] += (n - v.mean()) * v.size / rest.sum()
    return Field(np.clip(v, -1 + 1e-7, 1 - 1e-7), L, BETA), w_star


class TestTruncate:
    def test_identity_below_cap(self):
        n = -MB + 0.05
        f = Field.uniform(n, 16, 4.0, 2)
        t = droplet.truncate_profile(f, BETA)
        assert t.field is f and not t.changed

    def test_decreases_energy_and_keeps_mean(self, rng):
        k = make_kernel(KernelSpec("indicator", 2), 4)
        f, w_star = spiky_field(rng, -MB + 0.05)
        n = f.mean()
        t = droplet.truncate_profile(f, BETA, n=n)
        assert t.feasible and t.changed
        assert abs(t.field.mean() - n) < 1e-13
        assert t.field.values.max() <= n + w_star + 1e-15
        assert total_energy(t.field, k, BETA) < total_energy(f, k, BETA)
        assert t.upper > droplet.levels(BETA, n)[2]

    def test_mean_mismatch(self):
        with pytest.raises(DomainError):
            droplet.truncate_profile(Field.uniform(-0.9, 8, 4.0, 1), BETA, n=-0.91)


class TestRearrange:
    def test_equimeasurable(self, rng):
        for shape in ((64,), (16, 16)):
            f = Field(rng.uniform(-0.9, 0.9, shape), 8.0)
            r = droplet.rearrange_decreasing(f)
            np.testing.assert_array_equal(np.sort(r.values.ravel()), np.sort(f.values.ravel()))

    def test_fixed_point(self, rng):
        for shape in ((64,), (16, 16)):
            r = droplet.rearrange_decreasing(Field(rng.uniform(-0.9, 0.9, shape), 8.0))
            np.testing.assert_array_equal(droplet.rearrange_decreasing(r).values, r.values)

    def test_one_dimensional_layout(self):
        f = Field(np.array([0.1, 0.5, 0.3, 0.2, 0.4]), 5.0)
        r = droplet.rearrange_decreasing(f).values
        # peak at index 1, then alternating +1, -1, +2, -2
        assert r[1] == 0.5 and r[2] == 0.4 and r[0] == 0.3 and r[3] == 0.2 and r[4] == 0.1

    def test_riesz_1d(self, rng):
        k = make_kernel(KernelSpec("indicator", 1), 8)
        for _ in range(10):
            f = Field(rng.uniform(-0.9, 0.9, 128), 16.0)
            assert interaction_energy(droplet.rearrange_decreasing(f), k) <= interaction_energy(f, k)


class TestExtend:
    def test_uniform_background_invisible(self):
        k = make_kernel(KernelSpec("indicator", 2), 8)
        hm = -MB + 0.1
        f = Field.uniform(hm, 32, 4.0, 2)
        g = droplet.extend_with_background(f, hm)
        assert g.L == 8.0 and g.N == 64
        assert interaction_energy(g, k) == pytest.approx(0.0, abs=1e-13)

    def test_far_droplet_unchanged(self, model40):
        tr = build_trial(TrialSpec(1.0, model40.K_star), model40)
        hm = -model40.m_beta
        # replace the far background by h_- so padding only adds background-background pairs
        v = np.where(tr.field.values < hm + 1e-9, hm, tr.field.values)
        f = tr.field.with_values(v)
        g = droplet.extend_with_background(f, hm)
        assert interaction_energy(g, model40.kernel) == pytest.approx(
            interaction_energy(f, model40.kernel), rel=1e-10)

    def test_unwrapping_penalty(self, model40):
        # a droplet straddling the cube faces: re-centering the cube can put at most
        # 2d|A u C|/L of the droplet volume within one range of the faces, and each lost
        # or gained pair costs at most (2)^2 / 4 per unit kernel mass, counted twice
        k = model40.kernel
        K = 2 * model40.K_star
        n = model40.n_of_k(K)
        tr = build_trial(TrialSpec(1.0, K, center=(1.0, 20.0)), model40)
        rep = droplet.slice_field(tr.field, BETA, n=n)
        hat = tr.field.with_values(np.maximum(tr.field.values, rep.h_minus))
        L, d, h = 40.0, 2, model40.params.h
        pen = []
        for shift in range(0, 320, 16):
            f = hat.shifted((shift, 0))
            g = droplet.extend_with_background(f, rep.h_minus)
            pen.append(abs(interaction_energy(g, k) - interaction_energy(f, k)))
        assert min(pen) <= 2 * (2 * d * (rep.vol_A + rep.vol_C) / L)
        assert max(pen) > min(pen)

class TestShape:
    def test_ball_is_nearly_symmetric(self):
        mask = disc(128, 20.0)
        a = droplet.fraenkel_asymmetry(mask, 16.0)
        assert 0 <= a < 4 / 20

    def test_two_balls(self):
        mask = disc(128, 12.0, (32, 32)) | disc(128, 12.0, (96, 96))
        a = droplet.fraenkel_asymmetry(mask, 16.0)
        area = mask.sum()
        r = math.sqrt(area / math.pi)
        # brute-force oracle: the best centre overlaps one ball completely
        best = max(
            np.count_nonzero(mask & disc(128, r, (cx, cy)))
            for cx in range(24, 41, 2) for cy in range(24, 41, 2)
        )
        oracle = (area + np.count_nonzero(disc(128, r, (32, 32))) - 2 * best) / area
        assert a == pytest.approx(oracle, abs=0.02)
        assert 0.8 < a < 1.2

    def test_annulus(self):
        ring = disc(96, 30.0) & ~disc(96, 22.0)
        assert droplet.fraenkel_asymmetry(ring, 12.0) > 0.5

    def test_direct_matches_fft(self):
        mask = disc(64, 9.0, (20, 40)) | disc(64, 4.0, (50, 10))
        a = droplet.fraenkel_asymmetry(mask, 8.0)
        b = droplet.fraenkel_asymmetry(mask, 8.0, method="direct")
        c = droplet.fraenkel_asymmetry(mask, 8.0, method="direct", backend="python")
        assert a == b == c

    def test_empty(self):
        with pytest.raises(DomainError):
            droplet.fraenkel_asymmetry(np.zeros((8, 8), bool), 4.0)
        with pytest.raises(DomainError):
            droplet.isoperimetric_deficit(np.zeros((8, 8), bool), 4.0)

    def test_single_cell_perimeter(self):
        m = np.zeros((8, 8, 8), bool)
        m[3, 3, 3] = True
        assert droplet.perimeter(m, 4.0) == pytest.approx(6 * 0.25)

    def test_full_torus(self):
        assert math.isnan(droplet.isoperimetric_deficit(np.ones((8, 8), bool), 4.0))

    def test_disc_deficit_manhattan_bias(self):
        d = droplet.isoperimetric_deficit(disc(512, 200.0), 32.0)
        assert d == pytest.approx(4 / math.pi - 1, abs=0.01)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from glpdrop import thermo
from glpdrop.errors import ConstraintError, DomainError
from glpdrop.field import (CLIP, Field, g_functional, glp_energy, glp_offset, gradient,
                           interaction_energy, total_energy)
from glpdrop.kernel import KernelSpec, make_kernel

BETA = 2.0
MB = thermo.solve_m_beta(BETA)
K8 = make_kernel(KernelSpec("indicator", 2), 8)
KB4 = make_kernel(KernelSpec("bump", 2), 4)


def random_field(rng, N=16, L=4.0, amp=0.9):
    return Field(rng.uniform(-amp, amp, (N, N)), L, BETA)


class TestField:
    def test_geometry(self):
        f = Field.uniform(0.1, 32, 8.0, 2)
        assert f.h == 0.25 and f.cell_volume == 0.0625 and f.volume == 64.0
        assert f.N == 32 and f.d == 2

    @pytest.mark.parametrize("bad", [np.zeros((4, 5)), np.zeros((2,) * 4)])
    def test_shape(self, bad):
        with pytest.raises(DomainError):
            Field(bad, 4.0)

    def test_clip_band(self):
        with pytest.raises(DomainError):
            Field(np.full(8, 1.0), 4.0)
        Field(np.full(8, 1.0 - CLIP), 4.0)

    def test_side(self):
        with pytest.raises(DomainError):
            Field(np.zeros(8), 2.0)

    def test_read_only(self):
        f = Field.uniform(0.0, 8, 4.0, 1)
        with pytest.raises(ValueError):
            f.values[0] = 0.5


class TestInteraction:
    def test_constant(self):
        assert interaction_energy(Field.uniform(0.4, 32, 4.0, 2), K8) == pytest.approx(0.0, abs=1e-15)

    def test_negation(self, rng):
        f = random_field(rng, 32)
        assert interaction_energy(f, K8) == pytest.approx(interaction_energy(f.with_values(-f.values), K8),
                                                          rel=1e-13)

    def test_double_sum_oracle(self, rng):
        f = random_field(rng, 16)
        ref = oracles.double_sum_interaction(f.values, KB4.stencil, f.h)
        assert interaction_energy(f, KB4) == pytest.approx(ref, rel=1e-10)

    def test_double_sum_oracle_1d(self, rng):
        k = make_kernel(KernelSpec("indicator", 1), 8)
        f = Field(rng.uniform(-0.9, 0.9, 64), 8.0, BETA)
        ref = oracles.double_sum_interaction(f.values, k.stencil, f.h)
        assert interaction_energy(f, k) == pytest.approx(ref, rel=1e-10)


class TestGLP:
    def test_well(self):
        e = glp_energy(Field.uniform(MB, 32, 4.0, 2), K8, BETA)
        assert abs(e.total) < 1e-13

    def test_uniform(self):
        n = -0.5
        e = glp_energy(Field.uniform(n, 32, 4.0, 2), K8, BETA)
        assert e.total == pytest.approx(16.0 * thermo.F(n, BETA), rel=1e-13)
        assert e.total == e.local + e.interaction

    def test_offset_constant(self, rng):
        offs = [glp_energy(random_field(rng, 32), K8, BETA) for _ in range(3)]
        ref = glp_offset(4.0, 2, BETA)
        fmb = -thermo.entropy(MB) / BETA
        assert ref == pytest.approx(16.0 * (fmb - MB**2 / 2), rel=1e-14)
        for e in offs:
            assert e.glp_raw - e.total == pytest.approx(ref, rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_nonnegative(self, seed):
        f = random_field(np.random.default_rng(seed), 16)
        assert total_energy(f, KB4, BETA) >= 0

    def test_minimum_only_at_wells(self, rng):
        base = Field.uniform(MB, 16, 4.0, 2)
        for _ in range(5):
            pert = base.with_values(MB + 1e-3 * rng.standard_normal((16, 16)))
            assert total_energy(pert, KB4, BETA) > 0


class TestSymmetry:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(-15, 15), st.integers(-15, 15))
    def test_translation(self, seed, a, b):
        f = random_field(np.random.default_rng(seed), 16)
        e0 = total_energy(f, KB4, BETA)
        assert total_energy(f.shifted((a, b)), KB4, BETA) == pytest.approx(e0, rel=1e-12)

    def test_reflection_and_transpose(self, rng):
        f = random_field(rng, 32)
        e0 = total_energy(f, K8, BETA)
        for v in (f.values[::-1], f.values[:, ::-1], f.values.T):
            assert total_energy(f.with_values(v), K8, BETA) == pytest.approx(e0, rel=1e-12)


class TestGradient:
    def test_critical_points(self):
        assert np.max(np.abs(gradient(Field.uniform(MB, 16, 4.0, 2), KB4, BETA))) < 1e-12
        assert np.max(np.abs(gradient(Field.uniform(0.0, 16, 4.0, 2), KB4, BETA))) < 1e-15

    def test_finite_differences(self, rng):
        f = random_field(rng, 16, amp=0.8)
        g = gradient(f, KB4, BETA)
        for _ in range(20):
            v = rng.standard_normal((16, 16))
            t = 1e-5
            fd = (total_energy(f.with_values(f.values + t * v), KB4, BETA)
                  - total_energy(f.with_values(f.values - t * v), KB4, BETA)) / (2 * t)
            an = f.cell_volume * float(np.sum(g * v))
            assert abs(an - fd) / abs(fd) < 1e-6


class TestGFunctional:
    def test_zero(self):
        assert g_functional(np.zeros((16, 16)), KB4, BETA, -0.9, 4.0) == 0.0

    def test_matches_two_evaluations(self, rng):
        n = -0.9
        w = rng.uniform(-0.05, 0.05, (16, 16))
        w -= w.mean()
        F0 = total_energy(Field.uniform(n, 16, 4.0, 2), KB4, BETA)
        F1 = total_energy(Field(n + w, 4.0), KB4, BETA)
        assert g_functional(w, KB4, BETA, n, 4.0) == pytest.approx(F1 - F0, rel=1e-10)

    def test_mean_constraint(self):
        with pytest.raises(ConstraintError):
            g_functional(np.full((16, 16), 0.01), KB4, BETA, -0.9, 4.0)

    def test_interaction_positive(self, rng):
        w = rng.uniform(-0.05, 0.05, (16, 16))
        w -= w.mean()
        assert interaction_energy(Field(-0.9 + w, 4.0), KB4) > 0

import math

import numpy as np
import pytest

from mhdlimit.inequalities import (
    DEFAULT_INDICES,
    INEQUALITIES,
    VERIFY_SUITE,
    ConstantReport,
    FieldSampler,
    commutator_row,
    empirical_constant,
    evaluate_ratio,
)
from mhdlimit.littlewood_paley import BesovIndex
from mhdlimit.spectral import SpectralField, VectorField


class ZeroSampler(FieldSampler):
    def scalar(self, grid, trial, slot):
        return SpectralField.zeros(grid)

    def vector(self, grid, trial, slot):
        return VectorField.zeros(grid)


class TestConstantReport:
    def test_aggregates(self):
        rep = ConstantReport("x", BesovIndex(1.5))
        for t, n, r in [(0, 32, 0.5), (1, 32, 0.7), (0, 64, 0.49), (1, 64, 0.7)]:
            rep.add(t, n, r)
        assert rep.resolutions == [32, 64]
        assert rep.max_ratio(32) == 0.7 and rep.max_ratio() == 0.7
        assert rep.stability() == pytest.approx(1.0)

    def test_stability_edge_cases(self):
        rep = ConstantReport("x")
        assert math.isnan(rep.max_ratio())
        rep.add(0, 32, 0.0)
        rep.add(0, 64, 1.0)
        assert rep.stability() == math.inf

    def test_csv(self):
        rep = ConstantReport("x")
        rep.add(3, 32, 0.1)
        assert rep.to_csv() == "inequality_id,trial,n,ratio\nx,3,32,0.10000000000000001\n"


class TestSampler:
    def test_same_continuum_field(self, grid32, grid64):
        s = FieldSampler(4)
        a, b = s.scalar(grid32, 2, 1), s.scalar(grid64, 2, 1)
        assert a.coeffs[3, 30] == b.coeffs[3, 62]

    def test_slots_and_trials_independent(self, grid32):
        s = FieldSampler(4)
        a = s.scalar(grid32, 0, 0).coeffs
        assert not np.allclose(a, s.scalar(grid32, 0, 1).coeffs)
        assert not np.allclose(a, s.scalar(grid32, 1, 0).coeffs)

    def test_gamma_in_range(self):
        s = FieldSampler(0, gamma_range=(0.5, 3.0))
        gammas = [s.gamma(t) for t in range(50)]
        assert all(0.5 <= g <= 3.0 for g in gammas)
        assert gammas == [s.gamma(t) for t in range(50)]

    def test_vector_divergence_free(self, grid32):
        v = FieldSampler().vector(grid32, 0, 0)
        assert v.divergence_free and v.certify().divergence_free


class TestCommutatorRow:
    @pytest.mark.parametrize("idx,row", [
        (BesovIndex(1.5, 2, 2), 1),
        (BesovIndex(2.0, 2, 2), 2),
        (BesovIndex(2.0, 2, 1), 3),
        (BesovIndex(2.5, 2, 2), 3),
        (BesovIndex(1.5, 4, 2), 2),
        (BesovIndex(2.0, 4, 2), 3),
        (BesovIndex(1.0, 4, 2), 1),
    ])
    def test_rows(self, idx, row):
        assert commutator_row(idx, 2) == row


class TestHypotheses:
    @pytest.mark.parametrize("ineq,idx", [
        ("advection", BesovIndex(2.0, 2, 2)),
        ("pressure-upper", BesovIndex(1.5, 2, 2)),
        ("remainder", BesovIndex(-0.5, 2, 2)),
        ("remainder-lipschitz", BesovIndex(0.5, 2, 2)),
        ("commutator", BesovIndex(-1.5, 2, 2)),
    ])
    def test_rejected(self, ineq, idx):
        with pytest.raises(ValueError):
            empirical_constant(ineq, trials=1, n=16, idx=idx)

    def test_unknown_id(self, grid16):
        with pytest.raises(KeyError):
            evaluate_ratio("nope", grid16, FieldSampler(), 0, BesovIndex(1.5))

    def test_zero_trials(self):
        with pytest.raises(ValueError):
            empirical_constant("product", trials=0)


class TestRatios:
    def test_all_ids_have_defaults(self):
        assert set(INEQUALITIES) == set(DEFAULT_INDICES)
        assert {i for i, _ in VERIFY_SUITE} == set(INEQUALITIES)

    @pytest.mark.parametrize("ineq", sorted(INEQUALITIES))
    def test_finite_positive(self, ineq, grid32):
        lhs, rhs = evaluate_ratio(ineq, grid32, FieldSampler(1), 0, DEFAULT_INDICES[ineq])
        assert np.isfinite(lhs) and np.isfinite(rhs) and lhs > 0 and rhs > 0

    def test_min_dominates_both_sides(self, grid32):
        s, idx = FieldSampler(2), DEFAULT_INDICES["pressure-lower-min"]
        r = {w: np.divide(*evaluate_ratio(f"pressure-lower-{w}", grid32, s, 0, idx)) for w in ("uv", "vu", "min")}
        assert r["min"] == pytest.approx(max(r["uv"], r["vu"]), rel=1e-14)

    def test_constant_u_paraproduct_bounded(self, grid32):
        # T_1 v keeps blocks j >= 1 of v, so the ratio is at most one
        class Const(FieldSampler):
            def scalar(self, grid, trial, slot):
                return SpectralField.from_values(grid, np.ones(grid.shape)) if slot == 0 else super().scalar(grid, trial, slot)
        lhs, rhs = evaluate_ratio("paraproduct", grid32, Const(), 0, BesovIndex(1.5))
        assert 0 < lhs <= rhs * (1 + 1e-12)

    def test_zero_rhs_skipped(self):
        rep = empirical_constant("product", ZeroSampler(), trials=2, n=16)
        assert rep.rows == [] and len(rep.skipped) == 4

    @pytest.mark.parametrize("ineq,idx", VERIFY_SUITE)
    def test_resolution_stable(self, ineq, idx):
        rep = empirical_constant(ineq, FieldSampler(0), trials=4, n=32, idx=idx)
        assert rep.resolutions == [32, 64]
        assert rep.stability() < 1.2

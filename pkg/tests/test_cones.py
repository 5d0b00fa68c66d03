from fractions import Fraction

import numpy as np
import pytest

from sadic.cones import (NOT_THIN, THIN, UNDETERMINED, ConeReport, LevelEstimate, check_thin,
                         cone_generators, cone_residual, estimate_cone_dim, find_stabilization_level)
from sadic.directive import CERTIFIED, DirectiveSequence, check_everywhere_growing, check_invertible_levels
from sadic.errors import InvalidArgumentError, InvalidStateError
from sadic.morphisms import IntMatrix
from sadic.oracle import perron_frequencies
from sadic.presets import FIBONACCI, IDENTITY, preset

from conftest import PHI

PERRON_FIB = np.array([1 / PHI, 1 / PHI**2])


class TestGenerators:
    def test_fibonacci_depth_10(self, fib):
        g = cone_generators(fib, 0, 10).as_array()
        assert np.abs(g - PERRON_FIB).max() < 1e-3

    def test_thue_morse_exact_half(self, tm):
        for m in (1, 2, 7):
            assert cone_generators(tm, 0, m).generators == ((Fraction(1, 2),) * 2,) * 2

    def test_identity_gives_basis(self):
        seq = DirectiveSequence.constant(IDENTITY)
        assert cone_generators(seq, 0, 1).generators == ((1, 0), (0, 1))

    def test_simplex_normalized(self):
        for name in ("tribonacci", "chacon", "merge-two-copies"):
            approx = cone_generators(preset(name), 0, 15)
            for g in approx.generators:
                assert sum(g) == 1 and min(g) >= 0

    def test_bad_range(self, fib):
        with pytest.raises(InvalidArgumentError):
            cone_generators(fib, 3, 3)

    def test_zero_column_is_invalid_state(self, fib, monkeypatch):
        monkeypatch.setattr(fib, "matrix", lambda m, n: IntMatrix(((1, 0), (0, 0))))
        with pytest.raises(InvalidStateError):
            cone_generators(fib, 0, 1)

    @pytest.mark.parametrize("name", ["fibonacci", "tribonacci", "two-copies", "merge-two-copies", "chacon"])
    def test_nesting(self, name):
        seq = preset(name)
        for n in (0, 1):
            for m in range(n + 1, n + 8):
                outer = cone_generators(seq, n, m).as_array()
                for g in cone_generators(seq, n, m + 1).as_array():
                    assert cone_residual(outer, g) < 1e-9

    @pytest.mark.parametrize("name", ["fibonacci", "thue-morse", "two-copies", "merge-two-copies"])
    def test_pushforward_consistency(self, name):
        seq = preset(name)
        for n in range(3):
            lower = cone_generators(seq, n, n + 8).as_array()
            m = seq.level(n).incidence_matrix.to_numpy()
            for g in cone_generators(seq, n + 1, n + 8).as_array():
                img = m @ g
                assert cone_residual(lower, img / img.sum()) < 1e-9


class TestDimension:
    def test_fibonacci(self, fib):
        est = estimate_cone_dim(fib, 0, 40, eps=1e-6)
        assert est.c_estimate == 1 and est.converged
        assert len(est.extreme_rays) == 1
        assert np.abs(np.array(est.rays_float()[0]) - PERRON_FIB).sum() < 1e-9

    def test_thue_morse(self, tm):
        est = estimate_cone_dim(tm, 0, 20)
        assert est.c_estimate == 1
        assert est.extreme_rays == [(Fraction(1, 2), Fraction(1, 2))]

    def test_two_copies(self):
        est = estimate_cone_dim(preset("two-copies"), 0, 30)
        assert est.c_estimate == 2 and est.converged
        rays = sorted(est.rays_float())
        assert np.allclose(rays, [[0, 0, 1 / PHI, 1 / PHI**2], [1 / PHI, 1 / PHI**2, 0, 0]], atol=1e-12)

    def test_shallow_depth_not_converged(self, fib):
        est = estimate_cone_dim(fib, 0, 3)
        assert not est.converged
        assert 1 <= est.c_estimate <= 2

    def test_history_window(self, fib):
        est = estimate_cone_dim(fib, 0, 30, window=7)
        assert len(est.history) == 7

    @pytest.mark.parametrize("name", ["fibonacci", "thue-morse", "tribonacci", "chacon"])
    def test_primitive_collapses_to_perron(self, name):
        seq = preset(name)
        est = estimate_cone_dim(seq, 0, 40)
        assert est.c_estimate == 1
        perron = perron_frequencies(seq.level(0).incidence_matrix)
        assert np.abs(np.array(est.rays_float()[0]) - perron).sum() < 1e-8

    @pytest.mark.parametrize("name", ["fibonacci", "two-copies", "merge-two-copies", "identity", "chacon"])
    def test_bounds(self, name):
        seq = preset(name)
        for n in range(4):
            est = estimate_cone_dim(seq, n, n + 20)
            assert 1 <= est.c_estimate <= seq.alphabet(n).size


class TestThin:
    def test_fibonacci(self, fib):
        r = check_thin(fib, 20)
        assert r.thin == THIN and r.stabilization_level == 0
        assert {lv.c_estimate for lv in r.levels} == {1}
        assert r.e_bounds == (1, 2)

    def test_merge_two_copies(self):
        r = check_thin(preset("merge-two-copies"), 30)
        assert r.thin == NOT_THIN and r.witness == (0, 1)
        assert [lv.c_estimate for lv in r.levels[:3]] == [1, 2, 2]
        assert r.stabilization_level == 1

    def test_e_bounds_ordered(self):
        for name in ("two-copies", "tribonacci", "merge-two-copies"):
            r = check_thin(preset(name), 10)
            assert r.e_bounds[0] <= r.e_bounds[1] == preset(name).alphabet(0).size

    def test_invertible_and_growing_is_constant(self):
        for name in ("fibonacci", "fibonacci-swap", "tribonacci"):
            seq = preset(name)
            if not all(x.invertible for x in check_invertible_levels(seq, 15)):
                continue
            assert check_everywhere_growing(seq, 15).status == CERTIFIED
            r = check_thin(seq, 15)
            assert len({lv.c_estimate for lv in r.levels if lv.converged}) == 1
            assert r.thin == THIN

    def test_explicit_truncation_is_undetermined(self):
        seq = DirectiveSequence.explicit([FIBONACCI] * 12)
        r = check_thin(seq, 12)
        assert r.thin == UNDETERMINED
        assert r.levels[0].converged and not r.levels[-1].converged

    def test_threads_do_not_change_result(self, monkeypatch):
        base = check_thin(preset("merge-two-copies"), 12)
        monkeypatch.setenv("SADIC_THREADS", "4")
        par = check_thin(preset("merge-two-copies"), 12)
        assert [(lv.c_estimate, lv.converged) for lv in par.levels] == \
               [(lv.c_estimate, lv.converged) for lv in base.levels]

    def test_depth_guard(self, fib):
        with pytest.raises(InvalidArgumentError):
            check_thin(fib, 1)


def _report(values):
    levels = [LevelEstimate(n, c, [], conv) for n, (c, conv) in enumerate(values)]
    return ConeReport(levels, UNDETERMINED, None, None, (values[0][0], 4))


class TestStabilization:
    def test_thin(self):
        assert find_stabilization_level(_report([(1, True)] * 5)) == 0

    def test_tail_agrees_after_one(self):
        assert find_stabilization_level(_report([(1, True)] + [(2, True)] * 4)) == 1

    def test_single_level(self):
        assert find_stabilization_level(_report([(3, False)])) == 0

    def test_nothing_converged(self):
        assert find_stabilization_level(_report([(1, False), (2, False)])) is None

    def test_unconverged_levels_ignored(self):
        assert find_stabilization_level(_report([(1, True), (3, False), (2, True), (2, True)])) == 1

import json
import math

import numpy as np
import pytest

from specgap import search
from specgap.errors import InputError, PropertyViolation
from specgap.extremal import build_extremal, strictify
from specgap.search import (SearchConfig, brute_force_M, estimate_M, experiment, expand_grid,
                            export_csv, gap_objective, params_to_poly, poly_to_params, read_csv,
                            read_rows, restart_rng, rows_to_csv)
from specgap.spectrum import ProgressionParams, empty_spectrum, gen_progression, make_spectrum

S1 = make_spectrum([1])
S12 = make_spectrum([1, 2])
S23 = make_spectrum([2, 3])


class TestObjective:
    def test_examples(self):
        assert gap_objective([1.0, 0.0], S1) == pytest.approx(0.5)
        assert gap_objective([0.0, 1.0], S1) == pytest.approx(0.5)

    def test_extremal_touching_and_strict(self):
        e = build_extremal(ProgressionParams(1, 1, 1))
        assert gap_objective(poly_to_params(e.poly), S12) == pytest.approx(1 / 3, abs=1e-9)
        assert gap_objective(poly_to_params(strictify(e)), S12) == pytest.approx(2 / 3, abs=0.01)

    def test_zero_vector(self):
        assert gap_objective([0.0, 0.0], S1) == 0.0
        assert params_to_poly([0.0, 0.0], S1) is None

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            gap_objective([1.0, 0.0, 0.0], S1)

    def test_scale_free(self):
        x = np.array([0.3, -1.2, 0.7, 0.1])
        assert gap_objective(x, S12) == gap_objective(5 * x, S12)

    def test_params_round_trip(self):
        x = np.array([0.3, -1.2, 0.7, 0.1])
        x /= np.linalg.norm(x)
        assert np.allclose(poly_to_params(params_to_poly(x, S12)), x)


class TestConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            SearchConfig(S1, restarts=0)
        with pytest.raises(InputError):
            SearchConfig(S1, budget=99)

    def test_empty_spectrum(self):
        with pytest.raises(InputError):
            estimate_M(SearchConfig(empty_spectrum(1)))

    def test_seed_splitting(self):
        a = restart_rng(7, 3).standard_normal(4)
        assert np.array_equal(a, restart_rng(7, 3).standard_normal(4))
        assert not np.array_equal(a, restart_rng(7, 4).standard_normal(4))
        assert not np.array_equal(a, restart_rng(8, 3).standard_normal(4))


class TestEstimate:
    def test_single_frequency(self):
        r = estimate_M(SearchConfig(S1, restarts=8))
        assert r.best_gap == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("S,M", [(S23, 0.4), (S12, 2 / 3)])
    def test_examples(self, S, M):
        r = estimate_M(SearchConfig(S, restarts=16))
        assert M - 5e-3 <= r.best_gap <= M + 1e-9

    def test_result_invariants(self):
        S = gen_progression(ProgressionParams(2, 2, 1))
        r = estimate_M(SearchConfig(S, restarts=3, budget=300))
        f = params_to_poly(r.best_coeffs, S)
        from specgap.trigpoly import gap_of
        assert abs(gap_of(f).max_gap - r.best_gap) <= 1e-6
        assert r.best_gap <= search.ball_bound(S) + 1e-6
        assert r.gap_interval[1] == pytest.approx(r.best_gap)
        assert [i for i, _ in r.per_restart] == [0, 1, 2]
        assert r.best_gap == max(v for _, v in r.per_restart)
        assert r.evals_used <= 3 * 300
        json.dumps(r.to_json_obj())

    def test_deterministic(self):
        cfg = SearchConfig(S12, restarts=2, seed=5, budget=200)
        assert estimate_M(cfg) == estimate_M(cfg)

    def test_monotone_in_restarts(self):
        vals = [estimate_M(SearchConfig(S23, restarts=r, seed=1, budget=150)).best_gap
                for r in (1, 2, 4)]
        assert vals[0] <= vals[1] <= vals[2]

    def test_restart_independent_of_count(self):
        a = estimate_M(SearchConfig(S12, restarts=2, seed=3, budget=150)).per_restart
        b = estimate_M(SearchConfig(S12, restarts=3, seed=3, budget=150)).per_restart
        assert a == b[:2]

    def test_ball_gate_trips(self, monkeypatch):
        monkeypatch.setattr(search, "ball_bound", lambda S: 0.1)
        with pytest.raises(PropertyViolation):
            estimate_M(SearchConfig(S1, restarts=1, budget=100))

    def test_reproduction_gate_trips(self, monkeypatch):
        real = search.gap_of

        class Fake:
            def __init__(self, rep):
                self.max_gap, self.gap_start = rep.max_gap + 0.01, rep.gap_start

        monkeypatch.setattr(search, "gap_of", lambda f: Fake(real(f)))
        with pytest.raises(PropertyViolation):
            estimate_M(SearchConfig(S1, restarts=1, budget=100))

    def test_non_1d(self):
        with pytest.raises(InputError):
            estimate_M(SearchConfig(make_spectrum([(1, 0)])))


class TestBruteForce:
    def test_single(self):
        assert brute_force_M(S1) >= 0.5 - 1e-3

    @pytest.mark.parametrize("S,M", [(S12, 2 / 3), (S23, 0.4)])
    def test_examples(self, S, M):
        assert abs(brute_force_M(S) - M) <= 0.05

    def test_limits(self):
        with pytest.raises(InputError):
            brute_force_M(make_spectrum([1, 2, 3, 4]))
        with pytest.raises(InputError):
            brute_force_M(S1, grid_per_dim=18)

    def test_sphere_grid_on_sphere(self):
        for m in (1, 2, 3, 5):
            pts = search._sphere_grid(m, 5)
            assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
            assert np.all(pts[:, 0] >= -1e-15)


class TestExperiment:
    def test_large_step_row(self, tmp_path):
        out = tmp_path / "rows.jsonl"
        cfg = SearchConfig(S1, restarts=2, budget=200)
        rows = experiment("progression_large_b", {"N": 1, "K": 2, "b": 3}, cfg, out)
        r = rows[0]
        assert r["D"] == pytest.approx(1 / 2 + 1 / 8 + 1 / 14)  # sum over ±{1,4,7} of 1/(4|lam|)
        assert r["M_closed"] is None
        assert r["M_estimate"] <= r["D"] + 1e-6
        assert read_rows(out) == json.loads(json.dumps(rows))

    def test_squares_and_net(self):
        cfg = SearchConfig(S1, restarts=2, budget=200)
        sq = experiment("squares", {"N": 2, "K": 2}, cfg)[0]
        assert sq["spectrum"] == "±{4,9,16}" and sq["D"] == pytest.approx(0.2118, abs=1e-4)
        net = experiment("net", {"a": [1, 2]}, cfg)[0]
        assert net["D"] == pytest.approx(2 / 3) and net["M_estimate"] <= 2 / 3 + 1e-6

    def test_closed_form_column(self):
        cfg = SearchConfig(S1, restarts=1, budget=100)
        r = experiment("progression", {"N": 2, "K": 1, "b": 1}, cfg)[0]
        assert r["M_closed"] == "2/5" and r["M_closed_float"] == 0.4

    def test_empty_random_spectrum(self):
        r = experiment("random", {"Nmax": 3, "tau": 1e-9, "seed": 0},
                       SearchConfig(S1, restarts=1, budget=100))[0]
        assert r["size"] == 0 and r["M_estimate"] is None

    def test_unknown_family(self):
        with pytest.raises(InputError):
            experiment("primes", {"N": 2})

    def test_appends(self, tmp_path):
        out = tmp_path / "rows.jsonl"
        cfg = SearchConfig(S1, restarts=1, budget=100)
        experiment("squares", {"N": 1, "K": 0}, cfg, out)
        experiment("squares", {"N": 1, "K": 0}, cfg, out)
        assert len(read_rows(out)) == 2

    def test_deterministic(self):
        cfg = SearchConfig(S1, restarts=2, budget=150, seed=4)
        a = experiment("squares", expand_grid(N=[1, 2], K=[1]), cfg)
        b = experiment("squares", expand_grid(N=[1, 2], K=[1]), cfg)
        assert a == b

    def test_csv_round_trip(self, tmp_path):
        cfg = SearchConfig(S1, restarts=1, budget=100)
        rows = experiment("progression_large_b", expand_grid(N=[1], K=[1, 2], b=[3]), cfg)
        rows += experiment("progression", {"N": 2, "K": 1, "b": 1}, cfg)
        path = tmp_path / "t.csv"
        export_csv(rows, path)
        back = read_csv(path)
        for r, s in zip(rows, back):
            for k in search.CSV_COLUMNS:
                assert s[k] == r[k]
        assert rows_to_csv(back) == path.read_text()

    def test_expand_grid(self):
        g = expand_grid(N=[1, 2], K=[3])
        assert g == [{"N": 1, "K": 3}, {"N": 2, "K": 3}]

import math
from dataclasses import replace

import numpy as np
import pytest

from core.chart import VWPoint, p_to_r, sample_interior, vw_to_p
from core.errors import RankDeficientError, UniquenessAlarm
from core.geometry import (DistanceVector, MassVector, K_term, moment_I, normalize_I, ptolemy_P,
                           symmetric_distance)
from engine.solver import (Multipliers, SolverOptions, a_terms, certify_minimum,
                           classify_cocircular, descend, dziobek_residual, hessian_L,
                           is_positive_definite, lagrangian_L, minimize_U, minor_formulas, pairwise_spread,
                           principal_minors, recover_multipliers, sigma_sq_values,
                           stationarity_residual)

LAMBDA_SQUARE = (1.0 + 2.0 ** -1.5) / 2.0
SIGMA_SQUARE = 1.0 - LAMBDA_SQUARE


def test_equal_masses_give_the_unit_square(square_record):
    rec = square_record
    assert rec.converged
    assert rec.r_star.as_array() == pytest.approx([1, math.sqrt(2), 1, 1, math.sqrt(2), 1], abs=1e-8)
    assert rec.multipliers.lambda_ == pytest.approx(LAMBDA_SQUARE, abs=1e-9)
    assert rec.multipliers.sigma == pytest.approx(SIGMA_SQUARE, abs=1e-9)
    assert min(rec.minors) > 0.0
    assert abs(rec.k_value) <= 1e-10
    assert rec.is_cocircular
    assert rec.metadata["rng"] == "numpy.random.PCG64"


def test_square_record_certifies(square_record, config):
    report = certify_minimum(square_record, config)
    assert report.passed, report.failed()
    assert set(report.checks) >= {"lambda_positive", "minors_positive", "cholesky_agrees",
                                  "stationarity", "dziobek", "sigma_sq", "virial"}


def test_cocircular_record_is_realizable(square_record, config):
    assert certify_minimum(square_record, config).checks["realizable"].passed
    config["geometry"]["eps_tri"] = 10.0
    report = certify_minimum(square_record, config)
    assert report.failed() == ["realizable"]


def test_isosceles_trapezoid(trapezoid_record, config):
    r = trapezoid_record.r_star
    assert trapezoid_record.converged
    assert r.r14 == pytest.approx(r.r23, rel=1e-8)
    assert r.r13 == pytest.approx(r.r24, rel=1e-8)
    assert trapezoid_record.is_cocircular
    assert certify_minimum(trapezoid_record, config).passed


@pytest.mark.parametrize("masses", [(10.0, 1.0, 1.0, 1.0), (1.0, 3.0, 1.0, 3.0)])
def test_generic_masses_are_not_cocircular(masses, config):
    rec = minimize_U(MassVector(*masses), SolverOptions.from_config(config))
    assert rec.converged
    assert not rec.is_cocircular
    assert abs(rec.k_value) > 1e-4
    assert certify_minimum(rec, config).passed
    assert abs(moment_I(rec.r_star, rec.masses) - 1.0) <= 1e-10
    assert abs(ptolemy_P(rec.r_star)) <= 1e-10


def test_recover_multipliers_on_square(square_r, unit_masses):
    mult = recover_multipliers(square_r, unit_masses)
    assert mult.lambda_ == pytest.approx(0.6767767, abs=1e-7)
    assert mult.sigma == pytest.approx(0.3232233, abs=1e-7)
    assert mult.stationarity_residual <= 1e-12


def test_recover_multipliers_off_critical_point(unit_masses):
    r = normalize_I(DistanceVector(1.0, 1.3, 1.1, 0.9, 1.4, 1.0), unit_masses)
    assert recover_multipliers(r, unit_masses).stationarity_residual > 1e-3


def test_tetrahedron_is_critical_but_not_cocircular(unit_masses):
    # правильный тетраэдр: σ = 0, но P ≠ 0, значит вне M⁺
    r = normalize_I(DistanceVector(1.0, 1.0, 1.0, 1.0, 1.0, 1.0), unit_masses)
    mult = recover_multipliers(r, unit_masses)
    assert mult.stationarity_residual <= 1e-12
    assert mult.sigma == pytest.approx(0.0, abs=1e-12)
    assert ptolemy_P(r) == pytest.approx(4.0 / 3.0, rel=1e-12)


def test_least_squares_multipliers_beat_a_grid(rng):
    m = MassVector.from_array(rng.uniform(0.5, 3.0, 4))
    r = DistanceVector.from_array(rng.uniform(0.5, 2.0, 6))
    mult = recover_multipliers(r, m)
    grid = np.linspace(-3.0, 3.0, 61)
    best = min(stationarity_residual(r, m, lam, sig) for lam in grid for sig in grid)
    assert mult.stationarity_residual <= best + 1e-12


def test_rank_deficient_multiplier_system(monkeypatch):
    from engine import solver
    r = DistanceVector(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    m = MassVector(1.0, 1.0, 1.0, 1.0)
    # ∇P параллелен M∇I = (1, ..., 1)
    monkeypatch.setattr(solver, "grad_P", lambda r: 2.0 * np.ones(6))
    with pytest.raises(RankDeficientError):
        recover_multipliers(r, m)


def test_hessian_structure(square_r, unit_masses):
    h = hessian_L(square_r, unit_masses, Multipliers(0.5, 0.0, 0.0))
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    h = hessian_L(square_r, unit_masses, Multipliers(LAMBDA_SQUARE, SIGMA_SQUARE, 0.0))
    assert h[0, 5] == pytest.approx(SIGMA_SQUARE)
    assert h[1, 4] == pytest.approx(-SIGMA_SQUARE)
    assert h[2, 3] == pytest.approx(SIGMA_SQUARE)
    assert np.allclose(h, h.T)


def test_principal_minors():
    assert principal_minors(np.eye(6)) == pytest.approx((1, 1, 1, 1, 1, 1))
    a = np.random.default_rng(1).standard_normal((6, 6))
    h = a @ a.T + np.eye(6)
    assert principal_minors(h)[-1] == pytest.approx(np.linalg.det(h), rel=1e-12)


def test_square_minors_and_a_terms(square_r, unit_masses):
    mult = recover_multipliers(square_r, unit_masses)
    minors = principal_minors(hessian_L(square_r, unit_masses, mult))
    assert minors[0] == pytest.approx(LAMBDA_SQUARE + 2.0, rel=1e-12)
    terms = a_terms(square_r, unit_masses, mult)
    assert terms.on_shell_valid
    assert terms.raw[0] == pytest.approx(3 * (2 * LAMBDA_SQUARE + 1), rel=1e-10)
    assert terms.raw[2] == pytest.approx(14.4852814, rel=1e-8)
    assert terms.raw == pytest.approx(terms.on_shell, rel=1e-10)


def test_closed_form_minors_match_determinants(trapezoid_record):
    rec = trapezoid_record
    direct = principal_minors(hessian_L(rec.r_star, rec.masses, rec.multipliers))
    closed = minor_formulas(rec.r_star, rec.masses, rec.multipliers)
    assert closed == pytest.approx(direct, rel=1e-8)


def test_dziobek_residual(square_r):
    assert dziobek_residual(square_r, LAMBDA_SQUARE) <= 1e-12
    assert dziobek_residual(square_r, 0.0) == pytest.approx(0.875)
    equal = DistanceVector(1.3, 1.3, 1.3, 1.3, 1.3, 1.3)
    assert dziobek_residual(equal, 0.42) == 0.0


def test_sigma_sq_agree_at_solution(trapezoid_record):
    rec = trapezoid_record
    values = sigma_sq_values(rec.r_star, rec.masses, rec.multipliers.lambda_)
    scale = max(rec.multipliers.sigma ** 2, 1e-300)
    assert (max(values) - min(values)) / scale <= 1e-9
    assert max(rec.sigma_sq_residuals) <= 1e-9


def test_classification_threshold(square_record):
    assert classify_cocircular(square_record, 1e-6)
    assert classify_cocircular(square_record, math.inf)
    tilted = replace(square_record, k_value=0.5)
    assert not classify_cocircular(tilted, 1e-6)
    assert classify_cocircular(tilted, math.inf)


def test_negated_sigma_fails_stationarity_only(square_record, config):
    mult = square_record.multipliers
    flipped = replace(square_record, multipliers=Multipliers(mult.lambda_, -mult.sigma, mult.stationarity_residual))
    report = certify_minimum(flipped, config)
    assert not report.checks["stationarity"].passed
    assert report.checks["sigma_sq"].passed
    assert report.checks["minors_positive"].passed


def test_non_critical_point_fails_stationarity(config, unit_masses):
    r = normalize_I(DistanceVector(1.0, 1.3, 1.1, 0.9, 1.4, 1.0), unit_masses)
    rec = replace(minimize_U(unit_masses, SolverOptions.from_config(config, starts=1)), r_star=r)
    report = certify_minimum(rec, config)
    assert not report.checks["stationarity"].passed


def test_multistart_is_deterministic(config):
    opts = SolverOptions.from_config(config, starts=4, seed=7)
    m = MassVector(2.0, 2.0, 1.0, 1.0)
    a, b = minimize_U(m, opts), minimize_U(m, opts)
    assert a == b
    assert a.metadata == b.metadata


def test_descent_from_random_start_reaches_same_point(config):
    m = MassVector(3.0, 1.0, 2.0, 1.0)
    opts = SolverOptions.from_config(config)
    runs = [descend(m, sample_interior(s), opts) for s in (1, 2, 3)]
    assert all(run.converged for run in runs)
    rs = [p_to_r(vw_to_p(VWPoint.from_array(run.x)), m).as_array() for run in runs]
    assert np.max(np.abs(rs[0] - rs[1])) <= 1e-6
    assert np.max(np.abs(rs[0] - rs[2])) <= 1e-6


def test_converged_records_have_positive_definite_hessians(config):
    rng = np.random.default_rng(5)
    opts = SolverOptions.from_config(config, starts=2)
    for _ in range(5):
        m = MassVector.from_array(np.exp(rng.uniform(math.log(0.2), math.log(5.0), 4)))
        rec = minimize_U(m, opts)
        assert rec.converged
        assert rec.multipliers.lambda_ > 0.0
        hessian = hessian_L(rec.r_star, rec.masses, rec.multipliers)
        assert min(rec.minors) > 0.0
        assert is_positive_definite(hessian)
        assert rec.dziobek_residual <= 1e-9


def test_distinct_clusters_raise_alarm(config, monkeypatch):
    from engine import solver
    real = solver.descend
    calls = {"n": 0}

    def shifted(m, start, opts):
        run = real(m, start, opts)
        calls["n"] += 1
        if calls["n"] == 2:
            # второй старт "сходится" в другую точку
            x = run.x.copy()
            x[:3] = np.array([0.8, 0.0, 0.6])
            return replace(run, x=x)
        return run

    monkeypatch.setattr(solver, "descend", shifted)
    with pytest.raises(UniquenessAlarm):
        minimize_U(MassVector(2.0, 2.0, 1.0, 1.0), SolverOptions.from_config(config, starts=3))


def test_lagrangian_vanishing_constraints(square_r, unit_masses):
    # на M+ лагранжиан равен потенциалу
    assert lagrangian_L(square_r, unit_masses, 0.7, 0.3) == pytest.approx(4.0 + math.sqrt(2.0), rel=1e-14)
    assert K_term(square_r) == pytest.approx(0.0, abs=1e-15)


def test_chart_tolerances_come_from_config(config):
    config["chart"]["region_tol"] = 1e-6
    config["chart"]["interior_margin"] = 1e-3
    opts = SolverOptions.from_config(config)
    assert opts.region_tol == 1e-6
    assert opts.interior_margin == 1e-3
    assert SolverOptions.from_config(config, region_tol=1e-9).region_tol == 1e-9


def test_spread_is_pairwise(unit_masses):
    points = [sample_interior(seed, margin=0.05).as_array() for seed in (1, 2, 3)]
    rs = [p_to_r(vw_to_p(VWPoint.from_array(x)), unit_masses) for x in points]
    pairs = [symmetric_distance(rs[i], rs[j], unit_masses) for i, j in ((0, 1), (0, 2), (1, 2))]
    assert pairwise_spread(points, unit_masses) == pytest.approx(max(pairs), rel=1e-12)
    assert pairwise_spread(points[::-1], unit_masses) == pytest.approx(max(pairs), rel=1e-12)
    assert pairwise_spread(points[:1], unit_masses) == 0.0

"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Минимум U на M+ = {I = 1, P = 0}: спуск по S²×S² в координатах (v, w),
множители Лагранжа, гессиан лагранжиана и сертификат невырожденного минимума.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
import scipy.linalg

from core.chart import (P_FROM_X, RNG_ALGORITHM, SQUARE_VW, VWPoint, p_to_r, retract,
                        sample_interior, sphere_residuals, vw_to_p)
from core.config import load_config
from core.errors import (DegeneratePointError, RankDeficientError, SolverError,
                         UniquenessAlarm)
from core.geometry import (DistanceVector, MassVector, ScalarReport, grad_I, grad_P,
                           grad_U, in_D, moment_I, potential_U, ptolemy_P, scalar_report,
                           symmetric_distance)

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolverOptions:
    starts: int = 8
    seed: int = 0
    max_iterations: int = 500
    grad_tol: float = 1e-11
    constraint_tol: float = 1e-12
    cluster_tol: float = 1e-6
    cocircular_tol: float = 1e-6
    newton_threshold: float = 1.0
    armijo: float = 1e-4
    max_backtracks: int = 60
    interior_margin: float = 1e-4
    max_draws: int = 1_000_000
    region_tol: float = 1e-12

    @classmethod
    def from_config(cls, config=None, **overrides):
        config = config or load_config()
        s = config["solver"]
        values = dict(
            starts=int(s["starts"]),
            seed=int(s["seed"]),
            max_iterations=int(s["max_iterations"]),
            grad_tol=float(s["grad_tol"]),
            constraint_tol=float(s["constraint_tol"]),
            cluster_tol=float(s["cluster_tol"]),
            cocircular_tol=float(s["cocircular_tol"]),
            newton_threshold=float(s["newton_threshold"]),
            armijo=float(s["armijo"]),
            max_backtracks=int(s["max_backtracks"]),
            interior_margin=float(config["chart"]["interior_margin"]),
            max_draws=int(config["chart"]["max_draws"]),
            region_tol=float(config["chart"]["region_tol"]),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class Multipliers:
    lambda_: float
    sigma: float
    stationarity_residual: float


@dataclass(frozen=True)
class ATerms:
    raw: tuple
    on_shell: tuple
    on_shell_valid: bool


@dataclass(frozen=True)
class SolveRecord:
    masses: MassVector
    r_star: DistanceVector
    chart_point: VWPoint
    multipliers: Multipliers
    scalars: ScalarReport
    minors: tuple
    a_terms: tuple
    dziobek_residual: float
    sigma_sq_residuals: tuple
    iterations: int
    converged: bool
    is_cocircular: bool
    k_value: float
    metadata: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CertCheck:
    passed: bool
    value: float
    threshold: float


@dataclass(frozen=True)
class CertReport:
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failed(self):
        return [name for name, c in self.checks.items() if not c.passed]


@dataclass(frozen=True)
class DescentResult:
    x: np.ndarray
    U: float
    grad_norm: float
    iterations: int
    converged: bool


# ============================================================================
# ЦЕЛЕВАЯ ФУНКЦИЯ В КООРДИНАТАХ (v, w)
# ============================================================================

def potential_weights(m: MassVector):
    """U = Σ k_ij / p_ij"""
    return m.products() ** 1.5 / math.sqrt(2.0 * m.M)


def _objective(x, k):
    p = P_FROM_X @ x
    if np.any(p <= 0.0):
        return math.inf
    return float(np.sum(k / p))


def _euclid_grad(x, k):
    p = P_FROM_X @ x
    return P_FROM_X.T @ (-k / p ** 2)


def _euclid_hess(x, k):
    p = P_FROM_X @ x
    return P_FROM_X.T @ np.diag(2.0 * k / p ** 3) @ P_FROM_X


def _tangent_basis(x):
    basis = np.zeros((6, 4))
    basis[:3, :2] = scipy.linalg.null_space(x[None, :3])
    basis[3:, 2:] = scipy.linalg.null_space(x[None, 3:])
    return basis


def _riemannian_hessian(x, k, basis, g_e):
    curvature = np.diag([x[:3] @ g_e[:3]] * 2 + [x[3:] @ g_e[3:]] * 2)
    return basis.T @ _euclid_hess(x, k) @ basis - curvature


def _line_search(x, f, g, d, basis, k, opts, alpha):
    slope = float(g @ d)
    slack = 10.0 * _EPS * abs(f)
    for _ in range(opts.max_backtracks):
        x_new = retract(x + alpha * (basis @ d))
        f_new = _objective(x_new, k)
        # f_new = inf за границей M+: шаг урезается
        if f_new <= f + opts.armijo * alpha * slope + slack:
            return x_new, f_new
        alpha *= 0.5
    return None


def descend(m: MassVector, start: VWPoint, opts: SolverOptions) -> DescentResult:
    """Спуск от одной стартовой точки в области E"""
    k = potential_weights(m)
    x = retract(start.as_array())
    f = _objective(x, k)
    if not math.isfinite(f):
        raise DegeneratePointError(f"start point on the boundary of M+: {x.tolist()}")

    converged = False
    gnorm = math.inf
    iterations = 0
    for iterations in range(opts.max_iterations + 1):
        g_e = _euclid_grad(x, k)
        basis = _tangent_basis(x)
        g = basis.T @ g_e
        gnorm = float(np.linalg.norm(g))
        if gnorm <= opts.grad_tol * max(1.0, abs(f)) and \
                max(sphere_residuals(VWPoint.from_array(x))) <= opts.constraint_tol:
            converged = True
            break
        if iterations == opts.max_iterations:
            break

        step = None
        if gnorm <= opts.newton_threshold * max(1.0, abs(f)):
            try:
                factor = scipy.linalg.cho_factor(_riemannian_hessian(x, k, basis, g_e))
                d = -scipy.linalg.cho_solve(factor, g)
                step = _line_search(x, f, g, d, basis, k, opts, 1.0)
            except np.linalg.LinAlgError:
                step = None
        if step is None:
            step = _line_search(x, f, g, -g, basis, k, opts, min(1.0, 0.5 / gnorm))
        if step is None:
            logger.debug(f"[РЕШАТЕЛЬ] застой на итерации {iterations}, |g| = {gnorm:.3e}")
            break
        x, f = step

    return DescentResult(x=x, U=f, grad_norm=gnorm, iterations=iterations, converged=converged)


# ============================================================================
# МНОЖИТЕЛИ, ГЕССИАН, МИНОРЫ
# ============================================================================

def lagrangian_L(r: DistanceVector, m: MassVector, lambda_, sigma) -> float:
    return potential_U(r, m) + lambda_ * m.M * (moment_I(r, m) - 1.0) + sigma * ptolemy_P(r)


def grad_L(r: DistanceVector, m: MassVector, lambda_, sigma):
    return grad_U(r, m) + lambda_ * m.M * grad_I(r, m) + sigma * grad_P(r)


def stationarity_residual(r: DistanceVector, m: MassVector, lambda_, sigma) -> float:
    return float(np.linalg.norm(grad_L(r, m, lambda_, sigma)))


def recover_multipliers(r: DistanceVector, m: MassVector) -> Multipliers:
    """λ, σ из шести уравнений ∇L = 0 методом наименьших квадратов"""
    a = np.column_stack([m.M * grad_I(r, m), grad_P(r)])
    b = -grad_U(r, m)
    if np.linalg.matrix_rank(a) < 2:
        raise RankDeficientError(f"multiplier system is rank deficient at r = {r.as_array().tolist()}")
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    lambda_, sigma = float(solution[0]), float(solution[1])
    return Multipliers(lambda_, sigma, stationarity_residual(r, m, lambda_, sigma))


def hessian_L(r: DistanceVector, m: MassVector, mult: Multipliers):
    f = m.products() * (2.0 * r.as_array() ** -3 + mult.lambda_)
    s = mult.sigma
    return np.diag(f) + np.fliplr(np.diag([s, -s, s, s, -s, s]))


def principal_minors(hessian):
    hessian = np.asarray(hessian, dtype=float)
    return tuple(float(np.linalg.det(hessian[:k, :k])) for k in range(1, 7))


def is_positive_definite(hessian) -> bool:
    try:
        scipy.linalg.cholesky(np.asarray(hessian, dtype=float), lower=True)
        return True
    except np.linalg.LinAlgError:
        return False


def sigma_sq_values(r: DistanceVector, m: MassVector, lambda_):
    """Три выражения для σ²: пары (12,34), (14,23), (13,24)"""
    c = r.as_array() ** -3 - lambda_
    mp = float(np.prod(m.as_array()))
    return (mp * c[0] * c[5], mp * c[2] * c[3], mp * c[1] * c[4])


def _sigma_scale(m: MassVector, mult: Multipliers):
    return max(mult.sigma ** 2, float(np.prod(m.as_array())) * mult.lambda_ ** 2, 1e-300)


def sigma_sq_residuals(r: DistanceVector, m: MassVector, mult: Multipliers):
    """Относительные отклонения трёх σ² от σ² записи"""
    scale = _sigma_scale(m, mult)
    return tuple(abs(s - mult.sigma ** 2) / scale for s in sigma_sq_values(r, m, mult.lambda_))


def a_terms(r: DistanceVector, m: MassVector, mult: Multipliers, tol=1e-9) -> ATerms:
    lam, s2 = mult.lambda_, mult.sigma ** 2
    c = r.as_array() ** 3
    mp = float(np.prod(m.as_array()))
    raw, on_shell = [], []
    for a, b in ((0, 5), (2, 3), (1, 4)):
        raw.append(mp * (lam ** 2 * c[a] * c[b] + 2 * lam * c[a] + 2 * lam * c[b] + 4) - c[a] * c[b] * s2)
        on_shell.append(3 * mp * (lam * c[a] + lam * c[b] + 1))
    valid = max(sigma_sq_residuals(r, m, mult)) <= tol
    return ATerms(tuple(raw), tuple(on_shell), valid)


def minor_formulas(r: DistanceVector, m: MassVector, mult: Multipliers):
    """Δ1..Δ6 в замкнутой форме через A0, A1, A2"""
    lam = mult.lambda_
    c12, c13, c14, c23, c24, c34 = r.as_array() ** 3
    m1, m2, m3, m4 = m.as_array()
    a0, a1, a2 = a_terms(r, m, mult).raw
    d1 = (lam * c12 + 2) * m1 * m2 / c12
    d2 = d1 * (lam * c13 + 2) * m1 * m3 / c13
    d3 = d2 * (lam * c14 + 2) * m1 * m4 / c14
    d4 = m1 ** 2 * m2 * m3 / (c13 * c14 * c23) * (2 / c12 + lam) * (lam * c13 + 2) * a1
    d5 = m1 * m2 / (c13 * c14 * c23 * c24) * (2 / c12 + lam) * a1 * a2
    d6 = a0 * a1 * a2 / (c12 * c13 * c14 * c23 * c24 * c34)
    return (d1, d2, d3, d4, d5, d6)


def dziobek_residual(r: DistanceVector, lambda_) -> float:
    c = r.as_array() ** -3 - lambda_
    side = c[0] * c[5]
    return max(abs(side - c[1] * c[4]), abs(side - c[2] * c[3]))


def _dziobek_scale(r: DistanceVector, lambda_):
    return max(1.0, float(np.max(r.as_array() ** -3)) + abs(lambda_)) ** 2


def classify_cocircular(rec: SolveRecord, tol) -> bool:
    return abs(rec.k_value) <= tol * rec.r_star.scale ** 3


# ============================================================================
# ЗАПИСЬ И ПОИСК
# ============================================================================

def build_record(m: MassVector, x, iterations, converged, opts: SolverOptions, metadata=None) -> SolveRecord:
    vw = VWPoint.from_array(x)
    r = p_to_r(vw_to_p(vw, opts.region_tol), m)
    mult = recover_multipliers(r, m)
    hessian = hessian_L(r, m, mult)
    scalars = scalar_report(r, m)
    rec = SolveRecord(
        masses=m,
        r_star=r,
        chart_point=vw,
        multipliers=mult,
        scalars=scalars,
        minors=principal_minors(hessian),
        a_terms=a_terms(r, m, mult).raw,
        dziobek_residual=dziobek_residual(r, mult.lambda_),
        sigma_sq_residuals=sigma_sq_residuals(r, m, mult),
        iterations=int(iterations),
        converged=bool(converged),
        is_cocircular=False,
        k_value=scalars.K,
        metadata=dict(metadata or {}),
    )
    return replace(rec, is_cocircular=classify_cocircular(rec, opts.cocircular_tol))


def start_points(opts: SolverOptions):
    """Квадрат равных масс, затем случайные точки E"""
    points = [SQUARE_VW]
    if opts.starts > 1:
        seeds = np.random.SeedSequence(opts.seed).generate_state(opts.starts - 1)
        for s in seeds:
            points.append(sample_interior(int(s), opts.interior_margin, opts.max_draws))
    return points


def pairwise_spread(points, m: MassVector, region_tol=1e-12) -> float:
    """Наибольшее симметризованное расстояние между любыми двумя точками карты"""
    rs = [p_to_r(vw_to_p(VWPoint.from_array(x), region_tol), m) for x in points]
    spread = 0.0
    for i, j in combinations(range(len(rs)), 2):
        spread = max(spread, symmetric_distance(rs[i], rs[j], m))
    return spread


def minimize_U(m: MassVector, opts: SolverOptions = None) -> SolveRecord:
    opts = opts or SolverOptions.from_config()
    runs = []
    for index, start in enumerate(start_points(opts)):
        try:
            runs.append((index, descend(m, start, opts)))
        except DegeneratePointError as e:
            logger.warning(f"[РЕШАТЕЛЬ] старт {index} отвергнут: {e}")
    if not runs:
        raise SolverError("all start points rejected")

    converged = [(i, run) for i, run in runs if run.converged]
    pool = converged or runs
    best_index, best = min(pool, key=lambda item: (item[1].U, item[0]))

    spread = 0.0
    if len(converged) > 1:
        spread = pairwise_spread([run.x for _, run in converged], m, opts.region_tol)
        if spread > opts.cluster_tol:
            raise UniquenessAlarm(
                f"starts converged to distinct points (spread {spread:.3e} > {opts.cluster_tol:.1e})"
            )

    metadata = {
        "rng": RNG_ALGORITHM,
        "seed": opts.seed,
        "starts": opts.starts,
        "converged_starts": len(converged),
        "start_index": best_index,
        "cluster_spread": spread,
    }
    rec = build_record(m, best.x, best.iterations, best.converged, opts, metadata)
    if rec.converged:
        logger.info(f"[РЕШАТЕЛЬ] m = {m.as_array().tolist()}: U* = {rec.scalars.U:.12f}, "
                    f"итераций {rec.iterations}, K = {rec.k_value:.3e}")
    else:
        logger.warning(f"[РЕШАТЕЛЬ] нет сходимости за {opts.max_iterations} итераций, |g| = {best.grad_norm:.3e}")
    return rec


# ============================================================================
# СЕРТИФИКАТ
# ============================================================================

def certify_minimum(rec: SolveRecord, config=None) -> CertReport:
    """Проверки невырожденного минимума U|M+ по данным записи"""
    config = config or load_config()
    tol = config["certify"]
    in_d_tol = config["geometry"]["in_D_tol"]
    r, m, mult = rec.r_star, rec.masses, rec.multipliers
    U = potential_U(r, m)

    checks = {}
    checks["converged"] = CertCheck(bool(rec.converged), float(rec.converged), 1.0)
    checks["lambda_positive"] = CertCheck(mult.lambda_ > 0.0, mult.lambda_, 0.0)

    hessian = hessian_L(r, m, mult)
    minors = principal_minors(hessian)
    checks["minors_positive"] = CertCheck(min(minors) > 0.0, min(minors), 0.0)
    pd = is_positive_definite(hessian)
    checks["cholesky_agrees"] = CertCheck(pd == (min(minors) > 0.0), float(pd), 1.0)

    constraint = max(abs(moment_I(r, m) - 1.0), abs(ptolemy_P(r)))
    checks["constraints"] = CertCheck(constraint <= in_d_tol, constraint, in_d_tol)
    if rec.is_cocircular:
        # вписанный минимум обязан быть плоской конфигурацией
        checks["realizable"] = CertCheck(in_D(r, m, config=config), abs(rec.k_value), in_d_tol)

    stat = stationarity_residual(r, m, mult.lambda_, mult.sigma)
    stat_tol = tol["stationarity_tol"] * max(1.0, U)
    checks["stationarity"] = CertCheck(stat <= stat_tol, stat, stat_tol)

    dz = dziobek_residual(r, mult.lambda_)
    dz_tol = tol["dziobek_tol"] * _dziobek_scale(r, mult.lambda_)
    checks["dziobek"] = CertCheck(dz <= dz_tol, dz, dz_tol)

    s2 = max(sigma_sq_residuals(r, m, mult))
    checks["sigma_sq"] = CertCheck(s2 <= tol["sigma_sq_tol"], s2, tol["sigma_sq_tol"])

    # Эйлер: r·∇U = −U, r·∇I = 2I, r·∇P = 2P ⇒ λ = U/(2M) в критической точке
    virial = abs(mult.lambda_ - U / (2.0 * m.M))
    virial_tol = tol["virial_tol"] * max(1.0, abs(mult.lambda_))
    checks["virial"] = CertCheck(virial <= virial_tol, virial, virial_tol)

    report = CertReport(checks)
    if not report.passed:
        logger.warning(f"[СЕРТИФИКАТ] не пройдено: {', '.join(report.failed())}")
    return report

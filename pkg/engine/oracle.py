"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Независимые проверки: декартовы уравнения центральной конфигурации,
конечные разности и autograd, радиус описанной окружности, вложения,
поиск второго минимума мультистартом.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import torch

from core.chart import P_FROM_X, SQUARE_VW, VWPoint, p_to_r, retract, sample_interior_batch, vw_to_p
from core.config import default_jobs, load_config
from core.errors import DegeneratePointError, NonRealizableError, UniquenessAlarm
from core.geometry import (PAIRS, DistanceVector, MassVector, potential_U, ptolemy_P,
                           symmetric_distance)

from .solver import CertCheck, SolverOptions, descend, potential_weights

logger = logging.getLogger(__name__)

# Точка на ∂M+ (p12 = 0), к которой ведёт луч boundary_ray
BOUNDARY_TARGET = VWPoint((0.6, 0.0, 0.8), (-0.6, 0.8, 0.0))


@dataclass(frozen=True)
class PlanarConfig:
    q: tuple
    m: MassVector

    @classmethod
    def from_array(cls, q, m):
        q = np.asarray(q, dtype=float).reshape(4, 2)
        return cls(tuple((float(x), float(y)) for x, y in q), m)

    def positions(self):
        return np.array(self.q, dtype=float)

    def center_of_mass(self):
        w = self.m.as_array()
        return w @ self.positions() / self.m.M

    def distances(self) -> DistanceVector:
        q = self.positions()
        return DistanceVector.from_array([np.linalg.norm(q[i] - q[j]) for i, j in PAIRS])

    def rotated(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        return PlanarConfig.from_array(self.positions() @ np.array([[c, s], [-s, c]]), self.m)

    def centered(self):
        return PlanarConfig.from_array(self.positions() - self.center_of_mass(), self.m)


# ============================================================================
# ГЕОМЕТРИЯ ТРЕУГОЛЬНИКОВ И ОКРУЖНОСТИ
# ============================================================================

def heron_area(a, b, c):
    """Формула Герона в устойчивой форме с упорядоченными сторонами"""
    a, b, c = sorted((float(a), float(b), float(c)), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(prod, 0.0))


def triangle_circumradius(a, b, c):
    area = heron_area(a, b, c)
    if area <= 0.0:
        raise NonRealizableError("degenerate triangle has no circumcircle")
    return a * b * c / (4.0 * area)


def circumradius(r: DistanceVector, rtol=1e-9) -> float:
    """r_c по треугольнику 1-2-3, сверка с 1-2-4"""
    r_123 = triangle_circumradius(r.r12, r.r13, r.r23)
    r_124 = triangle_circumradius(r.r12, r.r14, r.r24)
    if abs(r_123 - r_124) > rtol * r_123:
        raise NonRealizableError(
            f"triangles 123 and 124 have different circumradii ({r_123:.12g} vs {r_124:.12g})")
    return r_123


def circumcenter(a, b, c):
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    sa, sb, sc = a @ a, b @ b, c @ c
    ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
    uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
    return np.array([ux, uy])


def embed_cyclic(r: DistanceVector, m: MassVector, rtol=1e-9) -> PlanarConfig:
    """Вершины на окружности в последовательном порядке, центр масс в нуле"""
    scale = r.scale
    if abs(ptolemy_P(r)) > rtol * scale ** 2:
        raise NonRealizableError(f"Ptolemy relation fails (P = {ptolemy_P(r):.3e}): not co-circular")

    # 1 в начале координат, 3 на оси x, 2 выше диагонали, 4 ниже
    d = r.r13
    x2 = (r.r12 ** 2 - r.r23 ** 2 + d ** 2) / (2.0 * d)
    x4 = (r.r14 ** 2 - r.r34 ** 2 + d ** 2) / (2.0 * d)
    h2, h4 = r.r12 ** 2 - x2 ** 2, r.r14 ** 2 - x4 ** 2
    if h2 < -rtol * scale ** 2 or h4 < -rtol * scale ** 2:
        raise NonRealizableError("triangle inequality violated: distances are not planar")
    q = np.array([[0.0, 0.0], [x2, math.sqrt(max(h2, 0.0))], [d, 0.0], [x4, -math.sqrt(max(h4, 0.0))]])

    r24 = float(np.linalg.norm(q[1] - q[3]))
    if abs(r24 - r.r24) > rtol * scale:
        raise NonRealizableError(f"r24 not reproduced: {r24:.12g} vs {r.r24:.12g}")
    return PlanarConfig.from_array(q, m).centered()


def mds_embed(r: DistanceVector, m: MassVector) -> PlanarConfig:
    """Классическое многомерное шкалирование в R²"""
    d2 = np.zeros((4, 4))
    for k, (i, j) in enumerate(PAIRS):
        d2[i, j] = d2[j, i] = r.as_array()[k] ** 2
    j = np.eye(4) - np.full((4, 4), 0.25)
    b = -0.5 * j @ d2 @ j
    values, vectors = np.linalg.eigh(b)
    top = np.argsort(values)[::-1][:2]
    q = vectors[:, top] * np.sqrt(np.maximum(values[top], 0.0))
    return PlanarConfig.from_array(q, m).centered()


def cartesian_inertia(cfg: PlanarConfig) -> float:
    """½ Σ m_i |q_i − c|², совпадает с I(r) по тождеству Лагранжа"""
    q = cfg.positions() - cfg.center_of_mass()
    return 0.5 * float(cfg.m.as_array() @ np.sum(q ** 2, axis=1))


# ============================================================================
# ДЕКАРТОВЫ УРАВНЕНИЯ
# ============================================================================

def _forces(cfg: PlanarConfig):
    q = cfg.positions()
    w = cfg.m.as_array()
    forces = np.zeros((4, 2))
    for i, j in PAIRS:
        d = q[j] - q[i]
        f = w[i] * w[j] * d / np.linalg.norm(d) ** 3
        forces[i] += f
        forces[j] -= f
    return forces


def fit_lambda_q(cfg: PlanarConfig) -> float:
    """λ_q из наименьших квадратов по F_i = λ_q m_i q_i"""
    mq = cfg.m.as_array()[:, None] * cfg.positions()
    return float(np.sum(mq * _forces(cfg)) / np.sum(mq * mq))


def cartesian_cc_residual(cfg: PlanarConfig, lambda_q=None, fit=False) -> float:
    if fit or lambda_q is None:
        lambda_q = fit_lambda_q(cfg)
    mq = cfg.m.as_array()[:, None] * cfg.positions()
    return float(np.max(np.linalg.norm(_forces(cfg) - lambda_q * mq, axis=1)))


def cartesian_check(rec, config=None) -> CertCheck:
    """Сквозная проверка записи в плоскости"""
    config = config or load_config()
    tol = config["certify"]["cartesian_tol"]
    if rec.is_cocircular:
        residual = cartesian_cc_residual(embed_cyclic(rec.r_star, rec.masses), fit=True)
        return CertCheck(residual <= tol, residual, tol)
    # не вписанная точка: лучшая плоская раскладка не должна быть ц.к.
    residual = cartesian_cc_residual(mds_embed(rec.r_star, rec.masses), fit=True)
    return CertCheck(residual > 1e-3, residual, 1e-3)


# ============================================================================
# ПРОИЗВОДНЫЕ
# ============================================================================

def _steps(r: DistanceVector, h):
    return h * np.maximum(1.0, r.as_array())


def fd_gradient(f, r: DistanceVector, h=1e-5):
    """Центральные разности; шаг h·max(1, r_ij)"""
    x0 = r.as_array()
    steps = _steps(r, h)
    grad = np.zeros(6)
    for k in range(6):
        x = x0.copy()
        x[k] = x0[k] + steps[k]
        fplus = f(DistanceVector.from_array(x))
        x[k] = x0[k] - steps[k]
        fminus = f(DistanceVector.from_array(x))
        grad[k] = (fplus - fminus) / (2.0 * steps[k])
    return grad


def fd_hessian(f, r: DistanceVector, h=1e-4):
    x0 = r.as_array()
    steps = _steps(r, h)

    def at(i, si, j, sj):
        x = x0.copy()
        x[i] += si * steps[i]
        x[j] += sj * steps[j]
        return f(DistanceVector.from_array(x))

    hess = np.zeros((6, 6))
    for i in range(6):
        for j in range(i, 6):
            value = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) \
                / (4.0 * steps[i] * steps[j])
            hess[i, j] = hess[j, i] = value
    return hess


def _torch_r(r: DistanceVector):
    return torch.tensor(r.as_array(), dtype=torch.float64, requires_grad=True)


def _torch_det(rows):
    """Разложение по первой строке: производные точны и на вырожденной матрице"""
    if len(rows) == 1:
        return rows[0][0]
    total = 0.0
    for k, entry in enumerate(rows[0]):
        if isinstance(entry, float) and entry == 0.0:
            continue
        minor = [row[:k] + row[k + 1:] for row in rows[1:]]
        total = total + (-1) ** k * entry * _torch_det(minor)
    return total


def _torch_cayley_menger(t):
    d = t ** 2
    rows = [
        [0.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, d[0], d[1], d[2]],
        [1.0, d[0], 0.0, d[3], d[4]],
        [1.0, d[1], d[3], 0.0, d[5]],
        [1.0, d[2], d[4], d[5], 0.0],
    ]
    return _torch_det(rows)


def autograd_grad_H(r: DistanceVector):
    """∇H через autograd в float64"""
    t = _torch_r(r)
    _torch_cayley_menger(t).backward()
    return t.grad.detach().numpy().copy()


def autograd_grad_U(r: DistanceVector, m: MassVector):
    t = _torch_r(r)
    mm = torch.tensor(m.products(), dtype=torch.float64)
    torch.sum(mm / t).backward()
    return t.grad.detach().numpy().copy()


def autograd_hessian_L(r: DistanceVector, m: MassVector, lambda_, sigma):
    mm = torch.tensor(m.products(), dtype=torch.float64)
    total = m.M

    def lagrangian(t):
        U = torch.sum(mm / t)
        I = torch.sum(mm * t ** 2) / (2.0 * total)
        P = t[0] * t[5] + t[2] * t[3] - t[1] * t[4]
        return U + lambda_ * total * (I - 1.0) + sigma * P

    x = torch.tensor(r.as_array(), dtype=torch.float64)
    return torch.autograd.functional.hessian(lagrangian, x).numpy().copy()


# ============================================================================
# ГРАНИЦА M+
# ============================================================================

@dataclass(frozen=True)
class BoundaryRay:
    t: tuple
    U: tuple

    @property
    def monotone_tail(self):
        tail = np.asarray(self.U[len(self.U) // 2:])
        return bool(np.all(np.diff(tail) > 0.0))


def boundary_ray(m: MassVector, start: VWPoint = SQUARE_VW, target: VWPoint = BOUNDARY_TARGET, n=12):
    """U вдоль пути start → target при t = 1 − 10^-k"""
    x0, x1 = start.as_array(), target.as_array()
    if np.min(P_FROM_X @ x1) > 0.0:
        raise DegeneratePointError("target is not on the boundary of M+")
    k = potential_weights(m)
    ts, values = [], []
    for e in range(1, n + 1):
        t = 1.0 - 10.0 ** (-e)
        p = P_FROM_X @ retract((1.0 - t) * x0 + t * x1)
        ts.append(t)
        values.append(float(np.sum(k / p)))
    return BoundaryRay(tuple(ts), tuple(values))


# ============================================================================
# ЕДИНСТВЕННОСТЬ
# ============================================================================

@dataclass
class UniquenessReport:
    masses: MassVector
    n_starts: int
    seed: int
    cluster_count: int = 0
    cluster_U: list = field(default_factory=list)
    cluster_sizes: list = field(default_factory=list)
    representatives: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def alarm(self):
        return self.cluster_count > 1

    def check(self):
        if self.alarm:
            raise UniquenessAlarm(
                f"{self.cluster_count} clusters of minima for m = {self.masses.as_array().tolist()}", self)
        return self

    def to_dict(self):
        return {
            "masses": self.masses.as_array().tolist(),
            "n_starts": self.n_starts,
            "seed": self.seed,
            "cluster_count": self.cluster_count,
            "cluster_U": list(self.cluster_U),
            "cluster_sizes": list(self.cluster_sizes),
            "representatives": [r.as_array().tolist() for r in self.representatives],
            "failures": list(self.failures),
        }


def _one_start(args):
    m, start, opts = args
    try:
        return descend(m, start, opts), None
    except DegeneratePointError as e:
        return None, str(e)


def multistart_uniqueness(m: MassVector, n_starts, seed, opts: SolverOptions = None,
                          max_workers=None, cluster_tol=None) -> UniquenessReport:
    """n_starts независимых спусков и кластеризация концов"""
    opts = opts or SolverOptions.from_config()
    cluster_tol = opts.cluster_tol if cluster_tol is None else cluster_tol
    max_workers = max_workers or default_jobs()

    starts = sample_interior_batch(seed, n_starts, opts.interior_margin, opts.max_draws)
    tasks = [(m, VWPoint.from_array(x), opts) for x in starts]
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            runs = list(executor.map(_one_start, tasks))
    else:
        runs = [_one_start(task) for task in tasks]

    report = UniquenessReport(masses=m, n_starts=n_starts, seed=seed)
    for index, (run, error) in enumerate(runs):
        if run is None:
            report.failures.append(f"start {index}: {error}")
            continue
        if not run.converged:
            report.failures.append(f"start {index}: no convergence, |g| = {run.grad_norm:.3e}")
            continue
        r = p_to_r(vw_to_p(VWPoint.from_array(run.x), opts.region_tol), m)
        # жадно: первый представитель в пределах cluster_tol
        for c, rep in enumerate(report.representatives):
            if symmetric_distance(rep, r, m) <= cluster_tol:
                report.cluster_sizes[c] += 1
                break
        else:
            report.representatives.append(r)
            report.cluster_U.append(potential_U(r, m))
            report.cluster_sizes.append(1)
    report.cluster_count = len(report.representatives)

    if report.alarm:
        logger.error(f"[ОРАКУЛ] {report.cluster_count} кластера для m = {m.as_array().tolist()}")
    else:
        logger.info(f"[ОРАКУЛ] m = {m.as_array().tolist()}: кластеров {report.cluster_count}, "
                    f"отказов {len(report.failures)}")
    return report

"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Карты на M+: нормированные координаты p_ij и двойная сфера (v, w) ∈ S²×S².
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePointError, RegionViolationError, SamplerExhaustedError
from .geometry import DistanceVector, MassVector

logger = logging.getLogger(__name__)

# Генератор для сэмплера; записывается в метаданные решения
RNG_ALGORITHM = "numpy.random.PCG64"

# p = P_FROM_X @ x, x = (v1, v2, v3, w1, w2, w3), p в порядке (12, 13, 14, 23, 24, 34)
P_FROM_X = 0.5 * np.array([
    [1, 0, 0, 1, 0, 0],    # p12 = (v1 + w1)/2
    [0, 1, 0, 0, 1, 0],    # p13 = (v2 + w2)/2
    [0, 0, 1, 0, 0, 1],    # p14 = (v3 + w3)/2
    [0, 0, 1, 0, 0, -1],   # p23 = (v3 - w3)/2
    [0, -1, 0, 0, 1, 0],   # p24 = (w2 - v2)/2
    [1, 0, 0, -1, 0, 0],   # p34 = (v1 - w1)/2
], dtype=float)

# Обратное отображение: P_FROM_X^T P_FROM_X = I/2
X_FROM_P = 2.0 * P_FROM_X.T


@dataclass(frozen=True)
class PCoords:
    p12: float
    p13: float
    p14: float
    p23: float
    p24: float
    p34: float

    @classmethod
    def from_array(cls, values):
        return cls(*[float(x) for x in np.asarray(values, dtype=float).ravel()])

    def as_array(self):
        return np.array([self.p12, self.p13, self.p14, self.p23, self.p24, self.p34], dtype=float)

    def norm_sq(self):
        return float(np.sum(self.as_array() ** 2))


@dataclass(frozen=True)
class VWPoint:
    v: tuple
    w: tuple

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=float).ravel()
        return cls(tuple(float(a) for a in x[:3]), tuple(float(a) for a in x[3:]))

    def as_array(self):
        return np.array(self.v + self.w, dtype=float)


SQUARE_VW = VWPoint((1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0)), (0.0, 1.0, 0.0))


def _pair_scale(m: MassVector):
    """(m_i m_j / 2M)^{1/2} в порядке пар"""
    return np.sqrt(m.products() / (2.0 * m.M))


def r_to_p(r: DistanceVector, m: MassVector) -> PCoords:
    return PCoords.from_array(r.as_array() * _pair_scale(m))


def p_to_r(p: PCoords, m: MassVector) -> DistanceVector:
    values = p.as_array()
    if np.any(values <= 0.0):
        raise DegeneratePointError(f"boundary point of M+: p = {values.tolist()}")
    return DistanceVector.from_array(values / _pair_scale(m))


def p_to_vw(p: PCoords) -> VWPoint:
    return VWPoint.from_array(X_FROM_P @ p.as_array())


def vw_to_p(vw: VWPoint, tol=1e-12) -> PCoords:
    p = P_FROM_X @ vw.as_array()
    if np.any(p < -tol):
        raise RegionViolationError(f"point outside region E: p = {p.tolist()}")
    return PCoords.from_array(np.maximum(p, 0.0))


def in_region_E(vw: VWPoint) -> bool:
    v1, _, v3 = vw.v
    w1, w2, w3 = vw.w
    return v1 >= abs(w1) and v3 >= abs(w3) and w2 >= 0.0


def sphere_residuals(vw: VWPoint):
    x = vw.as_array()
    return abs(float(x[:3] @ x[:3]) - 1.0), abs(float(x[3:] @ x[3:]) - 1.0)


def retract(x) -> np.ndarray:
    """Ретракция на S²×S²: нормируем каждую тройку"""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x[:3] / np.linalg.norm(x[:3]), x[3:] / np.linalg.norm(x[3:])])


def ptolemy_p(p: PCoords, m: MassVector) -> float:
    """Птолемей в p-координатах; совпадает с P(r) при r = p_to_r(p)"""
    mm = m.as_array()
    factor = 2.0 * m.M / math.sqrt(float(np.prod(mm)))
    return factor * (p.p12 * p.p34 - p.p13 * p.p24 + p.p14 * p.p23)


# ============================================================================
# СЭМПЛЕР
# ============================================================================

def _draw_batch(rng, n):
    x = rng.standard_normal((n, 6))
    x[:, :3] /= np.linalg.norm(x[:, :3], axis=1, keepdims=True)
    x[:, 3:] /= np.linalg.norm(x[:, 3:], axis=1, keepdims=True)
    return x


def _accept(x, margin):
    p = x @ P_FROM_X.T
    return np.all(p > margin, axis=1)


def sample_interior(seed: int, margin=1e-4, max_draws=1_000_000, batch=4096) -> VWPoint:
    """Равномерно на S²×S² при условии E, все p_ij > margin"""
    rng = np.random.default_rng(seed)
    drawn = 0
    while drawn < max_draws:
        n = min(batch, max_draws - drawn)
        x = _draw_batch(rng, n)
        ok = np.flatnonzero(_accept(x, margin))
        drawn += n
        if ok.size:
            return VWPoint.from_array(x[ok[0]])
    raise SamplerExhaustedError(f"no interior point after {max_draws} draws (margin={margin})")


def sample_interior_batch(seed: int, n: int, margin=1e-4, max_draws=1_000_000, batch=4096) -> np.ndarray:
    """n точек E одним потоком генератора, массив (n, 6)"""
    rng = np.random.default_rng(seed)
    found = []
    count = drawn = 0
    while count < n and drawn < max_draws:
        size = min(batch, max_draws - drawn)
        x = _draw_batch(rng, size)
        drawn += size
        ok = x[_accept(x, margin)]
        found.append(ok)
        count += len(ok)
    if count < n:
        raise SamplerExhaustedError(f"{count} of {n} interior points after {max_draws} draws (margin={margin})")
    return np.concatenate(found)[:n]


def estimate_region_fraction(n=100_000, seed=0, margin=0.0) -> float:
    """Доля S²×S², попадающая в E (Монте-Карло)"""
    rng = np.random.default_rng(seed)
    fraction = float(np.mean(_accept(_draw_batch(rng, n), margin)))
    logger.info(f"[КАРТА] доля E в S²×S²: {fraction:.4f} (n={n})")
    return fraction

"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Обратная задача: по вписанному четырёхугольнику найти массы,
при которых он центральная конфигурация, или объяснить, почему таких нет.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.config import load_config
from core.errors import IndeterminateShapeError, InvalidInputError
from core.geometry import DistanceVector, MassVector, normalize_I

from .solver import grad_L, sigma_sq_values

logger = logging.getLogger(__name__)

# Знаки ∂P/∂r_ij в порядке (12, 13, 14, 23, 24, 34); партнёр пары ij есть противоположная kl
_SIGNS = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])
_PARTNER = np.array([5, 4, 3, 2, 1, 0])


@dataclass(frozen=True)
class CyclicShape:
    theta: tuple
    radius: float = 1.0

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        object.__setattr__(self, "theta", theta)
        if len(theta) != 4 or not all(math.isfinite(t) for t in theta):
            raise InvalidInputError("expected 4 finite angles")
        if not math.isfinite(self.radius) or self.radius <= 0.0:
            raise InvalidInputError(f"radius must be positive, got {self.radius}")
        if any(b <= a for a, b in zip(theta, theta[1:])):
            raise InvalidInputError("angles must be strictly increasing (coincident bodies)")
        if theta[0] < 0.0 or theta[3] >= 2.0 * math.pi:
            raise InvalidInputError("angles must lie in [0, 2π)")

    @classmethod
    def from_degrees(cls, angles, radius=1.0):
        return cls(tuple(math.radians(float(a)) for a in angles), radius)

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(tuple(data["theta"]), float(data.get("radius", 1.0)))
        except (KeyError, TypeError) as e:
            raise InvalidInputError(f"shape must be {{theta: [4 angles], radius}}: {e}") from e


@dataclass(frozen=True)
class DziobekLambda:
    lambda_a: float
    lambda_b: float
    compat_residual: float


@dataclass(frozen=True)
class InverseResult:
    feasible: bool
    masses: MassVector
    r: DistanceVector
    lambda_: float
    sigma: float
    lambda_a: float
    lambda_b: float
    compat_residual: float
    equation_residuals: tuple
    sigma_sq_spread: float
    rounds: int
    reason: str = ""

    def to_dict(self):
        return {
            "feasible": self.feasible,
            "reason": self.reason,
            "masses": None if self.masses is None else self.masses.as_array().tolist(),
            "r": self.r.as_array().tolist(),
            "lambda": self.lambda_,
            "sigma": self.sigma,
            "lambda_a": self.lambda_a,
            "lambda_b": self.lambda_b,
            "compat_residual": self.compat_residual,
            "equation_residuals": list(self.equation_residuals),
            "sigma_sq_spread": self.sigma_sq_spread,
            "rounds": self.rounds,
        }


def random_cyclic_shape(rng, min_gap=0.1, radius_range=(0.5, 2.0)) -> CyclicShape:
    """Четыре угла с зазором не меньше min_gap, включая переход через 2π"""
    while True:
        theta = np.sort(rng.uniform(0.0, 2.0 * math.pi, 4))
        gaps = np.diff(np.append(theta, theta[0] + 2.0 * math.pi))
        if gaps.min() >= min_gap:
            return CyclicShape(tuple(theta.tolist()), float(rng.uniform(*radius_range)))


def shape_to_distances(s: CyclicShape) -> DistanceVector:
    """Хорды: r_ij = 2R sin((θ_j − θ_i)/2)"""
    t = s.theta
    chords = [2.0 * s.radius * math.sin((t[j] - t[i]) / 2.0)
              for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))]
    return DistanceVector.from_array(chords)


def _linear_lambda(a, b, c, d):
    # (a−λ)(b−λ) = (c−λ)(d−λ) линейно по λ
    den = (a + b) - (c + d)
    if abs(den) <= 1e-14 * max(a + b, c + d):
        raise IndeterminateShapeError(
            "vanishing denominator in the Dziobek relation (equal sums of inverse cubes)")
    return (a * b - c * d) / den


def dziobek_lambda(r: DistanceVector) -> DziobekLambda:
    a12, a13, a14, a23, a24, a34 = r.as_array() ** -3
    lambda_a = _linear_lambda(a12, a34, a13, a24)
    lambda_b = _linear_lambda(a14, a23, a13, a24)
    return DziobekLambda(lambda_a, lambda_b, abs(lambda_a - lambda_b))


def _infeasible(reason, r, dz, rounds, lambda_=math.nan):
    logger.info(f"[ОБРАТНАЯ] нет масс: {reason}")
    return InverseResult(False, None, r, lambda_, math.nan, dz.lambda_a, dz.lambda_b,
                         dz.compat_residual, (), math.nan, rounds, reason)


def _mass_products(r: DistanceVector, lambda_):
    """m_i m_j при σ = 1: σ·s_ij·(r_kl/r_ij)/(r_ij⁻³ − λ)"""
    a = r.as_array()
    den = a ** -3 - lambda_
    if np.any(np.abs(den) <= 1e-12 * a ** -3):
        raise IndeterminateShapeError("λ coincides with some r_ij^-3")
    return _SIGNS * (a[_PARTNER] / a) / den


def masses_from_shape(r: DistanceVector, tol=None, config=None) -> InverseResult:
    """Массы (Σm = 4), при которых r критическая точка U на M+"""
    config = config or load_config()
    tol = config["inverse"]["compat_tol"] if tol is None else tol
    total = float(config["inverse"]["mass_total"])
    max_rounds = int(config["inverse"]["max_rounds"])

    masses = None
    sigma = math.nan
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        dz = dziobek_lambda(r)
        if dz.compat_residual > tol * max(1.0, abs(dz.lambda_a)):
            return _infeasible(f"incompatible Dziobek relations, |λa − λb| = {dz.compat_residual:.3e}", r, dz, rounds)
        lambda_ = 0.5 * (dz.lambda_a + dz.lambda_b)
        if lambda_ <= 0.0:
            return _infeasible(f"lambda = {lambda_:.6g} is not positive", r, dz, rounds, lambda_)

        q = _mass_products(r, lambda_)
        # знак σ выбирается так, чтобы m1m2 > 0
        sigma_sign = math.copysign(1.0, q[0])
        q = q * sigma_sign
        if np.any(q <= 0.0):
            k = int(np.argmin(q))
            name = ("m1m2", "m1m3", "m1m4", "m2m3", "m2m4", "m3m4")[k]
            return _infeasible(f"negative product {name} = {q[k]:.6g}", r, dz, rounds, lambda_)

        q12, q13, q14, q23, q24, q34 = q
        squares = np.array([q12 * q13 / q23, q12 * q23 / q13, q13 * q23 / q12, q14 * q24 / q12])
        raw = np.sqrt(squares)
        factor = total / float(raw.sum())
        candidate = MassVector.from_array(raw * factor)
        sigma = sigma_sign * factor ** 2

        rescaled = normalize_I(r, candidate)
        k = r.scale / rescaled.scale
        # r → r/k: λ и σ масштабируются как k³
        sigma *= k ** 3
        done = masses is not None and np.max(np.abs(candidate.as_array() - masses.as_array())) <= 1e-15 * total
        masses, r = candidate, rescaled
        if done:
            break

    dz = dziobek_lambda(r)
    lambda_ = 0.5 * (dz.lambda_a + dz.lambda_b)
    equations = np.abs(grad_L(r, masses, lambda_, sigma))
    s2 = sigma_sq_values(r, masses, lambda_)
    spread = (max(s2) - min(s2)) / max(sigma ** 2, 1e-300)
    logger.info(f"[ОБРАТНАЯ] массы {masses.as_array().tolist()} за {rounds} раунд(ов)")
    return InverseResult(True, masses, r, lambda_, sigma, dz.lambda_a, dz.lambda_b,
                         dz.compat_residual, tuple(float(e) for e in equations), spread, rounds)


def invert_shape(s: CyclicShape, tol=None, config=None) -> InverseResult:
    return masses_from_shape(shape_to_distances(s), tol, config)

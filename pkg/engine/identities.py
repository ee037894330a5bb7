"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Батарея тождеств: разложение Пеха, K = 0 на вписанных четырёхугольниках,
параллельность ∇H и ∇P, радиус описанной окружности, однородность, перенумерации.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.geometry import (DIHEDRAL_RELABELINGS, DistanceVector, MassVector, K_term, Q_term,
                           cayley_menger_H, grad_P, moment_I, potential_U, ptolemy_P, relabel,
                           volume_V)

from .inverse import random_cyclic_shape, shape_to_distances
from .oracle import autograd_grad_H, circumradius, fd_gradient

logger = logging.getLogger(__name__)

# Степени однородности: f(k r) = k^d f(r)
HOMOGENEITY = (
    ("U", -1, lambda r: potential_U(r, _UNIT)),
    ("I", 2, lambda r: moment_I(r, _UNIT)),
    ("P", 2, ptolemy_P),
    ("H", 6, cayley_menger_H),
    ("K", 3, K_term),
    ("Q", 4, Q_term),
    ("V", 3, volume_V),
)

_UNIT = MassVector(1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_residual: float
    threshold: float

    @property
    def passed(self):
        return math.isfinite(self.max_residual) and self.max_residual <= self.threshold


def _random_r(rng, n):
    return [DistanceVector.from_array(x) for x in rng.uniform(0.1, 3.0, (n, 6))]


def _cyclic(rng, n):
    return [shape_to_distances(random_cyclic_shape(rng)) for _ in range(n)]


def check_pech(rng, n):
    worst = 0.0
    for r in _random_r(rng, n):
        residual = abs(0.5 * cayley_menger_H(r) - (ptolemy_P(r) * Q_term(r) - K_term(r) ** 2))
        worst = max(worst, residual / (1.0 + r.scale) ** 8)
    return IdentityResult("pech", worst, 1e-9)


def check_known_Q():
    square = DistanceVector(1.0, math.sqrt(2.0), 1.0, 1.0, math.sqrt(2.0), 1.0)
    ones = DistanceVector(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    return IdentityResult("q_square_ones", max(abs(Q_term(square) - 8.0), abs(Q_term(ones) - 2.0)), 1e-12)


def check_cyclic_K(rng, n):
    worst = 0.0
    for r in _cyclic(rng, n):
        worst = max(worst, abs(K_term(r)) / r.scale ** 3, abs(ptolemy_P(r)) / r.scale ** 2)
    return IdentityResult("cyclic_K_P", worst, 1e-12)


def _parallel_deviation(grad_h, r):
    expected = 2.0 * Q_term(r) * grad_P(r)
    return float(np.max(np.abs(grad_h - expected)) / np.max(np.abs(expected)))


def check_gradient_parallel(rng, n):
    worst = 0.0
    for r in _cyclic(rng, n):
        worst = max(worst, _parallel_deviation(fd_gradient(cayley_menger_H, r), r))
    return IdentityResult("grad_H_parallel_fd", worst, 1e-6)


def check_gradient_parallel_autograd(rng, n):
    worst = 0.0
    for r in _cyclic(rng, n):
        worst = max(worst, _parallel_deviation(autograd_grad_H(r), r))
    return IdentityResult("grad_H_parallel_autograd", worst, 1e-9)


def check_circumradius(rng, n):
    worst = 0.0
    for r in _cyclic(rng, n):
        two_q = 2.0 * Q_term(r)
        worst = max(worst, abs(two_q - 4.0 / circumradius(r) ** 2 * np.prod(r.as_array())) / abs(two_q))
    return IdentityResult("circumradius", worst, 1e-9)


def check_homogeneity(rng, n):
    worst = 0.0
    for r in _random_r(rng, n):
        k = float(rng.uniform(0.5, 2.0))
        for _, degree, f in HOMOGENEITY:
            base = f(r)
            worst = max(worst, abs(f(r.scaled(k)) - k ** degree * base) / max(1.0, abs(k ** degree * base)))
    return IdentityResult("homogeneity", worst, 1e-9)


def check_relabel_signs(rng, n):
    worst = 0.0
    for r in _random_r(rng, n):
        K, P, H = K_term(r), ptolemy_P(r), cayley_menger_H(r)
        scale = (1.0 + r.scale)
        for perm, sign in DIHEDRAL_RELABELINGS:
            r2 = relabel(r, perm)
            worst = max(worst,
                        abs(K_term(r2) - sign * K) / scale ** 3,
                        abs(ptolemy_P(r2) - P) / scale ** 2,
                        abs(cayley_menger_H(r2) - H) / scale ** 6)
    return IdentityResult("relabel_signs", worst, 1e-12)


def run_battery(samples, seed):
    """Все тождества в фиксированном порядке"""
    rng = np.random.default_rng(seed)
    results = [
        check_pech(rng, samples),
        check_known_Q(),
        check_cyclic_K(rng, samples),
        check_gradient_parallel(rng, samples),
        check_gradient_parallel_autograd(rng, min(samples, 1000)),
        check_circumradius(rng, samples),
        check_homogeneity(rng, samples),
        check_relabel_signs(rng, samples),
    ]
    for res in results:
        status = "OK" if res.passed else "FAIL"
        logger.info(f"[ТОЖДЕСТВА] {res.name}: {res.max_residual:.3e} ≤ {res.threshold:.0e} {status}")
    return results


def format_table(results):
    lines = [f"{'identity':<28}{'max_residual':>16}{'threshold':>12}  status"]
    for res in results:
        lines.append(f"{res.name:<28}{res.max_residual:>16.3e}{res.threshold:>12.0e}  "
                     f"{'pass' if res.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"

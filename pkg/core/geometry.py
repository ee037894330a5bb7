"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0

Скалярные функции вектора взаимных расстояний: U, I, P, H, K, Q.
Нумерация последовательная: r13 и r24 это диагонали четырёхугольника.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

from .config import load_config
from .errors import InvalidInputError

# Порядок компонент вектора расстояний
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
PAIR_NAMES = ("r12", "r13", "r14", "r23", "r24", "r34")

# Четыре треугольника (тройки тел) в индексах PAIRS: (ij, jk, ik)
TRIANGLES = (
    (0, 3, 1),  # 1-2-3: r12, r23, r13
    (0, 4, 2),  # 1-2-4: r12, r24, r14
    (1, 5, 2),  # 1-3-4: r13, r34, r14
    (3, 5, 4),  # 2-3-4: r23, r34, r24
)


def _pair_index(i, j):
    i, j = min(i, j), max(i, j)
    return PAIRS.index((i, j))


@dataclass(frozen=True)
class DistanceVector:
    r12: float
    r13: float
    r14: float
    r23: float
    r24: float
    r34: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidInputError(f"distance {f.name} must be positive, got {value}")

    @classmethod
    def from_array(cls, values):
        values = [float(x) for x in np.asarray(values, dtype=float).ravel()]
        if len(values) != 6:
            raise InvalidInputError(f"expected 6 distances, got {len(values)}")
        return cls(*values)

    def as_array(self):
        return np.array([self.r12, self.r13, self.r14, self.r23, self.r24, self.r34], dtype=float)

    def scaled(self, k):
        return DistanceVector.from_array(k * self.as_array())

    @property
    def scale(self):
        return float(self.as_array().max())


@dataclass(frozen=True)
class MassVector:
    m1: float
    m2: float
    m3: float
    m4: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidInputError("masses must be positive")

    @classmethod
    def from_array(cls, values):
        values = [float(x) for x in np.asarray(values, dtype=float).ravel()]
        if len(values) != 4:
            raise InvalidInputError(f"expected 4 masses, got {len(values)}")
        return cls(*values)

    @property
    def M(self):
        return self.m1 + self.m2 + self.m3 + self.m4

    def as_array(self):
        return np.array([self.m1, self.m2, self.m3, self.m4], dtype=float)

    def products(self):
        """m_i m_j в порядке PAIRS"""
        m = self.as_array()
        return np.array([m[i] * m[j] for i, j in PAIRS])

    def normalized(self, total=4.0):
        return MassVector.from_array(self.as_array() * (total / self.M))


@dataclass(frozen=True)
class ScalarReport:
    U: float
    I: float
    P: float
    H: float
    K: float
    Q: float
    V: float


# ============================================================================
# СКАЛЯРНЫЕ ФУНКЦИИ
# ============================================================================

def potential_U(r: DistanceVector, m: MassVector) -> float:
    return float(np.sum(m.products() / r.as_array()))


def moment_I(r: DistanceVector, m: MassVector) -> float:
    return float(np.sum(m.products() * r.as_array() ** 2) / (2.0 * m.M))


def ptolemy_P(r: DistanceVector) -> float:
    return r.r12 * r.r34 + r.r14 * r.r23 - r.r13 * r.r24


def cayley_menger_matrix(r: DistanceVector):
    d = r.as_array() ** 2
    cm = np.ones((5, 5))
    cm[0, 0] = 0.0
    for k, (i, j) in enumerate(PAIRS):
        cm[i + 1, j + 1] = cm[j + 1, i + 1] = d[k]
    for i in range(1, 5):
        cm[i, i] = 0.0
    return cm


def cayley_menger_H(r: DistanceVector) -> float:
    """Определитель 5x5 напрямую (не через разложение Пеха)"""
    return float(np.linalg.det(cayley_menger_matrix(r)))


def volume_V(r: DistanceVector) -> float:
    return math.sqrt(max(cayley_menger_H(r), 0.0) / 288.0)


def K_term(r: DistanceVector) -> float:
    return (r.r12 * r.r13 * r.r23 - r.r12 * r.r14 * r.r24
            + r.r13 * r.r14 * r.r34 - r.r23 * r.r24 * r.r34)


def Q_term(r: DistanceVector) -> float:
    # Во втором слагаемом стоит r12^2 + r34^2: так выполняется ½H = PQ − K²
    s12, s13, s14, s23, s24, s34 = r.as_array() ** 2
    return (r.r12 * r.r34 * (-s12 - s34 + s23 + s14 + s13 + s24)
            + r.r14 * r.r23 * (s12 + s34 - s23 - s14 + s13 + s24)
            - r.r13 * r.r24 * (s12 + s34 + s23 + s14 - s13 - s24))


def scalar_report(r: DistanceVector, m: MassVector) -> ScalarReport:
    H = cayley_menger_H(r)
    return ScalarReport(
        U=potential_U(r, m),
        I=moment_I(r, m),
        P=ptolemy_P(r),
        H=H,
        K=K_term(r),
        Q=Q_term(r),
        V=math.sqrt(max(H, 0.0) / 288.0),
    )


# ============================================================================
# ГРАДИЕНТЫ
# ============================================================================

def grad_U(r: DistanceVector, m: MassVector):
    return -m.products() / r.as_array() ** 2


def grad_I(r: DistanceVector, m: MassVector):
    return m.products() * r.as_array() / m.M


def grad_P(r: DistanceVector):
    return np.array([r.r34, -r.r24, r.r23, r.r14, -r.r13, r.r12])


def grad_K(r: DistanceVector):
    return np.array([
        r.r13 * r.r23 - r.r14 * r.r24,
        r.r12 * r.r23 + r.r14 * r.r34,
        -r.r12 * r.r24 + r.r13 * r.r34,
        r.r12 * r.r13 - r.r24 * r.r34,
        -r.r12 * r.r14 - r.r23 * r.r34,
        r.r13 * r.r14 - r.r23 * r.r24,
    ])


# ============================================================================
# МНОЖЕСТВА G, M+, D
# ============================================================================

def triangle_margins(r: DistanceVector):
    """12 запасов неравенств треугольника: a + b − c для всех троек"""
    a = r.as_array()
    margins = []
    for x, y, z in TRIANGLES:
        margins.append(a[x] + a[y] - a[z])
        margins.append(a[x] + a[z] - a[y])
        margins.append(a[y] + a[z] - a[x])
    return np.array(margins)


def geometry_tolerances(config=None):
    """(eps_H, eps_tri, in_D_tol) из секции geometry"""
    g = (config or load_config())["geometry"]
    return float(g["eps_H"]), float(g["eps_tri"]), float(g["in_D_tol"])


def is_geometric(r: DistanceVector, eps_H=None, eps_tri=None, config=None) -> bool:
    if eps_H is None or eps_tri is None:
        cfg_H, cfg_tri, _ = geometry_tolerances(config)
        eps_H = cfg_H if eps_H is None else eps_H
        eps_tri = cfg_tri if eps_tri is None else eps_tri
    scale = r.scale
    # H однородна степени 6, порог тоже
    if cayley_menger_H(r) < -eps_H * scale ** 6:
        return False
    return bool(np.all(triangle_margins(r) > eps_tri))


def in_D(r: DistanceVector, m: MassVector, tol=None, eps_H=None, eps_tri=None, config=None) -> bool:
    if tol is None:
        tol = geometry_tolerances(config)[2]
    # |K| ≤ tol вместо H = 0: на P = 0 это одно и то же, но лучше обусловлено
    if abs(moment_I(r, m) - 1.0) > tol or abs(ptolemy_P(r)) > tol:
        return False
    if abs(K_term(r)) > tol:
        return False
    return is_geometric(r, eps_H, eps_tri, config)


def normalize_I(r: DistanceVector, m: MassVector) -> DistanceVector:
    """Масштабирует r так, что I(r, m) = 1"""
    return r.scaled(1.0 / math.sqrt(moment_I(r, m)))


# ============================================================================
# ПЕРЕНУМЕРАЦИИ
# ============================================================================

def relabel(r: DistanceVector, perm) -> DistanceVector:
    """r'_ij = r_{perm(i) perm(j)}"""
    a = r.as_array()
    return DistanceVector.from_array([a[_pair_index(perm[i], perm[j])] for i, j in PAIRS])


def _dihedral():
    table = []
    for k in range(4):
        table.append((tuple((i + k) % 4 for i in range(4)), (-1) ** k))
    for k in range(4):
        table.append((tuple((k - i) % 4 for i in range(4)), (-1) ** k))
    return tuple(table)


# Перенумерации, сохраняющие последовательный порядок, и знак K под ними
DIHEDRAL_RELABELINGS = _dihedral()


def symmetric_distance(r1: DistanceVector, r2: DistanceVector, m: MassVector, mass_rtol=1e-12) -> float:
    """Расстояние в r-пространстве с учётом симметрий масс"""
    masses = m.as_array()
    best = float(np.linalg.norm(r1.as_array() - r2.as_array()))
    for perm, _ in DIHEDRAL_RELABELINGS:
        if np.all(np.abs(masses[list(perm)] - masses) <= mass_rtol * m.M):
            best = min(best, float(np.linalg.norm(r1.as_array() - relabel(r2, perm).as_array())))
    return best

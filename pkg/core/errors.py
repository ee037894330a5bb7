"""
CCC4: co-circular central configurations of four bodies
License: GPL-3.0
"""


class Ccc4Error(Exception):
    """Базовая ошибка проекта"""


class InvalidInputError(Ccc4Error, ValueError):
    """Неположительные массы, расстояния, плохие углы"""


class DegeneratePointError(Ccc4Error):
    """Точка на границе M+ (какое-то p_ij = 0, там U = ∞)"""


class RegionViolationError(Ccc4Error):
    """Точка (v, w) вне области E"""


class SamplerExhaustedError(Ccc4Error):
    """Отбор с отклонением не нашёл внутреннюю точку: ошибка конфига"""


class RankDeficientError(Ccc4Error):
    """Система для множителей Лагранжа вырождена"""


class SolverError(Ccc4Error):
    """Все стартовые точки отвергнуты"""


class UniquenessAlarm(Ccc4Error):
    """Два разных кластера минимумов: противоречие теореме или баг"""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IndeterminateShapeError(Ccc4Error):
    """Знаменатель обратной задачи обращается в ноль"""


class NonRealizableError(Ccc4Error):
    """Вектор расстояний не реализуется на окружности"""


class RecordFormatError(Ccc4Error):
    """Битый или неполный JSON записи"""

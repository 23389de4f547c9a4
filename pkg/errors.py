#!/usr/bin/env python3
"""
errors.py: Exception types

Everything raised on purpose derives from TorusError (a ValueError),
so callers catch one type and the CLI maps it to exit code 1.
"""


class TorusError(ValueError):
    """Base for every deliberate failure"""


class MalformedLiftError(TorusError):
    """Samples do not form a continuous lift with integer winding"""


class UnsupportedDimensionError(TorusError):
    """Operation defined for n = 1 only"""


class SampleCountMismatchError(TorusError):
    """Two loops sampled on different grids"""


class InvalidComplexError(TorusError):
    """∂∂ ≠ 0 or shapes that do not chain"""


class MissingOrbitCountError(TorusError):
    """Morse–Witten boundary requested without a connecting-orbit count"""


class NonRegularPathError(TorusError):
    """Crossing-sum requested on a path with a degenerate or non-isolated crossing"""

    def __init__(self, message: str, crossings: list = None):
        super().__init__(message)
        self.crossings = crossings or []


class DomainError(TorusError):
    """Input outside the domain where the formula holds"""


class OrbitStepError(TorusError):
    """Integrator produced a non-finite state"""


class CylinderInstabilityError(TorusError):
    """Parabolic solver blew up"""

    def __init__(self, message: str, s_step: float, t_points: int, s_reached: float):
        super().__init__(message)
        self.s_step = s_step
        self.t_points = t_points
        self.s_reached = s_reached

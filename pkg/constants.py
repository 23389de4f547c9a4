#!/usr/bin/env python3
"""
constants.py: Numeric constants of the flat torus and every tolerance

One place for the numbers. Modules import from here, tests too.
"""

import math

# === GEOMETRY ===

PI = math.pi
TWO_PI = 2.0 * math.pi
FOUR_PI_SQ = 4.0 * math.pi ** 2

# g = (2π)² δ_jk du^j ⊗ du^k
METRIC_SCALE = TWO_PI ** 2

# I(γ_{k,q}) = 2π²|k|²
ENERGY_PER_WINDING = 2.0 * math.pi ** 2

# === TOLERANCES ===

ALGEBRAIC_TOL = 1e-9      # identities that hold up to roundoff
QUADRATURE_TOL = 1e-6     # quantities converged in the grid size
LIFT_TOL = 1e-9           # winding must be an integer within this
SYMPLECTIC_TOL = 1e-9     # ‖MᵀJ₀M − J₀‖_max
KERNEL_REL_TOL = 1e-8     # singular values below this · ‖Ψ − I‖ count as zero
CROSSING_XTOL = 1e-12     # parameter accuracy of refined crossings
GRADIENT_STEP = 1e-6      # central differences for Hamiltonian gradients
LIMIT_TOL = 1e-4          # distance to {0, ½, 1} for flow-line limits
MAX_WINDOW_DOUBLINGS = 4

# === GRIDS ===

MIN_SAMPLES = 4
DEFAULT_SAMPLES = 256
DEFAULT_ORBIT_STEPS = 1000
DEFAULT_CHI_STEPS = 10_000
DEFAULT_CROSSING_GRID = 400

# sin term of the cylinder equation has Lipschitz constant 1
SINE_LIPSCHITZ = 1.0
STEP_SAFETY = 0.5
MAX_CYLINDER_STEP = STEP_SAFETY * TWO_PI / SINE_LIPSCHITZ

# === CONVENTIONS ===

# single switch for the crossing-form sign; +1 reproduces rotation → −2,
# connector → +1, shear → −½
CROSSING_ORIENTATION = +1

# tilt of the shear off the Maslov cycle; must stay below 1/(4π³)
SHEAR_TILT = 0.002

# angle of the rotation leg in the shear decomposition
ROTATION_ANGLE = 0.5

# reports
REPORT_DIGITS = 12


__all__ = [
    'PI', 'TWO_PI', 'FOUR_PI_SQ', 'METRIC_SCALE', 'ENERGY_PER_WINDING',
    'ALGEBRAIC_TOL', 'QUADRATURE_TOL', 'LIFT_TOL', 'SYMPLECTIC_TOL',
    'KERNEL_REL_TOL', 'CROSSING_XTOL', 'GRADIENT_STEP', 'LIMIT_TOL',
    'MAX_WINDOW_DOUBLINGS', 'MIN_SAMPLES', 'DEFAULT_SAMPLES',
    'DEFAULT_ORBIT_STEPS', 'DEFAULT_CHI_STEPS', 'DEFAULT_CROSSING_GRID',
    'SINE_LIPSCHITZ', 'STEP_SAFETY', 'MAX_CYLINDER_STEP',
    'CROSSING_ORIENTATION', 'SHEAR_TILT', 'ROTATION_ANGLE', 'REPORT_DIGITS',
]

if __name__ == "__main__":
    print("=== CONSTANTS ===\n")
    for name in __all__:
        print(f"{name:22s} = {globals()[name]}")

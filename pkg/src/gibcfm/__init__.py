"""Shape reconstruction of obstacles with generalized impedance boundary conditions.

Simulates 2D time-harmonic scattering with ``d_nu u + (div_G mu grad_G - lambda) u = 0``
on a smooth curve and inverts the far-field matrix with the factorization
method (Tikhonov regularization, Morozov parameter choice).
"""

__version__ = "0.1.0"

from .data import NoiseSpec, contaminate, read_farfield, write_farfield
from .factorization import GridSpec, build_f_sharp, indicator_W, indicator_w, run_inversion
from .forward import FarFieldMatrix, ScatteringConfig, circle_series_oracle, solve_forward
from .geometry import Circle, CurveGrid, Ellipse, Kite, curve_from_dict, make_custom
from .surface import ImpedanceParams

__all__ = [
    "Circle", "CurveGrid", "Ellipse", "FarFieldMatrix", "GridSpec", "ImpedanceParams", "Kite",
    "NoiseSpec", "ScatteringConfig", "build_f_sharp", "circle_series_oracle", "contaminate",
    "curve_from_dict", "indicator_W", "indicator_w", "make_custom", "read_farfield",
    "run_inversion", "solve_forward", "write_farfield",
]

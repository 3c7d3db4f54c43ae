"""Sharp Moser-Trudinger constants on product spaces and Kirchhoff Choquard ground states."""

__version__ = "0.1.0"

from .special import (  # noqa: E402
    DimensionParams,
    SharpConstants,
    alpha_n,
    hls_constant,
    kappa_singular,
    sharp_constants,
    sphere_area,
    split_pair,
    two_nm,
    zeta_nm,
)
from .radial import ProductPair, RadialGrid, RadialProfile, make_grid, pair_norm  # noqa: E402
from .sequences import MoserParams, moser_fn, product_pair_sequence  # noqa: E402
from .functionals import MTQuery, blowup_sweep, exp_functional, threshold  # noqa: E402
from .choquard import KirchhoffModel, NonlinearityModel, RieszOperator, build_riesz, riesz_form  # noqa: E402
from .kcs import KCSProblem, level_bound, make_problem, solve, verify_weak_solution  # noqa: E402

"""Constrained dynamics and quantum representation on the Poincare
hyperboloid: exact Dirac-bracket algebra, geodesic simulation against a
closed-form oracle, and grid verification of the ISO(1,2) generators and
the conical-function spectrum."""

__version__ = "0.1.0"

from .brackets import (
    bracket_matrix, constraint_chain, dirac_bracket, poisson,
    reduce_on_shell, verify_iso12,
)
from .classical import (
    EmbeddedState, IntrinsicState, closed_form_geodesic,
    integrate_embedded, integrate_intrinsic,
)
from .config import RunConfig
from .conical import complex_gamma, conical_p0, conical_pn, energy, normalization
from .expr import ParseError, PhaseExpr, parse_expr
from .geometry import ChartPoint, embed, chart_inverse
from .grid import Grid, SpectralMode, eigen_residual, sample_mode
from .verify import run_verification

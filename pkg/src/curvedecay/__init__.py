"""curvedecay: spherical average decay of Fourier transforms of curve measures.

Numerical laboratory for the decay rate of L^q averages over spheres of the
Fourier transform of smooth densities on curves in R^d: exact exponent
calculus, certified oscillatory quadrature, decay-series fitting, pointwise
envelopes, and witness-set constructions for the matching lower bounds.
"""

__version__ = "0.1.0"

from .curve import (Curve, FrameMap, circle_curve, derivative_rank,
                    eval_derivative, helix_curve, load_curve, moment_curve,
                    normalize_frame, planar_curve)
from .oscquad import (CutoffSpec, QuadResult, eval_fourier,
                      eval_fourier_oracle, eval_phase_integral, fourier_batch)
from .sphere import SphericalGrid, estimate_measure, product_grid, random_sphere
from .theory import breakpoint_q, breakpoints, decay_exponent, predicted_model

__all__ = [
    "__version__",
    "Curve", "FrameMap", "circle_curve", "derivative_rank", "eval_derivative",
    "helix_curve", "load_curve", "moment_curve", "normalize_frame",
    "planar_curve",
    "CutoffSpec", "QuadResult", "eval_fourier", "eval_fourier_oracle",
    "eval_phase_integral", "fourier_batch",
    "SphericalGrid", "estimate_measure", "product_grid", "random_sphere",
    "breakpoint_q", "breakpoints", "decay_exponent", "predicted_model",
]

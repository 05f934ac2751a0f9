"""Digital shearlet transforms.

``fdst`` works on the pseudo-polar grid (fractional FFTs, fitted weights and
Meyer-type windows).  ``dsst`` is the separable Cartesian transform built from
a 1D filter pair and a digital shear; ``dnst`` replaces the separable
generator with a fan-filtered one and inverts with dual filters.
``measures`` holds the seeded benchmark harness and ``cli_io`` the file
formats and command line.
"""

from . import kernels
from .core import (
    CgResult,
    NumericalError,
    PPArray,
    PPGridParams,
    conjugate_gradient,
    grid_coordinates,
    grid_point,
)
from .dnst import (
    DNSTCoeffs,
    DNSTFilterBank,
    dnst_adjoint,
    dnst_decimated,
    dnst_filters,
    dnst_forward,
    dnst_inverse_cg,
    dnst_reconstruct,
    fan_filter,
)
from .dsst import (
    DsstPlan,
    DSSTCoeffs,
    FilterPair,
    digital_shear,
    dsst_adjoint,
    dsst_forward,
    dsst_inverse_cg,
    redundancy,
)
from .fdst import FdstPlan, fdst_adjoint, fdst_forward, fdst_inverse_cg, shearlet_image
from .frft import frft, frft_adjoint, frft_direct
from .ppft import PpftPlan, ppft_adjoint, ppft_direct, ppft_fast
from .weights import WeightTable, fit_weights, gram_condition, load_weights, save_weights, weights_for
from .windows import FDSTCoeffs, SubbandLayout, WindowSpec, layout, window_adjoint, window_apply

__version__ = "0.1.0"
BACKEND = kernels.BACKEND

__all__ = [
    "BACKEND",
    "CgResult",
    "DNSTCoeffs",
    "DNSTFilterBank",
    "DSSTCoeffs",
    "DsstPlan",
    "FDSTCoeffs",
    "FdstPlan",
    "FilterPair",
    "NumericalError",
    "PPArray",
    "PPGridParams",
    "PpftPlan",
    "SubbandLayout",
    "WeightTable",
    "WindowSpec",
    "conjugate_gradient",
    "digital_shear",
    "dnst_adjoint",
    "dnst_decimated",
    "dnst_filters",
    "dnst_forward",
    "dnst_inverse_cg",
    "dnst_reconstruct",
    "dsst_adjoint",
    "dsst_forward",
    "dsst_inverse_cg",
    "fan_filter",
    "fdst_adjoint",
    "fdst_forward",
    "fdst_inverse_cg",
    "fit_weights",
    "frft",
    "frft_adjoint",
    "frft_direct",
    "gram_condition",
    "grid_coordinates",
    "grid_point",
    "layout",
    "load_weights",
    "ppft_adjoint",
    "ppft_direct",
    "ppft_fast",
    "redundancy",
    "save_weights",
    "shearlet_image",
    "weights_for",
    "window_adjoint",
    "window_apply",
]

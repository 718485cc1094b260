"""Sharp logarithmic L-infinity estimates for radial H^2 functions on the unit ball of R^4.

Submodules:

* :mod:`sharplog.radial`: piecewise radial profiles, quadrature and norms.
* :mod:`sharplog.minimizer`: closed-form obstacle minimizer and constant scans.
* :mod:`sharplog.extremal`: extremal families and the sharpness sequence.
* :mod:`sharplog.obstacle`: Hermite finite element obstacle solvers.
* :mod:`sharplog.dyadic`: radial Fourier transform and Littlewood-Paley blocks.
* :mod:`sharplog.global_est`: rescaling, whole-space cutoffs and global estimates.
* :mod:`sharplog.cli`: command line front end and report emitters.
"""

from .errors import SharplogError
from .minimizer import coefficients_from_contact, minimizer_profile, scan_constants, sharp_constant
from .radial import RadialProfile, Segment, norms
from .tolerances import TOL, Tolerances

__version__ = "0.1.0"

__all__ = [
    "SharplogError", "RadialProfile", "Segment", "norms", "TOL", "Tolerances", "sharp_constant",
    "coefficients_from_contact", "minimizer_profile", "scan_constants", "__version__",
]

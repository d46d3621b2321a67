"""Position-dependent effective mass as damping-antidamping dynamics.

Subpackages map one-to-one onto the pieces of the model:

``model``      constants, mass profiles, potentials, grids
``classical``  forward/inverse classical equivalence and trajectories
``specfun``    Bessel, Hermite, Kummer, Fermi-Dirac polylog, Si/Cin
``quantum``    Laplace-Beltrami quantization, exact states, eigensolver, evolution
``fermigas``   classical and quantum ideal gas of damped-antidamped particles
``morse``      exact Morse levels for exponentially varying mass
``cli``        command-line front end
"""
__version__ = "0.1.0"

from .errors import DomainError, NumericError, QuadratureError, SingularityError
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = [
    "DomainError",
    "NumericError",
    "QuadratureError",
    "SingularityError",
    "KERNEL_BACKEND",
    "__version__",
]

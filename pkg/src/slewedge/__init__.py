"""slewedge: SLE(kappa, rho) exponents, wedge slit maps, Loewner Monte Carlo,
and self-avoiding-walk lattice experiments.

The same family of avoidance exponents is computed three independent ways:
closed-form algebra (:mod:`slewedge.exponents`), exact conformal-map
evaluation (:mod:`slewedge.conformal`), and simulation
(:mod:`slewedge.loewner`, :mod:`slewedge.saw`). :mod:`slewedge.verify` wires
the cross-checks together; the ``slewedge`` command line exposes everything.
"""

__version__ = "0.1.0"

from . import conformal, errors, estimate, exponents  # noqa: F401
from .errors import DomainError  # noqa: F401

__all__ = ["conformal", "errors", "estimate", "exponents", "DomainError",
           "__version__"]

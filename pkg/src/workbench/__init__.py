"""Exact computer algebra for shifted Poisson and shifted symplectic structures."""

from .graded import Element, Generator, GradedError, Ring, ring_for
from .algebra import DeRhamElement, GradedAlgebraSpec, SpecError
from .polyvectors import mc_defect, poisson_differential, schouten, sigma

__all__ = ["Element", "Generator", "GradedError", "Ring", "ring_for", "DeRhamElement", "GradedAlgebraSpec",
           "SpecError", "mc_defect", "poisson_differential", "schouten", "sigma"]

__version__ = "0.1.0"

"""Antiperiodic dynamical 6-vertex model: brute-force representation, separated-variable
spectrum, T-Q equations and determinant form factors."""
from .repspace import ModelParams, Representation
from .spectrum import brute_spectrum, eigenstate_from_values, scalar_product_det

__version__ = "0.1.0"

__all__ = ["ModelParams", "Representation", "brute_spectrum", "eigenstate_from_values",
           "scalar_product_det", "__version__"]

"""Poisson white-noise calculus on a finite cell model.

Wick powers, Charlier chaos, weighted Fock norms, Hida derivatives and
pointwise products, each identity checkable in floating point.
"""

from .calculus import coord_mult, hida_adjoint, hida_derivative, pointwise_product, product_bound
from .chaos import ChaosVector, dual_pair, fock_norm, monomial_to_wick, s_transform, wick_to_monomial
from .charlier import charlier, charlier_linearize
from .model import CellModel, load_model, validate_assumptions
from .symtensor import SymKernel, inner, norm, power, sym_product
from .wick import delta_distribution, evaluate, wick_eval, wick_eval_factorized, wick_exp_closed, wick_exp_series

__version__ = "0.1.0"

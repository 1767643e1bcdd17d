"""Wronskian exceptional sets for deep zeros, and boundary analysis on the disk."""

from .errors import (BoundaryZeroError, DeepZeroError, DomainError, MathError,
                     OrderOverflowError, PreconditionError, SpecError, UsageError,
                     WindingError)
from .holofunc import (BlaschkeFactor, ExpAtom, FuncExpr, Jet, Monomial, Polynomial, Power,
                       Product, Reciprocal, Scale, ShiftArg, SingularAtom, Sum, differentiate,
                       eval_jet)
from .wronskian import (DeepZeroSolution, WronskianFunction, closed_form_wronskian,
                        deep_zero_coefficients, verify_deep_zero, wronskian_matrix,
                        wronskian_value)
from .rootfinder import Annulus, Disk, Rectangle, ZeroReport, exceptional_set, locate_zeros
from .diskgeom import LevelSetSpec, StolzAngle, pseudo_distance
from .decay import DecayEstimate, carleson_integral, decay_order_estimate
from .inner import InnerSpec, divides, eval_inner, theorem4_J, truncate_deep

__all__ = [name for name in dir() if not name.startswith("_")]

"""Variational calculus on jet spaces: Euler--Lagrange forms, Noether currents,
Bianchi identities and superpotentials, with exact rational arithmetic."""

from .errors import (JetOrderError, JetvarError, ModelError, ParseError, PreconditionError,
                     SingularDerived, UnboundCoordinate, UndeclaredCoordinate)
from .multiindex import MultiIndex
from .symexpr import Expr, FieldDecl, JetContext, render_text
from .jetcalc import GeneratorSpec, lie_derivative_density, total_derivative
from .variational import euler_lagrange, formal_adjoint, helmholtz, jacobi, linearize, momenta
from .noether import bianchi_morphism, noether_current, superpotential
from .models import build_model, catalog_generator
from .modelfile import parse_model, render_model

__version__ = "0.1.0"

"""Complex special functions, holomorphic expression trees and contour quadrature."""

from .expr import (Const, Expr, Var, Z, as_expr, compose, exp, holomorphic_derivative_fd, log)
from .parse import parse
from .quadrature import (PathSpec, integrate_holomorphic, integrate_polyline, integrate_segments,
                         ray_tail_bound)
from .special import cerf, erfi

__all__ = [
    "Const", "Expr", "Var", "Z", "as_expr", "compose", "exp", "log", "holomorphic_derivative_fd",
    "parse", "PathSpec", "integrate_holomorphic", "integrate_polyline", "integrate_segments",
    "ray_tail_bound", "cerf", "erfi",
]

"""Holomorphic expression trees with exact symbolic differentiation.

Expressions are immutable trees over constants, the variable ``z``, the four
arithmetic operations, ``exp``, ``log`` and ``^``. Evaluation is vectorised
over numpy arrays and always returns complex values.

>>> from halfspace.cnum import parse
>>> f = parse("2/pi^0.5 * exp(z^2)")
>>> f.diff()(0.0)
0j
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class Expr:
    """Base class. Subclasses implement ``_eval``, ``diff`` and ``_fmt``."""

    __slots__ = ()

    precedence = 100

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = self._eval(z)
        return np.broadcast_to(out, z.shape).astype(complex) if np.ndim(z) else complex(out)

    def _eval(self, z):
        raise NotImplementedError

    def diff(self) -> Expr:
        """Derivative with respect to ``z`` as a new tree."""
        raise NotImplementedError

    def substitute(self, inner: Expr) -> Expr:
        """Composition ``self(inner(z))``."""
        raise NotImplementedError

    def depth(self) -> int:
        return 1

    def __str__(self):
        return self._fmt()

    def _fmt(self) -> str:
        raise NotImplementedError

    def _wrap(self, child: Expr, strict=False) -> str:
        s = child._fmt()
        if child.precedence < self.precedence or (strict and child.precedence == self.precedence):
            return f"({s})"
        return s

    # operator sugar
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def _eval(self, z):
        return self.value

    def diff(self):
        return ZERO

    def substitute(self, inner):
        return self

    def _fmt(self):
        v = self.value
        if v.imag == 0.0:
            return _fmt_real(v.real)
        if v.real == 0.0:
            return _fmt_imag(v.imag)
        sign = "+" if v.imag >= 0 else "-"
        return f"({_fmt_real(v.real)}{sign}{_fmt_imag(abs(v.imag))})"

    @property
    def precedence(self):
        v = self.value
        # negative literals bind like unary minus
        if (v.imag == 0.0 and v.real < 0) or (v.real == 0.0 and v.imag < 0):
            return 3
        return 100


def _fmt_imag(y: float) -> str:
    if y == 1.0:
        return "i"
    if y == -1.0:
        return "-i"
    return f"{_fmt_real(y)}i"


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def _eval(self, z):
        return z

    def diff(self):
        return ONE

    def substitute(self, inner):
        return inner

    def _fmt(self):
        return "z"


@dataclass(frozen=True, eq=True)
class Add(Expr):
    a: Expr
    b: Expr
    precedence = 1

    def _eval(self, z):
        return self.a._eval(z) + self.b._eval(z)

    def diff(self):
        return add(self.a.diff(), self.b.diff())

    def substitute(self, inner):
        return add(self.a.substitute(inner), self.b.substitute(inner))

    def depth(self):
        return 1 + max(self.a.depth(), self.b.depth())

    def _fmt(self):
        return f"{self._wrap(self.a)} + {self._wrap(self.b, strict=True)}"


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    a: Expr
    b: Expr
    precedence = 1

    def _eval(self, z):
        return self.a._eval(z) - self.b._eval(z)

    def diff(self):
        return sub(self.a.diff(), self.b.diff())

    def substitute(self, inner):
        return sub(self.a.substitute(inner), self.b.substitute(inner))

    def depth(self):
        return 1 + max(self.a.depth(), self.b.depth())

    def _fmt(self):
        return f"{self._wrap(self.a)} - {self._wrap(self.b, strict=True)}"


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    a: Expr
    b: Expr
    precedence = 2

    def _eval(self, z):
        return self.a._eval(z) * self.b._eval(z)

    def diff(self):
        return add(mul(self.a.diff(), self.b), mul(self.a, self.b.diff()))

    def substitute(self, inner):
        return mul(self.a.substitute(inner), self.b.substitute(inner))

    def depth(self):
        return 1 + max(self.a.depth(), self.b.depth())

    def _fmt(self):
        return f"{self._wrap(self.a)}*{self._wrap(self.b, strict=True)}"


@dataclass(frozen=True, eq=True)
class Div(Expr):
    a: Expr
    b: Expr
    precedence = 2

    def _eval(self, z):
        return self.a._eval(z) / self.b._eval(z)

    def diff(self):
        num = sub(mul(self.a.diff(), self.b), mul(self.a, self.b.diff()))
        return div(num, power(self.b, Const(2)))

    def substitute(self, inner):
        return div(self.a.substitute(inner), self.b.substitute(inner))

    def depth(self):
        return 1 + max(self.a.depth(), self.b.depth())

    def _fmt(self):
        return f"{self._wrap(self.a)}/{self._wrap(self.b, strict=True)}"


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    a: Expr
    precedence = 3

    def _eval(self, z):
        return -self.a._eval(z)

    def diff(self):
        return neg(self.a.diff())

    def substitute(self, inner):
        return neg(self.a.substitute(inner))

    def depth(self):
        return 1 + self.a.depth()

    def _fmt(self):
        return f"-{self._wrap(self.a, strict=True)}"


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    a: Expr

    def _eval(self, z):
        return np.exp(self.a._eval(z))

    def diff(self):
        return mul(self.a.diff(), self)

    def substitute(self, inner):
        return Exp(self.a.substitute(inner))

    def depth(self):
        return 1 + self.a.depth()

    def _fmt(self):
        return f"exp({self.a._fmt()})"


@dataclass(frozen=True, eq=True)
class Log(Expr):
    """Principal branch logarithm."""

    a: Expr

    def _eval(self, z):
        return np.log(self.a._eval(z) + 0j)

    def diff(self):
        return div(self.a.diff(), self.a)

    def substitute(self, inner):
        return Log(self.a.substitute(inner))

    def depth(self):
        return 1 + self.a.depth()

    def _fmt(self):
        return f"log({self.a._fmt()})"


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    """``a ^ b`` on the principal branch; integer exponents are exact."""

    a: Expr
    b: Expr
    precedence = 4

    def _eval(self, z):
        base = self.a._eval(z)
        if isinstance(self.b, Const) and self.b.value.imag == 0.0:
            e = self.b.value.real
            if e == int(e) and abs(e) <= 64:
                e = int(e)
                if e >= 0:
                    return np.asarray(base, dtype=complex) ** e
                return 1.0 / (np.asarray(base, dtype=complex) ** (-e))
        return np.asarray(base, dtype=complex) ** self.b._eval(z)

    def diff(self):
        if isinstance(self.b, Const):
            return mul(mul(self.b, power(self.a, Const(self.b.value - 1))), self.a.diff())
        # d(a^b) = a^b (b' log a + b a'/a)
        inner = add(mul(self.b.diff(), Log(self.a)), div(mul(self.b, self.a.diff()), self.a))
        return mul(self, inner)

    def substitute(self, inner):
        return power(self.a.substitute(inner), self.b.substitute(inner))

    def depth(self):
        return 1 + max(self.a.depth(), self.b.depth())

    def _fmt(self):
        return f"{self._wrap(self.a, strict=True)}^{self._wrap(self.b)}"


ZERO = Const(0)
ONE = Const(1)
Z = Var()


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        from .parse import parse

        return parse(x)
    if isinstance(x, (int, float, complex, np.number)):
        return Const(complex(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _is(e, v):
    return isinstance(e, Const) and e.value == v


# Light constant folding keeps derivative trees from exploding in size.
def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(a, 0) and not _is(b, 0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def power(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(b, 0):
        return ONE
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value**b.value)
    return Pow(a, b)


def exp(a) -> Expr:
    a = as_expr(a)
    if isinstance(a, Const):
        return Const(np.exp(a.value))
    return Exp(a)


def log(a) -> Expr:
    a = as_expr(a)
    return Log(a)


def compose(outer: Expr, inner: Expr) -> Expr:
    """Return the tree of ``outer(inner(z))``."""
    return as_expr(outer).substitute(as_expr(inner))


def holomorphic_derivative_fd(f, z, h=1e-3):
    """Four-point complex stencil, O(h^4) for holomorphic ``f``.

    Averages the real-direction and imaginary-direction central differences,
    whose h^2 error terms cancel for analytic functions.
    """
    z = np.asarray(z, dtype=complex)
    d_re = (f(z + h) - f(z - h)) / (2 * h)
    d_im = (f(z + 1j * h) - f(z - 1j * h)) / (2j * h)
    return 0.5 * (d_re + d_im)


PI = Const(math.pi)

"""Truncated second-order forward-mode jets.

A ``Jet2`` carries a value, a gradient of length ``m`` and a symmetric
``m x m`` Hessian, and propagates all three exactly (to roundoff) through
arithmetic and the supported elementary functions.  All first and second
partial derivatives used by the geometry layers come from these jets; no
finite differencing happens outside the test oracles.

The module-level functions (``sin``, ``log``, ...) accept plain floats as
well as jets, so an expression tree can be evaluated over either algebra
with a single code path.  Scalars mixed into jet arithmetic are treated as
constants (zero derivatives).

Also provided: small dense linear algebra helpers (``matmul``, ``matvec``,
``inv``) over matrices whose entries are jets or floats.  These are used to
differentiate matrix-valued fields such as metric inverses and projector
fields.  Dimensions in this package are tiny (<= 8), so the helpers are
simple loops.
"""

from __future__ import annotations

import math

import numpy as np


class DomainError(ValueError):
    """An elementary function was evaluated outside its domain."""

    def __init__(self, op: str, value: float, point=None):
        self.op = op
        self.value = value
        self.point = point
        super().__init__(self._format())

    def _format(self) -> str:
        msg = f"domain error in {self.op}(...) at argument {self.value!r}"
        if self.point is not None:
            msg += f" (point {list(self.point)!r})"
        return msg


def _val(x):
    return x.value if isinstance(x, Jet2) else x


class Jet2:
    """Second-order jet: value, gradient and symmetric Hessian.

    Hessians are symmetric by construction: every operation below builds
    the Hessian from symmetric pieces, so ``hess == hess.T`` holds bitwise.
    """

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def variable(cls, value: float, index: int, m: int) -> "Jet2":
        grad = np.zeros(m)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((m, m)))

    @classmethod
    def constant(cls, value: float, m: int) -> "Jet2":
        return cls(value, np.zeros(m), np.zeros((m, m)))

    def __repr__(self) -> str:
        return f"Jet2({self.value!r}, grad={self.grad!r})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.grad + other.grad,
                        self.hess + other.hess)
        return Jet2(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.grad - other.grad,
                        self.hess - other.hess)
        return Jet2(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.grad, -self.hess)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            cross = np.outer(self.grad, other.grad)
            cross = cross + cross.T  # symmetrized before accumulation
            return Jet2(
                self.value * other.value,
                self.value * other.grad + other.value * self.grad,
                self.value * other.hess + other.value * self.hess + cross,
            )
        return Jet2(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def _reciprocal(self):
        if self.value == 0.0:
            raise DomainError("1/x", 0.0)
        v = 1.0 / self.value
        return self._chain(v, -v * v, 2.0 * v * v * v)

    def __truediv__(self, other):
        # direct quotient formulas keep the value bit-identical to the
        # plain float division used on the real-evaluation path
        if isinstance(other, Jet2):
            if other.value == 0.0:
                raise DomainError("1/x", 0.0)
            q = self.value / other.value
            grad = (self.grad - q * other.grad) / other.value
            cross = np.outer(grad, other.grad)
            cross = cross + cross.T
            hess = (self.hess - q * other.hess - cross) / other.value
            return Jet2(q, grad, hess)
        return Jet2(self.value / other, self.grad / other, self.hess / other)

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise DomainError("1/x", 0.0)
        q = other / self.value
        grad = (-q / self.value) * self.grad
        cross = np.outer(grad, self.grad)
        cross = cross + cross.T
        hess = (-q * self.hess - cross) / self.value
        return Jet2(q, grad, hess)

    def __pow__(self, other):
        if isinstance(other, Jet2):
            if other.grad.any() or other.hess.any():
                # genuinely variable exponent: a^b = exp(b log a), a > 0
                if self.value <= 0.0:
                    raise DomainError("pow", self.value)
                return exp(other * log(self))
            other = other.value
        return _pow_const(self, float(other))

    def __rpow__(self, base):
        if base <= 0.0:
            raise DomainError("pow", base)
        return exp(self * math.log(base))

    # -- chain rule -------------------------------------------------------

    def _chain(self, f: float, df: float, d2f: float) -> "Jet2":
        """Compose with a scalar function given f, f', f'' at self.value."""
        outer = np.outer(self.grad, self.grad)
        return Jet2(f, df * self.grad, df * self.hess + d2f * outer)


def _pow_const(base: Jet2, expo: float) -> Jet2:
    """base^expo with integer exponents done by repeated multiplication."""
    if expo.is_integer():
        n = int(expo)
        if n == 0:
            m = base.grad.shape[0]
            return Jet2.constant(1.0, m)
        if n < 0:
            return _pow_const(base._reciprocal(), float(-n))
        result = None
        square = base
        while n:
            if n & 1:
                result = square if result is None else result * square
            square = square * square if n > 1 else square
            n >>= 1
        return result
    if base.value <= 0.0:
        raise DomainError("pow", base.value)
    return exp(expo * log(base))


# -- elementary functions (float or Jet2) ---------------------------------


def sin(x):
    if isinstance(x, Jet2):
        return x._chain(math.sin(x.value), math.cos(x.value), -math.sin(x.value))
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet2):
        return x._chain(math.cos(x.value), -math.sin(x.value), -math.cos(x.value))
    return math.cos(x)


def tan(x):
    if isinstance(x, Jet2):
        c = math.cos(x.value)
        if c == 0.0:
            raise DomainError("tan", x.value)
        t = math.tan(x.value)
        sec2 = 1.0 + t * t
        return x._chain(t, sec2, 2.0 * t * sec2)
    if math.cos(x) == 0.0:
        raise DomainError("tan", x)
    return math.tan(x)


def exp(x):
    if isinstance(x, Jet2):
        e = math.exp(x.value)
        return x._chain(e, e, e)
    return math.exp(x)


def log(x):
    v = _val(x)
    if v <= 0.0:
        raise DomainError("log", v)
    if isinstance(x, Jet2):
        return x._chain(math.log(v), 1.0 / v, -1.0 / (v * v))
    return math.log(v)


def sqrt(x):
    v = _val(x)
    if v <= 0.0:
        # kept strict (0 excluded): the derivative blows up at 0 and all
        # downstream geometry assumes smoothness
        raise DomainError("sqrt", v)
    if isinstance(x, Jet2):
        s = math.sqrt(v)
        return x._chain(s, 0.5 / s, -0.25 / (s * v))
    return math.sqrt(v)


def absolute(x):
    if isinstance(x, Jet2):
        if x.value == 0.0:
            raise DomainError("abs", 0.0)
        s = math.copysign(1.0, x.value)
        return x._chain(abs(x.value), s, 0.0)
    return abs(x)


def power(base, expo):
    if isinstance(base, Jet2) or isinstance(expo, Jet2):
        if not isinstance(base, Jet2):
            return Jet2.__rpow__(expo, base)
        return base ** expo
    # float path, mirroring the jet domain rules
    if float(expo).is_integer():
        n = int(expo)
        if base == 0.0 and n < 0:
            raise DomainError("pow", 0.0)
        return float(base) ** n
    if base <= 0.0:
        raise DomainError("pow", base)
    return math.pow(base, expo)


def divide(a, b):
    if isinstance(a, Jet2) or isinstance(b, Jet2):
        if not isinstance(b, Jet2):
            if b == 0.0:
                raise DomainError("1/x", 0.0)
            return a * (1.0 / b)
        if not isinstance(a, Jet2):
            return b._reciprocal() * a
        return a / b
    if b == 0.0:
        raise DomainError("1/x", 0.0)
    return a / b


# -- jet-valued dense linear algebra ---------------------------------------
#
# Matrices are lists of lists whose entries are Jet2 or float.  Only values
# and gradients of the results are meaningful when an input entry was built
# from already-differentiated data (e.g. Jacobian entries of a map, whose
# own Hessians are not tracked); consumers read value + grad only.


def matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def matvec(a, v):
    rows, inner = len(a), len(a[0])
    out = []
    for i in range(rows):
        acc = a[i][0] * v[0]
        for k in range(1, inner):
            acc = acc + a[i][k] * v[k]
        out.append(acc)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def identity(m: int):
    return [[1.0 if i == j else 0.0 for j in range(m)] for i in range(m)]


def inv(a):
    """Gauss-Jordan inverse with partial pivoting on jet values."""
    m = len(a)
    aug = [list(row) + identity(m)[i] for i, row in enumerate(a)]
    for col in range(m):
        piv = max(range(col, m), key=lambda r: abs(_val(aug[r][col])))
        if abs(_val(aug[piv][col])) < 1e-300:
            raise ZeroDivisionError("singular jet matrix")
        if piv != col:
            aug[col], aug[piv] = aug[piv], aug[col]
        scale = divide(1.0, aug[col][col])
        aug[col] = [entry * scale for entry in aug[col]]
        for r in range(m):
            if r == col:
                continue
            factor = aug[r][col]
            if isinstance(factor, float) and factor == 0.0:
                continue
            aug[r] = [er - factor * ec for er, ec in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def values_of(vec) -> np.ndarray:
    """Extract values from a jet vector."""
    return np.array([_val(x) for x in vec])


def jacobian_of(vec, m: int) -> np.ndarray:
    """Extract the first-derivative matrix jac[k, i] = d vec_k / d x_i."""
    out = np.zeros((len(vec), m))
    for k, x in enumerate(vec):
        if isinstance(x, Jet2):
            out[k] = x.grad
    return out


def lift_matrix(values: np.ndarray):
    """Wrap a float matrix as a constant jet-compatible list of lists."""
    return [[float(x) for x in row] for row in values]

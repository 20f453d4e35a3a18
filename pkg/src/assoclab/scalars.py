"""Coefficient rings for the series machinery.

Four kinds of scalars flow through the package:

* exact rationals (``fractions.Fraction``),
* double precision floats / complexes for numeric work,
* :class:`PolyInT`, univariate polynomials in an interpolation parameter,
* :class:`Dual`, dual numbers ``a + b*eps`` with ``eps**2 = 0`` for
  first-order perturbations.

All of them are immutable values supporting ``+``, ``-``, ``*``, division by
integers and comparison with ``0``, which is the whole interface the series
code relies on.  Polynomials and duals may be nested over any of the other
rings.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


class ScalarError(ValueError):
    pass


def _is_plain_number(x) -> bool:
    return isinstance(x, (int, float, complex, Fraction))


def is_zero(x) -> bool:
    """Exact zero test valid for every supported scalar."""
    if isinstance(x, (PolyInT, Dual)):
        return x.is_zero()
    return x == 0


def coeff_abs(x) -> float:
    """A float magnitude usable for residual reporting on any scalar."""
    if isinstance(x, PolyInT):
        return max((coeff_abs(c) for c in x.coeffs), default=0.0)
    if isinstance(x, Dual):
        return max(coeff_abs(x.primal), coeff_abs(x.tangent))
    if isinstance(x, Fraction):
        return abs(x.numerator) / x.denominator if x else 0.0
    return abs(x)


def check_finite(x):
    """Reject NaN in float/complex scalars; they must never be stored."""
    if isinstance(x, float) and math.isnan(x):
        raise ScalarError("NaN scalar")
    if isinstance(x, complex) and (math.isnan(x.real) or math.isnan(x.imag)):
        raise ScalarError("NaN scalar")
    return x


class PolyInT:
    """Polynomial in one variable, coefficients in any supported ring.

    Coefficients are stored lowest power first with trailing zeros trimmed.
    An optional ``bound`` declares a maximal allowed degree; exceeding it is
    an error rather than silent truncation.
    """

    __slots__ = ("coeffs", "bound")

    def __init__(self, coeffs: Sequence = (), bound: int | None = None):
        cs = list(coeffs)
        while cs and is_zero(cs[-1]):
            cs.pop()
        if bound is not None and len(cs) - 1 > bound:
            raise ScalarError(f"polynomial degree {len(cs)-1} exceeds bound {bound}")
        self.coeffs = tuple(cs)
        self.bound = bound

    @staticmethod
    def variable(base=Fraction(1)):
        return PolyInT((base * 0, base))

    @staticmethod
    def constant(c):
        return PolyInT((c,))

    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def _coerce(self, other):
        if isinstance(other, PolyInT):
            return other
        if _is_plain_number(other):
            return PolyInT((other,))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        for i, c in enumerate(o.coeffs):
            a[i] = a[i] + c
        return PolyInT(a, _merge_bound(self.bound, o.bound))

    __radd__ = __add__

    def __neg__(self):
        return PolyInT(tuple(-c for c in self.coeffs), self.bound)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.coeffs or not o.coeffs:
            return PolyInT((), _merge_bound(self.bound, o.bound))
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if is_zero(a):
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return PolyInT(out, _merge_bound(self.bound, o.bound))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if isinstance(other, int):
                other = Fraction(other)
            return PolyInT(tuple(c / other for c in self.coeffs), self.bound)
        if isinstance(other, (float, complex)):
            return PolyInT(tuple(c / other for c in self.coeffs), self.bound)
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(("PolyInT", self.coeffs))

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def derivative(self) -> "PolyInT":
        return PolyInT(tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1))

    def antiderivative(self) -> "PolyInT":
        out = [0]
        for i, c in enumerate(self.coeffs):
            out.append(c / Fraction(i + 1) if isinstance(c, (int, Fraction))
                       else c / (i + 1))
        return PolyInT(out)

    def integral(self, a, b):
        """Definite integral over [a, b] by the power rule, term by term."""
        anti = self.antiderivative()
        return anti(b) - anti(a)

    def shift_mul_t(self, power: int = 1) -> "PolyInT":
        return PolyInT((0,) * power + self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "PolyInT(0)"
        return "PolyInT(" + " + ".join(f"({c})*t^{i}" for i, c in enumerate(self.coeffs)) + ")"


def _merge_bound(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Dual:
    """Dual number ``primal + tangent*eps`` with ``eps**2 = 0``."""

    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent=0):
        self.primal = primal
        self.tangent = tangent

    def is_zero(self) -> bool:
        return is_zero(self.primal) and is_zero(self.tangent)

    def _coerce(self, other):
        if isinstance(other, Dual):
            return other
        if _is_plain_number(other) or isinstance(other, PolyInT):
            return Dual(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dual(self.primal + o.primal, self.tangent + o.tangent)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.primal, -self.tangent)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dual(self.primal * o.primal,
                    self.primal * o.tangent + self.tangent * o.primal)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = other.inverse()
            return self * inv
        if _is_plain_number(other):
            if isinstance(other, int):
                other = Fraction(other)
            return Dual(self.primal / other, self.tangent / other)
        return NotImplemented

    def inverse(self) -> "Dual":
        if is_zero(self.primal):
            raise ScalarError("dual number with zero primal part is not invertible")
        if isinstance(self.primal, (int, Fraction)):
            p = Fraction(1) / Fraction(self.primal)
        else:
            p = 1 / self.primal
        return Dual(p, -(p * p) * self.tangent)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.primal == o.primal and self.tangent == o.tangent

    def __hash__(self):
        return hash(("Dual", self.primal, self.tangent))

    def __repr__(self):
        return f"Dual({self.primal!r}, {self.tangent!r})"


# -- exact polynomial integrals (the iterated-integral workhorses) ----------

def poly_definite_integral(p: PolyInT, a, b):
    """Integral of ``p`` over [a, b]; exact when the data is exact."""
    return p.integral(a, b)


def poly_multiply_integrate_nested(outer: PolyInT, inner: PolyInT, a, b):
    """The nested iterated integral of ``outer(s1) * int_a^{s1} inner(s2) ds2``.

    Returns the exact value over [a, b]; rational in, rational out.
    """
    inner_anti = inner.antiderivative()
    inner_from_a = inner_anti - PolyInT.constant(inner_anti(a))
    return (outer * inner_from_a).integral(a, b)


def s_one_minus_s_power(exponent: int) -> PolyInT:
    """The polynomial ``(s(1-s))**exponent`` with rational coefficients."""
    base = PolyInT((Fraction(0), Fraction(1), Fraction(-1)))  # s - s^2
    out = PolyInT.constant(Fraction(1))
    for _ in range(exponent):
        out = out * base
    return out


def iterated_word_integral(polys: Sequence[PolyInT], a, b):
    """Right-time-ordered iterated integral of a word of polynomials.

    Computes ``int over a < s_1 < ... < s_r < b of prod_i polys[i](s_i)``;
    the first list entry is attached to the earliest time.
    """
    running = PolyInT.constant(Fraction(1))
    for p in polys:
        running = (p * running).antiderivative()
        running = running - PolyInT.constant(running(a))
    return running(b)


# -- JSON encoding ------------------------------------------------------------

def scalar_to_json(x):
    if isinstance(x, Fraction):
        return [str(x.numerator), str(x.denominator)]
    if isinstance(x, bool):
        raise ScalarError("bool is not a scalar")
    if isinstance(x, int):
        return [str(x), "1"]
    if isinstance(x, float):
        return x
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, PolyInT):
        return {"poly": [scalar_to_json(c) for c in x.coeffs]}
    raise ScalarError(f"cannot serialize scalar of type {type(x)!r}")


def scalar_from_json(obj):
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(s, str) for s in obj):
        return Fraction(int(obj[0]), int(obj[1]))
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        return complex(obj["re"], obj["im"])
    if isinstance(obj, dict) and set(obj) == {"poly"}:
        return PolyInT([scalar_from_json(c) for c in obj["poly"]])
    raise ScalarError(f"cannot parse scalar from {obj!r}")

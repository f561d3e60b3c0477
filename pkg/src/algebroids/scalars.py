"""Exact arithmetic in the field of rational functions of the chart coordinates.

A polynomial is a dict mapping exponent tuples (one non-negative int per
coordinate) to rational coefficients (``Fraction``), with zero coefficients
never stored.  A scalar is a quotient num/den of two such polynomials with
den not identically zero.  Equality of scalars is decided by
cross-multiplication (a/b = c/d iff a*d - c*b expands to the zero
polynomial), so reduction to lowest terms is never needed for correctness.

A cheap normalization keeps representatives small and canonical enough for
reproducible serialization: common monomial factors of num and den are
cancelled and den is rescaled to be monic in the fixed graded-lexicographic
term order.  Full multivariate GCD reduction is deliberately not attempted.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BudgetError, DivisionByZeroError, PoleError, ShapeError

Exponents = tuple[int, ...]

# Abort threshold on len(num.terms) + len(den.terms) of any constructed
# scalar.  Guards against fraction-field swell in elimination.
_DEFAULT_TERM_BUDGET = 100_000
_term_budget = _DEFAULT_TERM_BUDGET


def set_term_budget(limit: int) -> int:
    """Set the per-scalar term budget, returning the previous value."""
    global _term_budget
    old = _term_budget
    _term_budget = int(limit)
    return old


def get_term_budget() -> int:
    return _term_budget


def _grlex_key(exps: Exponents) -> tuple:
    # Sort DESCENDING by this key: higher total degree first, then
    # lexicographically larger exponent vector first.
    return (sum(exps), exps)


class Poly:
    """Sparse multivariate polynomial over the rationals."""

    __slots__ = ("nvars", "terms", "_diff_cache")

    def __init__(self, nvars: int, terms: Mapping[Exponents, Fraction] | None = None):
        self.nvars = nvars
        if terms:
            self.terms: dict[Exponents, Fraction] = {
                e: c for e, c in terms.items() if c != 0
            }
        else:
            self.terms = {}
        self._diff_cache: dict[int, Poly] | None = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        cached = _POLY_ZERO.get(nvars)
        if cached is None:
            cached = _POLY_ZERO[nvars] = cls(nvars)
        return cached

    @classmethod
    def one(cls, nvars: int) -> Poly:
        cached = _POLY_ONE.get(nvars)
        if cached is None:
            cached = _POLY_ONE[nvars] = cls(nvars, {(0,) * nvars: Fraction(1)})
        return cached

    @classmethod
    def constant(cls, nvars: int, value) -> Poly:
        c = Fraction(value)
        if c == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, index: int) -> Poly:
        if not 0 <= index < nvars:
            raise ShapeError(f"variable index {index} out of range for {nvars} coordinates")
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * self.nvars) == 1

    def is_constant(self) -> bool:
        return not self.terms or (
            len(self.terms) == 1 and (0,) * self.nvars in self.terms
        )

    def constant_value(self) -> Fraction | None:
        """The value of a constant polynomial, else None."""
        if not self.terms:
            return Fraction(0)
        if self.is_constant():
            return self.terms[(0,) * self.nvars]
        return None

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def leading(self) -> tuple[Exponents, Fraction]:
        """Leading term in graded-lex order.  Undefined on the zero polynomial."""
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self) -> list[tuple[Exponents, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Poly) -> Poly:
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def __neg__(self) -> Poly:
        p = Poly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __sub__(self, other: Poly) -> Poly:
        if not other.terms:
            return self
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        if not self.terms or not other.terms:
            return Poly(self.nvars)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                s = out.get(e)
                if s is None:
                    out[e] = c
                else:
                    s = s + c
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        if len(out) > _term_budget:
            raise BudgetError(
                f"polynomial with {len(out)} terms exceeds budget {_term_budget}"
            )
        p = Poly(self.nvars)
        p.terms = out
        return p

    def scale(self, factor: Fraction) -> Poly:
        if factor == 0:
            return Poly(self.nvars)
        p = Poly(self.nvars)
        p.terms = {e: c * factor for e, c in self.terms.items()}
        return p

    def __pow__(self, power: int) -> Poly:
        if power < 0:
            raise ValueError("negative power on a polynomial")
        result = Poly.one(self.nvars)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    __hash__ = None  # mutable dict inside; equality is structural

    def divide_exact(self, divisor: Poly) -> Poly:
        """Quotient self / divisor when the division is exact (used by
        fraction-free elimination, where exactness is guaranteed)."""
        if divisor.is_zero():
            raise ZeroDivisionError("exact division by the zero polynomial")
        if divisor.is_one():
            return self
        dc = divisor.constant_value()
        if dc is not None:
            return self.scale(1 / dc)
        quotient: dict[Exponents, Fraction] = {}
        rest = dict(self.terms)
        lead_e, lead_c = divisor.leading()
        while rest:
            e = max(rest, key=_grlex_key)
            c = rest[e]
            diff = tuple(a - b for a, b in zip(e, lead_e))
            if any(d < 0 for d in diff):
                raise ValueError("division is not exact")
            q = c / lead_c
            quotient[diff] = q
            for de, dcoef in divisor.terms.items():
                key = tuple(a + b for a, b in zip(diff, de))
                acc = rest.get(key, Fraction(0)) - q * dcoef
                if acc:
                    rest[key] = acc
                else:
                    rest.pop(key, None)
        p = Poly(self.nvars)
        p.terms = quotient
        return p

    # -- calculus -----------------------------------------------------

    def diff(self, index: int) -> Poly:
        """Partial derivative with respect to coordinate ``index`` (0-based).
        Results are memoized; values are immutable so sharing is safe."""
        if not 0 <= index < self.nvars:
            raise ShapeError(f"coordinate index {index} out of range")
        cache = self._diff_cache
        if cache is None:
            cache = self._diff_cache = {}
        hit = cache.get(index)
        if hit is not None:
            return hit
        out: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k == 0:
                continue
            e2 = e[:index] + (k - 1,) + e[index + 1 :]
            out[e2] = out.get(e2, Fraction(0)) + c * k
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in out.items() if c}
        cache[index] = p
        return p

    def eval_at(self, coords: Sequence[Fraction]) -> Fraction:
        if len(coords) != self.nvars:
            raise ShapeError("point dimension does not match coordinate count")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(coords, e):
                if k:
                    v *= x**k
            total += v
        return total

    def __repr__(self) -> str:
        return f"Poly(nvars={self.nvars}, terms={dict(self.sorted_terms())!r})"


_POLY_ZERO: dict[int, "Poly"] = {}
_POLY_ONE: dict[int, "Poly"] = {}
_SCALAR_ZERO: dict[int, "Scalar"] = {}
_SCALAR_ONE: dict[int, "Scalar"] = {}


def _monomial_gcd(polys: Iterable[Poly], nvars: int) -> Exponents | None:
    mins: list[int] | None = None
    for p in polys:
        for e in p.terms:
            if mins is None:
                mins = list(e)
            else:
                mins = [min(a, b) for a, b in zip(mins, e)]
            if not any(mins):
                return None
    if mins is None or not any(mins):
        return None
    return tuple(mins)


def _shift_down(p: Poly, shift: Exponents) -> Poly:
    q = Poly(p.nvars)
    q.terms = {
        tuple(a - b for a, b in zip(e, shift)): c for e, c in p.terms.items()
    }
    return q


class Scalar:
    """Element of the fraction field of multivariate polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None or den.is_one():
            # polynomial fast path: nothing to cancel or rescale
            den = Poly.one(num.nvars)
            if len(num.terms) > _term_budget:
                raise BudgetError(
                    f"scalar with {len(num.terms)} terms exceeds budget {_term_budget}"
                )
            self.num = num
            self.den = den
            return
        if den.is_zero():
            raise DivisionByZeroError("denominator is the zero polynomial")
        if num.nvars != den.nvars:
            raise ShapeError("numerator and denominator disagree on coordinate count")
        if num.is_zero():
            den = Poly.one(num.nvars)
        else:
            shift = _monomial_gcd((num, den), num.nvars)
            if shift is not None:
                num = _shift_down(num, shift)
                den = _shift_down(den, shift)
            _, lead = den.leading()
            if lead != 1:
                inv = 1 / lead
                num = num.scale(inv)
                den = den.scale(inv)
            if den.is_constant():
                # a constant denominator is folded into the numerator
                den = Poly.one(num.nvars)
        if len(num.terms) + len(den.terms) > _term_budget:
            raise BudgetError(
                f"scalar with {len(num.terms) + len(den.terms)} terms "
                f"exceeds budget {_term_budget}"
            )
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> Scalar:
        cached = _SCALAR_ZERO.get(nvars)
        if cached is None:
            cached = _SCALAR_ZERO[nvars] = cls(Poly.zero(nvars))
        return cached

    @classmethod
    def one(cls, nvars: int) -> Scalar:
        cached = _SCALAR_ONE.get(nvars)
        if cached is None:
            cached = _SCALAR_ONE[nvars] = cls(Poly.one(nvars))
        return cached

    @classmethod
    def constant(cls, nvars: int, value) -> Scalar:
        return cls(Poly.constant(nvars, value))

    @classmethod
    def variable(cls, nvars: int, index: int) -> Scalar:
        return cls(Poly.variable(nvars, index))

    # -- predicates ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction | None:
        if not self.is_constant():
            return None
        if self.num.is_zero():
            return Fraction(0)
        return self.num.constant_value() / self.den.constant_value()

    def term_count(self) -> int:
        return len(self.num.terms) + len(self.den.terms)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Scalar) -> Scalar:
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> Scalar:
        s = Scalar.__new__(Scalar)
        s.num = -self.num
        s.den = self.den
        return s

    def __sub__(self, other: Scalar) -> Scalar:
        if other.is_zero():
            return self
        return self + (-other)

    def __mul__(self, other: Scalar) -> Scalar:
        if self.is_zero() or other.is_zero():
            return Scalar.zero(self.nvars)
        return Scalar(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: Scalar) -> Scalar:
        if other.is_zero():
            raise DivisionByZeroError("division by the zero scalar")
        if self.is_zero():
            return Scalar.zero(self.nvars)
        return Scalar(self.num * other.den, self.den * other.num)

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise DivisionByZeroError("inverse of the zero scalar")
        return Scalar(self.den, self.num)

    def __pow__(self, power: int) -> Scalar:
        if power < 0:
            return self.inverse() ** (-power)
        return Scalar(self.num**power, self.den**power)

    def scale(self, factor) -> Scalar:
        f = Fraction(factor)
        if f == 0:
            return Scalar.zero(self.nvars)
        return Scalar(self.num.scale(f), self.den)

    def equals(self, other: Scalar) -> bool:
        """Exact equality by cross-multiplication."""
        if self.den == other.den:
            return self.num == other.num
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, Scalar) and self.equals(other)

    __hash__ = None

    # -- calculus -----------------------------------------------------

    def diff(self, index: int) -> Scalar:
        """Exact partial derivative (quotient rule)."""
        if self.den.is_one():
            return Scalar(self.num.diff(index))
        return Scalar(
            self.num.diff(index) * self.den - self.num * self.den.diff(index),
            self.den * self.den,
        )

    def eval_at(self, point: "Point | Sequence[Fraction]") -> Fraction:
        coords = point.coords if isinstance(point, Point) else tuple(point)
        d = self.den.eval_at(coords)
        if d == 0:
            raise PoleError(f"denominator vanishes at {tuple(map(str, coords))}")
        return self.num.eval_at(coords) / d

    def __repr__(self) -> str:
        return f"Scalar({self.num!r}, {self.den!r})"


@dataclass(frozen=True)
class Point:
    """A rational chart point for spot evaluation."""

    coords: tuple[Fraction, ...]

    @classmethod
    def of(cls, *values) -> Point:
        return cls(tuple(Fraction(v) for v in values))


# -- serialization ----------------------------------------------------
#
# Output conforms to the parse grammar: terms in graded-lex order, explicit
# "*", "^" for powers, and a leading negative coefficient attached to the
# rational literal of the first term.


def _term_to_text(exps: Exponents, coeff: Fraction, names: Sequence[str]) -> str:
    factors = []
    for name, k in zip(names, exps):
        if k == 1:
            factors.append(name)
        elif k > 1:
            factors.append(f"{name}^{k}")
    mono = "*".join(factors)
    c = abs(coeff)
    if not mono:
        return str(c)
    if c == 1:
        return mono
    return f"{c}*{mono}"


def poly_to_text(p: Poly, names: Sequence[str]) -> str:
    if len(names) != p.nvars:
        raise ShapeError("coordinate name count does not match polynomial")
    if p.is_zero():
        return "0"
    parts = []
    for i, (exps, coeff) in enumerate(p.sorted_terms()):
        body = _term_to_text(exps, coeff, names)
        if i == 0:
            if coeff < 0:
                # grammar has no unary minus on bare names: fold the sign
                # into an explicit rational coefficient
                if body[0].isdigit():
                    parts.append("-" + body)
                else:
                    parts.append(f"-1*{body}")
            else:
                parts.append(body)
        else:
            parts.append((" - " if coeff < 0 else " + ") + body)
    return "".join(parts)


def scalar_to_text(s: Scalar, names: Sequence[str]) -> str:
    if s.den.is_one():
        return poly_to_text(s.num, names)
    return f"({poly_to_text(s.num, names)})/({poly_to_text(s.den, names)})"

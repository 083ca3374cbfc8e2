"""Z2 Novikov arithmetic and exact action bookkeeping.

A Novikov element is a finite Z2-combination of monomials T^a with
rational exponent a, stored as the set of exponents that carry a
nonzero (= 1) coefficient.  Addition is symmetric difference,
multiplication convolves exponents with parity.  All exponents are
``fractions.Fraction``; the only non-rational value in the module is
the minus-infinity sentinel for the action of zero.
"""

from __future__ import annotations

from fractions import Fraction


def _frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions. Floats are rejected
    to keep exponents exact."""
    if isinstance(x, float):
        raise ValueError("Novikov exponents must be exact rationals, got float %r" % x)
    return Fraction(x)


class NovikovElement:
    """A finite Z2 Novikov sum, canonically a frozenset of exponents."""

    __slots__ = ("exps",)

    def __init__(self, exponents=()):
        seen = set()
        for e in exponents:
            e = _frac(e)
            # Z2: a repeated exponent cancels in pairs.
            if e in seen:
                seen.remove(e)
            else:
                seen.add(e)
        self.exps = frozenset(seen)

    @classmethod
    def zero(cls) -> "NovikovElement":
        return cls()

    @classmethod
    def one(cls) -> "NovikovElement":
        return cls((Fraction(0),))

    @classmethod
    def monomial(cls, exponent) -> "NovikovElement":
        return cls((_frac(exponent),))

    @property
    def is_zero(self) -> bool:
        return not self.exps

    def __bool__(self) -> bool:
        return bool(self.exps)

    def __eq__(self, other) -> bool:
        return isinstance(other, NovikovElement) and self.exps == other.exps

    def __hash__(self) -> int:
        return hash(self.exps)

    def __add__(self, other: "NovikovElement") -> "NovikovElement":
        return nov_add(self, other)

    def __mul__(self, other: "NovikovElement") -> "NovikovElement":
        return nov_mul(self, other)

    def __repr__(self) -> str:
        return "NovikovElement(%s)" % nov_to_text(self)


def nov_add(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    out = NovikovElement()
    out.exps = a.exps ^ b.exps
    return out


def nov_mul(a: NovikovElement, b: NovikovElement) -> NovikovElement:
    return NovikovElement(x + y for x in a.exps for y in b.exps)


def valuation(a: NovikovElement):
    """Smallest exponent with nonzero coefficient; +inf for the zero element."""
    if a.is_zero:
        return float("inf")
    return min(a.exps)


def nov_to_text(a: NovikovElement) -> str:
    """Canonical text: exponent-sorted monomials 'T^p/q' joined by '+', '0' if zero."""
    if a.is_zero:
        return "0"
    return "+".join("T^%s" % e for e in sorted(a.exps))


def nov_from_text(text: str) -> NovikovElement:
    """Parse the canonical form. Also accepted: braces around exponents
    ('T^{1/2}'), bare '1' for T^0, and redundant whitespace."""
    s = text.strip()
    if s == "0":
        return NovikovElement.zero()
    exps = []
    for term in s.split("+"):
        term = term.strip()
        if term == "1":
            exps.append(Fraction(0))
            continue
        if not term.startswith("T^"):
            raise ValueError("bad Novikov term %r in %r" % (term, text))
        body = term[2:].strip()
        if body.startswith("{") and body.endswith("}"):
            body = body[1:-1].strip()
        try:
            exps.append(Fraction(body))
        except (ValueError, ZeroDivisionError):
            raise ValueError("bad Novikov exponent %r in %r" % (body, text))
    return NovikovElement(exps)


class ActionValue:
    """Element of Q union {-inf} under the max/plus semantics of action
    filtrations: max of an empty collection is -inf, and -inf absorbs
    under addition.  -inf is a distinct variant, never a stand-in large
    negative rational."""

    __slots__ = ("finite", "value")

    def __init__(self, finite: bool, value: Fraction):
        self.finite = finite
        self.value = value if finite else Fraction(0)

    @classmethod
    def of(cls, x) -> "ActionValue":
        return cls(True, _frac(x))

    @classmethod
    def neg_inf(cls) -> "ActionValue":
        return cls(False, Fraction(0))

    @property
    def is_neg_inf(self) -> bool:
        return not self.finite

    def plus(self, x) -> "ActionValue":
        """Shift by a rational; -inf absorbs."""
        if not self.finite:
            return ActionValue.neg_inf()
        return ActionValue.of(self.value + _frac(x))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionValue):
            return NotImplemented
        return (self.finite, self.value) == (other.finite, other.value)

    def __hash__(self) -> int:
        return hash((self.finite, self.value))

    def _key(self):
        # -inf sorts below every rational.
        return (1, self.value) if self.finite else (0, Fraction(0))

    def __lt__(self, other: "ActionValue") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "ActionValue") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "ActionValue") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "ActionValue") -> bool:
        return self._key() >= other._key()

    def to_text(self) -> str:
        return str(self.value) if self.finite else "-inf"

    @classmethod
    def from_text(cls, text: str) -> "ActionValue":
        s = text.strip()
        if s == "-inf":
            return cls.neg_inf()
        return cls.of(Fraction(s))

    def __repr__(self) -> str:
        return "ActionValue(%s)" % self.to_text()


def action_max(values) -> ActionValue:
    """Max of action values; empty input gives -inf (the action of 0)."""
    best = ActionValue.neg_inf()
    for v in values:
        if v > best:
            best = v
    return best


def action_sum(values) -> ActionValue:
    """Sum of action values; -inf absorbs."""
    total = Fraction(0)
    for v in values:
        if v.is_neg_inf:
            return ActionValue.neg_inf()
        total += v.value
    return ActionValue.of(total)


def action(coeff: NovikovElement, h) -> ActionValue:
    """Action of a single generator term: -val(coeff) + h, or -inf for
    coefficient zero."""
    if coeff.is_zero:
        return ActionValue.neg_inf()
    return ActionValue.of(-valuation(coeff) + _frac(h))


def action_of_sum(terms) -> ActionValue:
    """Action of a formal sum of (coefficient, generator level) terms:
    the max of the per-term actions, -inf for the empty or zero sum."""
    return action_max(action(c, h) for c, h in terms)

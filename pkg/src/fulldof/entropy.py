"""Finite-support random variables with exact rational probabilities.

Independence is structural: every :class:`Var` registered in an
:class:`RVFamily` is independent of every other one, and a copy is a new
registry entry.  Expressions such as ``h*(V2 + V3) + V1s`` are
:class:`LinExpr` objects; the family turns them into exact distributions.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exactnum import ApproxReal, approx_sum, as_rationals, format_rational, log2_bounded, to_rational


@dataclass(frozen=True)
class DiscreteRV:
    support: tuple[Fraction, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        support, probs = as_rationals(self.support), as_rationals(self.probs)
        if len(support) != len(probs):
            raise ValueError("support and probs differ in length")
        if not support:
            raise ValueError("empty support")
        if len(set(support)) != len(support):
            raise ValueError("support points must be distinct")
        if any(p <= 0 for p in probs):
            raise ValueError("probabilities must be positive")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        pairs = sorted(zip(support, probs))
        object.__setattr__(self, "support", tuple(x for x, _ in pairs))
        object.__setattr__(self, "probs", tuple(p for _, p in pairs))

    @classmethod
    def from_mapping(cls, pmf: Mapping) -> "DiscreteRV":
        items = [(to_rational(x), to_rational(p)) for x, p in pmf.items() if to_rational(p) != 0]
        return cls(tuple(x for x, _ in items), tuple(p for _, p in items))

    @classmethod
    def uniform(cls, points: Iterable) -> "DiscreteRV":
        pts = as_rationals(list(points))
        return cls(pts, (Fraction(1, len(pts)),) * len(pts))

    @classmethod
    def point_mass(cls, x=0) -> "DiscreteRV":
        return cls((to_rational(x),), (Fraction(1),))

    def pmf(self) -> dict[Fraction, Fraction]:
        return dict(zip(self.support, self.probs))

    def is_deterministic(self) -> bool:
        return len(self.support) == 1

    def __len__(self):
        return len(self.support)

    def to_json(self) -> dict:
        return {"support": [format_rational(x) for x in self.support],
                "probs": [format_rational(p) for p in self.probs]}


def linear_combination(coeffs: Sequence, rvs: Sequence[DiscreteRV]) -> DiscreteRV:
    """Exact law of sum_j c_j V_j for mutually independent V_j."""
    coeffs = as_rationals(coeffs)
    if len(coeffs) != len(rvs):
        raise ValueError(f"{len(coeffs)} coefficients for {len(rvs)} variables")
    if not rvs:
        raise ValueError("empty linear combination")
    acc = {Fraction(0): Fraction(1)}
    for c, rv in zip(coeffs, rvs):
        if c == 0:
            continue
        nxt: dict[Fraction, Fraction] = {}
        for s, ps in acc.items():
            for x, px in zip(rv.support, rv.probs):
                key = s + c * x
                nxt[key] = nxt.get(key, 0) + ps * px
        acc = nxt
    return DiscreteRV.from_mapping(acc)


def entropy_bits(rv: DiscreteRV) -> ApproxReal:
    """Shannon entropy in bits; only the logarithms are inexact."""
    if rv.is_deterministic():
        return ApproxReal(0.0, 0.0)
    return approx_sum(log2_bounded(1 / p).scale(p) for p in rv.probs)


def ruzsa_delta(V: DiscreteRV, W: DiscreteRV) -> ApproxReal:
    """H(V - W) - H(V)/2 - H(W)/2 for independent V, W."""
    diff = linear_combination((1, -1), (V, W))
    return entropy_bits(diff) - entropy_bits(V).scale(Fraction(1, 2)) - entropy_bits(W).scale(Fraction(1, 2))


# --- families, copies and linear expressions ---------------------------------

@dataclass(frozen=True)
class Var:
    id: int
    name: str

    def _expr(self) -> "LinExpr":
        return LinExpr(((self, Fraction(1)),))

    def __add__(self, other):
        return self._expr() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self._expr() - other

    def __rsub__(self, other):
        return _as_expr(other) - self._expr()

    def __neg__(self):
        return -self._expr()

    def __mul__(self, c):
        return self._expr() * c

    __rmul__ = __mul__

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class LinExpr:
    """A finite sum of rational multiples of family variables."""

    terms: tuple[tuple[Var, Fraction], ...] = ()

    def __post_init__(self):
        acc: dict[Var, Fraction] = {}
        for v, c in self.terms:
            acc[v] = acc.get(v, Fraction(0)) + to_rational(c)
        terms = tuple(sorted(((v, c) for v, c in acc.items() if c != 0), key=lambda t: t[0].id))
        object.__setattr__(self, "terms", terms)

    def __add__(self, other):
        other = _as_expr(other)
        if other is NotImplemented:
            return other
        return LinExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr(tuple((v, -c) for v, c in self.terms))

    def __sub__(self, other):
        other = _as_expr(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _as_expr(other) - self

    def __mul__(self, c):
        if isinstance(c, (Var, LinExpr)):
            return NotImplemented
        c = to_rational(c)
        return LinExpr(tuple((v, c * k) for v, k in self.terms))

    __rmul__ = __mul__

    def variables(self) -> tuple[Var, ...]:
        return tuple(v for v, _ in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for v, c in self.terms:
            parts.append(v.name if c == 1 else f"-{v.name}" if c == -1 else f"{format_rational(c)}*{v.name}")
        return " + ".join(parts).replace("+ -", "- ")


def _as_expr(x) -> LinExpr:
    if isinstance(x, LinExpr):
        return x
    if isinstance(x, Var):
        return x._expr()
    if isinstance(x, int) and x == 0:
        return LinExpr()
    return NotImplemented


class RVFamily:
    """K independent variables V1..VK plus an append-only registry of independent copies."""

    def __init__(self, rvs: Sequence[DiscreteRV], names: Optional[Sequence[str]] = None):
        if not rvs:
            raise ValueError("a family needs at least one variable")
        names = list(names) if names else [f"V{k + 1}" for k in range(len(rvs))]
        self._dists: dict[int, DiscreteRV] = {}
        self._vars: list[Var] = []
        self._base: list[Var] = []
        self._copy_of: dict[int, int] = {}
        self._H_cache: dict[tuple, ApproxReal] = {}
        for rv, name in zip(rvs, names):
            self._base.append(self._register(rv, name))

    def _register(self, rv: DiscreteRV, name: str) -> Var:
        if any(v.name == name for v in self._vars):
            raise ValueError(f"duplicate variable name {name!r}")
        v = Var(len(self._vars), name)
        self._vars.append(v)
        self._dists[v.id] = rv
        return v

    @property
    def K(self) -> int:
        return len(self._base)

    def __getitem__(self, k: int) -> Var:
        """Base variable V_k, 1-based."""
        if not 1 <= k <= self.K:
            raise IndexError(f"variable index must be in 1..{self.K}")
        return self._base[k - 1]

    @property
    def base(self) -> tuple[Var, ...]:
        return tuple(self._base)

    @property
    def variables(self) -> tuple[Var, ...]:
        return tuple(self._vars)

    def rv(self, v: Union[Var, int]) -> DiscreteRV:
        if isinstance(v, int):
            v = self[v]
        return self._dists[v.id]

    def copy(self, v: Union[Var, int], name: Optional[str] = None) -> Var:
        """A fresh variable with the law of ``v``, independent of everything registered."""
        if isinstance(v, int):
            v = self[v]
        self._check(v)
        root = self._copy_of.get(v.id, v.id)
        name = name or f"{self._vars[root].name}#{len(self._vars)}"
        new = self._register(self._dists[v.id], name)
        self._copy_of[new.id] = root
        return new

    def copy_of(self, v: Var) -> Optional[Var]:
        root = self._copy_of.get(v.id)
        return None if root is None else self._vars[root]

    def _check(self, v: Var) -> None:
        if v.id >= len(self._vars) or self._vars[v.id] != v:
            raise ValueError(f"{v!r} does not belong to this family")

    def dist(self, expr) -> DiscreteRV:
        expr = _as_expr(expr)
        if not expr.terms:
            return DiscreteRV.point_mass(0)
        for v in expr.variables():
            self._check(v)
        coeffs = [c for _, c in expr.terms]
        return linear_combination(coeffs, [self._dists[v.id] for v in expr.variables()])

    def H(self, expr) -> ApproxReal:
        expr = _as_expr(expr)
        key = self._law_key(expr)
        if key not in self._H_cache:
            self._H_cache[key] = entropy_bits(self.dist(expr))
        return self._H_cache[key]

    def _law_key(self, expr: LinExpr) -> tuple:
        # the law depends only on the multiset of (distribution, coefficient)
        return tuple(sorted(((self._copy_of.get(v.id, v.id), c) for v, c in expr.terms)))

    def delta(self, X, Y) -> ApproxReal:
        """Ruzsa-type distance H(X - Y) - H(X)/2 - H(Y)/2 of two independent expressions."""
        X, Y = _as_expr(X), _as_expr(Y)
        if set(X.variables()) & set(Y.variables()):
            raise ValueError("delta needs expressions in disjoint (independent) variables")
        half = Fraction(1, 2)
        return self.H(X - Y) - self.H(X).scale(half) - self.H(Y).scale(half)


def brute_force_law(coeffs: Sequence, rvs: Sequence[DiscreteRV]) -> dict[Fraction, Fraction]:
    """Law of sum c_j V_j by enumerating every joint outcome tuple."""
    coeffs = as_rationals(coeffs)
    law: dict[Fraction, Fraction] = {}
    for outcome in itertools.product(*(list(zip(rv.support, rv.probs)) for rv in rvs)):
        value = sum((c * x for c, (x, _) in zip(coeffs, outcome)), Fraction(0))
        p = Fraction(1)
        for _, px in outcome:
            p *= px
        law[value] = law.get(value, 0) + p
    return law

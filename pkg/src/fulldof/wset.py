"""Monomials in the off-diagonal channel entries and the truncated sets W_{N,d}."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence, Union

from .channel import CanonicalForm3, ChannelMatrix, off_diagonal_positions
from .exactnum import UniPoly, to_rational

DEFAULT_ENUMERATION_CAP = 10 ** 7

Value = Union[Fraction, UniPoly]


class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured size cap."""


def phi(K: int, d: int) -> int:
    """Number of monomials of degree <= d in K(K-1) variables."""
    if K < 2 or d < 0:
        raise ValueError(f"need K >= 2 and d >= 0, got K={K}, d={d}")
    return comb(K * (K - 1) + d, d)


@dataclass(frozen=True)
class MonomialBasis:
    K: int
    d: int
    exponents: tuple[tuple[int, ...], ...]

    @property
    def nvars(self) -> int:
        return self.K * (self.K - 1)

    def __len__(self):
        return len(self.exponents)


def _exponents_of_degree(n: int, deg: int):
    # lex order with x1 > x2 > ... : larger leading exponents first
    if n == 1:
        yield (deg,)
        return
    for first in range(deg, -1, -1):
        for rest in _exponents_of_degree(n - 1, deg - first):
            yield (first,) + rest


def enumerate_monomials(K: int, d: int, cap: int = DEFAULT_ENUMERATION_CAP) -> MonomialBasis:
    """Graded-lexicographic list of exponent vectors, constant monomial first."""
    count = phi(K, d)
    if count > cap:
        raise CapExceeded(f"phi({K},{d}) = {count} monomials exceeds cap {cap}")
    n = K * (K - 1)
    exps = tuple(e for deg in range(d + 1) for e in _exponents_of_degree(n, deg))
    return MonomialBasis(K, d, exps)


def _check_hvec(basis: MonomialBasis, hvec: Sequence) -> None:
    if len(hvec) != basis.nvars:
        raise ValueError(f"off-diagonal vector has length {len(hvec)}, expected {basis.nvars}")


def eval_basis(basis: MonomialBasis, hvec: Sequence) -> tuple[Value, ...]:
    """Evaluate every monomial at ``hvec`` (rationals, or UniPolys for symbolic mode)."""
    _check_hvec(basis, hvec)
    symbolic = any(isinstance(x, UniPoly) for x in hvec)
    if symbolic:
        hs = [x if isinstance(x, UniPoly) else _const_poly(x) for x in hvec]
        one = UniPoly.const(1)
    else:
        hs = [to_rational(x) for x in hvec]
        if any(x == 0 for x in hs):
            raise ValueError("off-diagonal entries must be nonzero")
        one = Fraction(1)
    out = []
    for e in basis.exponents:
        v = one
        for x, k in zip(hs, e):
            if k:
                v = v * x ** k
        out.append(v)
    return tuple(out)


def _const_poly(x) -> UniPoly:
    x = to_rational(x)
    if x.denominator != 1:
        raise ValueError(f"symbolic mode needs integer constants, got {x}")
    return UniPoly.const(x.numerator)


def hvec_of(M: Union[ChannelMatrix, CanonicalForm3], symbolic: bool = False) -> tuple[Value, ...]:
    """Off-diagonal vector of a matrix; in symbolic mode h is the indeterminate."""
    if symbolic:
        if not isinstance(M, CanonicalForm3):
            raise TypeError("symbolic mode works on the canonical 3-user form")
        one = UniPoly.const(1)
        return (one, one, one, one, one, UniPoly.monomial(1))
    if isinstance(M, CanonicalForm3):
        M = M.matrix()
    return M.off_diagonal()


@dataclass(frozen=True)
class WSetTruncation:
    N: int
    d: int
    values: frozenset
    # one coefficient vector in {0..N-1}^phi per value, first in enumeration order
    representatives: dict = field(compare=False, repr=False)

    def __len__(self):
        return len(self.values)

    def __contains__(self, v):
        return v in self.values

    def sorted_values(self) -> list:
        if self.values and isinstance(next(iter(self.values)), UniPoly):
            return sorted(self.values, key=lambda p: (p.degree, p.coeffs))
        return sorted(self.values)


def sumset_table(fvals: Sequence, coeff_range: Sequence[int], cap: int) -> dict:
    """All distinct values of sum_k c_k f_k with c_k in ``coeff_range``.

    Returns value -> coefficient tuple (first found).  The table is built one
    monomial at a time and deduplicated as it grows; ``cap`` bounds its size.
    """
    zero = UniPoly() if fvals and isinstance(fvals[0], UniPoly) else 0
    table = {zero: ()}
    for f in fvals:
        nxt = {}
        for v, coeffs in table.items():
            for c in coeff_range:
                w = v + c * f if c else v
                if w not in nxt:
                    nxt[w] = coeffs + (c,)
                    if len(nxt) > cap:
                        raise CapExceeded(f"partial-sum table exceeds cap {cap}")
        table = nxt
    return table


def generate_W(N: int, d: int, hvec: Sequence, cap: int = DEFAULT_ENUMERATION_CAP) -> WSetTruncation:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    K = _users_from_len(len(hvec))
    basis = enumerate_monomials(K, d, cap)
    if N ** len(basis) > cap:
        raise CapExceeded(
            f"N^phi(d) = {N}^{len(basis)} exceeds cap {cap}; use the injectivity search instead"
        )
    fvals = eval_basis(basis, hvec)
    table = sumset_table(fvals, range(N), cap)
    if not isinstance(fvals[0], UniPoly):
        table = {Fraction(v): c for v, c in table.items()}
    return WSetTruncation(N, d, frozenset(table), table)


def _users_from_len(n: int) -> int:
    K = 2
    while K * (K - 1) < n:
        K += 1
    if K * (K - 1) != n:
        raise ValueError(f"off-diagonal vector length {n} is not K(K-1) for any K")
    return K


def dot(coeffs: Sequence[int], fvals: Sequence) -> Value:
    zero = UniPoly() if isinstance(fvals[0], UniPoly) else Fraction(0)
    return sum((c * f for c, f in zip(coeffs, fvals) if c), zero)


def monomial_label(exponent: Sequence[int], K: int) -> str:
    if not any(exponent):
        return "1"
    parts = []
    for (i, j), k in zip(off_diagonal_positions(K), exponent):
        if k:
            parts.append(f"h{i}{j}" + (f"^{k}" if k > 1 else ""))
    return "*".join(parts)


__all__ = [
    "CapExceeded", "MonomialBasis", "WSetTruncation", "phi", "enumerate_monomials",
    "eval_basis", "generate_W", "hvec_of", "sumset_table", "dot",
]

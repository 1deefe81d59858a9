"""Channel matrices, row/column scaling and the 3-user canonical form.

Users and matrix positions are 1-based in everything user-facing (reports,
violation lists, CLI flags); Python indexing stays 0-based internally.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactnum import as_rationals, format_rational


class NotFullyConnected(ValueError):
    pass


@dataclass(frozen=True)
class ChannelMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(as_rationals(r) for r in self.entries)
        K = len(rows)
        if K < 2:
            raise ValueError(f"need at least 2 users, got K={K}")
        for i, r in enumerate(rows):
            if len(r) != K:
                raise ValueError(f"row {i + 1} has {len(r)} entries, expected {K}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ChannelMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def ones(cls, K: int) -> "ChannelMatrix":
        return cls(tuple((Fraction(1),) * K for _ in range(K)))

    @property
    def K(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self.entries[i][i] for i in range(self.K))

    def off_diagonal(self) -> tuple[Fraction, ...]:
        """The vector of off-diagonal entries, row-major with the diagonal skipped."""
        return tuple(self.entries[i][j] for i in range(self.K) for j in range(self.K) if i != j)

    def to_json(self) -> dict:
        return {"K": self.K, "entries": [[format_rational(x) for x in r] for r in self.entries]}


def off_diagonal_positions(K: int) -> list[tuple[int, int]]:
    """1-based (i, j) labels of the off-diagonal vector, in flattening order."""
    return [(i + 1, j + 1) for i in range(K) for j in range(K) if i != j]


def validate_fully_connected(M: ChannelMatrix) -> list[tuple[int, int]]:
    """Zero positions (1-based); an empty list means the matrix is fully connected."""
    return [(i + 1, j + 1) for i in range(M.K) for j in range(M.K) if M.entries[i][j] == 0]


def require_fully_connected(M: ChannelMatrix) -> None:
    zeros = validate_fully_connected(M)
    if zeros:
        raise NotFullyConnected(f"channel matrix has zero entries at {zeros}")


def scale(M: ChannelMatrix, rows: Sequence, cols: Sequence) -> ChannelMatrix:
    r, c = as_rationals(rows), as_rationals(cols)
    if len(r) != M.K or len(c) != M.K:
        raise ValueError(f"need {M.K} row and {M.K} column factors")
    if any(x == 0 for x in r + c):
        raise ValueError("scaling factors must be nonzero")
    return ChannelMatrix(tuple(
        tuple(r[i] * c[j] * M.entries[i][j] for j in range(M.K)) for i in range(M.K)
    ))


@dataclass(frozen=True)
class CanonicalForm3:
    """The representative ``[[g1, 1, 1], [1, g2, 1], [1, h, g3]]`` of a scaling class."""

    g: tuple[Fraction, Fraction, Fraction]
    h: Fraction
    rows: tuple[Fraction, Fraction, Fraction] = (Fraction(1),) * 3
    cols: tuple[Fraction, Fraction, Fraction] = (Fraction(1),) * 3

    def __post_init__(self):
        object.__setattr__(self, "g", as_rationals(self.g))
        object.__setattr__(self, "h", as_rationals([self.h])[0])
        object.__setattr__(self, "rows", as_rationals(self.rows))
        object.__setattr__(self, "cols", as_rationals(self.cols))
        if len(self.g) != 3:
            raise ValueError("canonical form needs exactly three diagonal entries")

    @property
    def K(self) -> int:
        return 3

    def matrix(self) -> ChannelMatrix:
        g1, g2, g3 = self.g
        one = Fraction(1)
        return ChannelMatrix(((g1, one, one), (one, g2, one), (one, self.h, g3)))

    def params(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (*self.g, self.h)

    def to_json(self) -> dict:
        return {
            "g": [format_rational(x) for x in self.g],
            "h": format_rational(self.h),
            "rows": [format_rational(x) for x in self.rows],
            "cols": [format_rational(x) for x in self.cols],
        }


def canonicalize3(M: ChannelMatrix) -> CanonicalForm3:
    """Scale a fully connected 3x3 matrix to canonical form, with gauge r1 = 1."""
    if M.K != 3:
        raise ValueError(f"canonical form is defined for K = 3 only, got K = {M.K}")
    require_fully_connected(M)
    (h11, h12, h13), (h21, h22, h23), (h31, h32, h33) = M.entries
    r1 = Fraction(1)
    c2 = 1 / h12
    c3 = 1 / h13
    r2 = h13 / h23
    c1 = h23 / (h13 * h21)
    r3 = h13 * h21 / (h23 * h31)
    rows, cols = (r1, r2, r3), (c1, c2, c3)
    S = scale(M, rows, cols)
    g = S.diagonal()
    return CanonicalForm3(g=g, h=S.entries[2][1], rows=rows, cols=cols)


def cross_ratio(M: ChannelMatrix) -> Fraction:
    """(h13 h21 h32) / (h12 h23 h31), the scaling invariant that becomes h."""
    require_fully_connected(M)
    e = M.entries
    return (e[0][2] * e[1][0] * e[2][1]) / (e[0][1] * e[1][2] * e[2][0])

"""Deciding the injectivity condition on W_{N,d} x W_{N,d}, one user at a time.

For user i with diagonal g the map (w1, w2) -> w1 + g*w2 collides on W_{N,d}
iff there are integer vectors a, b in the box [-(N-1), N-1]^phi with
b.f != 0 and g*(b.f) = a.f.  Both halves range over the same box, so the
search builds one hash index of the distinct values of a.f and then walks
the b side probing for g*(b.f).
"""
from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .channel import CanonicalForm3, ChannelMatrix, canonicalize3, require_fully_connected
from .exactnum import PolyRatio, UniPoly, format_rational, to_rational
from .wset import (
    DEFAULT_ENUMERATION_CAP,
    CapExceeded,
    enumerate_monomials,
    eval_basis,
    generate_W,
    hvec_of,
    sumset_table,
)

Matrix = Union[ChannelMatrix, CanonicalForm3]


@dataclass(frozen=True)
class CollisionWitness:
    user: int
    N: int
    d: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    w1: tuple[int, ...]
    w2: tuple[int, ...]
    w1t: tuple[int, ...]
    w2t: tuple[int, ...]
    af: object
    bf: object
    symbolic: bool = False

    verdict = "witness"

    @classmethod
    def from_differences(cls, user, N, d, a, b, af, bf, symbolic=False) -> "CollisionWitness":
        """Sign-split a = w1 - w1t and b = w2t - w2 into {0..N-1} vectors."""
        a, b = tuple(a), tuple(b)
        if any(abs(x) > N - 1 for x in a + b):
            raise ValueError("difference vector leaves the coefficient box")
        w1 = tuple(max(x, 0) for x in a)
        w1t = tuple(max(-x, 0) for x in a)
        w2t = tuple(max(x, 0) for x in b)
        w2 = tuple(max(-x, 0) for x in b)
        return cls(user, N, d, a, b, w1, w2, w1t, w2t, af, bf, symbolic)

    def values(self, fvals: Sequence) -> tuple:
        """(w1, w2, w1t, w2t) as W elements."""
        return tuple(_combine(v, fvals) for v in (self.w1, self.w2, self.w1t, self.w2t))

    def to_json(self, g=None, fvals=None) -> dict:
        out = {
            "verdict": "witness",
            "user": self.user,
            "N": self.N,
            "d": self.d,
            "a": list(self.a),
            "b": list(self.b),
            "w1": list(self.w1),
            "w2": list(self.w2),
            "w1t": list(self.w1t),
            "w2t": list(self.w2t),
            "af": _value_json(self.af),
            "bf": _value_json(self.bf),
        }
        if g is not None and fvals is not None:
            w1, w2, w1t, w2t = self.values(fvals)
            if self.symbolic:
                g = _as_ratio(g)
                out["lhs"] = {"num": (g.den * w1 + g.num * w2).to_list(), "den": g.den.to_list()}
                out["rhs"] = {"num": (g.den * w1t + g.num * w2t).to_list(), "den": g.den.to_list()}
            else:
                out["lhs"] = format_rational(w1 + g * w2)
                out["rhs"] = format_rational(w1t + g * w2t)
        return out


@dataclass(frozen=True)
class TruncationCertificate:
    users: tuple[int, ...]
    N: int
    d: int
    search_space: int
    distinct_differences: int = 0
    symbolic: bool = False

    verdict = "injective-at-truncation"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "users": list(self.users),
            "N": self.N,
            "d": self.d,
            "search_space": self.search_space,
            "distinct_differences": self.distinct_differences,
        }


Verdict = Union[CollisionWitness, TruncationCertificate]


def _combine(coeffs, fvals):
    zero = UniPoly() if isinstance(fvals[0], UniPoly) else Fraction(0)
    return sum((c * f for c, f in zip(coeffs, fvals) if c), zero)


def _value_json(v):
    if isinstance(v, UniPoly):
        return v.to_list()
    return format_rational(v)


def _as_ratio(g) -> PolyRatio:
    if isinstance(g, PolyRatio):
        return g
    return PolyRatio.constant(g)


@dataclass(frozen=True)
class Problem:
    """Everything one user's search needs: basis values and the diagonal entry."""

    user: int
    N: int
    d: int
    fvals: tuple
    g: object  # Fraction in numeric mode, PolyRatio in symbolic mode
    symbolic: bool = False
    hvec: tuple = field(default=(), compare=False, repr=False)


def build_problem(M: Matrix, user: int, N: int, d: int, *, symbolic: bool = False,
                  diagonal: Optional[PolyRatio] = None, cap: int = DEFAULT_ENUMERATION_CAP) -> Problem:
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if d < 0:
        raise ValueError(f"d must be >= 0, got {d}")
    if symbolic and isinstance(M, ChannelMatrix):
        M = canonicalize3(M)
    K = M.K
    if not 1 <= user <= K:
        raise ValueError(f"user must be in 1..{K}, got {user}")
    if isinstance(M, ChannelMatrix):
        require_fully_connected(M)
    basis = enumerate_monomials(K, d, cap)
    hvec = hvec_of(M, symbolic=symbolic)
    fvals = eval_basis(basis, hvec)
    if symbolic:
        g = diagonal if diagonal is not None else PolyRatio.constant(M.g[user - 1])
        if g.num.is_zero():
            raise ValueError("diagonal entry must be nonzero")
    else:
        if diagonal is not None:
            if not isinstance(M, CanonicalForm3):
                raise TypeError("a polynomial diagonal needs the canonical form (for the value of h)")
            g = diagonal.evaluate(M.h)
        else:
            mat = M.matrix() if isinstance(M, CanonicalForm3) else M
            g = mat[user - 1, user - 1]
        if g == 0:
            raise ValueError("diagonal entry must be nonzero")
    return Problem(user, N, d, tuple(fvals), g, symbolic, tuple(hvec))


# --- meet-in-the-middle search ------------------------------------------------

_PROBE = {}


def _integerize(fvals: Sequence[Fraction]) -> tuple[list[int], int]:
    L = math.lcm(*(f.denominator for f in fvals))
    return [int(f * L) for f in fvals], L


def _make_probe(problem: Problem, cap: int):
    """Index of distinct a.f values plus a function mapping b.f to the needed a.f."""
    # small coefficients first, so representatives stay short
    box = sorted(range(-(problem.N - 1), problem.N), key=lambda c: (abs(c), c < 0))
    if problem.symbolic:
        index = sumset_table(problem.fvals, box, cap)
        num, den = problem.g.num, problem.g.den

        def target(beta):
            return (num * beta).exact_div(den)
    else:
        ints, _ = _integerize(problem.fvals)
        index = sumset_table(ints, box, cap)
        p, q = problem.g.numerator, problem.g.denominator

        def target(beta):
            t = p * beta
            return t // q if t % q == 0 else None
    return index, target


def _first_hit(lo: int, hi: int) -> Optional[int]:
    keys, index, target = _PROBE["keys"], _PROBE["index"], _PROBE["target"]
    for pos in range(lo, hi):
        beta = keys[pos]
        if not beta:
            continue
        alpha = target(beta)
        if alpha is not None and alpha in index:
            return pos
    return None


def check_user(M: Matrix, user: int, N: int, d: int, *, symbolic: bool = False,
               diagonal: Optional[PolyRatio] = None, cap: int = DEFAULT_ENUMERATION_CAP,
               workers: int = 1) -> Verdict:
    """Witness or level-qualified certificate for one user at truncation (N, d).

    Raises :class:`CapExceeded` when the partial-sum index outgrows ``cap``;
    the verdict is then unknown, never certified.
    """
    problem = build_problem(M, user, N, d, symbolic=symbolic, diagonal=diagonal, cap=cap)
    return search(problem, cap=cap, workers=workers)


def search(problem: Problem, cap: int = DEFAULT_ENUMERATION_CAP, workers: int = 1) -> Verdict:
    index, target = _make_probe(problem, cap)
    keys = list(index)
    _PROBE.update(keys=keys, index=index, target=target)
    try:
        if workers <= 1 or len(keys) < 4 * workers:
            hit = _first_hit(0, len(keys))
        else:
            bounds = np.linspace(0, len(keys), 4 * workers + 1).astype(int)
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(workers, mp_context=ctx) as pool:
                hits = pool.map(_first_hit, bounds[:-1].tolist(), bounds[1:].tolist())
                found = [h for h in hits if h is not None]
            hit = min(found) if found else None
    finally:
        _PROBE.clear()

    space = (2 * problem.N - 1) ** len(problem.fvals)
    if hit is None:
        return TruncationCertificate((problem.user,), problem.N, problem.d, space,
                                     len(index), problem.symbolic)
    beta = keys[hit]
    alpha = target(beta)
    b, a = index[beta], index[alpha]
    af, bf = _combine(a, problem.fvals), _combine(b, problem.fvals)
    return CollisionWitness.from_differences(problem.user, problem.N, problem.d, a, b, af, bf,
                                             problem.symbolic)


def check_condition(M: Matrix, N: int, d: int, short_circuit: bool = True, **kwargs) -> list[Verdict]:
    """Per-user verdicts in user order; by default stops at the first witness."""
    verdicts = []
    for user in range(1, M.K + 1):
        v = check_user(M, user, N, d, **kwargs)
        verdicts.append(v)
        if short_circuit and isinstance(v, CollisionWitness):
            break
    return verdicts


def condition_holds(verdicts: Sequence[Verdict]) -> bool:
    return all(isinstance(v, TruncationCertificate) for v in verdicts)


# --- oracle and witness validation ---------------------------------------------

def validate_witness(w: CollisionWitness, fvals: Sequence, g) -> bool:
    """Substitute the four W elements into w1 + g w2 = w1t + g w2t, exactly."""
    box = range(w.N)
    for vec in (w.w1, w.w2, w.w1t, w.w2t):
        if len(vec) != len(fvals) or any(c not in box for c in vec):
            return False
    w1, w2, w1t, w2t = w.values(fvals)
    if w1 == w1t or w2 == w2t:
        return False
    if isinstance(fvals[0], UniPoly):
        g = _as_ratio(g)
        return g.den * w1 + g.num * w2 == g.den * w1t + g.num * w2t
    g = to_rational(g)
    return w1 + g * w2 == w1t + g * w2t


def brute_force_check(M: Matrix, user: int, N: int, d: int, *, symbolic: bool = False,
                      diagonal: Optional[PolyRatio] = None,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> Verdict:
    """Compare all |W|^2 map outputs literally (oracle for :func:`check_user`)."""
    problem = build_problem(M, user, N, d, symbolic=symbolic, diagonal=diagonal, cap=cap)
    return brute_force_problem(problem, cap)


def brute_force_problem(problem: Problem, cap: int = DEFAULT_ENUMERATION_CAP) -> Verdict:
    W = generate_W(problem.N, problem.d, problem.hvec, cap)
    reps = W.representatives
    values = list(reps)
    if len(values) ** 2 > cap:
        raise CapExceeded(f"|W|^2 = {len(values) ** 2} pairs exceeds cap {cap}")
    hit = _collision_pair(values, problem)
    space = problem.N ** len(problem.fvals)
    if hit is None:
        return TruncationCertificate((problem.user,), problem.N, problem.d, space ** 2,
                                     len(values), problem.symbolic)
    (w1, w2), (w1t, w2t) = hit
    c1, c2, c1t, c2t = reps[w1], reps[w2], reps[w1t], reps[w2t]
    wit = CollisionWitness(problem.user, problem.N, problem.d,
                           tuple(x - y for x, y in zip(c1, c1t)),
                           tuple(x - y for x, y in zip(c2t, c2)),
                           c1, c2, c1t, c2t, w1 - w1t, w2t - w2, problem.symbolic)
    return wit


def _collision_pair(values: list, problem: Problem):
    """First pair of distinct inputs with equal output, in row-major pair order."""
    if problem.symbolic:
        num, den = problem.g.num, problem.g.den
        seen = {}
        for w2 in values:
            for w1 in values:
                out = den * w1 + num * w2
                prev = seen.setdefault(out, (w1, w2))
                if prev != (w1, w2):
                    return prev, (w1, w2)
        return None
    ints, L = _integerize(values) if values else ([], 1)
    p, q = problem.g.numerator, problem.g.denominator
    big = max((abs(x) for x in ints), default=0) * (abs(p) + q)
    if big < 2 ** 62:
        arr = np.asarray(ints, dtype=np.int64)
        outs = np.add.outer(p * arr, q * arr).ravel()  # row = w2, column = w1
        _, first = np.unique(outs, return_index=True)
        repeat = np.ones(outs.size, dtype=bool)
        repeat[first] = False
        if not repeat.any():
            return None
        second = int(np.flatnonzero(repeat)[0])
        firstpos = int(np.flatnonzero(outs == outs[second])[0])
        n = len(values)
        (r0, c0), (r1, c1) = divmod(firstpos, n), divmod(second, n)
        return (values[c0], values[r0]), (values[c1], values[r1])
    seen = {}
    for w2i, w2 in zip(ints, values):
        for w1i, w1 in zip(ints, values):
            out = q * w1i + p * w2i
            prev = seen.setdefault(out, (w1, w2))
            if prev != (w1, w2):
                return prev, (w1, w2)
    return None


def rational_diagonal_witness(g, N: int, user: int = 1) -> Optional[CollisionWitness]:
    """Explicit d = 0 witness for g = p/q when max(|p|, |q|) <= N - 1, else None."""
    g = to_rational(g)
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if g == 0:
        raise ValueError("diagonal entry must be nonzero")
    p, q = g.numerator, g.denominator
    if max(abs(p), q) > N - 1:
        return None
    return CollisionWitness.from_differences(user, N, 0, (p,), (q,), Fraction(p), Fraction(q))

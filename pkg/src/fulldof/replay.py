"""Numerical walk through the 3-user necessity argument.

A trace is a list of steps.  Unconditional inequalities get a verdict;
"ratio = 1 + O(eps)" style steps only carry a residual against their
target, because the O(eps) constants are never made explicit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import inequalities as ineq
from .channel import CanonicalForm3, ChannelMatrix, canonicalize3
from .entropy import DiscreteRV, LinExpr, RVFamily
from .exactnum import ApproxReal, PolyRatio, UniPoly, format_rational, to_rational
from .injectivity import (
    CollisionWitness,
    TruncationCertificate,
    build_problem,
    check_user,
    rational_diagonal_witness,
    validate_witness,
)

UNCONDITIONAL = "unconditional-inequality"
RESIDUAL = "residual-equality"
REPORT = "report"


class ZeroEntropy(ValueError):
    pass


class NoWitness(ValueError):
    """The diagonal is not demonstrably violating at the requested truncation level."""


class ViolatingDiagonal(PolyRatio):
    """g1 = (sum_p a_p h^p) / (sum_p b_p h^p) with both polynomials nonzero."""

    def __post_init__(self):
        super().__post_init__()
        if self.num.is_zero():
            raise ValueError("numerator polynomial must be nonzero")

    @property
    def d1(self) -> int:
        return self.num.degree

    @property
    def d2(self) -> int:
        return self.den.degree


@dataclass(frozen=True)
class Step:
    label: str
    kind: str
    description: str
    value: Optional[ApproxReal] = None
    target: Optional[Fraction] = None
    report: object = None  # InequalityReport / MadimanPair for unconditional steps

    @property
    def residual(self) -> Optional[float]:
        if self.value is None or self.target is None:
            return None
        return abs(self.value.value - float(self.target))

    @property
    def verdict(self) -> str:
        if self.kind != UNCONDITIONAL:
            return "report-only"
        return "holds" if self.report.holds else "violation"

    def to_json(self) -> dict:
        out = {"label": self.label, "kind": self.kind, "description": self.description,
               "verdict": self.verdict}
        if self.value is not None:
            out["value"] = self.value.to_json()
        if self.target is not None:
            out["target"] = format_rational(self.target)
            out["residual"] = self.residual
        if self.report is not None:
            out["report"] = self.report.to_json()
        return out


@dataclass
class InductionTrace:
    name: str
    steps: list[Step] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def unconditional(self) -> list[Step]:
        return [s for s in self.steps if s.kind == UNCONDITIONAL]

    @property
    def all_hold(self) -> bool:
        return all(s.verdict == "holds" for s in self.unconditional())

    def step(self, label: str) -> Step:
        for s in self.steps:
            if s.label == label:
                return s
        raise KeyError(label)

    def to_json(self) -> dict:
        return {"name": self.name, "meta": self.meta,
                "verdict": "all-hold" if self.all_hold else "violation",
                "steps": [s.to_json() for s in self.steps]}


class _Chain:
    """Bookkeeping shared by the replays: a private family and H(V1)."""

    def __init__(self, canon: CanonicalForm3, family, name: str, eps=None):
        rvs = [family.rv(v) for v in family.base] if isinstance(family, RVFamily) else list(family)
        if len(rvs) != 3:
            raise ValueError(f"the replay needs exactly three variables, got {len(rvs)}")
        self.canon = canon
        self.fam = RVFamily(rvs)
        self.V1, self.V2, self.V3 = self.fam.base
        for v in self.fam.base:
            if self.fam.H(v).value == 0:
                raise ZeroEntropy(f"{v.name} is deterministic; the chain divides by its entropy")
        self.H1 = self.fam.H(self.V1)
        self.trace = InductionTrace(name, meta={"h": format_rational(canon.h),
                                                "g": [format_rational(g) for g in canon.g]})
        if eps is not None:
            self._premise(to_rational(eps))

    def _premise(self, eps: Fraction) -> None:
        rep = ineq.dof_ratio(self.canon, [self.fam.rv(v) for v in self.fam.base])
        self.trace.meta.update(epsilon=format_rational(eps), premise_holds=rep.premise_holds(eps),
                               measured_epsilon=rep.epsilon.to_json())
        self.trace.steps.append(Step("premise", REPORT, "min DoF ratio vs 1/2 - eps",
                                     rep.min_ratio, Fraction(1, 2) - eps))

    def dist(self, expr) -> DiscreteRV:
        return self.fam.dist(expr)

    def ratio(self, label: str, expr, desc: str, denom=None, target=Fraction(1)) -> ApproxReal:
        denom = self.V1 if denom is None else denom
        value = self.fam.H(expr) / self.fam.H(denom)
        self.trace.steps.append(Step(label, RESIDUAL, desc, value, target))
        return value

    def check(self, label: str, report, desc: str) -> None:
        self.trace.steps.append(Step(label, UNCONDITIONAL, desc, report=report))

    def note(self, label: str, value: ApproxReal, desc: str, target=None) -> None:
        self.trace.steps.append(Step(label, REPORT, desc, value, target))

    def disjoint(self, *exprs) -> list[DiscreteRV]:
        seen = set()
        for e in exprs:
            vs = set(_expr(e).variables())
            if seen & vs:
                raise AssertionError("sub-expressions share variables; they are not independent")
            seen |= vs
        return [self.dist(e) for e in exprs]


def _expr(e) -> LinExpr:
    return e if isinstance(e, LinExpr) else LinExpr() + e


def _canon(M) -> CanonicalForm3:
    if isinstance(M, CanonicalForm3):
        return M
    if isinstance(M, ChannelMatrix):
        return canonicalize3(M)
    raise TypeError(f"expected a channel matrix or canonical form, got {type(M).__name__}")


def replay_base_case(canon, family, a0: int, b0: int, eps=None) -> InductionTrace:
    """The d = 0 chain ending in H(a0 V1 + b0 (V2 + V3)) / H(V1)."""
    canon = _canon(canon)
    if a0 == 0 or b0 == 0:
        raise ValueError("a0 and b0 must be nonzero integers")
    c = _Chain(canon, family, "base case", eps)
    c.trace.meta.update(a0=a0, b0=b0)
    _base_chain(c, a0, b0, c.V2 + c.V3)
    return c.trace


def _base_chain(c: _Chain, a0: int, b0: int, S) -> None:
    V1, V2, V3 = c.V1, c.V2, c.V3
    c.ratio("(25)", V2 + V3, "H(V2+V3)/H(V1)")
    c.ratio("(31)", V1 + V3, "H(V1+V3)/H(V1)")
    X, Y1, Y2 = c.disjoint(V3, V2, V1)
    c.check("(44) PR", ineq.check_pr_sum(X, [Y1, Y2]), "Pluennecke-Ruzsa with X=V3, Y=(V2, V1)")
    c.ratio("(44)", V1 + V2 + V3, "H(V1+V2+V3)/H(V3)", denom=V3)
    c.ratio("(45)", V1 + V2 + V3, "H(V1+V2+V3)/H(V1)")
    X, Y = c.disjoint(V1, S)
    c.check("(47)", ineq.check_wu_thm14(a0, b0, X, Y), "Wu Th. 14 with p=a0, q=b0, X=V1, Y=V2+V3")
    c.check("(48)", ineq.check_max_lower_bound(a0, b0, X, Y), "H(V1) <= H(a0 V1 + b0 (V2+V3))")
    c.ratio("(49)", a0 * V1 + b0 * S, "H(a0 V1 + b0 (V2+V3))/H(V1)")


def _poly_at(coeffs: Sequence[int], h: Fraction, upto: Optional[int] = None) -> Fraction:
    cs = coeffs[:upto] if upto is not None else coeffs
    return sum((Fraction(c) * h ** i for i, c in enumerate(cs)), Fraction(0))


def replay_induction_step(canon, family, a: Sequence[int], b: Sequence[int], eps=None) -> InductionTrace:
    """Induction-step quantities and the closing sandwich for degree m = len(a) - 1."""
    canon = _canon(canon)
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("coefficient lists a and b must have the same length")
    m = len(a) - 1
    if m < 1:
        raise ValueError("the induction step needs m >= 1 (use replay_base_case for m = 0)")
    c = _Chain(canon, family, f"induction step m={m}", eps)
    c.trace.meta.update(a=a, b=b, m=m)
    fam, h = c.fam, canon.h
    V1, V2, V3 = c.V1, c.V2, c.V3
    V1s, V1h = fam.copy(1, "V1*"), fam.copy(1, "V1^")
    V2t, V2h = fam.copy(2, "V2~"), fam.copy(2, "V2^")
    V3t, V3h = fam.copy(3, "V3~"), fam.copy(3, "V3^")
    S, St, Sh = V2 + V3, V2t + V3t, V2h + V3h

    alpha1, alpha2 = _poly_at(a, h, m), Fraction(a[m]) * h ** m
    beta1, beta2 = _poly_at(b, h, m), Fraction(b[m]) * h ** m
    c.trace.meta.update(alpha1=format_rational(alpha1), alpha2=format_rational(alpha2),
                        beta1=format_rational(beta1), beta2=format_rational(beta2))

    # (34)
    X, Y1, Y2 = c.disjoint(alpha2 * V1s, h * S, beta2 * St)
    c.check("(34) PR", ineq.check_pr_sum(X, [Y1, Y2]), "PR with X=a_m h^m V1*, Y=(h(V2+V3), b_m h^m (V2~+V3~))")
    c.ratio("(34)", h * S + alpha2 * V1s + beta2 * St, "H(h(V2+V3) + a_m h^m V1* + b_m h^m (V2~+V3~))/H(V1)")

    # (35)
    X, Y1, Y2 = c.disjoint(alpha1 * V1, h * S, beta1 * Sh)
    c.check("(35) PR", ineq.check_pr_sum(X, [Y1, Y2]), "PR with X=alpha1 V1, Y=(h(V2+V3), beta1 (V2^+V3^))")
    c.ratio("(35)", h * S + alpha1 * V1 + beta1 * Sh, "H(h(V2+V3) + alpha1 V1 + beta1 (V2^+V3^))/H(V1)")

    # (505)-(508)
    X, Y1, Y2 = c.disjoint(V1, S, St)
    c.check("(505) PR", ineq.check_pr_sum(X, [Y1, Y2]), "PR with X=V1, Y=(V2+V3, V2~+V3~)")
    c.ratio("(505)", V1 + S + St, "H(V1+V2+V3+V2~+V3~)/H(V1)")
    dS, dSt = c.disjoint(S, St)
    c.check("(506a)", ineq.check_max_lower_bound(1, 1, dS, dSt), "H(V2+V3) <= H(V2+V3+V2~+V3~)")
    dSS, dV1 = c.disjoint(S + St, V1)
    c.check("(506b)", ineq.check_max_lower_bound(1, 1, dSS, dV1), "H(V2+V3+V2~+V3~) <= H(V1+V2+V3+V2~+V3~)")
    c.ratio("(507)", S + St, "H(V2+V3+V2~+V3~)/H(V1)")
    X, Y1, Y2 = c.disjoint(V3, V1, V1s)
    c.check("(508) PR", ineq.check_pr_sum(X, [Y1, Y2]), "PR with X=V3, Y=(V1, V1*)")
    c.ratio("(508)", V1 + V1s, "H(V1+V1*)/H(V1)")

    # (509): Lem. 18 with X=V1, X'=V1*, Z = beta1 (V2~+V3~) + beta2 (V2+V3), r=alpha1, p=alpha1+alpha2
    dX, dXc, dZ = c.disjoint(V1, V1s, beta1 * St + beta2 * S)
    c.check("(509)", ineq.check_wu_lem18(alpha1 + alpha2, alpha1, dX, dXc, dZ),
            "Lem. 18: X=V1, X'=V1*, Z=beta1(V2~+V3~)+beta2(V2+V3), r=alpha1, p=alpha1+alpha2")

    # (510)/(511): the two Delta values, only nonnegativity asserted
    pair = ineq.madiman_pair(c.dist(V1))
    c.check("(510)/(511)", pair, "Delta(V1,-V1*) and Delta(V1,V1*) are nonnegative")
    c.note("(510)", pair.delta_sum / c.H1, "Delta(V1,-V1*)/H(V1)", target=Fraction(0))
    c.note("(511)", pair.delta_diff / c.H1, "Delta(V1,V1*)/H(V1)", target=Fraction(0))
    c.note("(510')", fam.delta(S, -St) / c.H1, "Delta(V2+V3, -(V2~+V3~))/H(V1)", target=Fraction(0))

    # (512): Lem. 18 with Z=(alpha1+alpha2)V1, X=V2+V3, X'=V2~+V3~, p=beta1+beta2, r=beta2
    dX, dXc, dZ = c.disjoint(S, St, (alpha1 + alpha2) * V1)
    c.check("(512)", ineq.check_wu_lem18(beta1 + beta2, beta2, dX, dXc, dZ),
            "Lem. 18: X=V2+V3, X'=V2~+V3~, Z=(alpha1+alpha2)V1, r=beta2, p=beta1+beta2")

    # (504): combined comparison, report only
    left = fam.H(alpha1 * V1s + alpha2 * V1 + beta1 * St + beta2 * S) / c.H1
    right = fam.H((alpha1 + alpha2) * V1 + (beta1 + beta2) * S) / c.H1
    c.note("(504)", right - left, "H((a1+a2)V1 + (b1+b2)(V2+V3))/H(V1) - H(a1 V1* + a2 V1 + b1(V2~+V3~) + b2(V2+V3))/H(V1)",
           target=Fraction(0))

    # (503), (514), (513)
    p_tilde = alpha1 * V1h + beta1 * Sh + alpha2 * V1s + beta2 * St
    p_h = h * S + p_tilde
    X, Y1, Y2 = c.disjoint(h * S, alpha2 * V1s + beta2 * St, alpha1 * V1h + beta1 * Sh)
    c.check("(503) PR", ineq.check_pr_sum(X, [Y1, Y2]), "PR with X=h(V2+V3), Y=(top-degree part, lower-degree part)")
    c.ratio("(503)", p_h, "H(p(h))/H(V1)")
    dA, dB = c.disjoint(h * S, p_tilde)
    c.check("(514a)", ineq.check_max_lower_bound(1, 1, dA, dB), "H(p~(h)) <= H(p(h))")
    lead = [(coef, var) for coef, var in ((alpha1, V1h), (alpha2, V1s)) if coef != 0]
    if lead:
        coef, var = lead[0]
        dV, dRest = c.disjoint(var, p_tilde - coef * var)
        c.check("(514b)", ineq.check_max_lower_bound(coef, 1, dV, dRest), "H(V1) <= H(p~(h))")
    c.ratio("(514)", p_tilde, "H(p~(h))/H(V1)")

    A, B = _poly_at(a, h), _poly_at(b, h)
    c.trace.meta.update(A=format_rational(A), B=format_rational(B))
    if A != 0 and B != 0:
        dV, dS = c.disjoint(V1, S)
        c.check("(513) lower", ineq.check_max_lower_bound(A, B, dV, dS), "H(V1) <= H(A V1 + B (V2+V3))")
    c.ratio("(513)", A * V1 + B * S, "H(sum a_i h^i V1 + sum b_i h^i (V2+V3))/H(V1)")
    return c.trace


@dataclass
class ProbeReport:
    witness: CollisionWitness
    witness_json: dict
    ratio: ApproxReal
    trace: InductionTrace

    @property
    def residual_two(self) -> float:
        return abs(self.ratio.value - 2)

    @property
    def residual_one(self) -> float:
        return abs(self.ratio.value - 1)

    def to_json(self) -> dict:
        return {"witness": self.witness_json, "ratio": self.ratio.to_json(),
                "targets": {"(27)": {"target": 2, "residual": self.residual_two},
                            "(28)": {"target": 1, "residual": self.residual_one}},
                "trace": self.trace.to_json()}


def contradiction_probe(canon, diagonal: PolyRatio, family, N: int, d: int, eps=None) -> ProbeReport:
    """Witness for user 1 plus the ratio that would have to sit near both 2 and 1."""
    canon = _canon(canon)
    if not isinstance(diagonal, ViolatingDiagonal):
        diagonal = ViolatingDiagonal(diagonal.num, diagonal.den)
    g1 = diagonal.evaluate(canon.h)
    if g1 != canon.g[0]:
        raise ValueError(f"diagonal polynomial ratio gives {g1} at h={canon.h}, but g1 = {canon.g[0]}")
    rvs = [family.rv(v) for v in family.base] if isinstance(family, RVFamily) else list(family)
    ineq.dof_ratio(canon, rvs)  # rejects all-deterministic families

    problem = build_problem(canon, 1, N, d, symbolic=True, diagonal=diagonal)
    witness = None
    if d == 0 and diagonal.d1 == 0 and diagonal.d2 == 0:
        witness = rational_diagonal_witness(Fraction(diagonal.num.coeffs[0], diagonal.den.coeffs[0]), N)
        if witness is not None:
            witness = CollisionWitness.from_differences(
                1, N, 0, witness.a, witness.b, UniPoly.const(witness.a[0]), UniPoly.const(witness.b[0]), True)
    if witness is None:
        verdict = check_user(canon, 1, N, d, symbolic=True, diagonal=diagonal)
        if isinstance(verdict, TruncationCertificate):
            raise NoWitness(f"no collision for user 1 at (N, d) = ({N}, {d}); the probe refuses")
        witness = verdict

    c = _Chain(canon, rvs, "contradiction probe", eps)
    V1, V2, V3 = c.V1, c.V2, c.V3
    c.check("(43) witness", _Flag(validate_witness(witness, problem.fvals, diagonal)),
            "w1 + g1 w2 = w1~ + g1 w2~ by exact polynomial substitution, w1 != w1~, w2 != w2~")
    af, bf = witness.af, witness.bf
    c.trace.meta.update(a_hat=af.to_list(), b_hat=bf.to_list(), N=N, d=d)
    B_h = bf.evaluate(canon.h)
    if B_h != 0:
        c.check("(43) numeric", _Flag(af.evaluate(canon.h) / B_h == g1), "a_hat(h)/b_hat(h) equals g1")

    ratio = c.ratio("(27)", g1 * V1 + V2 + V3, "H(g1 V1 + V2 + V3)/H(V1) against 2", target=Fraction(2))
    c.ratio("(28)", g1 * V1 + V2 + V3, "H(g1 V1 + V2 + V3)/H(V1) against 1")
    dV, dS = c.disjoint(V1, V2 + V3)
    c.check("sandwich lower", ineq.check_max_lower_bound(g1, 1, dV, dS), "H(V1) <= H(g1 V1 + V2 + V3)")
    hs = c.fam.H(V1) + c.fam.H(V2) + c.fam.H(V3)
    c.check("sandwich upper", ineq.InequalityReport("subadditivity (three terms)", c.fam.H(g1 * V1 + V2 + V3), hs),
            "H(g1 V1 + V2 + V3) <= H(V1) + H(V2) + H(V3)")

    # replay of the chain for the witness polynomials
    a_hat, b_hat = list(af.coeffs), list(bf.coeffs)
    m = max(len(a_hat), len(b_hat)) - 1
    a_hat += [0] * (m + 1 - len(a_hat))
    b_hat += [0] * (m + 1 - len(b_hat))
    if m == 0:
        sub = replay_base_case(canon, rvs, a_hat[0], b_hat[0], eps)
    else:
        sub = replay_induction_step(canon, rvs, a_hat, b_hat, eps)
    for s in sub.steps:
        c.trace.steps.append(Step(f"chain {s.label}", s.kind, s.description, s.value, s.target, s.report))
    c.trace.meta["chain"] = sub.name

    return ProbeReport(witness, witness.to_json(diagonal, problem.fvals), ratio, c.trace)


@dataclass(frozen=True)
class _Flag:
    """A yes/no check presented like an inequality report."""

    holds: bool

    def to_json(self) -> dict:
        return {"holds": self.holds}

"""Entropy inequality verifiers, the DoF-ratio functional and the balancing bounds.

Every verifier returns an :class:`InequalityReport` oriented as ``lhs <= rhs``;
``holds`` is decided against the accumulated error bound of ``rhs - lhs``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .channel import CanonicalForm3, ChannelMatrix
from .entropy import DiscreteRV, RVFamily, entropy_bits, linear_combination, ruzsa_delta
from .exactnum import ApproxReal, format_rational, to_rational

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: ApproxReal
    rhs: ApproxReal
    inputs: dict = field(default_factory=dict, compare=False)

    @property
    def slack(self) -> ApproxReal:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        s = self.slack
        return s.value >= -s.abs_error

    def to_json(self) -> dict:
        s = self.slack
        return {
            "name": self.name,
            "lhs": self.lhs.value,
            "lhs_error": self.lhs.abs_error,
            "rhs": self.rhs.value,
            "rhs_error": self.rhs.abs_error,
            "slack": s.value,
            "error_bound": s.abs_error,
            "holds": self.holds,
            "inputs": self.inputs,
        }


def _rv_json(rv: DiscreteRV) -> dict:
    return rv.to_json()


def _H(coeffs, rvs) -> ApproxReal:
    return entropy_bits(linear_combination(coeffs, rvs))


def approx_max(xs: Sequence[ApproxReal]) -> ApproxReal:
    best = max(xs, key=lambda x: x.value)
    # the true max is within max_k err_k of the max of the values
    return ApproxReal(best.value, max(x.abs_error for x in xs))


def check_subadditivity(X: DiscreteRV, Y: DiscreteRV) -> InequalityReport:
    """H(X + Y) <= H(X) + H(Y)."""
    return InequalityReport(
        "subadditivity: H(X+Y) <= H(X) + H(Y)",
        _H((1, 1), (X, Y)),
        entropy_bits(X) + entropy_bits(Y),
        {"X": _rv_json(X), "Y": _rv_json(Y)},
    )


def check_max_lower_bound(alpha, beta, X: DiscreteRV, Y: DiscreteRV) -> InequalityReport:
    """max{H(X), H(Y)} <= H(alpha X + beta Y) for nonzero alpha, beta."""
    alpha, beta = to_rational(alpha), to_rational(beta)
    if alpha == 0 or beta == 0:
        raise ValueError("coefficients of the max lower bound must be nonzero")
    return InequalityReport(
        "max lower bound: max{H(X), H(Y)} <= H(aX+bY)",
        approx_max([entropy_bits(X), entropy_bits(Y)]),
        _H((alpha, beta), (X, Y)),
        {"alpha": format_rational(alpha), "beta": format_rational(beta),
         "X": _rv_json(X), "Y": _rv_json(Y)},
    )


def check_pr_sum(X: DiscreteRV, Ys: Sequence[DiscreteRV]) -> InequalityReport:
    """H(X + Y1 + ... + Ym) <= H(X) + sum_i [H(X + Yi) - H(X)].

    ``inputs["ratio"]`` carries H(X + sum Yi) / H(X) when H(X) > 0.
    """
    if not Ys:
        raise ValueError("need at least one Y")
    hx = entropy_bits(X)
    lhs = _H((1,) * (len(Ys) + 1), (X, *Ys))
    rhs = hx
    for Y in Ys:
        rhs = rhs + (_H((1, 1), (X, Y)) - hx)
    inputs = {"X": _rv_json(X), "Y": [_rv_json(Y) for Y in Ys]}
    if hx.value > 0:
        inputs["ratio"] = (lhs / hx).to_json()
    return InequalityReport("Pluennecke-Ruzsa sum bound", lhs, rhs, inputs)


def tau(p: int, q: int) -> int:
    """7 floor(log2|p|) + 7 floor(log2|q|) + 2."""
    if p == 0 or q == 0:
        raise ValueError("tau needs nonzero integers")
    return 7 * (abs(p).bit_length() - 1) + 7 * (abs(q).bit_length() - 1) + 2


def check_wu_thm14(p: int, q: int, X: DiscreteRV, Y: DiscreteRV) -> InequalityReport:
    """H(pX + qY) - H(X + Y) <= tau(p, q) (2H(X + Y) - H(X) - H(Y))."""
    for v in (p, q):
        if isinstance(v, bool) or not isinstance(v, int):
            raise TypeError("Th. 14 coefficients must be integers")
    t = tau(p, q)
    hxy = _H((1, 1), (X, Y))
    lhs = _H((p, q), (X, Y)) - hxy
    rhs = (hxy.scale(2) - entropy_bits(X) - entropy_bits(Y)).scale(t)
    return InequalityReport(
        "Wu Th. 14: H(pX+qY) - H(X+Y) <= tau (2H(X+Y) - H(X) - H(Y))",
        lhs, rhs, {"p": p, "q": q, "tau": t, "X": _rv_json(X), "Y": _rv_json(Y)},
    )


def check_wu_lem18(p, r, X: DiscreteRV, X_copy: DiscreteRV, Z: DiscreteRV) -> InequalityReport:
    """H(pX + Z) - Delta(X, X') <= H(rX' + (p - r)X + Z), X' an independent copy of X."""
    p, r = to_rational(p), to_rational(r)
    if X_copy != X:
        raise ValueError("X_copy must have the same distribution as X")
    lhs = _H((p, 1), (X, Z)) - ruzsa_delta(X, X_copy)
    rhs = _H((r, p - r, 1), (X_copy, X, Z))
    return InequalityReport(
        "Wu Lem. 18 (as instantiated): H(pX+Z) - Delta(X,X') <= H(rX' + (p-r)X + Z)",
        lhs, rhs, {"p": format_rational(p), "r": format_rational(r),
                   "X": _rv_json(X), "Z": _rv_json(Z)},
    )


def check_delta_nonnegative(V: DiscreteRV, W: DiscreteRV) -> InequalityReport:
    return InequalityReport("Delta(V, W) >= 0", ApproxReal(0.0), ruzsa_delta(V, W),
                            {"V": _rv_json(V), "W": _rv_json(W)})


@dataclass(frozen=True)
class MadimanPair:
    """Delta(V, -V*) next to Delta(V, V*); only nonnegativity is asserted."""

    delta_sum: ApproxReal   # Delta(V, -V*) = H(V + V*) - H(V)
    delta_diff: ApproxReal  # Delta(V, V*)  = H(V - V*) - H(V)
    ratio: Optional[ApproxReal]

    @property
    def holds(self) -> bool:
        return self.delta_sum.upper >= 0 and self.delta_diff.upper >= 0

    def to_json(self) -> dict:
        return {"delta_sum": self.delta_sum.to_json(), "delta_diff": self.delta_diff.to_json(),
                "ratio": self.ratio.to_json() if self.ratio else None, "holds": self.holds}


def madiman_pair(V: DiscreteRV) -> MadimanPair:
    hv = entropy_bits(V)
    ds = _H((1, 1), (V, V)) - hv
    dd = _H((1, -1), (V, V)) - hv
    ratio = ds / dd if dd.lower > 0 else None
    return MadimanPair(ds, dd, ratio)


# --- DoF ratio and balancing --------------------------------------------------

class ZeroDenominator(ValueError):
    """Every received signal is deterministic: the DoF ratio is undefined."""


def _rows(M) -> tuple[tuple[Fraction, ...], ...]:
    if isinstance(M, CanonicalForm3):
        M = M.matrix()
    return M.entries


def _family_rvs(family) -> list[DiscreteRV]:
    if isinstance(family, RVFamily):
        return [family.rv(v) for v in family.base]
    return list(family)


@dataclass(frozen=True)
class DofRatioReport:
    user_entropies: tuple[ApproxReal, ...]          # H(V_i)
    signal_entropies: tuple[ApproxReal, ...]        # H(sum_j h_ij V_j)
    interference_entropies: tuple[ApproxReal, ...]  # H(sum_{j != i} h_ij V_j)
    denominator: ApproxReal
    ratios: tuple[ApproxReal, ...]

    @property
    def min_ratio(self) -> ApproxReal:
        lo = min(self.ratios, key=lambda r: r.value)
        return ApproxReal(lo.value, max(r.abs_error for r in self.ratios))

    @property
    def epsilon(self) -> ApproxReal:
        """1/2 minus the smallest ratio: the epsilon level this family achieves."""
        return ApproxReal.exact(HALF) - self.min_ratio

    def measured_epsilon(self) -> Fraction:
        """Smallest epsilon for which the premise provably holds (exact rational)."""
        return HALF - Fraction(self.min_ratio.lower)

    def premise_holds(self, eps) -> bool:
        return Fraction(self.min_ratio.lower) >= HALF - to_rational(eps)

    def to_json(self) -> dict:
        j = lambda xs: [x.to_json() for x in xs]  # noqa: E731
        return {
            "user_entropies": j(self.user_entropies),
            "signal_entropies": j(self.signal_entropies),
            "interference_entropies": j(self.interference_entropies),
            "denominator": self.denominator.to_json(),
            "ratios": j(self.ratios),
            "min_ratio": self.min_ratio.to_json(),
            "epsilon": self.epsilon.to_json(),
        }


def dof_ratio(M: Union[ChannelMatrix, CanonicalForm3], family) -> DofRatioReport:
    rows = _rows(M)
    rvs = _family_rvs(family)
    K = len(rows)
    if len(rvs) != K:
        raise ValueError(f"family has {len(rvs)} variables, matrix has K = {K}")
    hv = tuple(entropy_bits(v) for v in rvs)
    sig = tuple(_H(rows[i], rvs) for i in range(K))
    intf = tuple(
        _H([c for j, c in enumerate(rows[i]) if j != i], [v for j, v in enumerate(rvs) if j != i])
        for i in range(K)
    )
    den = approx_max(sig)
    if den.value == 0:
        raise ZeroDenominator("all received signals are deterministic; the ratio denominator is zero")
    ratios = tuple((s - t) / den for s, t in zip(sig, intf))
    return DofRatioReport(hv, sig, intf, den, ratios)


@dataclass(frozen=True)
class IntervalCheck:
    name: str
    value: ApproxReal
    lower: Optional[Fraction]
    upper: Optional[Fraction]

    @property
    def holds(self) -> bool:
        lo_ok = self.lower is None or self.value.upper >= self.lower
        hi_ok = self.upper is None or self.value.lower <= self.upper
        return lo_ok and hi_ok

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value.to_json(),
                "lower": None if self.lower is None else float(self.lower),
                "upper": None if self.upper is None else float(self.upper),
                "holds": self.holds}


@dataclass(frozen=True)
class BalancingReport:
    epsilon: Fraction
    applicable: bool
    ratio: DofRatioReport
    checks: tuple[IntervalCheck, ...] = ()

    @property
    def holds(self) -> bool:
        """True when not applicable; otherwise every interval check passes."""
        return all(c.holds for c in self.checks)

    def failures(self) -> list[IntervalCheck]:
        return [c for c in self.checks if not c.holds]

    def to_json(self) -> dict:
        return {"epsilon": float(self.epsilon), "epsilon_exact": format_rational(self.epsilon),
                "applicable": self.applicable,
                "verdict": "not-applicable" if not self.applicable else ("holds" if self.holds else "violation"),
                "dof_ratio": self.ratio.to_json(), "checks": [c.to_json() for c in self.checks]}


def balancing_bounds(eps) -> dict[str, Fraction]:
    """The explicit interval endpoints used by the balancing checks."""
    eps = to_rational(eps)
    lo = (1 - 2 * eps) / (1 + 2 * eps)
    return {
        "ratio_lower": lo,
        "ratio_upper": 1 / lo,
        "signal_lower": 2 * (1 - 2 * eps) / (1 + 2 * eps) ** 2,
        "signal_upper": 1 + 1 / lo,
    }


def balancing_report(M, family, eps) -> BalancingReport:
    eps = to_rational(eps)
    if not 0 < eps < HALF:
        raise ValueError(f"epsilon must lie in (0, 1/2), got {eps}")
    rep = dof_ratio(M, family)
    if not rep.premise_holds(eps):
        return BalancingReport(eps, False, rep)
    b = balancing_bounds(eps)
    K = len(rep.ratios)
    checks = []
    for i in range(K):
        checks.append(IntervalCheck(f"interference/user, user {i + 1}",
                                    rep.interference_entropies[i] / rep.user_entropies[i],
                                    b["ratio_lower"], b["ratio_upper"]))
    for i in range(K):
        for j in range(K):
            if i != j:
                checks.append(IntervalCheck(f"H(V{i + 1})/H(V{j + 1})",
                                            rep.user_entropies[i] / rep.user_entropies[j],
                                            b["ratio_lower"], b["ratio_upper"]))
    for i in range(K):
        r = rep.signal_entropies[i] / rep.user_entropies[i]
        checks.append(IntervalCheck(f"signal/user lower, user {i + 1}", r, b["signal_lower"], None))
        checks.append(IntervalCheck(f"signal/user upper, user {i + 1}", r, None, b["signal_upper"]))
    return BalancingReport(eps, True, rep, tuple(checks))


def balancing_at_measured_epsilon(M, family) -> BalancingReport:
    """Balancing checks at the family's own epsilon level; not applicable outside (0, 1/2)."""
    rep = dof_ratio(M, family)
    eps = rep.measured_epsilon()
    if not 0 < eps < HALF:
        return BalancingReport(eps, False, rep)
    return balancing_report(M, family, eps)


__all__ = [
    "InequalityReport", "check_subadditivity", "check_max_lower_bound", "check_pr_sum", "tau",
    "check_wu_thm14", "check_wu_lem18", "check_delta_nonnegative", "madiman_pair", "MadimanPair",
    "ZeroDenominator", "DofRatioReport", "dof_ratio", "IntervalCheck", "BalancingReport",
    "balancing_bounds", "balancing_report", "balancing_at_measured_epsilon", "approx_max",
]

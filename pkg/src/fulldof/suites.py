"""Seeded randomized suites over the inequality verifiers.

Instance k of suite S under seed s draws from its own stream
``random.Random(f"{s}/{S}/{k}")``, so results do not depend on how instances
are split across workers.
"""
from __future__ import annotations

import multiprocessing
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import inequalities as ineq
from .channel import ChannelMatrix
from .entropy import DiscreteRV

COEFFS = [c for c in range(-4, 5) if c]


def random_rv(rng: random.Random, max_support: int = 8, max_den: int = 16) -> DiscreteRV:
    n = rng.randint(1, max_support)
    pool = [Fraction(k) for k in range(-6, 7)] + [Fraction(k, 2) for k in range(-5, 6, 2)]
    points = rng.sample(pool, n)
    D = rng.randint(n, max_den)
    cuts = sorted(rng.sample(range(1, D), n - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [D])]
    return DiscreteRV(tuple(points), tuple(Fraction(p, D) for p in parts))


def random_entry(rng: random.Random) -> Fraction:
    return Fraction(rng.choice(COEFFS), rng.randint(1, 3))


def random_matrix(rng: random.Random, K: int) -> ChannelMatrix:
    return ChannelMatrix(tuple(tuple(random_entry(rng) for _ in range(K)) for _ in range(K)))


def _subadditivity(rng):
    return ineq.check_subadditivity(random_rv(rng), random_rv(rng))


def _max_lower_bound(rng):
    return ineq.check_max_lower_bound(rng.choice(COEFFS), rng.choice(COEFFS), random_rv(rng), random_rv(rng))


def _pr_sum(rng):
    m = rng.randint(1, 3)
    cap = 8 if m == 1 else 5 if m == 2 else 4
    return ineq.check_pr_sum(random_rv(rng, cap), [random_rv(rng, cap) for _ in range(m)])


def _wu_thm14(rng):
    return ineq.check_wu_thm14(rng.choice(COEFFS), rng.choice(COEFFS), random_rv(rng), random_rv(rng))


def _wu_lem18(rng):
    X = random_rv(rng, 6)
    p = rng.choice(COEFFS)
    r = rng.choice(COEFFS + [0, p])
    return ineq.check_wu_lem18(p, r, X, X, random_rv(rng, 6))


def _delta(rng):
    return ineq.check_delta_nonnegative(random_rv(rng), random_rv(rng))


def _balancing(rng):
    K = rng.choice((2, 3))
    M = random_matrix(rng, K)
    rvs = [random_rv(rng, 4, 12) for _ in range(K)]
    try:
        return ineq.balancing_at_measured_epsilon(M, rvs), M
    except ineq.ZeroDenominator:
        return None, M


SUITES = {
    "subadditivity": _subadditivity,
    "max_lower_bound": _max_lower_bound,
    "pr_sum": _pr_sum,
    "wu_thm14": _wu_thm14,
    "wu_lem18": _wu_lem18,
    "delta": _delta,
    "balancing": _balancing,
}

INEQUALITY_SUITES = [s for s in SUITES if s != "balancing"]


@dataclass
class SuiteResult:
    suite: str
    seed: int
    instances: int
    records: list

    @property
    def violations(self) -> int:
        return sum(1 for r in self.records if r["verdict"] == "violation")

    @property
    def applicable(self) -> int:
        return sum(1 for r in self.records if r["verdict"] != "not-applicable")

    def to_json(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "instances": self.instances,
                "applicable": self.applicable, "violations": self.violations,
                "verdict": "violation" if self.violations else "all-hold",
                "records": self.records}


def run_instance(suite: str, seed: int, k: int) -> dict:
    rng = random.Random(f"{seed}/{suite}/{k}")
    if suite == "balancing":
        rep, M = SUITES[suite](rng)
        rec = {"index": k, "matrix": M.to_json()}
        if rep is None:
            rec.update(verdict="not-applicable", reason="zero denominator")
        else:
            rec.update(rep.to_json())
            if rep.applicable and not rep.holds:
                rec["verdict"] = "violation"
        return rec
    rep = SUITES[suite](rng)
    rec = {"index": k, **rep.to_json()}
    rec["verdict"] = "holds" if rep.holds else "violation"
    return rec


def _run_chunk(args):
    suite, seed, lo, hi = args
    return [run_instance(suite, seed, k) for k in range(lo, hi)]


def run_suite(suite: str, instances: int, seed: int = 0, workers: int = 1) -> SuiteResult:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if workers <= 1:
        records = _run_chunk((suite, seed, 0, instances))
    else:
        step = max(1, -(-instances // (4 * workers)))
        chunks = [(suite, seed, lo, min(lo + step, instances)) for lo in range(0, instances, step)]
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(workers, mp_context=ctx) as pool:
            records = [r for part in pool.map(_run_chunk, chunks) for r in part]
    return SuiteResult(suite, seed, instances, records)

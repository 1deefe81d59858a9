"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import json
import random
import time
from fractions import Fraction as F


from fulldof import formats
from fulldof.channel import CanonicalForm3, ChannelMatrix, canonicalize3, scale
from fulldof.cli import main
from fulldof.entropy import DiscreteRV, brute_force_law, entropy_bits, linear_combination
from fulldof.exactnum import PolyRatio, UniPoly
from fulldof.injectivity import (
    CollisionWitness,
    brute_force_check,
    build_problem,
    check_user,
    validate_witness,
)
from fulldof.replay import contradiction_probe
from fulldof.suites import INEQUALITY_SUITES, random_rv, run_suite
from fulldof.wset import enumerate_monomials, phi

SEED = 20240601


def report(log, n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    print(line)
    log.append(line)
    assert ok, line


def rand_entry(rng):
    return F(rng.choice([c for c in range(-9, 10) if c]), rng.randint(1, 9))


def rand_matrix(rng):
    return ChannelMatrix.from_rows([[rand_entry(rng) for _ in range(3)] for _ in range(3)])


def test_criterion_1_phi_counting(acceptance_log):
    t = time.perf_counter()
    counts = [(phi(3, d), len(enumerate_monomials(3, d))) for d in range(4)]
    dt = time.perf_counter() - t
    ok = counts == [(1, 1), (7, 7), (28, 28), (84, 84)] and dt < 1
    report(acceptance_log, 1, ok, f"phi(3,0..3) = {[c for c, _ in counts]} = enumeration lengths, {dt:.3f}s")


def test_criterion_2_injectivity_oracle(acceptance_log):
    rng = random.Random(SEED)
    t = time.perf_counter()
    agree = witnesses = checked = 0
    for _ in range(50):
        M = rand_matrix(rng)
        for N in (2, 3):
            for d in (0, 1):
                for user in (1, 2, 3):
                    fast, slow = check_user(M, user, N, d), brute_force_check(M, user, N, d)
                    checked += 1
                    agree += isinstance(fast, CollisionWitness) == isinstance(slow, CollisionWitness)
                    prob = build_problem(M, user, N, d)
                    for v in (fast, slow):
                        if isinstance(v, CollisionWitness):
                            witnesses += 1
                            assert validate_witness(v, prob.fvals, prob.g)
    dt = time.perf_counter() - t
    ok = agree == checked == 600 and dt < 300
    report(acceptance_log, 2, ok, f"{agree}/{checked} verdicts agree, {witnesses} witnesses re-validated, {dt:.1f}s")


def test_criterion_3_rational_diagonal(acceptance_log):
    rng = random.Random(SEED + 3)
    t = time.perf_counter()
    found = 0
    for _ in range(100):
        p = rng.choice([s * k for k in range(1, 10) for s in (1, -1)])
        q = rng.randint(1, 9)
        M = ChannelMatrix.from_rows([[F(p, q), 2, 3], [5, 7, 11], [13, 17, 19]])
        v = check_user(M, 1, 10, 0)
        found += isinstance(v, CollisionWitness) and validate_witness(v, build_problem(M, 1, 10, 0).fvals, F(p, q))
    dt = time.perf_counter() - t
    report(acceptance_log, 3, found == 100 and dt < 60, f"witness found in {found}/100 cases, {dt:.2f}s")


def test_criterion_4_entropy_exactness(acceptance_log):
    rng = random.Random(SEED + 4)
    exact = 0
    for _ in range(200):
        while True:
            k = rng.randint(1, 4)
            rvs = [random_rv(rng, 6) for _ in range(k)]
            size = 1
            for r in rvs:
                size *= len(r)
            if size <= 1296:
                break
        coeffs = [F(rng.choice([c for c in range(-4, 5) if c]), rng.randint(1, 3)) for _ in range(k)]
        law = brute_force_law(coeffs, rvs)
        exact += linear_combination(coeffs, rvs).pmf() == {x: p for x, p in law.items() if p}
    H1 = entropy_bits(DiscreteRV.uniform([0, 1]))
    H2 = entropy_bits(DiscreteRV((0, 1, 2), (F(1, 4), F(1, 2), F(1, 4))))
    ok = (exact == 200 and abs(H1.value - 1) <= H1.abs_error <= 2 ** -30
          and abs(H2.value - 1.5) <= H2.abs_error <= 2 ** -30)
    report(acceptance_log, 4, ok, f"{exact}/200 laws equal the joint enumeration; H(bit) = {H1.value}, "
                                  f"H(1/4,1/2,1/4) = {H2.value}")


def test_criterion_5_inequality_suites(acceptance_log):
    t = time.perf_counter()
    results = {s: run_suite(s, 1000, seed=SEED) for s in INEQUALITY_SUITES}
    dt = time.perf_counter() - t
    bad = {s: r.violations for s, r in results.items() if r.violations}
    ok = not bad and all(r.instances == 1000 for r in results.values()) and dt < 600
    report(acceptance_log, 5, ok, f"6 x 1000 instances, violations {bad or 0}, {dt:.1f}s")


def test_criterion_6_balancing(acceptance_log):
    res = run_suite("balancing", 1000, seed=SEED)
    ok = res.applicable >= 200 and res.violations == 0
    report(acceptance_log, 6, ok, f"{res.applicable} premise-passing families of {res.instances}, "
                                  f"{res.violations} counterexamples")


def test_criterion_7_canonical_invariance(acceptance_log):
    rng = random.Random(SEED + 7)
    good = total = 0
    for _ in range(100):
        M = rand_matrix(rng)
        base = canonicalize3(M)
        e = M.entries
        cross = (e[0][2] * e[1][0] * e[2][1]) / (e[0][1] * e[1][2] * e[2][0])
        for _ in range(100):
            r = [rand_entry(rng) for _ in range(3)]
            c = [rand_entry(rng) for _ in range(3)]
            total += 1
            good += canonicalize3(scale(M, r, c)).params() == base.params() and base.h == cross
    report(acceptance_log, 7, good == total == 10000, f"{good}/{total} scaled matrices give identical (g1,g2,g3,h)")


def test_criterion_8_contradiction_probe(acceptance_log):
    t = time.perf_counter()
    canon = CanonicalForm3(g=(F(5, 3), 1, 1), h=2)
    bit = DiscreteRV.uniform([0, 1])
    rep = contradiction_probe(canon, PolyRatio(UniPoly((1, 2)), UniPoly((1, 1))), [bit, bit, bit], 3, 1)
    dt = time.perf_counter() - t
    uncond = rep.trace.unconditional()
    ok = (rep.trace.step("(43) witness").verdict == "holds" and rep.trace.all_hold
          and rep.witness.N == 3 and rep.witness.d == 1 and dt < 60)
    report(acceptance_log, 8, ok, f"witness a_hat={rep.witness.af.to_list()} b_hat={rep.witness.bf.to_list()}, "
                                  f"{len(uncond)} unconditional steps hold, {dt:.2f}s")


def test_criterion_9_determinism(acceptance_log, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"entries": [["7/3", "2", "1/2"], ["3", "1", "-1"], ["2/3", "5", "1"]]}))
    runs = {
        "verify": ["verify", "--suite", "all", "--instances", "30", "--seed", "11"],
        "check": ["check", "--matrix", str(m), "--N", "3", "--d", "1"],
    }
    same = 0
    for name, argv in runs.items():
        texts = []
        for workers in ("1", "2", "1"):
            out = tmp_path / f"{name}-{workers}-{len(texts)}.json"
            main(argv + ["--workers", workers, "--out", str(out)])
            texts.append(formats.dumps_report(formats.strip_timestamp(json.loads(out.read_text()))))
        same += len(set(texts)) == 1
    report(acceptance_log, 9, same == len(runs), f"{same}/{len(runs)} seeded runs byte-identical across repeats and --workers 1/2")

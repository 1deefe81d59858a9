"""Command-line entry point: ``fulldof <subcommand> ...``.

Exit codes: 0 certificate / everything holds, 2 witness / violation found,
1 error or enumeration cap hit (verdict "unknown").
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import formats
from .channel import canonicalize3, validate_fully_connected
from .entropy import entropy_bits, linear_combination
from .exactnum import format_rational, parse_rational
from .inequalities import ZeroDenominator, balancing_report, dof_ratio
from .injectivity import CollisionWitness, brute_force_check, build_problem, check_user
from .replay import contradiction_probe, replay_base_case, replay_induction_step
from .suites import SUITES, run_suite
from .wset import DEFAULT_ENUMERATION_CAP, CapExceeded, generate_W, hvec_of

log = logging.getLogger("fulldof")

EXIT_CODES = {
    "certificate": 0, "all-hold": 0, "ok": 0, "holds": 0, "not-applicable": 0,
    "witness": 2, "violation": 2,
    "unknown": 1, "error": 1,
}


@dataclass
class RunConfig:
    subcommand: str
    matrix: Optional[str] = None
    rvs: Optional[str] = None
    N: Optional[int] = None
    d: Optional[int] = None
    user: Optional[int] = None
    epsilon: Optional[Fraction] = None
    seed: int = 0
    instances: int = 1000
    cap: int = DEFAULT_ENUMERATION_CAP
    workers: int = 1
    symbolic: bool = False
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.cap <= 0:
            raise ValueError("--cap must be positive")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")
        if self.instances < 0:
            raise ValueError("--instances must be nonnegative")
        if self.N is not None and self.N < 1:
            raise ValueError("--N must be >= 1")
        if self.d is not None and self.d < 0:
            raise ValueError("--d must be >= 0")
        if self.epsilon is not None and not 0 < self.epsilon < Fraction(1, 2):
            raise ValueError("--epsilon must lie in (0, 1/2)")


def _config(args: argparse.Namespace) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__ if f != "extra"}
    vals = {k: v for k, v in vars(args).items() if k in known and v is not None}
    extra = {k: v for k, v in vars(args).items() if k not in known and k != "func"}
    cfg = RunConfig(**vals, extra=extra)
    cfg.validate()
    return cfg


def _need(cfg: RunConfig, *names: str) -> None:
    for n in names:
        if getattr(cfg, n) is None:
            raise ValueError(f"--{n} is required for '{cfg.subcommand}'")


# --- subcommands --------------------------------------------------------------

def _verdict_report(cfg: RunConfig, oracle: bool) -> dict:
    _need(cfg, "matrix", "N", "d")
    M = formats.load_matrix(cfg.matrix)
    report = {"matrix": M.to_json(), "N": cfg.N, "d": cfg.d,
              "mode": "symbolic" if cfg.symbolic else "numeric"}
    zeros = validate_fully_connected(M)
    if zeros:
        report.update(verdict="error", error=f"not fully connected; zero entries at {zeros}")
        return report
    target = M
    diagonal = None
    if cfg.symbolic:
        target = canonicalize3(M)
        report["canonical"] = target.to_json()
        if cfg.extra.get("diagonal"):
            diagonal = formats.parse_poly_ratio(cfg.extra["diagonal"])
    users = [cfg.user] if cfg.user else list(range(1, M.K + 1))
    results = []
    for u in users:
        diag_u = diagonal if u == 1 else None
        try:
            if oracle:
                v = brute_force_check(target, u, cfg.N, cfg.d, symbolic=cfg.symbolic,
                                      diagonal=diag_u, cap=cfg.cap)
            else:
                v = check_user(target, u, cfg.N, cfg.d, symbolic=cfg.symbolic,
                               diagonal=diag_u, cap=cfg.cap, workers=cfg.workers)
        except CapExceeded as e:
            results.append({"user": u, "verdict": "unknown", "reason": str(e)})
            continue
        if isinstance(v, CollisionWitness):
            prob = build_problem(target, u, cfg.N, cfg.d, symbolic=cfg.symbolic,
                                 diagonal=diag_u, cap=cfg.cap)
            results.append(v.to_json(prob.g, prob.fvals))
            if cfg.extra.get("first_only"):
                break
        else:
            results.append({"user": u, **v.to_json()})
    kinds = {r["verdict"] for r in results}
    verdict = "witness" if "witness" in kinds else "unknown" if "unknown" in kinds else "certificate"
    report.update(verdict=verdict, users=results)
    return report


def cmd_check(cfg: RunConfig) -> dict:
    return _verdict_report(cfg, oracle=False)


def cmd_oracle(cfg: RunConfig) -> dict:
    return _verdict_report(cfg, oracle=True)


def cmd_canonicalize(cfg: RunConfig) -> dict:
    _need(cfg, "matrix")
    M = formats.load_matrix(cfg.matrix)
    return {"verdict": "ok", "matrix": M.to_json(), "canonical": canonicalize3(M).to_json()}


def cmd_wset(cfg: RunConfig) -> dict:
    _need(cfg, "matrix", "N", "d")
    M = formats.load_matrix(cfg.matrix)
    if cfg.symbolic:
        hv = hvec_of(canonicalize3(M), symbolic=True)
    else:
        hv = M.off_diagonal()
    try:
        W = generate_W(cfg.N, cfg.d, hv, cfg.cap)
    except CapExceeded as e:
        return {"verdict": "unknown", "reason": str(e)}
    if cfg.symbolic:
        values = [p.to_list() for p in W.sorted_values()]
    else:
        values = [format_rational(x) for x in W.sorted_values()]
    return {"verdict": "ok", "N": cfg.N, "d": cfg.d, "size": len(values), "values": values}


def _coeff_list(text: str) -> list[Fraction]:
    return [parse_rational(c) for c in text.split(",") if c.strip()]


def cmd_entropy(cfg: RunConfig) -> dict:
    _need(cfg, "rvs")
    rvs = formats.load_rvs(cfg.rvs)
    coeffs = _coeff_list(cfg.extra["coeffs"]) if cfg.extra.get("coeffs") else [Fraction(1)] * len(rvs)
    law = linear_combination(coeffs, rvs)
    H = entropy_bits(law)
    print(f"H = {H.value!r} bits  (|error| <= {H.abs_error:.3g})")
    return {"verdict": "ok", "coeffs": [format_rational(c) for c in coeffs],
            "entropy_bits": H.to_json(), "distribution": law.to_json()}


def cmd_ratio(cfg: RunConfig) -> dict:
    _need(cfg, "matrix", "rvs")
    M = formats.load_matrix(cfg.matrix)
    rvs = formats.load_rvs(cfg.rvs)
    try:
        rep = dof_ratio(M, rvs)
    except ZeroDenominator as e:
        return {"verdict": "error", "error": str(e)}
    out = {"verdict": "ok", "dof_ratio": rep.to_json()}
    if cfg.epsilon is not None:
        bal = balancing_report(M, rvs, cfg.epsilon)
        out["balancing"] = bal.to_json()
        out["verdict"] = out["balancing"]["verdict"]
    return out


def cmd_verify(cfg: RunConfig) -> dict:
    suite = cfg.extra.get("suite") or "all"
    names = [s for s in SUITES] if suite == "all" else [suite]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or 'all'")
    results = [run_suite(n, cfg.instances, cfg.seed, cfg.workers).to_json() for n in names]
    bad = sum(r["violations"] for r in results)
    for r in results:
        print(f"{r['suite']:>16}: {r['instances']} instances, {r['applicable']} applicable, "
              f"{r['violations']} violations")
    return {"verdict": "violation" if bad else "all-hold", "seed": cfg.seed,
            "instances": cfg.instances, "suites": results}


def cmd_replay(cfg: RunConfig) -> dict:
    _need(cfg, "matrix", "rvs")
    mode = cfg.extra["mode"]
    M = formats.load_matrix(cfg.matrix)
    canon = canonicalize3(M)
    rvs = formats.load_rvs(cfg.rvs)
    coeffs = cfg.extra.get("coeffs")
    if not coeffs:
        raise ValueError("--coeffs is required for replay")
    if mode == "base":
        a0, b0 = (int(x) for x in coeffs.split(","))
        trace = replay_base_case(canon, rvs, a0, b0, cfg.epsilon)
        return {"verdict": "all-hold" if trace.all_hold else "violation", "trace": trace.to_json()}
    if mode == "step":
        a_txt, sep, b_txt = coeffs.partition(";")
        if not sep:
            raise ValueError("step coefficients must be 'a0,...,am;b0,...,bm'")
        a = [int(x) for x in a_txt.split(",")]
        b = [int(x) for x in b_txt.split(",")]
        trace = replay_induction_step(canon, rvs, a, b, cfg.epsilon)
        return {"verdict": "all-hold" if trace.all_hold else "violation", "trace": trace.to_json()}
    _need(cfg, "N", "d")
    diag = formats.parse_poly_ratio(coeffs)
    probe = contradiction_probe(canon, diag, rvs, cfg.N, cfg.d, cfg.epsilon)
    return {"verdict": "all-hold" if probe.trace.all_hold else "violation", "probe": probe.to_json()}


COMMANDS = {
    "check": cmd_check,
    "oracle": cmd_oracle,
    "canonicalize": cmd_canonicalize,
    "wset": cmd_wset,
    "entropy": cmd_entropy,
    "ratio": cmd_ratio,
    "verify": cmd_verify,
    "replay": cmd_replay,
}


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here (atomically)")
    common.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    common.add_argument("--cap", type=int, help=f"enumeration cap (default {DEFAULT_ENUMERATION_CAP})")
    common.add_argument("-v", "--verbose", action="store_true")

    matrix = argparse.ArgumentParser(add_help=False)
    matrix.add_argument("--matrix", help="matrix JSON file")

    level = argparse.ArgumentParser(add_help=False)
    level.add_argument("--N", type=int, help="coefficient bound: coefficients in 0..N-1")
    level.add_argument("--d", type=int, help="maximum monomial degree")
    level.add_argument("--symbolic", action="store_true", default=None,
                       help="treat h of the canonical form as an indeterminate")

    p = argparse.ArgumentParser(prog="fulldof", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    for name, helptext in (("check", "decide the injectivity condition at level (N, d)"),
                           ("oracle", "same verdict by literal pair enumeration")):
        s = sub.add_parser(name, parents=[common, matrix, level], help=helptext)
        s.add_argument("--user", type=int, help="check one user (1-based)")
        s.add_argument("--diagonal", help="user-1 diagonal as 'num;den' coefficient lists (symbolic mode)")
        s.add_argument("--first-only", action="store_true", help="stop at the first user with a witness")

    sub.add_parser("canonicalize", parents=[common, matrix], help="reduce a 3x3 matrix to canonical form")
    sub.add_parser("wset", parents=[common, matrix, level], help="dump W_{N,d} as sorted values")

    s = sub.add_parser("entropy", parents=[common], help="entropy of a linear combination")
    s.add_argument("--rvs", required=True)
    s.add_argument("--coeffs", help='comma-separated rationals, e.g. "1,-1/2"')

    s = sub.add_parser("ratio", parents=[common, matrix], help="DoF ratio functional and balancing bounds")
    s.add_argument("--rvs")
    s.add_argument("--epsilon", type=_rational_arg)

    s = sub.add_parser("verify", parents=[common], help="seeded randomized inequality suites")
    s.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, or 'all'")
    s.add_argument("--instances", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--report", dest="out", help="alias of --out")

    s = sub.add_parser("replay", parents=[common, matrix, level], help="replay the 3-user proof chain")
    s.add_argument("mode", choices=("base", "step", "probe"))
    s.add_argument("--rvs")
    s.add_argument("--coeffs", help="base: 'a0,b0'; step: 'a0,..,am;b0,..,bm'; probe: 'num;den'")
    s.add_argument("--epsilon", type=_rational_arg)
    return p


def dispatch(cfg: RunConfig) -> tuple[int, dict]:
    report = formats.report_header(cfg.subcommand)
    try:
        report.update(COMMANDS[cfg.subcommand](cfg))
    except (formats.InputError, ValueError, TypeError, ZeroDivisionError, OSError, CapExceeded) as e:
        log.debug("command failed", exc_info=True)
        report.update(verdict="error", error=f"{type(e).__name__}: {e}")
    return EXIT_CODES[report["verdict"]], report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
    except ValueError as e:
        print(f"fulldof: error: {e}", file=sys.stderr)
        return 1
    code, report = dispatch(cfg)
    if report["verdict"] == "error":
        print(f"fulldof: {report['error']}", file=sys.stderr)
    if cfg.out:
        formats.write_report(report, cfg.out)
    elif cfg.subcommand not in ("entropy", "verify") or report["verdict"] == "error":
        sys.stdout.write(formats.dumps_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())

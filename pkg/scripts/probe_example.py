"""Contradiction probe for g1 = (1 + 2h)/(1 + h) at h = 2, printed as a step table."""
import argparse
from fractions import Fraction

from fulldof.channel import CanonicalForm3
from fulldof.entropy import DiscreteRV
from fulldof.exactnum import PolyRatio, UniPoly, format_rational
from fulldof.replay import contradiction_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", default="2")
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--support", type=int, default=2, help="V1, V2, V3 uniform on {0..support-1}")
    args = ap.parse_args()

    h = Fraction(args.h)
    diag = PolyRatio(UniPoly((1, 2)), UniPoly((1, 1)))
    canon = CanonicalForm3(g=(diag.evaluate(h), 1, 1), h=h)
    rv = DiscreteRV.uniform(range(args.support))
    rep = contradiction_probe(canon, diag, [rv, rv, rv], args.N, args.d)

    w = rep.witness
    print(f"g1 = {format_rational(canon.g[0])}  witness a_hat = {w.af}, b_hat = {w.bf}")
    print(f"H(g1 V1 + V2 + V3)/H(V1) = {rep.ratio.value:.6f}  "
          f"(|r-2| = {rep.residual_two:.4f}, |r-1| = {rep.residual_one:.4f})")
    for s in rep.trace.steps:
        val = "" if s.value is None else f"{s.value.value:10.6f}"
        print(f"  {s.label:<22} {s.verdict:<12} {val}  {s.description}")
    return 0 if rep.trace.all_hold else 2


if __name__ == "__main__":
    raise SystemExit(main())

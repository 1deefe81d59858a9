"""Random search for families with a large minimum DoF ratio on one canonical matrix.

Exploration only: prints the best families found and their balancing verdicts.
"""
import argparse
import random
from fractions import Fraction

from fulldof.channel import CanonicalForm3
from fulldof.inequalities import ZeroDenominator, balancing_at_measured_epsilon, dof_ratio
from fulldof.suites import random_rv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", default="2,3,5", help="diagonal g1,g2,g3")
    ap.add_argument("--h", default="7/2")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--top", type=int, default=5)
    args = ap.parse_args()

    canon = CanonicalForm3(g=tuple(Fraction(x) for x in args.g.split(",")), h=Fraction(args.h))
    rng = random.Random(args.seed)
    found = []
    for _ in range(args.trials):
        fam = [random_rv(rng, 6, 16) for _ in range(3)]
        try:
            rep = dof_ratio(canon, fam)
        except ZeroDenominator:
            continue
        found.append((rep.min_ratio.value, fam))
    found.sort(key=lambda t: -t[0])
    for score, fam in found[: args.top]:
        bal = balancing_at_measured_epsilon(canon, fam)
        print(f"min ratio {score:.5f}  eps {float(bal.epsilon):.5f}  "
              f"balancing {'holds' if bal.holds else 'VIOLATION'} ({'applicable' if bal.applicable else 'n/a'})")
        for k, rv in enumerate(fam, 1):
            print(f"    V{k}: support {[str(x) for x in rv.support]} probs {[str(p) for p in rv.probs]}")


if __name__ == "__main__":
    main()

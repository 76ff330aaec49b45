"""Verdict-vs-oracle confusion table over the seeded positivity corpus, by coupling strength."""

import argparse
import collections

import numpy as np

from gramcert.positivity import Verdict, min_eig_oracle, positivity_verdict
from gramcert.testkit import InstanceSpec, generate, positivity_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--couplings", default="0.25,0.5,1,2,4,8")
    args = ap.parse_args()

    table = collections.Counter()
    methods = collections.Counter()
    for spec in positivity_corpus(args.count, args.seed):
        T, _ = generate(spec)
        cert = positivity_verdict(T, seed=spec.seed)
        psd = min_eig_oracle(T) >= -1e-8 * max(1.0, T.norm())
        table[(psd, cert.verdict)] += 1
        methods[cert.method] += 1
    print("oracle  verdict                count")
    for (psd, verdict), n in sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        print(f"{'PSD' if psd else 'not':<7} {verdict.value:<22} {n}")
    print("methods:", dict(methods))

    # how the pairwise certificate degrades as the rank-one coupling grows
    print("\ncoupling  certified-by-cross-entry  positive  total")
    for c in (float(v) for v in args.couplings.split(",")):
        cross = pos = 0
        for seed in range(100):
            T, truth = generate(InstanceSpec(seed, "rank-one-coupled", params={"coupling": c}))
            cert = positivity_verdict(T, seed=seed)
            cross += cert.method.startswith("cross-entry")
            pos += cert.verdict is Verdict.POSITIVE
        print(f"{c:<9g} {cross:<25d} {pos:<9d} 100")


if __name__ == "__main__":
    main()

"""Run each suite separately over the corpus and print a timing table.

    python3 scripts/run_sweep.py [--suite norms ...] [--workers 4] [--out report.json]

The slowest instances per suite are listed, which is what to look at when a
bound is raised.
"""

import argparse
import time

from gpdlab.corpus import CorpusSpec, enumerate_corpus
from gpdlab.spectral import SEED
from gpdlab.suites import SUITES, run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--suite", action="append", choices=SUITES)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--slowest", type=int, default=3)
    ap.add_argument("--out", help="write the combined JSON report (with values)")
    args = ap.parse_args()

    corpus = enumerate_corpus(CorpusSpec(seed=args.seed))
    suites = args.suite or list(SUITES)
    print(f"{len(corpus)} instances, seed {args.seed:#x}")
    print(f"{'suite':<14}{'seconds':>9}{'checks':>8}{'failed':>8}  slowest")
    t0 = time.perf_counter()
    for s in suites:
        rep = run_suite(corpus, [s], seed=args.seed, workers=args.workers)
        slow = sorted(((r.seconds.get(s, 0.0), r.instance) for r in rep.results), reverse=True)
        slow = ", ".join(f"{iid} {t:.2f}s" for t, iid in slow[: args.slowest])
        print(f"{s:<14}{rep.timing['total']:9.1f}{rep.n_checks:8d}{len(rep.failures):8d}  {slow}")
    print(f"total {time.perf_counter() - t0:.1f}s")

    if args.out:
        rep = run_suite(corpus, suites, seed=args.seed, workers=args.workers)
        with open(args.out, "w") as fh:
            fh.write(rep.to_json(with_values=True))


if __name__ == "__main__":
    main()

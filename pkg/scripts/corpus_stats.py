"""Summarise the corpus: counts by kind, arrow-count histogram, simple instances.

    python3 scripts/corpus_stats.py [--group 8 --space 4 --bundle 3 --pair 4]
"""

import argparse
from collections import Counter

from gpdlab.algebra import StarAlgebra
from gpdlab.corpus import CorpusSpec, enumerate_corpus
from gpdlab.groupoid import is_minimal, is_topologically_principal
from gpdlab.spectral import block_decomposition


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--group", type=int, default=8)
    ap.add_argument("--space", type=int, default=4)
    ap.add_argument("--bundle", type=int, default=3)
    ap.add_argument("--pair", type=int, default=4)
    ap.add_argument("--blocks", action="store_true", help="also compute block structure (slower)")
    args = ap.parse_args()

    spec = CorpusSpec(group_bound=args.group, space_bound=args.space,
                      bundle_bound=args.bundle, pair_bound=args.pair)
    corpus = enumerate_corpus(spec)
    kinds = Counter(i.kind for i in corpus)
    sizes = Counter(i.groupoid.n for i in corpus)
    print(f"{len(corpus)} instances: " + ", ".join(f"{k}={v}" for k, v in sorted(kinds.items())))
    print(f"group bundles: {sum(i.groupoid.is_group_bundle for i in corpus)}")
    print(f"minimal: {sum(is_minimal(i.groupoid) for i in corpus)}, "
          f"topologically principal: {sum(is_topologically_principal(i.groupoid) for i in corpus)}")
    print("arrows  count")
    for n in sorted(sizes):
        print(f"{n:6d}  {sizes[n]}")

    if args.blocks:
        simple = []
        blocks = Counter()
        for inst in corpus:
            dec = block_decomposition(StarAlgebra(inst.groupoid))
            blocks[dec.k] += 1
            if dec.k == 1:
                simple.append(inst.id)
        print("blocks  count")
        for k in sorted(blocks):
            print(f"{k:6d}  {blocks[k]}")
        print("simple: " + ", ".join(simple))


if __name__ == "__main__":
    main()

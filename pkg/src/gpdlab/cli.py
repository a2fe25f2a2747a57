"""Command line: ``gpdlab check|enumerate|verify|norm``.

Exit codes: 0 success, 1 a theorem check failed, 2 usage or input error,
3 internal error (the offending instance id is printed).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import criteria as C
from . import spectral as S
from .algebra import StarAlgebra, i_norm_array
from .corpus import CorpusSpec, enumerate_corpus
from .errors import GpdlabError
from .groupoid import is_minimal, is_topologically_principal, isotropy, isotropy_ids
from .io import FormatError, load_instance, parse_element
from .suites import SUITES, InstanceError, run_suite

log = logging.getLogger("gpdlab")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
BOUND_KEYS = {"group": "group_bound", "space": "space_bound", "bundle": "bundle_bound",
              "pair": "pair_bound", "samples": "samples"}


class UsageError(Exception):
    pass


def _int(text: str) -> int:
    return int(text, 0)


def default_seed() -> int:
    env = os.environ.get("GPDLAB_SEED")
    if env:
        try:
            return _int(env)
        except ValueError:
            raise UsageError(f"GPDLAB_SEED={env!r} is not an integer") from None
    return S.SEED


def _tf(b: bool) -> str:
    return "true" if b else "false"


def parse_bounds(items: list[str] | None, seed: int) -> CorpusSpec:
    kwargs = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            key, _, val = part.partition("=")
            if key not in BOUND_KEYS or not val:
                raise UsageError(f"bad bound {part!r}; use KEY=N with KEY in {sorted(BOUND_KEYS)}")
            try:
                kwargs[BOUND_KEYS[key]] = int(val)
            except ValueError:
                raise UsageError(f"bound {key} needs an integer, got {val!r}") from None
    try:
        return CorpusSpec(seed=seed, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_suites(items: list[str] | None) -> list[str]:
    if items is None:
        return list(SUITES)
    out = []
    for item in items:
        for s in item.split(","):
            s = s.strip()
            if not s or s == "none":
                continue
            if s == "all":
                out.extend(SUITES)
            elif s not in SUITES:
                raise UsageError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
            else:
                out.append(s)
    return out


# -- subcommands --------------------------------------------------------------------


def cmd_check(args) -> int:
    g, t = load_instance(args.file)
    alg = StarAlgebra(g)
    dec = S.block_decomposition(alg)
    minimal, principal = is_minimal(g), is_topologically_principal(g)
    simple = dec.k == 1
    iso = isotropy(g)
    nontrivial = len(isotropy_ids(g)) > len(g.units)

    print(f"instance: {g.name or args.file} ({g.n} arrows, {len(g.units)} units)")
    print("isotropy:")
    for u in g.units:
        print(f"  unit {u} [{g.labels[u]}]: order {iso.order(u)}")
    print(f"minimal: {_tf(minimal)}, top-principal: {_tf(principal)}, "
          f"blocks: {list(dec.dims)}, simple: {_tf(simple)}")

    checks = C.verify_simplicity_theorems(g, alg)
    if simple:
        reason = "simple: true, minimal and topologically principal ⇒ simple"
    elif nontrivial:
        reason = ("simple: false, IntIso nontrivial ⇒ not simple "
                  "(its augmentation ideal is proper and invariant under all normalizers)")
    else:
        reason = "simple: false, not minimal ⇒ not simple (a proper invariant set of units spans an ideal)"
    print(reason)
    for c in checks:
        print(f"check {c.name}: {'pass' if c.passed else 'FAIL'}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VIOLATION


def cmd_enumerate(args) -> int:
    spec = parse_bounds(args.bounds, default_seed())
    corpus = enumerate_corpus(spec)
    for inst in corpus:
        print(f"{inst.id}\t{inst.kind}\t{inst.groupoid.n}")
    print(f"total: {len(corpus)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    suites = parse_suites(args.suite)
    spec = parse_bounds(args.bounds, seed)
    corpus = enumerate_corpus(spec) if suites else []
    if not args.quiet:
        print(f"corpus: {len(corpus)} instances, suites: {','.join(suites) or '-'}, seed: {seed:#x}",
              file=sys.stderr, flush=True)

    def progress(k, total):
        if not args.quiet and (k % 50 == 0 or k == total):
            print(f"  {k}/{total}", file=sys.stderr, flush=True)

    report = run_suite(corpus, suites, seed=seed, samples=spec.samples, spec=spec,
                       workers=args.workers, progress=progress)
    if args.out:
        Path(args.out).write_text(report.to_json(args.with_values), encoding="utf-8")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerows(report.to_csv_rows())
    for name, (ok, total) in report.by_check().items():
        print(f"{'PASS' if ok == total else 'FAIL'} {name}: {ok}/{total}")
    for iid, c in report.failures[:20]:
        print(f"  failed {c.name} on {iid}", file=sys.stderr)
    print(f"{len(report.results)} instances, {report.n_checks} checks, {len(report.failures)} failed"
          + (f", {report.timing['total']:.1f}s" if "total" in report.timing else ""))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_norm(args) -> int:
    g, _ = load_instance(args.file)
    alg = StarAlgebra(g)
    x = parse_element(Path(args.element).read_text(), g.n)
    dec = S.block_decomposition(alg)
    print(f"norm: {S.norm(alg, x):.12g}")
    print(f"i-norm: {float(i_norm_array(alg, x)):.12g}")
    print("block norms: " + ", ".join(f"{v:.12g}" for v in dec.block_norms(x)))
    if g.is_group_bundle:
        for q in g.units:
            print(f"p_E[{q}]: {float(S.p_E(alg, q, x)):.12g}  p_unif[{q}]: {float(S.p_unif(alg, q, x)):.12g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpdlab", description="Finite groupoid C*-algebra checks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="analyse one groupoid or action file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    bounds_help = "corpus bounds as KEY=N (keys: group, space, bundle, pair, samples), comma or space separated"
    e = sub.add_parser("enumerate", help="list the corpus")
    e.add_argument("--bounds", nargs="+", help=bounds_help)
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="run theorem suites over the corpus")
    v.add_argument("--suite", action="append",
                   help=f"suite(s) to run, repeatable or comma separated ({', '.join(SUITES)}, all, none)")
    v.add_argument("--seed", type=_int, help="random seed (default: $GPDLAB_SEED or 0xC57A)")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--csv", help="also write a CSV table of checks")
    v.add_argument("--with-values", action="store_true",
                   help="include measured float errors in the JSON (not byte-stable across machines)")
    v.add_argument("--workers", type=int, default=1, help="worker processes")
    v.add_argument("--bounds", nargs="+", help=bounds_help)
    v.add_argument("-q", "--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("norm", help="C*-norm of an element")
    n.add_argument("file")
    n.add_argument("element")
    n.set_defaults(func=cmd_norm)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, FormatError, OSError, GpdlabError, IndexError, KeyError, ValueError) as exc:
        print(f"gpdlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceError as exc:
        print(f"gpdlab: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

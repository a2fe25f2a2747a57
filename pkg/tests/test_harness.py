import csv
import json

import numpy as np
import pytest

from gpdlab import cli
from gpdlab.corpus import CorpusSpec, enumerate_corpus, estimate_size
from gpdlab.errors import BoundTooLarge
from gpdlab.io import FormatError, format_element, load_instance, parse_element
from gpdlab.spectral import SEED
from gpdlab.suites import ANCHORS, SUITE_CHECKS, SUITES, run_suite

SMALL = CorpusSpec(group_bound=3, space_bound=2, bundle_bound=2, pair_bound=2, samples=10)


@pytest.fixture(scope="module")
def default_corpus():
    return enumerate_corpus()


def test_default_corpus_contents(default_corpus):
    ids = {i.id: i for i in default_corpus}
    assert len(ids) == len(default_corpus)
    assert 500 < len(default_corpus) <= 1000
    acts = [i.action for i in default_corpus if i.kind == "action"]
    swap = [a for a in acts if a.group.name == "Z2" and a.space == 2 and not np.all(a.act[1] == [0, 1])]
    assert len(swap) == 1
    assert any(a.group.name == "S3" and np.all(a.act == a.act[0]) for a in acts)  # trivial actions
    # Z4 acting through the swap quotient: the kernel is {e, g²}
    z4 = [a for a in acts if a.group.name == "Z4" and a.space == 2]
    kernels = [np.flatnonzero(np.all(a.act == [0, 1], axis=1)).tolist() for a in z4]
    G = z4[0].group
    gen = next(x for x in range(4) if G.element_order(x) == 4)
    assert sorted([G.identity, G.mul(gen, gen)]) in kernels


def test_single_trivial_instance():
    (inst,) = enumerate_corpus(CorpusSpec(1, 1, 1, 1))
    assert inst.groupoid.n == 1


def test_pair_bound_two_includes_m2():
    corpus = enumerate_corpus(CorpusSpec(1, 1, 1, 2))
    assert any(i.id == "pair/2" and i.groupoid.n == 4 for i in corpus)


def test_bounds_validation():
    with pytest.raises(ValueError):
        CorpusSpec(group_bound=0)
    with pytest.raises(BoundTooLarge):
        enumerate_corpus(CorpusSpec(bundle_bound=8))
    assert estimate_size(CorpusSpec(bundle_bound=8)) > 10_000


def test_registry_covers_every_check():
    assert set(SUITE_CHECKS) == set(SUITES)
    assert {c for cs in SUITE_CHECKS.values() for c in cs} == set(ANCHORS)


def test_run_suite_small_corpus_passes():
    corpus = enumerate_corpus(SMALL)
    report = run_suite(corpus, SUITES, seed=7, samples=SMALL.samples, spec=SMALL)
    assert report.passed, report.failures[:3]
    assert [r.instance for r in report.results] == sorted(i.id for i in corpus)
    d = report.to_dict()
    assert d["schema"] == 1 and d["summary"]["failed"] == 0
    for rec in d["instances"]:
        for c in rec["checks"]:
            assert c["anchor"] == ANCHORS[c["name"]]


def test_reports_are_reproducible():
    corpus = enumerate_corpus(SMALL)
    a = run_suite(corpus, ["norms", "appendix"], seed=11, samples=5, spec=SMALL).to_json()
    b = run_suite(corpus, ["norms", "appendix"], seed=11, samples=5, spec=SMALL).to_json()
    assert a == b
    assert "timing" not in json.loads(a)


def test_worker_pool_matches_serial():
    corpus = enumerate_corpus(SMALL)
    serial = run_suite(corpus, ["dominance"], seed=3, samples=5, spec=SMALL)
    pooled = run_suite(corpus, ["dominance"], seed=3, samples=5, spec=SMALL, workers=2)
    assert serial.to_json() == pooled.to_json()


def test_empty_suite_set():
    report = run_suite(enumerate_corpus(SMALL), [])
    assert report.results == [] and report.passed


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite([], ["nonsense"])


# -- io ------------------------------------------------------------------------------


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def test_load_presets_and_explicit(tmp_path):
    g, t = load_instance(write(tmp_path, "p.json", {"preset": "pair:3"}))
    assert g.n == 9 and t is None
    g, _ = load_instance(write(tmp_path, "u.json", {"preset": "disjoint_union",
                                                  "parts": [{"preset": "pair:2"}, {"preset": "group:S3"}]}))
    assert g.n == 10
    explicit = {"n": 2, "units": [0], "r": [0, 0], "s": [0, 0], "inv": [0, 1],
                "products": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]}
    g, _ = load_instance(write(tmp_path, "z2.json", explicit))
    assert g.n == 2 and g.is_group_bundle
    g, t = load_instance(write(tmp_path, "a.json", {"group": "Z4", "space": 2, "images": {"1": [1, 0]}}))
    assert t is not None and g.n == 8


def test_load_errors(tmp_path):
    with pytest.raises(FormatError):
        load_instance(write(tmp_path, "bad.json", "{nope"))
    with pytest.raises(FormatError):
        load_instance(write(tmp_path, "bad2.json", {"preset": "cube:3"}))
    with pytest.raises(FormatError):
        load_instance(write(tmp_path, "bad3.json", {"n": 1}))


def test_element_format_roundtrip():
    x = np.array([1.5, 0, -2 + 0.25j])
    assert np.allclose(parse_element(format_element(x), 3), x)
    assert np.allclose(parse_element("# comment\n2 1\n", 3), [0, 0, 1])
    with pytest.raises(IndexError):
        parse_element("5 1 0", 3)
    with pytest.raises(FormatError):
        parse_element("0 1\n0 2\n", 3)


# -- cli ------------------------------------------------------------------------------


def test_cli_check_swap(tmp_path, capsys):
    f = write(tmp_path, "swap.json", {"group": "Z2", "act": [[0, 1], [1, 0]]})
    assert cli.main(["check", f]) == 0
    assert "minimal: true, top-principal: true, blocks: [2], simple: true" in capsys.readouterr().out


def test_cli_check_z2point(tmp_path, capsys):
    f = write(tmp_path, "z2point.json", {"group": "Z2", "act": [[0], [0]]})
    assert cli.main(["check", f]) == 0
    out = capsys.readouterr().out
    assert "simple: false, IntIso nontrivial ⇒ not simple" in out


def test_cli_norm(tmp_path, capsys):
    f = write(tmp_path, "z2.json", {"preset": "group:Z2"})
    e = write(tmp_path, "x.txt", "0 1\n1 1\n")
    assert cli.main(["norm", f, e]) == 0
    assert "norm: 2\n" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path):
    assert cli.main(["check", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["verify", "--suite", "bogus"]) == 2
    assert cli.main(["enumerate", "--bounds", "group=x"]) == 2
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate"])
    assert err.value.code == 2


def test_cli_enumerate(capsys):
    assert cli.main(["enumerate", "--bounds", "group=1,space=1,bundle=1,pair=1"]) == 0
    assert capsys.readouterr().out.strip().endswith("total: 1")


def test_cli_verify_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv("GPDLAB_SEED", "0x1F")
    out, table = tmp_path / "r.json", tmp_path / "r.csv"
    args = ["verify", "--suite", "simplicity,minimality", "--bounds", "group=2", "space=2", "bundle=1",
            "pair=2", "samples=5", "--out", str(out), "--csv", str(table), "-q"]
    assert cli.main(args) == 0
    report = json.loads(out.read_text())
    assert report["seed"] == 0x1F and report["suites"] == ["minimality", "simplicity"]
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["instance", "check", "pass", "anchor"]
    assert len(rows) == 1 + report["summary"]["checks"]
    first = out.read_bytes()
    assert cli.main(args) == 0
    assert out.read_bytes() == first


def test_cli_verify_empty(capsys):
    assert cli.main(["verify", "--suite", "none"]) == 0


def test_default_seed(monkeypatch):
    monkeypatch.delenv("GPDLAB_SEED", raising=False)
    assert cli.default_seed() == SEED == 0xC57A

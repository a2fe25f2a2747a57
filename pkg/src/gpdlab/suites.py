"""Per-instance theorem suites, the check registry and run reports."""

from __future__ import annotations

import json
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import criteria as C
from . import spectral as S
from .algebra import (
    StarAlgebra,
    delta_embedding,
    elementary_normalizers,
    expectation_array,
    i_norm_array,
    tensor_bundle,
)
from .corpus import CorpusSpec, Instance
from .criteria import Check
from .errors import GpdlabError
from .groupoid import (
    generated_subgroupoid,
    interior_isotropy,
    is_minimal,
    isotropy_ids,
    orbits,
)
from .groupoid import _validate as validate_groupoid
from .transformation import (
    crossed_product_involution,
    crossed_product_multiply,
    upsilon,
    upsilon_inverse,
)

log = logging.getLogger(__name__)

SCHEMA = 1
TOL = 1e-7
UNIT_TOL = 1e-8
ETA_SAMPLES = 50
RANDOM_SUBGROUPOIDS = 5

SUITES = ("axioms", "norms", "dominance", "minimality", "simplicity", "augmentation", "delta", "appendix")

# check name -> statement it exercises (the report's anchor field)
ANCHORS: dict[str, str] = {
    "groupoid_axioms": "finite étale groupoid axioms (composability, units, inverses, associativity)",
    "convolution_associative": "C_c(G) is an associative algebra under convolution",
    "c_star_identity": "full norm satisfies ‖f*×f‖ = ‖f‖²",
    "norm_le_i_norm": "full norm is dominated by the I-norm",
    "expectation_properties": "restriction to units is a faithful, idempotent, bimodular conditional expectation",
    "crossed_product_dictionary": "Υ: C*(G×Q) → C(Q)⋊G is a *-isomorphism",
    "block_soundness": "Wedderburn decomposition: Σd²=dim, central idempotents sum to 1",
    "blockwise_norm": "C*-norm is the max of block norms and equals the regular-representation norm",
    "p_e_equals_p_unif": "for group bundles p^E_q = p^unif_q at every unit",
    "p_unif_infimum": "p^unif_q(a) = inf ‖f a‖ over cutoffs f with f(q)=1, 0≤f≤1",
    "gns_kernel_is_unif_ideal": "kernel of the GNS representation of ev_q∘E is J^unif_q for group bundles",
    "simple_dom": "∩ J^unif_q over simple points is dominant relative to C(Q)",
    "simple_essential": "C(Q) ⊆ A essential when the simple-point ideals meet in zero",
    "central_norm_ideal": "n C_{0,q1} n* ⊆ C_{0,q2} iff n J_{q1} n* ⊆ J_{q2} for C(Q) ⊆ C*(IntIso)",
    "meet_formula": "B∩L is the span of the central idempotents of B lying in L",
    "meet_fully_normalized": "B∩L is fully normalized for every ideal L of A",
    "reg_simple": "regular inclusion: A simple iff B ⊆ A essential and minimal",
    "diag_minimal_iff_groupoid_minimal": "C(units) ⊆ C*(G) minimal iff G has one orbit",
    "simplicity_equivalence": "C*(G) simple iff G minimal and topologically principal iff C*(IntIso) ⊆ C*(G) minimal",
    "intiso_augmentation_certificate": "nontrivial interior isotropy gives a proper invariant augmentation ideal, so A is not simple",
    "aug_nonzero_iff_nontrivial": "augmentation ideal is nonzero iff some fiber is nontrivial",
    "aug_proper": "augmentation ideal is a proper ideal",
    "aug_normalizer_invariant": "augmentation ideal is invariant under all normalizers",
    "aug_is_augmentation_kernel": "augmentation ideal is the kernel of the fiberwise augmentation map",
    "aug_bisections_match_singletons": "bisection differences lie in the singleton-generated augmentation ideal",
    "upsilon_star_isomorphism": "Υ intertwines convolution and involution with the crossed product",
    "delta_star_homomorphism": "Δ: Σ f_g u_g ↦ Σ f_g ⊗ v_g is a *-homomorphism on the isotropy subalgebra",
    "delta_isometric": "Δ is injective and isometric",
    "eta_theta_positive": "η_θ is positive for positive-definite θ",
    "subgroupoid_isometry": "C_c(Y) ⊆ C_c(G) is isometric for the full norm, Y an open subgroupoid",
}

SUITE_CHECKS: dict[str, tuple[str, ...]] = {
    "axioms": ("groupoid_axioms", "convolution_associative", "c_star_identity", "norm_le_i_norm",
               "expectation_properties", "crossed_product_dictionary"),
    "norms": ("block_soundness", "blockwise_norm", "p_e_equals_p_unif", "p_unif_infimum",
              "gns_kernel_is_unif_ideal"),
    "dominance": ("simple_dom", "simple_essential", "central_norm_ideal", "meet_formula",
                  "meet_fully_normalized"),
    "minimality": ("reg_simple", "diag_minimal_iff_groupoid_minimal"),
    "simplicity": ("simplicity_equivalence", "intiso_augmentation_certificate"),
    "augmentation": ("aug_nonzero_iff_nontrivial", "aug_proper", "aug_normalizer_invariant",
                     "aug_is_augmentation_kernel", "aug_bisections_match_singletons"),
    "delta": ("upsilon_star_isomorphism", "delta_star_homomorphism", "delta_isometric"),
    "appendix": ("eta_theta_positive", "subgroupoid_isometry"),
}


def validate_registry() -> None:
    """Every check a suite can emit has an anchor, and every anchor is used."""
    emitted = {c for names in SUITE_CHECKS.values() for c in names}
    missing = emitted - ANCHORS.keys()
    unused = ANCHORS.keys() - emitted
    if missing or unused or set(SUITE_CHECKS) != set(SUITES):
        raise RuntimeError(f"check registry out of sync: missing={sorted(missing)} unused={sorted(unused)}")


validate_registry()


def _rel(err, scale) -> float:
    return float(np.max(np.asarray(err) / np.maximum(1.0, np.asarray(scale)), initial=0.0))


def instance_rng(seed: int, instance_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(instance_id.encode())])


# -- suites ------------------------------------------------------------------------


def suite_axioms(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    g = alg.groupoid
    try:
        validate_groupoid(g)
        ok_g = True
    except (GpdlabError, IndexError):
        ok_g = False
    ok_g &= orbits(g).count >= 1 and all(g.is_unit[u] for u in g.units)

    x, y, z = (alg.random(rng, samples) for _ in range(3))
    lhs = alg.conv(alg.conv(x, y), z)
    rhs = alg.conv(x, alg.conv(y, z))
    assoc = _rel(np.abs(lhs - rhs).max(axis=-1), np.abs(lhs).max(axis=-1))

    nx = S.norm_array(alg, x)
    nxx = S.norm_array(alg, alg.conv(alg.star(x), x))
    cstar = _rel(np.abs(nxx - nx**2), nx**2)
    inorm = i_norm_array(alg, x)
    excess = float(np.max(nx - inorm * (1 + TOL)))

    # conditional expectation: positive and faithful on f*f, idempotent, C(units)-bimodular
    ex = expectation_array(alg, alg.conv(alg.star(x), x))
    diag = ex[:, list(g.units)]
    positive = bool(np.all(np.abs(diag.imag) <= 1e-9 * np.maximum(1, np.abs(diag))) and np.all(diag.real >= -1e-9))
    faithful = bool(np.all(diag.real.sum(axis=-1) > 0))
    idem = np.allclose(expectation_array(alg, ex), ex)
    a = alg.random(rng, samples, support=g.units)
    b = alg.random(rng, samples, support=g.units)
    bimod = _rel(
        np.abs(expectation_array(alg, alg.conv(alg.conv(a, y), b)) - alg.conv(alg.conv(a, expectation_array(alg, y)), b)).max(axis=-1),
        1.0,
    )
    checks = [
        Check("groupoid_axioms", ok_g, {"n": g.n, "units": len(g.units)}),
        Check("convolution_associative", assoc <= TOL, {"max_rel_error": assoc}),
        Check("c_star_identity", cstar <= TOL, {"max_rel_error": cstar}),
        Check("norm_le_i_norm", excess <= TOL, {"max_excess": excess}),
        Check("expectation_properties", positive and faithful and idem and bimod <= TOL,
              {"positive": positive, "faithful": faithful, "idempotent": bool(idem), "bimodule_error": bimod}),
    ]
    t = inst.transformation
    if t is not None:
        ux, uy = upsilon(t, x), upsilon(t, y)
        prod = _rel(np.abs(upsilon(t, alg.conv(x, y)) - crossed_product_multiply(t.action, ux, uy)).max(axis=(-1, -2)), 1.0)
        star = float(np.abs(upsilon(t, alg.star(x)) - crossed_product_involution(t.action, ux)).max())
        back = float(np.abs(upsilon_inverse(t, ux) - x).max())
        checks.append(Check("crossed_product_dictionary", max(prod, star, back) <= TOL,
                            {"product_error": prod, "involution_error": star, "roundtrip_error": back}))
    return checks


def suite_norms(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    g = alg.groupoid
    dec = S.block_decomposition(alg)
    E = np.array(dec.idempotents)
    unit_err = float(np.abs(E.sum(axis=0) - alg.one).max())
    prods = alg.conv(E[:, None, :], E[None, :, :])
    expect = np.einsum("ij,jc->ijc", np.eye(dec.k), E)
    orth_err = float(np.abs(prods - expect).max())
    dims_ok = sum(d * d for d in dec.dims) == g.n
    checks = [Check("block_soundness", dims_ok and unit_err <= UNIT_TOL and orth_err <= UNIT_TOL,
                    {"dims": list(dec.dims), "unit_error": unit_err, "orthogonality_error": orth_err})]

    x = alg.random(rng, samples)
    blockwise = dec.norm(x)
    regular = S.norm_array(alg, x)
    err = _rel(np.abs(blockwise - regular), regular)
    checks.append(Check("blockwise_norm", err <= TOL, {"max_rel_error": err}))

    if g.is_group_bundle:
        worst = worst_inf = 0.0
        kernels_ok = True
        for q in g.units:
            pe, pu = S.p_E(alg, q, x), S.p_unif(alg, q, x)
            worst = max(worst, _rel(np.abs(pe - pu), pu))
            # cutoffs: the indicator of q plus random admissible ones; the indicator attains the infimum
            cuts = rng.random((4, len(g.units)))
            cuts[0] = 0.0
            cuts[:, list(g.units).index(q)] = 1.0
            inf = S.p_unif_inf(alg, q, x[:10], cuts)
            worst_inf = max(worst_inf, _rel(np.abs(inf - pu[:10]), pu[:10]))
            K = S.kernel_ideal_K(alg, S.unit_state(alg, q))
            kernels_ok &= K.blocks == S.unif_ideal(alg, q).blocks
        checks += [
            Check("p_e_equals_p_unif", worst <= TOL, {"units": len(g.units), "max_rel_error": worst}),
            Check("p_unif_infimum", worst_inf <= TOL, {"max_rel_error": worst_inf}),
            Check("gns_kernel_is_unif_ideal", kernels_ok),
        ]
    return checks


def suite_dominance(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    g = alg.groupoid
    checks = []
    if g.is_group_bundle:
        checks += C.verify_simple_dom(alg)
    checks.append(C.verify_central_norm_ideal(alg))

    # B ∩ L by lattice masks vs by subspace intersection, for B = C(units) and B = C*(IntIso)
    dec = S.block_decomposition(alg)
    ideals = [dec.ideal([i]) for i in range(dec.k)]
    for _ in range(3):
        ideals.append(dec.ideal([i for i in range(dec.k) if rng.random() < 0.5]))
    mismatches = 0
    normalized = True
    normalizers = elementary_normalizers(alg)
    for inc in (C.diagonal_inclusion(alg), C.isotropy_inclusion(alg)):
        masks = C._meet_masks(inc, np.array([C._mask(L.blocks) for L in ideals], dtype=np.int64))
        for L, m in zip(ideals, masks):
            meet = C.intersect_ideal_with_subalgebra(inc, L)
            mismatches += meet.blocks != frozenset(C._blocks(int(m)))
            normalized &= C.is_fully_normalized(inc, meet, normalizers)
    checks.append(Check("meet_formula", mismatches == 0, {"ideals": len(ideals), "mismatches": mismatches}))
    checks.append(Check("meet_fully_normalized", normalized))
    return checks


def suite_minimality(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    inc = C.diagonal_inclusion(alg)
    normalizers = elementary_normalizers(alg)
    reg = C.verify_reg_simple(inc, normalizers)
    minimal = C.is_inclusion_minimal(inc, normalizers)
    return [
        reg,
        Check("diag_minimal_iff_groupoid_minimal", minimal == is_minimal(alg.groupoid),
              {"inclusion_minimal": minimal, "orbits": orbits(alg.groupoid).count}),
    ]


def suite_simplicity(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    return C.verify_simplicity_theorems(alg.groupoid, alg)


def suite_augmentation(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    # IntIso is a group bundle for every instance; bundles are their own IntIso
    g = alg.groupoid
    bundle_alg = alg if g.is_group_bundle else StarAlgebra(interior_isotropy(g))
    return C.verify_aug_ideal(bundle_alg, rng)


def suite_delta(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    t = inst.transformation
    if t is None:
        return []
    g = alg.groupoid
    x = alg.random(rng, samples)
    y = alg.random(rng, samples)
    ux = upsilon(t, x)
    prod = _rel(np.abs(upsilon(t, alg.conv(x, y)) - crossed_product_multiply(t.action, ux, upsilon(t, y))).max(axis=(-1, -2)), 1.0)
    star = float(np.abs(upsilon(t, alg.star(x)) - crossed_product_involution(t.action, ux)).max())
    checks = [Check("upsilon_star_isomorphism", max(prod, star) <= TOL,
                    {"product_error": prod, "involution_error": star})]

    iso = isotropy_ids(g)
    a = alg.random(rng, samples, support=iso)
    b = alg.random(rng, samples, support=iso)
    tb = tensor_bundle(t)
    target = StarAlgebra(tb.groupoid)
    da, db = (tb.to_coeffs(delta_embedding(t, v)) for v in (a, b))
    dab = tb.to_coeffs(delta_embedding(t, alg.conv(a, b)))
    hom = _rel(np.abs(dab - target.conv(da, db)).max(axis=-1), np.abs(dab).max(axis=-1))
    hom_star = float(np.abs(tb.to_coeffs(delta_embedding(t, alg.star(a))) - target.star(da)).max())
    na, nda = S.norm_array(alg, a), S.norm_array(target, da)
    iso_err = _rel(np.abs(na - nda), na)
    checks += [
        Check("delta_star_homomorphism", max(hom, hom_star) <= TOL,
              {"product_error": hom, "involution_error": hom_star}),
        Check("delta_isometric", iso_err <= TOL, {"max_rel_error": iso_err}),
    ]
    return checks


def suite_appendix(inst: Instance, alg: StarAlgebra, rng, samples: int) -> list[Check]:
    g = alg.groupoid
    thetas = [C.random_positive_definite(g, u, rng) for u in g.units for _ in range(ETA_SAMPLES)]
    checks = [C.verify_eta_positivity(alg, thetas)]

    subs = {"units": list(g.units), "intiso": isotropy_ids(g)}
    for k in range(RANDOM_SUBGROUPOIDS):
        seeds = rng.choice(g.n, size=min(g.n, int(rng.integers(1, 3))), replace=False)
        subs[f"random{k}"] = generated_subgroupoid(g, seeds.tolist())
    errors, ok = {}, True
    for label, ids in subs.items():
        c = C.verify_open_subgroupoid_isometry(alg, ids, rng, samples)
        errors[label] = c.values["max_abs_error"]
        ok &= c.passed
    checks.append(Check("subgroupoid_isometry", ok, {"max_abs_error": errors}))
    return checks


SUITE_FUNCS: dict[str, Callable[..., list[Check]]] = {
    "axioms": suite_axioms,
    "norms": suite_norms,
    "dominance": suite_dominance,
    "minimality": suite_minimality,
    "simplicity": suite_simplicity,
    "augmentation": suite_augmentation,
    "delta": suite_delta,
    "appendix": suite_appendix,
}


# -- reports ----------------------------------------------------------------------


@dataclass
class InstanceResult:
    instance: str
    checks: list[Check]
    seconds: dict[str, float] = field(default_factory=dict)  # per suite

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class RunReport:
    seed: int
    suites: tuple[str, ...]
    spec: CorpusSpec | None
    results: list[InstanceResult] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)  # "total" and "suite:<name>"; not serialised

    @property
    def n_checks(self) -> int:
        return sum(len(r.checks) for r in self.results)

    @property
    def failures(self) -> list[tuple[str, Check]]:
        return [(r.instance, c) for r in self.results for c in r.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def by_check(self) -> dict[str, tuple[int, int]]:
        """check name -> (passed, total)."""
        out: dict[str, list[int]] = {}
        for r in self.results:
            for c in r.checks:
                tally = out.setdefault(c.name, [0, 0])
                tally[0] += c.passed
                tally[1] += 1
        return {k: (v[0], v[1]) for k, v in sorted(out.items())}

    def to_dict(self, with_values: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "seed": self.seed,
            "bounds": None if self.spec is None else {
                "group": self.spec.group_bound, "space": self.spec.space_bound,
                "bundle": self.spec.bundle_bound, "pair": self.spec.pair_bound,
                "samples": self.spec.samples,
            },
            "suites": list(self.suites),
            "summary": {"instances": len(self.results), "checks": self.n_checks,
                        "failed": len(self.failures), "pass": self.passed},
            "instances": [
                {"instance": r.instance, "pass": r.passed,
                 "checks": [_check_record(c, with_values) for c in r.checks]}
                for r in self.results
            ],
        }

    def to_json(self, with_values: bool = False) -> str:
        """Byte-stable unless ``with_values`` adds measured float errors (last digits vary with BLAS)."""
        return json.dumps(self.to_dict(with_values), indent=1, ensure_ascii=False) + "\n"

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["instance", "check", "pass", "anchor"]]
        for r in self.results:
            rows += [[r.instance, c.name, str(c.passed).lower(), ANCHORS[c.name]] for c in r.checks]
        return rows


def _jsonable(v, floats: bool = False):
    """Exact data only unless ``floats``: dropping floats keeps reports stable across BLAS builds."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if floats and isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, str) or v is None:
        return v
    if isinstance(v, S.Ideal):
        return {"blocks": sorted(int(b) for b in v.blocks)}
    if isinstance(v, dict):
        out = {str(k): _jsonable(x, floats) for k, x in v.items()}
        return {k: x for k, x in out.items() if x is not _DROP}
    if isinstance(v, (list, tuple, frozenset, set)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [x for x in (_jsonable(i, floats) for i in items) if x is not _DROP]
    return _DROP


_DROP = object()


def _check_record(c: Check, with_values: bool = False) -> dict:
    rec = {"name": c.name, "anchor": ANCHORS[c.name], "pass": bool(c.passed)}
    values = _jsonable(c.values, with_values)
    if values:
        rec["values"] = values
    if c.witness is not None:
        rec["witness"] = _jsonable(c.witness)
    return rec


# -- orchestration ------------------------------------------------------------------


class InstanceError(RuntimeError):
    def __init__(self, instance_id: str, cause: BaseException):
        super().__init__(f"internal error on instance {instance_id}: {cause!r}")
        self.instance_id = instance_id


def run_instance(inst: Instance, suites: Iterable[str], seed: int, samples: int) -> InstanceResult:
    rng = instance_rng(seed, inst.id)
    alg = StarAlgebra(inst.groupoid)
    result = InstanceResult(inst.id, [])
    try:
        for name in suites:
            t0 = time.perf_counter()
            for c in SUITE_FUNCS[name](inst, alg, rng, samples):
                if c.name not in SUITE_CHECKS[name]:
                    raise RuntimeError(f"suite {name} emitted unregistered check {c.name}")
                result.checks.append(c)
            result.seconds[name] = time.perf_counter() - t0
    except Exception as exc:  # internal errors abort the sweep with the instance id
        raise InstanceError(inst.id, exc) from exc
    return result


def _run_packed(args):
    return run_instance(*args)


def run_suite(
    corpus: list[Instance],
    suites: Iterable[str] = SUITES,
    *,
    seed: int = S.SEED,
    samples: int = 100,
    spec: CorpusSpec | None = None,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> RunReport:
    """Run the selected suites on each instance; check failures are recorded, not raised."""
    wanted = set(suites)
    unknown = wanted - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")
    suites = tuple(s for s in SUITES if s in wanted)
    report = RunReport(seed, suites, spec)
    if not suites:
        return report
    ordered = sorted(corpus, key=lambda i: i.id)
    log.info("running %s on %d instances", ",".join(suites), len(ordered))
    jobs = [(inst, suites, seed, samples) for inst in ordered]
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            outs = list(pool.map(_run_packed, jobs, chunksize=8))
    else:
        outs = []
        for k, job in enumerate(jobs):
            outs.append(_run_packed(job))
            if progress:
                progress(k + 1, len(jobs))
    for res in outs:
        report.results.append(res)
        for name, dt in res.seconds.items():
            report.timing[f"suite:{name}"] = report.timing.get(f"suite:{name}", 0.0) + dt
    report.timing["total"] = time.perf_counter() - t0
    return report

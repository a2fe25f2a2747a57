"""Inclusion-level criteria and per-result verifiers.

Quantifiers over ideals are discharged over block-subset lattices. Up to
``EXHAUSTIVE_MAX_BLOCKS`` blocks every subset is enumerated (vectorised
bitmasks). Above that, each quantifier is reduced to an exactly equivalent
finite condition: atoms for dominance, reachability for minimality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import spectral
from .algebra import (
    AlgebraElement,
    StarAlgebra,
    augmentation_generators,
    bisection_difference,
    elementary_normalizers,
    is_bisection,
)
from .errors import (
    NotANormalizer,
    NotGroupBundle,
    NotPositiveDefinite,
    NotRegularInclusion,
    NotSubgroupoid,
)
from .groupoid import (
    FiniteGroupoid,
    isotropy_ids,
    is_minimal,
    is_topologically_principal,
    restrict_to_open_subgroupoid,
)
from .spectral import BlockDecomposition, Ideal, block_decomposition, orthonormal_basis

EXHAUSTIVE_MAX_BLOCKS = 20
CLOSURE_TOL = 1e-9
NORM_TOL = 1e-7
GRAM_TOL = 1e-8


@dataclass
class Check:
    name: str
    passed: bool
    values: dict[str, Any] = field(default_factory=dict)
    witness: Any = None


def _coeffs(x):
    return x.coeffs if isinstance(x, AlgebraElement) else np.asarray(x)


# -- inclusions --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Inclusion:
    """A unital *-subalgebra B ⊆ A = C*(𝒢), given by a spanning set."""

    algebra: StarAlgebra
    basis: np.ndarray  # orthonormal columns
    name: str = ""

    @cached_property
    def sub(self) -> BlockDecomposition:
        return block_decomposition(self.algebra, self.basis)

    @cached_property
    def ambient(self) -> BlockDecomposition:
        return block_decomposition(self.algebra)

    @cached_property
    def ambient_support(self) -> list[int]:
        """Bitmask of A-blocks meeting each minimal central idempotent of B."""
        masks = []
        for e in self.sub.idempotents:
            blocks = self.ambient.support(e[:, None])
            masks.append(sum(1 << i for i in blocks))
        return masks

    def contains(self, x, tol: float = 1e-7) -> np.ndarray:
        x = _coeffs(x)
        B = self.basis
        proj = (x @ np.conj(B)) @ B.T
        return np.abs(proj - x).max(axis=-1) <= tol * np.maximum(1.0, np.abs(x).max(axis=-1))


def make_inclusion(alg: StarAlgebra, spanning, name: str = "") -> Inclusion:
    """Validate closure under product and involution and that B contains the unit."""
    B = orthonormal_basis(np.asarray(spanning, dtype=complex))
    inc = Inclusion(alg, B, name)
    cols = B.T
    prods = alg.conv(cols[:, None, :], cols[None, :, :]).reshape(-1, alg.n)
    if not np.all(inc.contains(prods, CLOSURE_TOL * 10)):
        raise ValueError("spanning set is not closed under convolution")
    if not np.all(inc.contains(alg.star(cols), CLOSURE_TOL * 10)):
        raise ValueError("spanning set is not closed under the involution")
    if not inc.contains(alg.one):
        raise ValueError("inclusion is degenerate: B does not contain the unit of A")
    return inc


def diagonal_inclusion(alg: StarAlgebra) -> Inclusion:
    """C(𝒢⁽⁰⁾) ⊆ C*(𝒢)."""
    return make_inclusion(alg, alg.basis(alg.groupoid.units), "C(units)")


def subgroupoid_inclusion(alg: StarAlgebra, ids, name: str = "") -> Inclusion:
    return make_inclusion(alg, alg.basis(sorted(ids)), name)


def isotropy_inclusion(alg: StarAlgebra) -> Inclusion:
    """C*(IntIso 𝒢) ⊆ C*(𝒢)."""
    return subgroupoid_inclusion(alg, isotropy_ids(alg.groupoid), "C*(IntIso)")


def scalar_inclusion(alg: StarAlgebra) -> Inclusion:
    return make_inclusion(alg, alg.one[:, None], "C·1")


def whole_inclusion(alg: StarAlgebra) -> Inclusion:
    return make_inclusion(alg, alg.basis(), "A")


# -- lattice helpers -------------------------------------------------------------


def _masks(k: int) -> np.ndarray | None:
    if k > EXHAUSTIVE_MAX_BLOCKS:
        return None
    return np.arange(1 << k, dtype=np.int64)


def _mask(blocks) -> int:
    return sum(1 << int(i) for i in blocks)


def _blocks(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _meet_masks(inc: Inclusion, S: np.ndarray) -> np.ndarray:
    """For A-ideal masks S, the mask of B-blocks j with e_j ∈ S (that is, B ∩ S)."""
    out = np.zeros_like(S)
    for j, supp in enumerate(inc.ambient_support):
        out |= ((supp & ~S) == 0).astype(np.int64) << j
    return out


def intersect_ideal_with_subalgebra(inc: Inclusion, L: Ideal) -> Ideal:
    """B ∩ L by subspace intersection, expressed in B's own blocks."""
    alg = inc.algebra
    if L.dim == 0:
        return inc.sub.zero()
    stacked = np.concatenate([inc.basis, -L.basis], axis=1)
    coeff = spectral.null_space(stacked)
    W = orthonormal_basis(inc.basis @ coeff[: inc.basis.shape[1]])
    blocks = inc.sub.support(W)
    ideal = inc.sub.ideal(blocks)
    if ideal.dim != W.shape[1]:
        raise spectral.ClosureNotIdeal("intersection is not a sum of blocks of B")
    return ideal


def dominance_witness(inc: Inclusion, J: Ideal) -> Ideal | None:
    """An ideal L of A with B∩L ⊆ B∩J but L ⊄ J, or None when J is dominant."""
    k = inc.ambient.k
    jm = _mask(J.blocks)
    masks = _masks(k)
    if masks is None:
        # if L fails then so does the atom {i} for any i ∈ L \ J
        masks = np.array([1 << i for i in range(k) if not jm >> i & 1], dtype=np.int64)
    meet = _meet_masks(inc, masks)
    meet_j = int(_meet_masks(inc, np.array([jm]))[0])
    bad = np.flatnonzero(((meet & ~meet_j) == 0) & ((masks & ~jm) != 0))
    if len(bad) == 0:
        return None
    return inc.ambient.ideal(_blocks(int(masks[bad[0]])))


def is_dominant(inc: Inclusion, J: Ideal) -> bool:
    return dominance_witness(inc, J) is None


def is_essential(inc: Inclusion) -> bool:
    """Every nonzero ideal of A meets B; i.e. the zero ideal is dominant."""
    return dominance_witness(inc, inc.ambient.zero()) is None


def _conjugates(alg: StarAlgebra, N: np.ndarray, X: np.ndarray) -> np.ndarray:
    """n x n* and n* x n for each row n of N and row x of X, shape (len(N), 2·len(X), dim)."""
    N = np.atleast_2d(N)[:, None, :]
    Ns = alg.star(N)
    a = alg.conv(alg.conv(N, X[None]), Ns)
    b = alg.conv(alg.conv(Ns, X[None]), N)
    return np.concatenate([a, b], axis=1)


def _check_normalizers(inc: Inclusion, normalizers) -> np.ndarray:
    N = np.array([_coeffs(n) for n in normalizers], dtype=complex).reshape(-1, inc.algebra.n)
    key = N.tobytes()
    cache = inc.__dict__.setdefault("_normalizers_ok", set())
    if key in cache:
        return N
    ok = inc.contains(_conjugates(inc.algebra, N, inc.basis.T)).all(axis=-1)
    if not np.all(ok):
        raise NotANormalizer(int(np.flatnonzero(~ok)[0]))
    cache.add(key)
    return N


def is_fully_normalized(inc: Inclusion, J: Ideal, normalizers) -> bool:
    """n J n* ∪ n* J n ⊆ J for every listed normalizer n of B."""
    N = _check_normalizers(inc, normalizers)
    if J.dim == 0 or len(N) == 0:
        return True
    return bool(np.all(J.contains(_conjugates(inc.algebra, N, J.basis.T))))


def _normalizer_relation(inc: Inclusion, normalizers) -> list[int]:
    """succ[j]: mask of B-blocks reached by n (e_j B) n* and n* (e_j B) n."""
    alg = inc.algebra
    N = _check_normalizers(inc, normalizers)
    succ = []
    for j, V in enumerate(inc.sub.block_bases):
        reach = 1 << j
        if len(N):
            reach |= _mask(inc.sub.support(_conjugates(alg, N, V.T).reshape(-1, alg.n).T))
        succ.append(reach)
    return succ


def fully_normalized_witness(inc: Inclusion, normalizers) -> Ideal | None:
    """A fully normalized ideal of B other than 0 and B, or None if the inclusion is minimal."""
    succ = _normalizer_relation(inc, normalizers)
    k = len(succ)
    full = (1 << k) - 1
    masks = _masks(k)
    if masks is not None:
        closed = np.ones(len(masks), dtype=bool)
        for j, s in enumerate(succ):
            inside = (masks >> j & 1).astype(bool)
            closed &= ~inside | ((s & ~masks) == 0)
        proper = closed & (masks != 0) & (masks != full)
        hits = np.flatnonzero(proper)
        return inc.sub.ideal(_blocks(int(masks[hits[0]]))) if len(hits) else None
    # closed sets are unions of successor-closures; nontrivial ones exist iff some closure is proper
    for j in range(k):
        reach, frontier = 1 << j, [j]
        while frontier:
            i = frontier.pop()
            new = succ[i] & ~reach
            reach |= new
            frontier.extend(_blocks(new))
        if reach != full:
            return inc.sub.ideal(_blocks(reach))
    return None


def is_inclusion_minimal(inc: Inclusion, normalizers) -> bool:
    return fully_normalized_witness(inc, normalizers) is None


def generates_algebra(alg: StarAlgebra, vectors: np.ndarray) -> bool:
    """Whether the columns generate C_c(𝒢) as an algebra."""
    W = orthonormal_basis(vectors)
    while True:
        prods = alg.conv(W.T[:, None, :], W.T[None, :, :]).reshape(-1, alg.n).T
        new = orthonormal_basis(np.concatenate([W, prods], axis=1))
        if new.shape[1] == W.shape[1]:
            return W.shape[1] == alg.n
        W = new


# -- verifiers --------------------------------------------------------------------


def verify_reg_simple(inc: Inclusion, normalizers) -> Check:
    """A simple ⇔ (B ⊆ A essential and minimal), for a regular inclusion."""
    alg = inc.algebra
    ns = np.array([_coeffs(n) for n in normalizers], dtype=complex).reshape(-1, alg.n).T
    if not generates_algebra(alg, np.concatenate([inc.basis, ns], axis=1)):
        raise NotRegularInclusion("normalizers and B do not generate A")
    simple = inc.ambient.k == 1
    ess_w = dominance_witness(inc, inc.ambient.zero())
    min_w = fully_normalized_witness(inc, normalizers)
    essential, minimal = ess_w is None, min_w is None
    passed = simple == (essential and minimal)
    witness = None
    if not passed:
        witness = {"non_essential": ess_w, "normalized_ideal": min_w}
    return Check(
        "reg_simple",
        passed,
        {"simple": simple, "essential": essential, "minimal": minimal},
        witness,
    )


def augmentation_ideal(alg: StarAlgebra, inc: Inclusion | None = None) -> Ideal:
    """𝔙 for a group-bundle algebra, or for C*(IntIso) inside ``inc`` when given."""
    if inc is None:
        return spectral.ideal_generated_by(alg, augmentation_generators(alg))
    g = alg.groupoid
    gens = [alg.delta(x) - alg.delta(int(g.r[x])) for x in isotropy_ids(g) if not g.is_unit[x]]
    return spectral.ideal_generated_by(alg, gens, within=inc.sub)


def verify_simplicity_theorems(g: FiniteGroupoid, alg: StarAlgebra | None = None) -> list[Check]:
    """Oracle simplicity vs (minimal ∧ topologically principal) vs minimality of C*(IntIso) ⊆ C*(𝒢)."""
    alg = alg or StarAlgebra(g)
    simple = spectral.block_decomposition(alg).k == 1
    dynamic = is_minimal(g) and is_topologically_principal(g)
    inc = isotropy_inclusion(alg)
    normalizers = elementary_normalizers(alg)
    minimal = is_inclusion_minimal(inc, normalizers)
    checks = [
        Check(
            "simplicity_equivalence",
            simple == dynamic == minimal,
            {"simple": simple, "minimal_and_top_principal": dynamic, "intiso_minimal": minimal},
        )
    ]
    # certificate of non-simplicity from the isotropy side
    V = augmentation_ideal(alg, inc)
    nontrivial = len(isotropy_ids(g)) > len(g.units)
    invariant = is_fully_normalized(inc, V, normalizers)
    certified = nontrivial and V.dim > 0 and V.dim < inc.sub.dim and invariant
    checks.append(
        Check(
            "intiso_augmentation_certificate",
            (V.dim > 0) == nontrivial and invariant and V.dim < inc.sub.dim
            and (not certified or not simple),
            {"intiso_nontrivial": nontrivial, "aug_dim": V.dim, "invariant": invariant,
             "certifies_non_simple": certified},
        )
    )
    return checks


def verify_aug_ideal(alg: StarAlgebra, rng: np.random.Generator | None = None) -> list[Check]:
    """Nonzero iff the bundle has nontrivial fibers; proper; normalizer invariant."""
    g = alg.groupoid
    if not g.is_group_bundle:
        raise NotGroupBundle(f"{g.name or 'groupoid'} has r != s somewhere")
    V = augmentation_ideal(alg)
    nontrivial = g.n > len(g.units)
    whole = whole_inclusion(alg)
    invariant = is_fully_normalized(whole, V, elementary_normalizers(alg))

    # independent description: kernel of f ↦ (Σ_{γ∈𝒢u} f(γ))_u
    aug_map = np.zeros((len(g.units), g.n))
    for i, u in enumerate(g.units):
        aug_map[i, g.source_fiber(u)] = 1.0
    kernel = spectral.null_space(aug_map)
    same_as_kernel = kernel.shape[1] == V.dim and V.contains_all(kernel)

    checks = [
        Check("aug_nonzero_iff_nontrivial", (V.dim > 0) == nontrivial,
              {"dim": V.dim, "nontrivial": nontrivial}),
        Check("aug_proper", V.dim < g.n, {"dim": V.dim, "ambient": g.n}),
        Check("aug_normalizer_invariant", invariant),
        Check("aug_is_augmentation_kernel", same_as_kernel,
              {"kernel_dim": kernel.shape[1]}),
    ]
    if rng is not None:
        # larger bisections add nothing beyond the singleton generators
        ok = True
        for _ in range(10):
            picks = [int(rng.choice(g.source_fiber(u))) for u in g.units if rng.random() < 0.7]
            if not picks:
                continue
            assert is_bisection(g, picks)
            f = np.zeros(g.n, dtype=complex)
            f[picks] = rng.standard_normal(len(picks)) + 1j * rng.standard_normal(len(picks))
            ok &= bool(V.contains(bisection_difference(alg, f)))
        checks.append(Check("aug_bisections_match_singletons", ok))
    return checks


# -- seminorm / dominance results for central inclusions ------------------------------


def unif_simple_points(alg: StarAlgebra) -> list[int]:
    """Units q with A/J^unif_q simple (exactly one block outside J^unif_q)."""
    dec = spectral.block_decomposition(alg)
    return [q for q in alg.groupoid.units if dec.k - len(spectral.unif_ideal(alg, q).blocks) == 1]


def verify_simple_dom(alg: StarAlgebra) -> list[Check]:
    """For every nonempty Q₀ ⊆ Q_simple, ∩_{q∈Q₀} J^unif_q is dominant relative to C(Q)."""
    dec = spectral.block_decomposition(alg)
    inc = diagonal_inclusion(alg)
    simple_pts = unif_simple_points(alg)
    failures = []
    tried = 0
    for size in range(1, len(simple_pts) + 1):
        for Q0 in itertools.combinations(simple_pts, size):
            blocks = frozenset(range(dec.k))
            for q in Q0:
                blocks &= spectral.unif_ideal(alg, q).blocks
            tried += 1
            w = dominance_witness(inc, dec.ideal(blocks))
            if w is not None:
                failures.append({"Q0": list(Q0), "witness_blocks": sorted(w.blocks)})
    checks = [Check("simple_dom", not failures,
                    {"simple_points": simple_pts, "subsets_checked": tried},
                    failures or None)]
    if simple_pts:
        meet = frozenset(range(dec.k))
        for q in simple_pts:
            meet &= spectral.unif_ideal(alg, q).blocks
        essential = is_essential(inc)
        checks.append(Check("simple_essential", bool(meet) or essential,
                            {"meet_is_zero": not meet, "essential": essential}))
    return checks


def verify_central_norm_ideal(alg: StarAlgebra) -> Check:
    """For C(Q) ⊆ D = C*(IntIso) ⊆ A and n = δ_γ: n C_{0,q₁} n* ⊆ C_{0,q₂} ⇔ n J_{q₁} n* ⊆ J_{q₂}."""
    g = alg.groupoid
    inc = isotropy_inclusion(alg)
    units = list(g.units)
    J = {q: spectral.unif_ideal(alg, q, within=inc.sub) for q in units}
    mismatches = []
    for gamma in range(g.n):
        n = alg.delta(gamma).coeffs
        ns = alg.star(n)
        for q1 in units:
            C0 = alg.basis([u for u in units if u != q1]).T
            img_c = alg.conv(alg.conv(n, C0), ns) if len(C0) else np.zeros((0, g.n))
            img_j = alg.conv(alg.conv(n, J[q1].basis.T), ns) if J[q1].dim else np.zeros((0, g.n))
            for q2 in units:
                ok_c = bool(np.all(np.abs(img_c[:, q2]) <= CLOSURE_TOL)) and bool(
                    np.all(np.abs(img_c * ~g.is_unit) <= CLOSURE_TOL))
                ok_j = len(img_j) == 0 or bool(np.all(J[q2].contains(img_j)))
                if ok_c != ok_j:
                    mismatches.append((gamma, q1, q2))
    return Check("central_norm_ideal", not mismatches, {"normalizers": g.n}, mismatches or None)


# -- appendix: positive definite functions and subgroupoid isometry -----------------


@dataclass(frozen=True, eq=False)
class PositiveDefiniteFunction:
    unit: int
    ids: tuple[int, ...]  # elements of u𝒢u, identity first
    values: np.ndarray

    def gram(self, g: FiniteGroupoid) -> np.ndarray:
        ids = list(self.ids)
        pos = {x: i for i, x in enumerate(ids)}
        idx = np.array([[pos[int(g.mul[g.inv[a], b])] for b in ids] for a in ids])
        return self.values[idx]


def positive_definite_function(g: FiniteGroupoid, u: int, values) -> PositiveDefiniteFunction:
    ids = [u] + [int(x) for x in g.isotropy_group(u) if x != u]
    theta = PositiveDefiniteFunction(u, tuple(ids), np.asarray(values, dtype=complex))
    if theta.values.shape != (len(ids),):
        raise ValueError(f"θ needs {len(ids)} values")
    ev = np.linalg.eigvalsh((theta.gram(g) + np.conj(theta.gram(g).T)) / 2)
    herm = np.abs(theta.gram(g) - np.conj(theta.gram(g).T)).max()
    if herm > 1e-9 or ev[0] < -1e-9 * max(1.0, abs(ev[-1])):
        raise NotPositiveDefinite(f"θ Gram matrix eigenvalue {ev[0]:.3e}, asymmetry {herm:.1e}")
    return theta


def random_positive_definite(g: FiniteGroupoid, u: int, rng: np.random.Generator) -> PositiveDefiniteFunction:
    """⟨λ(h)ξ, ξ⟩ on a random subgroup of u𝒢u, extended by zero."""
    ids = [u] + [int(x) for x in g.isotropy_group(u) if x != u]
    members = set(ids)
    if rng.random() < 0.5:
        seed = int(rng.choice(ids))
        sub, x = {u}, seed
        while x not in sub:
            sub.add(x)
            x = int(g.mul[x, seed])
        members = sub
    sub_ids = [x for x in ids if x in members]
    xi = rng.standard_normal(len(sub_ids)) + 1j * rng.standard_normal(len(sub_ids))
    pos = {x: i for i, x in enumerate(sub_ids)}
    values = np.zeros(len(ids), dtype=complex)
    for k, h in enumerate(ids):
        if h not in members:
            continue
        hinv = int(g.inv[h])
        values[k] = sum(xi[pos[int(g.mul[hinv, x])]] * np.conj(xi[pos[x]]) for x in sub_ids)
    return positive_definite_function(g, u, values)


def eta_theta(alg: StarAlgebra, theta: PositiveDefiniteFunction) -> np.ndarray:
    """Coefficient functional of η_θ(f) = Σ_{γ∈u𝒢u} θ(γ) f(γ)."""
    w = np.zeros(alg.n, dtype=complex)
    w[list(theta.ids)] = theta.values
    return w


def verify_eta_positivity(alg: StarAlgebra, thetas: Sequence[PositiveDefiniteFunction]) -> Check:
    """Gram form G_{γδ} = η_θ(δ_γ* × δ_δ) is PSD for each θ."""
    worst = np.inf
    for theta in thetas:
        G = spectral.gram_matrix(alg, eta_theta(alg, theta))
        ev = np.linalg.eigvalsh(G)
        worst = min(worst, ev[0] / max(1.0, abs(ev[-1])))
    return Check("eta_theta_positive", worst >= -GRAM_TOL,
                 {"samples": len(thetas), "min_scaled_eigenvalue": float(worst)})


def verify_open_subgroupoid_isometry(
    alg: StarAlgebra, ids, rng: np.random.Generator, samples: int = 100
) -> Check:
    """‖f‖ in C*(Y) equals ‖f‖ in C*(𝒢) for f supported on the subgroupoid Y."""
    g = alg.groupoid
    sub = restrict_to_open_subgroupoid(g, ids)
    sub_alg = StarAlgebra(sub)
    f = sub_alg.random(rng, samples)
    F = np.zeros((samples, g.n), dtype=complex)
    F[:, list(sub.parent_ids)] = f
    inner = spectral.norm_array(sub_alg, f)
    outer = spectral.norm_array(alg, F)
    err = float(np.abs(inner - outer).max())
    return Check("subgroupoid_isometry", err <= NORM_TOL,
                 {"subgroupoid_size": sub.n, "max_abs_error": err})

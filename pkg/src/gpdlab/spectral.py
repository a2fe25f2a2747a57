"""Representations, C*-norms, Wedderburn blocks and ideal lattices.

This is the brute-force side every criterion is checked against. A finite
groupoid algebra carries the faithful trace Σ_u ev_u∘𝔼, so it is semisimple:
it splits into full matrix blocks and its two-sided ideals are exactly the
sums of blocks.

Inner products are always the ℓ² form on coefficients, for which {δ_γ} is
orthonormal and left multiplication is a *-representation (it is ⊕_u Γ_u).
"""

from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .algebra import AlgebraElement, StarAlgebra
from .errors import (
    ClosureNotIdeal,
    NotAUnit,
    NotCentralInclusion,
    NotGroupBundle,
    NotPositive,
    NumericalDegeneracy,
)

SEED = 0xC57A
RANK_TOL = 1e-8
GAP_TOL = 1e-6
PSD_TOL = 1e-9
MAX_RESEEDS = 8

_caches: "weakref.WeakKeyDictionary[StarAlgebra, dict]" = weakref.WeakKeyDictionary()


def _cached(alg: StarAlgebra, key, build: Callable):
    store = _caches.setdefault(alg, {})
    if key not in store:
        store[key] = build()
    return store[key]


def _coeffs(x):
    return x.coeffs if isinstance(x, AlgebraElement) else np.asarray(x)


def orthonormal_basis(vectors: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns spanning the columns of ``vectors``."""
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    u, sv, _ = np.linalg.svd(vectors, full_matrices=False)
    scale = max(1.0, sv[0]) if len(sv) else 1.0
    return u[:, sv > tol * scale]


def null_space(matrix: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    _, sv, vh = np.linalg.svd(matrix)
    scale = max(1.0, sv[0]) if len(sv) else 1.0
    rank = int(np.sum(sv > tol * scale))
    return vh[rank:].conj().T


# -- representations ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Representation:
    dim: int
    matrices: np.ndarray  # (n, dim, dim): image of each δ_γ

    def __call__(self, x) -> np.ndarray:
        return np.einsum("...a,aij->...ij", _coeffs(x), self.matrices)

    def defect(self, alg: StarAlgebra) -> float:
        """Largest violation of multiplicativity / *-preservation over basis pairs."""
        M = self.matrices
        prod = np.einsum("aij,bjk->abik", M, M)
        want = np.einsum("abc,cik->abik", alg.structure, M)
        adj = np.conj(np.swapaxes(M, 1, 2))[alg.groupoid.inv]
        star_err = np.abs(adj - M).max(initial=0.0)
        return float(max(np.abs(prod - want).max(initial=0.0), star_err))


def regular_rep_at(alg: StarAlgebra, u: int) -> Representation:
    """Left convolution on ℓ²(𝒢u) with orthonormal basis {δ_γ : s(γ) = u}."""
    g = alg.groupoid
    if not (0 <= u < g.n and g.is_unit[u]):
        raise NotAUnit(f"{u} is not a unit")

    def build():
        fiber = g.source_fiber(u)
        mats = alg.structure[:, fiber][:, :, fiber].transpose(0, 2, 1).astype(complex)
        return Representation(len(fiber), mats)

    return _cached(alg, ("reg", u), build)


def faithful_rank(alg: StarAlgebra) -> int:
    """Rank of x ↦ ⊕_u Γ_u(x); equals dim when the sum is faithful."""
    blocks = [regular_rep_at(alg, u).matrices.reshape(alg.n, -1) for u in alg.groupoid.units]
    return int(np.linalg.matrix_rank(np.concatenate(blocks, axis=1)))


def norm_array(alg: StarAlgebra, x) -> np.ndarray:
    """max_u ‖Γ_u(x)‖ (operator 2-norm), batched over leading axes."""
    x = _coeffs(x)
    out = np.zeros(x.shape[:-1])
    for u in alg.groupoid.units:
        mats = regular_rep_at(alg, u)(x)
        out = np.maximum(out, np.linalg.norm(mats, 2, axis=(-2, -1)))
    return out


def norm(alg: StarAlgebra, x) -> float:
    return float(norm_array(alg, x))


# -- block decomposition -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Minimal central idempotents of a unital *-subalgebra B ⊆ C_c(𝒢) (B = everything by default)."""

    algebra: StarAlgebra
    basis: np.ndarray  # orthonormal columns spanning B
    idempotents: np.ndarray  # (k, n)
    dims: tuple[int, ...]
    block_bases: tuple[np.ndarray, ...]  # orthonormal basis of e_i·B, shape (n, d_i²)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def block_norms(self, x) -> np.ndarray:
        """Per-block C*-norms of x ∈ B, shape (..., k).

        Computed as sqrt of the spectral radius of (x*x)·e_i, independently of
        the singular values of the regular representation.
        """
        alg = self.algebra
        x = _coeffs(x)
        L = alg.left_regular(alg.conv(alg.star(x), x))
        out = np.empty(x.shape[:-1] + (self.k,))
        for i, V in enumerate(self.block_bases):
            restricted = np.conj(V.T) @ L @ V
            restricted = (restricted + np.conj(np.swapaxes(restricted, -1, -2))) / 2
            ev = np.linalg.eigvalsh(restricted)
            out[..., i] = np.sqrt(np.clip(np.max(np.abs(ev), axis=-1), 0.0, None))
        return out

    def norm(self, x) -> np.ndarray:
        return self.block_norms(x).max(axis=-1)

    def component(self, x, i: int) -> np.ndarray:
        return self.algebra.conv(self.idempotents[i], _coeffs(x))

    def support(self, vectors: np.ndarray, tol: float = RANK_TOL) -> frozenset[int]:
        """Blocks i with e_i·W ≠ 0 for the column space W of ``vectors``."""
        vectors = np.asarray(vectors)
        if vectors.size == 0:
            return frozenset()
        out = set()
        for i in range(self.k):
            img = self.algebra.conv(self.idempotents[i], vectors.T)
            if np.abs(img).max() > tol * max(1.0, np.abs(vectors).max()):
                out.add(i)
        return frozenset(out)

    def ideal(self, blocks) -> "Ideal":
        blocks = frozenset(int(b) for b in blocks)
        cols = [self.block_bases[i] for i in sorted(blocks)]
        basis = np.concatenate(cols, axis=1) if cols else np.zeros((self.algebra.n, 0), complex)
        return Ideal(self, blocks, basis)

    def zero(self) -> "Ideal":
        return self.ideal(())

    def whole(self) -> "Ideal":
        return self.ideal(range(self.k))

    def central_idempotent(self, blocks) -> np.ndarray:
        e = np.zeros(self.algebra.n, dtype=complex)
        for i in blocks:
            e = e + self.idempotents[i]
        return e


@dataclass(frozen=True, eq=False)
class Ideal:
    decomposition: BlockDecomposition
    blocks: frozenset[int]
    basis: np.ndarray  # orthonormal columns

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def contains(self, x, tol: float = 1e-7) -> np.ndarray:
        """Membership of x (or a batch); x is assumed to lie in the ambient subalgebra."""
        x = _coeffs(x)
        proj = (x @ np.conj(self.basis)) @ self.basis.T
        scale = np.maximum(1.0, np.abs(x).max(axis=-1))
        return np.abs(proj - x).max(axis=-1) <= tol * scale

    def contains_all(self, vectors: np.ndarray) -> bool:
        """Column space of ``vectors`` inside the ideal."""
        vectors = np.asarray(vectors)
        return vectors.size == 0 or bool(np.all(self.contains(vectors.T)))

    def __le__(self, other: "Ideal") -> bool:
        return self.blocks <= other.blocks

    def __repr__(self):
        return f"Ideal(blocks={sorted(self.blocks)}, dim={self.dim})"


def center(alg: StarAlgebra, basis: np.ndarray | None = None) -> np.ndarray:
    """Basis (columns) of the center of the subalgebra spanned by ``basis``."""
    B = np.eye(alg.n, dtype=complex) if basis is None else basis
    L = alg.left_regular(B.T)  # (m, n, n)
    R = alg.right_regular(B.T)
    system = ((L - R) @ B).reshape(-1, B.shape[1])
    return B @ null_space(system)


def block_decomposition(
    alg: StarAlgebra, basis: np.ndarray | None = None, seed: int = SEED
) -> BlockDecomposition:
    """Split a unital *-subalgebra into its matrix blocks.

    Minimal central idempotents are the spectral projections of a generic
    self-adjoint central element z, read off as P_i·1 in the faithful
    representation ⊕_u Γ_u. Reseeds up to eight times when two blocks of z
    come within the gap tolerance.
    """
    if basis is None:
        return _cached(alg, ("blocks", seed), lambda: _decompose(alg, None, seed))
    return _decompose(alg, basis, seed)


def _decompose(alg: StarAlgebra, basis, seed) -> BlockDecomposition:
    B = np.eye(alg.n, dtype=complex) if basis is None else orthonormal_basis(basis)
    one = alg.one
    if np.abs(B @ (np.conj(B.T) @ one) - one).max() > 1e-7:
        raise ValueError("subalgebra does not contain the unit")
    Z = center(alg, B)
    k = Z.shape[1]
    for attempt in range(MAX_RESEEDS + 1):
        rng = np.random.default_rng(seed + attempt)
        z = Z @ (rng.standard_normal(k) + 1j * rng.standard_normal(k))
        z = (z + alg.star(z)) / 2
        H = alg.left_regular(z)
        evals, evecs = np.linalg.eigh((H + np.conj(H.T)) / 2)
        cuts = np.flatnonzero(np.diff(evals) > GAP_TOL) + 1
        groups = np.split(np.arange(len(evals)), cuts)
        if len(groups) != k:
            continue
        idem = np.array([evecs[:, grp] @ (np.conj(evecs[:, grp].T) @ one) for grp in groups])
        break
    else:
        raise NumericalDegeneracy(
            f"no generic central element separated {k} blocks after {MAX_RESEEDS} reseeds"
        )

    bases = []
    for e in idem:
        img = alg.conv(e, B.T).T  # columns e·b_j
        bases.append(orthonormal_basis(img))
    dims2 = [V.shape[1] for V in bases]
    dims = [int(round(np.sqrt(d))) for d in dims2]
    if any(d * d != d2 for d, d2 in zip(dims, dims2)) or sum(dims2) != B.shape[1]:
        raise NumericalDegeneracy(f"block sizes {dims2} are not a square partition of {B.shape[1]}")

    def key(i):
        e = np.round(idem[i], 8)
        return (dims[i], tuple(-np.abs(e)), tuple(e.real), tuple(e.imag))

    order = sorted(range(k), key=key)
    return BlockDecomposition(
        alg,
        B,
        idem[order],
        tuple(dims[i] for i in order),
        tuple(bases[i] for i in order),
    )


def is_simple(alg: StarAlgebra) -> bool:
    return block_decomposition(alg).k == 1


def all_ideals(dec: BlockDecomposition) -> Iterator[Ideal]:
    """Every ideal, as block subsets in order of size then lexicographic."""
    for size in range(dec.k + 1):
        for blocks in itertools.combinations(range(dec.k), size):
            yield dec.ideal(blocks)


def span_closure(alg: StarAlgebra, gens: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
    """Least subspace containing the columns of ``gens`` and closed under b·x and x·b for b in multipliers."""
    W = orthonormal_basis(gens)
    L = alg.left_regular(multipliers.T)
    R = alg.right_regular(multipliers.T)
    while True:
        if W.shape[1] == 0:
            return W
        grown = np.concatenate([W, *(L @ W), *(R @ W)], axis=1)
        new = orthonormal_basis(grown)
        if new.shape[1] == W.shape[1]:
            return W
        W = new


def ideal_generated_by(
    alg: StarAlgebra, gens: Sequence, within: BlockDecomposition | None = None
) -> Ideal:
    """Two-sided ideal generated by ``gens``, found by closing the span to a fixed point.

    With ``within`` the ideal is taken inside that subalgebra.
    """
    dec = within if within is not None else block_decomposition(alg)
    vecs = [_coeffs(x) for x in gens]
    G = np.array(vecs, dtype=complex).T if vecs else np.zeros((alg.n, 0), complex)
    W = span_closure(alg, G, dec.basis)
    blocks = dec.support(W)
    expect = sum(dec.dims[i] ** 2 for i in blocks)
    ideal = dec.ideal(blocks)
    if W.shape[1] != expect or not ideal.contains_all(W):
        raise ClosureNotIdeal(f"closure of dim {W.shape[1]} is not the block sum {sorted(blocks)}")
    return ideal


# -- seminorms at a unit -------------------------------------------------------------


def _require_central(alg: StarAlgebra):
    if not alg.groupoid.is_group_bundle:
        raise NotCentralInclusion("C(Q) is central only in group-bundle algebras (r = s)")


def unif_ideal(alg: StarAlgebra, q: int, within: BlockDecomposition | None = None) -> Ideal:
    """J^unif_q: the ideal generated by the functions on units vanishing at q."""
    g = alg.groupoid
    if not g.is_unit[q]:
        raise NotAUnit(f"{q} is not a unit")
    gens = [alg.delta(u) for u in g.units if u != q]
    if within is not None:
        return ideal_generated_by(alg, gens, within)
    return _cached(alg, ("Junif", q), lambda: ideal_generated_by(alg, gens))


def p_unif(alg: StarAlgebra, q: int, x) -> np.ndarray:
    """Quotient norm modulo J^unif_q, computed blockwise."""
    _require_central(alg)
    dec = block_decomposition(alg)
    J = unif_ideal(alg, q)
    outside = [i for i in range(dec.k) if i not in J.blocks]
    bn = dec.block_norms(x)
    if not outside:
        return np.zeros(bn.shape[:-1])
    return bn[..., outside].max(axis=-1)


def p_unif_inf(alg: StarAlgebra, q: int, x, cutoffs: np.ndarray) -> np.ndarray:
    """min over cutoffs f (0 ≤ f ≤ 1 = f(q), functions on units) of ‖f·x‖."""
    g = alg.groupoid
    units = list(g.units)
    best = None
    for c in cutoffs:
        f = np.zeros(alg.n, dtype=complex)
        f[units] = c
        val = norm_array(alg, alg.conv(f, _coeffs(x)))
        best = val if best is None else np.minimum(best, val)
    return best


def unit_state(alg: StarAlgebra, q: int) -> np.ndarray:
    """Coefficient functional of ev_q∘𝔼: x ↦ x(q)."""
    if not alg.groupoid.is_unit[q]:
        raise NotAUnit(f"{q} is not a unit")
    w = np.zeros(alg.n, dtype=complex)
    w[q] = 1.0
    return w


def gram_matrix(alg: StarAlgebra, functional: np.ndarray) -> np.ndarray:
    """G[α, β] = ψ(δ_α* × δ_β) for ψ(x) = Σ_γ functional[γ] x(γ)."""
    T = alg.structure[alg.groupoid.inv]  # T[α⁻¹, β, c]
    G = np.einsum("abc,c->ab", T, functional)
    return (G + np.conj(G.T)) / 2


def _gns_factor(alg, functional):
    G = gram_matrix(alg, functional)
    evals, evecs = np.linalg.eigh(G)
    if evals.size and evals[0] < -PSD_TOL * max(1.0, abs(evals[-1])):
        raise NotPositive(float(evals[0]))
    keep = evals > RANK_TOL * max(1.0, abs(evals[-1]) if evals.size else 1.0)
    return evals, evecs, keep


def gns_rep(alg: StarAlgebra, functional) -> Representation:
    """GNS representation of a positive functional, on C_c(𝒢) modulo the Gram null space."""
    evals, evecs, keep = _gns_factor(alg, np.asarray(functional, dtype=complex))
    V = evecs[:, keep]
    d = np.sqrt(evals[keep])
    L = alg.left_regular(np.eye(alg.n))  # (n, n, n): L(δ_a)
    mats = (d[:, None] * (np.conj(V.T) @ L @ V)) / d[None, :]
    return Representation(int(keep.sum()), mats)


def left_kernel_L(alg: StarAlgebra, functional) -> np.ndarray:
    """Orthonormal basis of {x : ψ(x*x) = 0}."""
    _, evecs, keep = _gns_factor(alg, np.asarray(functional, dtype=complex))
    return evecs[:, ~keep]


def kernel_ideal_K(alg: StarAlgebra, functional) -> Ideal:
    """Largest ideal inside the left kernel: blocks on which ψ vanishes identically."""
    functional = np.asarray(functional, dtype=complex)
    _gns_factor(alg, functional)
    dec = block_decomposition(alg)
    blocks = []
    for i, V in enumerate(dec.block_bases):
        if np.abs(functional @ V).max(initial=0.0) <= RANK_TOL:
            blocks.append(i)
    return dec.ideal(blocks)


def p_E(alg: StarAlgebra, q: int, x) -> np.ndarray:
    """Operator norm in the GNS representation of ev_q∘𝔼."""
    _require_central(alg)
    rep = _cached(alg, ("gnsE", q), lambda: gns_rep(alg, unit_state(alg, q)))
    return np.linalg.norm(rep(x), 2, axis=(-2, -1))


# -- evaluation homomorphisms of group bundles ------------------------------------


@dataclass(frozen=True, eq=False)
class EvaluationHom:
    """f ↦ Σ_{γ∈𝒢u} f(γ) v_γ into the group algebra ℂ[𝒢u]."""

    unit: int
    ids: tuple[int, ...]  # fiber elements, positions index ℂ[𝒢u]
    table: np.ndarray  # Cayley table of the fiber on positions

    def __call__(self, x) -> np.ndarray:
        return _coeffs(x)[..., list(self.ids)]

    def group_multiply(self, a, b) -> np.ndarray:
        k = len(self.ids)
        out = np.zeros(np.broadcast_shapes(np.shape(a), np.shape(b)), dtype=complex)
        for i in range(k):
            for j in range(k):
                out[..., self.table[i, j]] += a[..., i] * b[..., j]
        return out

    def group_star(self, a) -> np.ndarray:
        inv = np.argmax(self.table == 0, axis=1)
        return np.conj(np.asarray(a)[..., inv])

    def kernel_basis(self, n: int) -> np.ndarray:
        keep = [i for i in range(n) if i not in set(self.ids)]
        return np.eye(n, dtype=complex)[:, keep]


def evaluation_hom(alg: StarAlgebra, u: int) -> EvaluationHom:
    g = alg.groupoid
    if not g.is_group_bundle:
        raise NotGroupBundle(f"{g.name or 'groupoid'} has r != s somewhere")
    if not g.is_unit[u]:
        raise NotAUnit(f"{u} is not a unit")
    ids = [u] + [int(x) for x in g.source_fiber(u) if x != u]
    pos = {x: i for i, x in enumerate(ids)}
    table = np.array([[pos[int(g.mul[a, b])] for b in ids] for a in ids], dtype=np.int64)
    return EvaluationHom(u, tuple(ids), table)

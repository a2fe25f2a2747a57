"""The convolution *-algebra C_c(𝒢) of a finite groupoid.

Hot paths work on raw coefficient arrays of shape ``(..., n)`` so checks can
be batched; :class:`AlgebraElement` wraps a single vector for interactive use.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GroupoidMismatch, NotGroupBundle, SupportOutsideInteriorIsotropy
from .groupoid import FiniteGroupoid, disjoint_union, group_groupoid
from .transformation import TransformationGroupoid, upsilon

COEFF_TOL = 1e-9
NORM_TOL = 1e-7


class StarAlgebra:
    """C_c(𝒢) with basis {δ_γ}; product (f×g)(γ) = Σ_{αβ=γ} f(α)g(β), f*(γ) = conj f(γ⁻¹)."""

    def __init__(self, groupoid: FiniteGroupoid):
        self.groupoid = groupoid
        self.n = groupoid.n

    def __repr__(self):
        return f"StarAlgebra({self.groupoid.name or '?'}, dim={self.n})"

    @cached_property
    def structure(self) -> np.ndarray:
        """Dense structure constants T[a, b, c] = 1 iff ab = c."""
        a, b, c = self.groupoid.composable_pairs
        T = np.zeros((self.n, self.n, self.n))
        T[a, b, c] = 1.0
        T.setflags(write=False)
        return T

    @cached_property
    def one(self) -> np.ndarray:
        e = np.zeros(self.n, dtype=complex)
        e[list(self.groupoid.units)] = 1.0
        e.setflags(write=False)
        return e

    def basis(self, ids=None) -> np.ndarray:
        """Columns δ_γ for the given ids (all by default)."""
        eye = np.eye(self.n, dtype=complex)
        return eye if ids is None else eye[:, list(ids)]

    @cached_property
    def _scatter(self) -> np.ndarray:
        """(pairs, n) matrix sending the k-th composable pair to its product."""
        a, b, c = self.groupoid.composable_pairs
        P = np.zeros((len(c), self.n), dtype=complex)
        P[np.arange(len(c)), c] = 1.0
        return P

    def conv(self, x, y) -> np.ndarray:
        a, b, _ = self.groupoid.composable_pairs
        return (np.asarray(x)[..., a] * np.asarray(y)[..., b]) @ self._scatter

    def star(self, x) -> np.ndarray:
        return np.conj(np.asarray(x)[..., self.groupoid.inv])

    def left_regular(self, x) -> np.ndarray:
        """Matrix of y ↦ x×y, shape (..., n, n)."""
        x = np.asarray(x)
        m = x @ self.structure.reshape(self.n, -1)
        return np.swapaxes(m.reshape(x.shape[:-1] + (self.n, self.n)), -1, -2)

    def right_regular(self, x) -> np.ndarray:
        """Matrix of y ↦ y×x."""
        x = np.asarray(x)
        m = x @ np.swapaxes(self.structure, 0, 1).reshape(self.n, -1)
        return np.swapaxes(m.reshape(x.shape[:-1] + (self.n, self.n)), -1, -2)

    def random(self, rng: np.random.Generator, size=None, support=None) -> np.ndarray:
        shape = (self.n,) if size is None else (size, self.n)
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if support is not None:
            mask = np.zeros(self.n, dtype=bool)
            mask[list(support)] = True
            x = x * mask
        return x

    def element(self, coeffs) -> "AlgebraElement":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.n,):
            raise ValueError(f"expected {self.n} coefficients, got shape {coeffs.shape}")
        return AlgebraElement(coeffs, self)

    def delta(self, gamma: int) -> "AlgebraElement":
        e = np.zeros(self.n, dtype=complex)
        e[gamma] = 1.0
        return AlgebraElement(e, self)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    coeffs: np.ndarray
    algebra: StarAlgebra

    def _check(self, other: "AlgebraElement"):
        if other.algebra.groupoid is not self.algebra.groupoid:
            raise GroupoidMismatch("elements live over different groupoids")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.coeffs + other.coeffs, self.algebra)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.coeffs - other.coeffs, self.algebra)

    def __neg__(self):
        return AlgebraElement(-self.coeffs, self.algebra)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return convolve(self, other)
        return AlgebraElement(self.coeffs * other, self.algebra)

    def __rmul__(self, scalar):
        return AlgebraElement(self.coeffs * scalar, self.algebra)

    @property
    def star(self) -> "AlgebraElement":
        return involution(self)

    def support(self, tol: float = COEFF_TOL) -> list[int]:
        return [int(i) for i in np.flatnonzero(np.abs(self.coeffs) > tol)]

    def isclose(self, other, tol: float = COEFF_TOL) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol)

    def to_triples(self) -> list[tuple[int, float, float]]:
        return [(i, float(self.coeffs[i].real), float(self.coeffs[i].imag)) for i in self.support(0.0)]

    def __repr__(self):
        g = self.algebra.groupoid
        terms = " + ".join(f"({self.coeffs[i]:.4g})δ{g.labels[i]}" for i in self.support())
        return terms or "0"


def convolve(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    f._check(g)
    return AlgebraElement(f.algebra.conv(f.coeffs, g.coeffs), f.algebra)


def involution(f: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(f.algebra.star(f.coeffs), f.algebra)


def i_norm_array(alg: StarAlgebra, x) -> np.ndarray:
    """‖x‖_I = sup_u max(Σ_{r(γ)=u} |x(γ)|, Σ_{s(γ)=u} |x(γ)|), batched."""
    g = alg.groupoid
    ax = np.abs(np.asarray(x))
    units = list(g.units)
    onehot_r = (g.r[:, None] == np.array(units)[None, :]).astype(float)
    onehot_s = (g.s[:, None] == np.array(units)[None, :]).astype(float)
    return np.maximum(ax @ onehot_r, ax @ onehot_s).max(axis=-1)


def i_norm(f: AlgebraElement) -> float:
    return float(i_norm_array(f.algebra, f.coeffs))


def expectation_array(alg: StarAlgebra, x) -> np.ndarray:
    return np.asarray(x) * alg.groupoid.is_unit


def expectation(f: AlgebraElement) -> AlgebraElement:
    """Restriction to the unit space; the conditional expectation onto C(𝒢⁽⁰⁾)."""
    return AlgebraElement(expectation_array(f.algebra, f.coeffs), f.algebra)


def elementary_normalizers(alg: StarAlgebra) -> list[AlgebraElement]:
    """δ_γ for every γ; each singleton is an open bisection."""
    return [alg.delta(x) for x in range(alg.n)]


def augmentation_generators(alg: StarAlgebra) -> list[AlgebraElement]:
    """δ_γ − δ_{r(γ)} for each non-unit γ of a group bundle."""
    g = alg.groupoid
    if not g.is_group_bundle:
        raise NotGroupBundle(f"{g.name or 'groupoid'} has r != s somewhere")
    return [alg.delta(x) - alg.delta(int(g.r[x])) for x in range(g.n) if not g.is_unit[x]]


def bisection_difference(alg: StarAlgebra, f) -> np.ndarray:
    """f − t_B(f) for f supported on a bisection B of a group bundle (f pushed to r(B))."""
    g = alg.groupoid
    f = np.asarray(f, dtype=complex)
    out = f.copy()
    np.add.at(out, g.r, -f)
    return out


def is_bisection(g: FiniteGroupoid, ids) -> bool:
    ids = list(ids)
    return len(set(g.r[ids].tolist())) == len(ids) == len(set(g.s[ids].tolist()))


# -- Δ: the interior-isotropy subalgebra into C(Q)⊗ℂ[G] -------------------------------


@dataclass(frozen=True, eq=False)
class TensorBundle:
    """C(Q)⊗ℂ[G] realised as the group bundle Q×G (one copy of G over each point)."""

    groupoid: FiniteGroupoid
    index: dict[tuple[int, int], int]  # (q, g) -> element id

    def to_coeffs(self, table: np.ndarray) -> np.ndarray:
        """Coefficient vector(s) of Σ_{q,g} table[q, g] 1_q⊗v_g."""
        table = np.asarray(table)
        out = np.zeros(table.shape[:-2] + (self.groupoid.n,), dtype=complex)
        for (q, g), i in self.index.items():
            out[..., i] = table[..., q, g]
        return out


def tensor_bundle(t: TransformationGroupoid) -> TensorBundle:
    G = t.action.group
    fiber = group_groupoid(G.table, name=G.name)
    bundle = disjoint_union(*([fiber] * t.action.space), name=f"C({t.action.space})⊗{G.name}")
    index = {(int(q), int(g)): i for i, (q, g) in enumerate(bundle.labels)}
    return TensorBundle(bundle, index)


def delta_embedding(t: TransformationGroupoid, f) -> np.ndarray:
    """Δ(Σ f_g u_g) = Σ f_g ⊗ v_g as a |Q|×|G| table, for f supported on IntIso.

    Accepts an AlgebraElement or a batch of coefficient vectors.
    """
    x = f.coeffs if isinstance(f, AlgebraElement) else np.asarray(f)
    g = t.groupoid
    off = np.abs(x[..., g.r != g.s]) > COEFF_TOL
    if np.any(off):
        raise SupportOutsideInteriorIsotropy("support meets arrows with r != s")
    return np.swapaxes(upsilon(t, x), -1, -2)

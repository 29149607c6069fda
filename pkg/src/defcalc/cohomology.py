"""Group cohomology in degrees <= 2 for finite groups acting F_p-linearly.

Cochains are inhomogeneous: C^i = maps G^i -> M, a vector of length |G|^i * d
whose blocks are indexed by tuples (g_1, ..., g_i) with g_1 most significant.
The differential is

    (d f)(g_1..g_{i+1}) = g_1 f(g_2..g_{i+1})
                          + sum_j (-1)^j f(.., g_j g_{j+1}, ..)
                          + (-1)^{i+1} f(g_1..g_i)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg, s3rep
from .errors import check_budget


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    labels: tuple
    table: np.ndarray  # table[i, j] = index of labels[i] * labels[j]
    identity: int = 0

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(np.nonzero(self.table[i] == self.identity)[0][0])


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup(f"Z/{n}", tuple(range(n)), (idx[:, None] + idx[None, :]) % n)


def trivial_group() -> FiniteGroup:
    return FiniteGroup("1", ((),), np.zeros((1, 1), dtype=np.int64))


def s3_group() -> FiniteGroup:
    els = s3rep.ELEMENTS
    pos = {g: i for i, g in enumerate(els)}
    table = np.array([[pos[a * b] for b in els] for a in els], dtype=np.int64)
    return FiniteGroup("S3", els, table)


@dataclass(frozen=True, eq=False)
class GModule:
    """F_p^dim with a left action; ``actions[i]`` is the matrix of element i."""

    group: FiniteGroup
    p: int
    dim: int
    actions: tuple
    name: str = ""

    def __post_init__(self):
        if len(self.actions) != self.group.order:
            raise ValueError("one action matrix per group element required")

    def is_action(self) -> bool:
        G, p = self.group, self.p
        if not np.array_equal(self.actions[G.identity] % p, np.eye(self.dim, dtype=np.int64)):
            return False
        for i in range(G.order):
            for j in range(G.order):
                if not np.array_equal((self.actions[i] @ self.actions[j]) % p, self.actions[G.mul(i, j)] % p):
                    return False
        return True


def trivial_module(group: FiniteGroup, d: int, p: int) -> GModule:
    eye = np.eye(d, dtype=np.int64)
    return GModule(group, p, d, tuple(eye for _ in range(group.order)), f"F_{p}^{d}")


def module_from_rep(rep: s3rep.Representation) -> GModule:
    G = s3_group()
    return GModule(G, rep.p, rep.dim, tuple(rep[g] for g in G.labels), rep.name)


def cochain_dims(M: GModule, max_degree: int = 3, budget: int | None = None) -> list[int]:
    dims = [M.group.order**i * M.dim for i in range(max_degree + 1)]
    check_budget("cochain dimension", dims[-1], budget)
    return dims


def differential(M: GModule, i: int, budget: int | None = None) -> np.ndarray:
    """Matrix of d^i : C^i -> C^{i+1}."""
    if not 0 <= i <= 2:
        raise ValueError("differentials are provided for degrees 0, 1, 2")
    G, d, p = M.group, M.dim, M.p
    n = G.order
    rows, cols = n ** (i + 1) * d, n**i * d
    check_budget("differential matrix entries", rows * cols, budget)
    D = np.zeros((rows, cols), dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)

    def block(t: Sequence[int]) -> int:
        out = 0
        for g in t:
            out = out * n + g
        return out * d

    for t in itertools.product(range(n), repeat=i + 1):
        r = block(t)
        c = block(t[1:])
        D[r : r + d, c : c + d] += M.actions[t[0]]
        for j in range(i):
            merged = t[:j] + (G.mul(t[j], t[j + 1]),) + t[j + 2 :]
            c = block(merged)
            D[r : r + d, c : c + d] += (-1) ** (j + 1) * eye
        c = block(t[:-1])
        D[r : r + d, c : c + d] += (-1) ** (i + 1) * eye
    return D % p


@dataclass(frozen=True)
class CohomologyResult:
    degree: int
    dim: int
    cocycle_dim: int
    coboundary_dim: int
    representatives: np.ndarray | None = field(default=None, compare=False)


def cohomology_dim(
    M: GModule, i: int, with_basis: bool = False, budget: int | None = None
) -> CohomologyResult:
    """dim H^i(G, M) = dim ker d^i - rank d^{i-1}."""
    if i not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    p = M.p
    di = differential(M, i, budget)
    cochains = di.shape[1]
    z = cochains - linalg.rank(di, p)
    b = linalg.rank(differential(M, i - 1, budget), p) if i > 0 else 0
    reps = None
    if with_basis:
        reps = _representatives(di, differential(M, i - 1, budget) if i > 0 else None, p)
    return CohomologyResult(i, z - b, z, b, reps)


def _representatives(di: np.ndarray, dprev: np.ndarray | None, p: int) -> np.ndarray:
    """Cocycles completing a basis of the coboundaries, echelon order."""
    cocycles = linalg.nullspace(di, p)
    if dprev is None:
        return cocycles
    boundary = linalg.row_space(dprev.T, p)
    chosen = [row for row in boundary]
    reps = []
    current = len(chosen)
    for z in cocycles:
        trial = np.array(chosen + [z]) if chosen else z[None, :]
        if linalg.rank(trial, p) > current:
            chosen.append(z)
            reps.append(z)
            current += 1
    return np.array(reps, dtype=np.int64).reshape(len(reps), di.shape[1])


def verify_trivial_action_tensor(Q: FiniteGroup, d: int, i: int, p: int) -> bool:
    """dim H^i(Q, F_p^d) == d * dim H^i(Q, F_p), both sides from their own bar complex."""
    lhs, rhs = trivial_action_tensor_dims(Q, d, i, p)
    return lhs == rhs


def trivial_action_tensor_dims(Q: FiniteGroup, d: int, i: int, p: int) -> tuple[int, int]:
    lhs = cohomology_dim(trivial_module(Q, d, p), i).dim
    rhs = d * cohomology_dim(trivial_module(Q, 1, p), i).dim
    return lhs, rhs


def invariants_basis(M: GModule) -> np.ndarray:
    if M.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    eye = np.eye(M.dim, dtype=np.int64)
    stacked = np.vstack([a - eye for a in M.actions])
    return linalg.nullspace(stacked, M.p)


def invariants_dim(M: GModule) -> int:
    return invariants_basis(M).shape[0]


@dataclass(frozen=True, eq=False)
class ShortExactSequence:
    """0 -> sub --incl--> mid --proj--> quot -> 0 (matrices act on column vectors)."""

    sub: GModule
    mid: GModule
    quot: GModule
    incl: np.ndarray
    proj: np.ndarray
    name: str = ""

    def is_exact(self) -> bool:
        p = self.mid.p
        if np.any((self.proj @ self.incl) % p):
            return False
        if linalg.rank(self.incl, p) != self.sub.dim:
            return False
        if linalg.rank(self.proj, p) != self.quot.dim:
            return False
        return self.sub.dim + self.quot.dim == self.mid.dim

    def is_equivariant(self) -> bool:
        p = self.mid.p
        for a, b, c in zip(self.sub.actions, self.mid.actions, self.quot.actions):
            if np.any((self.incl @ a - b @ self.incl) % p):
                return False
            if np.any((self.proj @ b - c @ self.proj) % p):
                return False
        return True


@dataclass(frozen=True)
class InvariantsExactness:
    name: str
    dims: tuple[int, int, int]
    additive: bool
    exact: bool


def check_invariants_exactness(seq: ShortExactSequence) -> InvariantsExactness:
    """Is 0 -> sub^G -> mid^G -> quot^G -> 0 exact?"""
    p = seq.mid.p
    a, b, c = (invariants_basis(m) for m in (seq.sub, seq.mid, seq.quot))
    dims = (a.shape[0], b.shape[0], c.shape[0])
    # incl is injective on all of sub, so only the right end can fail
    image_rank = linalg.rank((seq.proj @ b.T).T, p) if b.shape[0] else 0
    exact = image_rank == dims[2] and dims[1] - image_rank == dims[0]
    return InvariantsExactness(seq.name, dims, dims[0] + dims[2] == dims[1], exact)


def verify_invariants_exactness(seqs: Sequence[ShortExactSequence]) -> list[InvariantsExactness]:
    out = []
    for seq in seqs:
        if not (seq.is_exact() and seq.is_equivariant()):
            raise ValueError(f"{seq.name or 'sequence'} is not a short exact sequence of G-modules")
        out.append(check_invariants_exactness(seq))
    return out


def _surjection_onto(source: s3rep.Representation, target: s3rep.Representation) -> np.ndarray:
    p = source.p
    basis = s3rep.intertwiners(source, target)
    for coeffs in itertools.product(range(p), repeat=basis.shape[0]):
        T = (np.array(coeffs) @ basis % p).reshape(target.dim, source.dim)
        if linalg.rank(T, p) == target.dim:
            return T
    raise ValueError("no equivariant surjection")


def s3_sequences(p: int) -> list[ShortExactSequence]:
    """Short exact sequences of S3-modules built from Ad(std) by explicit intertwiners."""
    triv, sign, std = s3rep.irreducibles(p)
    ad = s3rep.adjoint_rep(std)
    out = []
    for sub, quot, name in (
        (std, triv + sign, "0 -> std -> Ad -> triv+sign -> 0"),
        (triv, sign + std, "0 -> triv -> Ad -> sign+std -> 0"),
        (sign, triv + std, "0 -> sign -> Ad -> triv+std -> 0"),
    ):
        incl = s3rep.intertwiners(sub, ad)
        if incl.shape[0] != 1:
            raise ValueError(f"expected a unique embedding of {sub.name}")
        incl = incl[0].reshape(ad.dim, sub.dim)
        proj = _surjection_onto(ad, quot)
        out.append(
            ShortExactSequence(
                module_from_rep(sub), module_from_rep(ad), module_from_rep(quot), incl, proj, name
            )
        )
    return out


def jordan_sequence(p: int) -> ShortExactSequence:
    """0 -> F_p -> F_p^2 -> F_p -> 0 for Z/p acting by a unipotent Jordan block.
    Here p divides |G| and invariants are not exact."""
    G = cyclic_group(p)
    mats = tuple(np.array([[1, g], [0, 1]], dtype=np.int64) % p for g in range(p))
    mid = GModule(G, p, 2, mats, "J2")
    triv = trivial_module(G, 1, p)
    incl = np.array([[1], [0]], dtype=np.int64)
    proj = np.array([[0, 1]], dtype=np.int64)
    return ShortExactSequence(triv, mid, triv, incl, proj, "0 -> F_p -> J2 -> F_p -> 0 over Z/p")


def dual_hom_dims(M: s3rep.Representation, N: s3rep.Representation) -> tuple[int, int]:
    """(dim Hom_S3(M*, N), dim (M (x) N)^S3), computed independently."""
    lhs = s3rep.equivariant_hom_dim(s3rep.dual_rep(M), N)
    rhs = invariants_dim(module_from_rep(s3rep.tensor_rep(M, N)))
    return lhs, rhs


def verify_dual_hom_identity(M: s3rep.Representation, N: s3rep.Representation) -> bool:
    lhs, rhs = dual_hom_dims(M, N)
    return lhs == rhs

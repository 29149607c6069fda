"""Representations of S_3 over F_p for p not dividing 6.

Group elements are permutations of {1, 2, 3}; products compose right to left,
``(a * b)(x) = a(b(x))``.  The standard representation is the reduction of a
fixed integral model:

    (1 2)   -> [[0, 1], [1, 0]]
    (1 2 3) -> [[0, -1], [1, -1]]
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import PreconditionError
from .ring import is_prime


@dataclass(frozen=True, order=True)
class S3Element:
    perm: tuple[int, int, int]

    def __call__(self, x: int) -> int:
        return self.perm[x - 1]

    def __mul__(self, other: "S3Element") -> "S3Element":
        return S3Element(tuple(self(other(x)) for x in (1, 2, 3)))

    def inverse(self) -> "S3Element":
        inv = [0, 0, 0]
        for i, img in enumerate(self.perm, start=1):
            inv[img - 1] = i
        return S3Element(tuple(inv))

    @property
    def sign(self) -> int:
        inversions = sum(
            1 for i in range(3) for j in range(i + 1, 3) if self.perm[i] > self.perm[j]
        )
        return -1 if inversions % 2 else 1

    @property
    def order(self) -> int:
        g, n = self, 1
        while g != IDENTITY:
            g, n = g * self, n + 1
        return n

    @property
    def conjugacy_class(self) -> int:
        """0: identity, 1: transpositions, 2: 3-cycles."""
        return {1: 0, 2: 1, 3: 2}[self.order]

    def __str__(self) -> str:
        seen: set[int] = set()
        cycles = []
        for start in (1, 2, 3):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            if len(cyc) > 1:
                cycles.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(cycles) or "()"

    def __repr__(self) -> str:
        return f"S3Element{str(self)}"


IDENTITY = S3Element((1, 2, 3))
TRANSPOSITION = S3Element((2, 1, 3))  # (1 2)
THREE_CYCLE = S3Element((2, 3, 1))  # (1 2 3)
GENERATORS = (TRANSPOSITION, THREE_CYCLE)

ELEMENTS: tuple[S3Element, ...] = (
    IDENTITY,
    TRANSPOSITION,
    S3Element((3, 2, 1)),  # (1 3)
    S3Element((1, 3, 2)),  # (2 3)
    THREE_CYCLE,
    S3Element((3, 1, 2)),  # (1 3 2)
)
CLASS_SIZES = (1, 3, 2)
CLASS_REPS = (IDENTITY, TRANSPOSITION, THREE_CYCLE)

INTEGRAL_GENERATOR_MATRICES = {
    TRANSPOSITION: ((0, 1), (1, 0)),
    THREE_CYCLE: ((0, -1), (1, -1)),
}


def words_in_generators() -> dict[S3Element, tuple[int, ...]]:
    """A shortest word (indices into GENERATORS) for every element."""
    words = {IDENTITY: ()}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for g in frontier:
            for i, s in enumerate(GENERATORS):
                h = g * s
                if h not in words:
                    words[h] = words[g] + (i,)
                    nxt.append(h)
        frontier = nxt
    return words


@functools.lru_cache(maxsize=None)
def integral_model() -> dict[S3Element, np.ndarray]:
    """Integer matrices of the standard representation on all six elements."""
    gens = [np.array(INTEGRAL_GENERATOR_MATRICES[s], dtype=np.int64) for s in GENERATORS]
    out = {}
    for g, word in words_in_generators().items():
        m = np.eye(2, dtype=np.int64)
        for i in word:
            m = m @ gens[i]
        out[g] = m
    return out


def check_p(p: int) -> None:
    if p in (2, 3):
        raise PreconditionError(f"p = {p} divides |S3| = 6")
    if not is_prime(p):
        raise PreconditionError(f"p = {p} is not prime")


@dataclass(frozen=True, eq=False)
class Representation:
    """Matrices over F_p for each of the six elements."""

    p: int
    dim: int
    matrices: Mapping[S3Element, np.ndarray]
    name: str = ""

    def __post_init__(self):
        for g in ELEMENTS:
            m = self.matrices[g]
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"matrix for {g} has shape {m.shape}")

    def __getitem__(self, g: S3Element) -> np.ndarray:
        return self.matrices[g]

    @classmethod
    def from_generators(cls, p: int, s: np.ndarray, t: np.ndarray, name: str = ""):
        """Extend images of (1 2) and (1 2 3) along shortest words.  The result
        is a homomorphism only if the images satisfy the S_3 relations, which
        ``is_homomorphism`` checks."""
        s = linalg.as_fp(s, p)
        t = linalg.as_fp(t, p)
        d = s.shape[0]
        gens = (s, t)
        mats = {}
        for g, word in words_in_generators().items():
            m = np.eye(d, dtype=np.int64)
            for i in word:
                m = (m @ gens[i]) % p
            mats[g] = m
        return cls(p, d, mats, name)

    def is_homomorphism(self) -> bool:
        p = self.p
        for a in ELEMENTS:
            for b in ELEMENTS:
                if not np.array_equal((self[a] @ self[b]) % p, self[a * b]):
                    return False
        return linalg.rank(self[IDENTITY], p) == self.dim or self.dim == 0

    def character(self) -> "Character":
        return Character(self.p, tuple(int(np.trace(self[g])) % self.p for g in CLASS_REPS))

    def __add__(self, other: "Representation") -> "Representation":
        return direct_sum([self, other])

    def __repr__(self) -> str:
        return f"Representation({self.name or '?'}, dim={self.dim}, p={self.p})"


@dataclass(frozen=True)
class Character:
    """Trace values on the classes (identity, transpositions, 3-cycles), mod p."""

    p: int
    values: tuple[int, int, int]

    def __add__(self, other: "Character") -> "Character":
        return Character(self.p, tuple((a + b) % self.p for a, b in zip(self.values, other.values)))

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.p, tuple((a * b) % self.p for a, b in zip(self.values, other.values)))

    def signed(self) -> tuple[int, int, int]:
        """Values as integers in (-p/2, p/2]."""
        return tuple(v - self.p if v > self.p // 2 else v for v in self.values)


def trivial_rep(p: int) -> Representation:
    check_p(p)
    one = np.ones((1, 1), dtype=np.int64)
    return Representation(p, 1, {g: one.copy() for g in ELEMENTS}, "triv")


def sign_rep(p: int) -> Representation:
    check_p(p)
    return Representation(
        p, 1, {g: np.array([[g.sign % p]], dtype=np.int64) for g in ELEMENTS}, "sign"
    )


def standard_rep(p: int) -> Representation:
    check_p(p)
    model = integral_model()
    return Representation(p, 2, {g: model[g] % p for g in ELEMENTS}, "std")


def irreducibles(p: int) -> tuple[Representation, Representation, Representation]:
    """(trivial, sign, standard)."""
    return trivial_rep(p), sign_rep(p), standard_rep(p)


def _mat_inverse_2x2(m: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = (int(x) for x in m.reshape(-1))
    det_inv = pow((a * d - b * c) % p, -1, p)
    return (np.array([[d, -b], [-c, a]], dtype=np.int64) * det_inv) % p


def adjoint_rep(rho: Representation) -> Representation:
    """Conjugation action of a 2-dimensional rho on M_2(F_p), basis E11, E12, E21, E22."""
    if rho.dim != 2:
        raise ValueError("adjoint_rep expects a 2-dimensional representation")
    p = rho.p
    basis = [np.zeros((2, 2), dtype=np.int64) for _ in range(4)]
    for i, (r, c) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        basis[i][r, c] = 1
    mats = {}
    for g in ELEMENTS:
        m, minv = rho[g], _mat_inverse_2x2(rho[g], p)
        cols = [((m @ e @ minv) % p).reshape(-1) for e in basis]
        mats[g] = np.stack(cols, axis=1)
    return Representation(p, 4, mats, f"Ad({rho.name})" if rho.name else "Ad")


def direct_sum(reps: Sequence[Representation]) -> Representation:
    if not reps:
        raise ValueError("empty direct sum")
    p = reps[0].p
    d = sum(r.dim for r in reps)
    mats = {}
    for g in ELEMENTS:
        m = np.zeros((d, d), dtype=np.int64)
        off = 0
        for r in reps:
            m[off : off + r.dim, off : off + r.dim] = r[g]
            off += r.dim
        mats[g] = m
    return Representation(p, d, mats, "+".join(r.name or "?" for r in reps))


def zero_rep(p: int) -> Representation:
    z = np.zeros((0, 0), dtype=np.int64)
    return Representation(p, 0, {g: z for g in ELEMENTS}, "0")


def dual_rep(rho: Representation) -> Representation:
    """g acts by the transpose of rho(g^-1)."""
    return Representation(
        rho.p,
        rho.dim,
        {g: rho[g.inverse()].T.copy() for g in ELEMENTS},
        f"{rho.name}*",
    )


def tensor_rep(a: Representation, b: Representation) -> Representation:
    p = a.p
    return Representation(
        p,
        a.dim * b.dim,
        {g: np.kron(a[g], b[g]) % p for g in ELEMENTS},
        f"{a.name}(x){b.name}",
    )


def char_inner_product(chi1: Character, chi2: Character) -> int:
    """(1/6) sum_g chi1(g) chi2(g^-1), as an integer in [0, p)."""
    p = chi1.p
    check_p(p)
    # every S3 element is conjugate to its inverse
    total = sum(n * a * b for n, a, b in zip(CLASS_SIZES, chi1.values, chi2.values))
    return (total * pow(6, -1, p)) % p


def decompose(rep: Representation) -> tuple[int, int, int]:
    """Multiplicities of (trivial, sign, standard) in a semisimple module."""
    p = rep.p
    check_p(p)
    if rep.dim >= p:
        raise PreconditionError(
            f"dimension {rep.dim} >= p = {p}: multiplicities are only known mod p"
        )
    chi = rep.character()
    mults = tuple(char_inner_product(chi, irr.character()) for irr in irreducibles(p))
    if mults[0] + mults[1] + 2 * mults[2] != rep.dim:
        raise ValueError(f"multiplicities {mults} inconsistent with dimension {rep.dim}")
    return mults


def intertwiners(source: Representation, target: Representation) -> np.ndarray:
    """Basis of {T : T source(g) = target(g) T}, each T flattened row-major
    as a (target.dim x source.dim) matrix."""
    p = source.p
    m, n = source.dim, target.dim
    if m * n == 0:
        return np.zeros((0, m * n), dtype=np.int64)
    blocks = []
    for g in GENERATORS:
        # row-major vec: vec(T A) = (I kron A^T) vec T, vec(B T) = (B kron I) vec T
        blocks.append(np.kron(np.eye(n, dtype=np.int64), source[g].T) - np.kron(target[g], np.eye(m, dtype=np.int64)))
    return linalg.nullspace(np.vstack(blocks), p)


def equivariant_hom_dim(source: Representation, target: Representation) -> int:
    """dim Hom_{F_p[S3]}(source, target), by solving the linear system."""
    return intertwiners(source, target).shape[0]


def assemble(p: int, multiplicities: Sequence[int]) -> Representation:
    """Direct sum of irreducibles with the given (triv, sign, std) multiplicities."""
    parts = []
    for irr, m in zip(irreducibles(p), multiplicities):
        parts.extend([irr] * m)
    return direct_sum(parts) if parts else zero_rep(p)


def rep_by_name(name: str, p: int) -> Representation:
    triv, sign, std = irreducibles(p)
    table = {"triv": triv, "sign": sign, "std": std, "ad": adjoint_rep(std)}
    if name not in table:
        raise KeyError(f"unknown representation {name!r}; choose from {sorted(table)}")
    return table[name]

"""2x2 matrix groups over finite local rings.

``Mat2`` is the scalar type.  Batched helpers operate on int64 arrays of shape
``(..., 2, 2, M)`` holding coefficient vectors of the four entries.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .errors import NotAUnit, ParentMismatch, PreconditionError, check_budget, get_budget
from .ring import (
    RingElement,
    RingHom,
    RingSpec,
    _product_array,
    maximal_ideal_array,
    random_maximal_ideal_array,
)
from .s3rep import ELEMENTS as S3_ELEMENTS
from .s3rep import S3Element, check_p, integral_model


@dataclass(frozen=True, eq=False)
class Mat2:
    """[[a, b], [c, d]] over a finite local ring."""

    a: RingElement
    b: RingElement
    c: RingElement
    d: RingElement

    def __post_init__(self):
        spec = self.a.parent
        if any(x.parent != spec for x in (self.b, self.c, self.d)):
            raise ParentMismatch("matrix entries live in different rings")

    @property
    def parent(self) -> RingSpec:
        return self.a.parent

    @property
    def entries(self) -> tuple[RingElement, RingElement, RingElement, RingElement]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def identity(cls, spec: RingSpec) -> "Mat2":
        return cls(spec.one, spec.zero, spec.zero, spec.one)

    @classmethod
    def from_ints(cls, spec: RingSpec, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(spec(int(a)), spec(int(b)), spec(int(c)), spec(int(d)))

    @classmethod
    def from_array(cls, spec: RingSpec, arr: np.ndarray) -> "Mat2":
        arr = np.asarray(arr)
        return cls(*(spec.from_array(arr[i, j]) for i in (0, 1) for j in (0, 1)))

    def to_array(self) -> np.ndarray:
        return np.stack([x.to_array() for x in self.entries]).reshape(2, 2, -1)

    def _check(self, other: "Mat2") -> None:
        if other.parent != self.parent:
            raise ParentMismatch(f"{self.parent} vs {other.parent}")

    def __mul__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __add__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        return Mat2(*(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        return Mat2(*(x - y for x, y in zip(self.entries, other.entries)))

    def scale(self, s) -> "Mat2":
        return Mat2(*(x * s for x in self.entries))

    def det(self) -> RingElement:
        return self.a * self.d - self.b * self.c

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det.is_unit():
            raise NotAUnit("singular matrix")
        di = det.inverse()
        return Mat2(self.d * di, -self.b * di, -self.c * di, self.a * di)

    def __pow__(self, e: int) -> "Mat2":
        if e < 0:
            return self.inverse() ** (-e)
        result = Mat2.identity(self.parent)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def residue(self) -> tuple[int, int, int, int]:
        return tuple(x.residue() for x in self.entries)

    def is_gamma(self) -> bool:
        return self.residue() == (1, 0, 0, 1)

    def map(self, hom: RingHom) -> "Mat2":
        return Mat2(*(hom(x) for x in self.entries))

    def key(self) -> tuple[int, ...]:
        """Canonical sort key: entry coefficient vectors concatenated row-major."""
        return self.a.coeffs + self.b.coeffs + self.c.coeffs + self.d.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.parent == other.parent and self.key() == other.key()

    def __hash__(self) -> int:
        return hash((self.parent, self.key()))

    def __lt__(self, other: "Mat2") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


class GammaElement(Mat2):
    """An element of ker(GL_2(R) -> GL_2(F_p))."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_gamma():
            raise ValueError(f"{self} does not reduce to the identity")

    @classmethod
    def of(cls, m: Mat2) -> "GammaElement":
        return cls(*m.entries)


def mat_mul(g: Mat2, h: Mat2) -> Mat2:
    return g * h


def mat_inv(g: Mat2) -> Mat2:
    return g.inverse()


def mat_det(g: Mat2) -> RingElement:
    return g.det()


# -- batched arithmetic ----------------------------------------------------


def mat_mul_arrays(spec: RingSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    mul = spec.mul_arrays
    q = spec.modulus
    rows = []
    for i in (0, 1):
        row = []
        for j in (0, 1):
            row.append((mul(A[..., i, 0, :], B[..., 0, j, :]) + mul(A[..., i, 1, :], B[..., 1, j, :])) % q)
        rows.append(np.stack(row, axis=-2))
    return np.stack(rows, axis=-3)


def mat_inv_arrays(spec: RingSpec, A: np.ndarray) -> np.ndarray:
    mul = spec.mul_arrays
    q = spec.modulus
    a, b, c, d = A[..., 0, 0, :], A[..., 0, 1, :], A[..., 1, 0, :], A[..., 1, 1, :]
    di = spec.inv_arrays((mul(a, d) - mul(b, c)) % q)
    out = np.stack(
        [np.stack([mul(d, di), mul(-b % q, di)], axis=-2), np.stack([mul(-c % q, di), mul(a, di)], axis=-2)],
        axis=-3,
    )
    return out % q


def mat_pow_arrays(spec: RingSpec, A: np.ndarray, e: int) -> np.ndarray:
    result = np.broadcast_to(identity_array(spec), A.shape).copy()
    base = A
    while e:
        if e & 1:
            result = mat_mul_arrays(spec, result, base)
        base = mat_mul_arrays(spec, base, base)
        e >>= 1
    return result


def identity_array(spec: RingSpec) -> np.ndarray:
    out = np.zeros((2, 2, spec.dim), dtype=np.int64)
    out[0, 0, 0] = out[1, 1, 0] = 1
    return out


def is_gamma_arrays(spec: RingSpec, A: np.ndarray) -> np.ndarray:
    res = A[..., 0] % spec.p
    return (res[..., 0, 0] == 1) & (res[..., 0, 1] == 0) & (res[..., 1, 0] == 0) & (res[..., 1, 1] == 1)


def gamma_array(spec: RingSpec, budget: int | None = None) -> np.ndarray:
    """All of Gamma(R) as an array (|m|^4, 2, 2, M), canonical order."""
    check_budget(f"Gamma({spec})", spec.gamma_order, budget)
    m = maximal_ideal_array(spec)
    idx = _product_array([np.arange(len(m))] * 4)
    out = m[idx].reshape(-1, 2, 2, spec.dim)
    out[:, 0, 0, 0] += 1
    out[:, 1, 1, 0] += 1
    return out % spec.modulus


def random_gamma_arrays(spec: RingSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    out = random_maximal_ideal_array(spec, rng, (n, 2, 2))
    out[:, 0, 0, 0] += 1
    out[:, 1, 1, 0] += 1
    return out % spec.modulus


def enumerate_gamma(spec: RingSpec, budget: int | None = None) -> Iterator[GammaElement]:
    """Each element of Gamma(R) once, canonical order (entry-major over m)."""
    check_budget(f"Gamma({spec})", spec.gamma_order, budget)
    m = maximal_ideal_array(spec)
    ms = [spec.from_array(row) for row in m]
    one = spec.one
    for a, b, c, d in itertools.product(ms, repeat=4):
        yield GammaElement(a + one, b, c, d + one)


# -- the S3 lift -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class S3Lift:
    """A homomorphic section sigma: S3 -> GL_2(R) of the residual embedding."""

    spec: RingSpec
    matrices: dict

    def __getitem__(self, a: S3Element) -> Mat2:
        return self.matrices[a]

    @cached_property
    def inverses(self) -> dict:
        return {a: self.matrices[a.inverse()] for a in S3_ELEMENTS}

    @cached_property
    def arrays(self) -> dict:
        return {a: m.to_array() for a, m in self.matrices.items()}

    @cached_property
    def inverse_arrays(self) -> dict:
        return {a: m.to_array() for a, m in self.inverses.items()}

    @cached_property
    def constant_matrices(self) -> dict:
        """Integer 2x2 matrices, for lifts whose entries are all constants."""
        out = {}
        for a, m in self.matrices.items():
            arr = m.to_array()
            if np.any(arr[..., 1:]):
                raise ValueError("lift has non-constant entries")
            out[a] = arr[..., 0]
        return out

    def multiplicativity_failures(self) -> list[tuple[S3Element, S3Element]]:
        return [
            (a, b)
            for a in S3_ELEMENTS
            for b in S3_ELEMENTS
            if self[a] * self[b] != self[a * b]
        ]

    def residual_embedding(self) -> dict:
        return {a: self[a].residue() for a in S3_ELEMENTS}


def build_sigma(spec: RingSpec) -> S3Lift:
    """The integral model of the standard representation, mapped into GL_2(R)."""
    try:
        check_p(spec.p)
    except PreconditionError as exc:
        raise PreconditionError(f"no tame S3 lift: {exc}") from None
    model = integral_model()
    return S3Lift(spec, {a: Mat2.from_ints(spec, model[a].tolist()) for a in S3_ELEMENTS})


def conj_act(a: S3Element, g: Mat2, sigma: S3Lift) -> Mat2:
    """sigma(a) g sigma(a)^-1."""
    if g.parent != sigma.spec:
        raise ParentMismatch(f"{g.parent} vs lift over {sigma.spec}")
    return sigma[a] * g * sigma.inverses[a]


def conj_act_arrays(spec: RingSpec, a: S3Element, G: np.ndarray, sigma: S3Lift) -> np.ndarray:
    """Batched conjugation; sigma has constant (integral) entries, so ring
    multiplication by them is scalar multiplication of coefficient vectors."""
    s, si = sigma.constant_matrices[a], sigma.constant_matrices[a.inverse()]
    return np.einsum("ik,...klt,lj->...ijt", s, G, si) % spec.modulus


# -- first-order coordinates in square-zero rings -----------------------------


def ideal_dim(spec: RingSpec) -> int:
    """dim over F_p of the maximal ideal of a square-zero ring."""
    if not spec.is_square_zero:
        raise PreconditionError(f"{spec} is not square-zero")
    if spec.k == 2:
        return 1
    return spec.nvars if spec.N == 2 else 0


def ideal_coords_arrays(spec: RingSpec, x: np.ndarray) -> np.ndarray:
    """F_p coordinates of elements of m (square-zero case), shape (..., ideal_dim)."""
    if not spec.is_square_zero:
        raise PreconditionError(f"{spec} is not square-zero")
    if spec.k == 2:
        return (x[..., :1] // spec.p) % spec.p
    if spec.N == 2:
        return x[..., 1:] % spec.p
    return x[..., :0]


def first_order_coords_arrays(spec: RingSpec, G: np.ndarray) -> np.ndarray:
    """For g = 1 + M in Gamma(R) with m^2 = 0: coordinates of M, entry-major
    (E11, E12, E21, E22) blocks of length ideal_dim."""
    M = (G - identity_array(spec)) % spec.modulus
    coords = ideal_coords_arrays(spec, M)
    return coords.reshape(coords.shape[:-3] + (-1,))


def first_order_coords(g: Mat2) -> np.ndarray:
    return first_order_coords_arrays(g.parent, g.to_array())


# -- subgroup closure ------------------------------------------------------

Word = tuple[tuple[int, int], ...]


@dataclass(eq=False)
class FiniteMatrixGroup:
    """A subgroup of GL_2(R) materialized element by element."""

    spec: RingSpec
    generators: tuple[Mat2, ...]
    elements: tuple[Mat2, ...]
    words: dict

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: Mat2) -> bool:
        return g.key() in self._keys

    @cached_property
    def _keys(self) -> set:
        return {g.key() for g in self.elements}

    def __iter__(self):
        return iter(self.elements)

    def word(self, g: Mat2) -> Word:
        return self.words[g.key()]

    def is_closed(self) -> bool:
        for g in self.elements:
            if g.inverse() not in self:
                return False
            for h in self.generators:
                if g * h not in self:
                    return False
        return True


def evaluate_word(word: Word, images: Sequence[Mat2], spec: RingSpec) -> Mat2:
    out = Mat2.identity(spec)
    for i, e in word:
        out = out * images[i] ** e
    return out


@dataclass(eq=False)
class ElementaryAbelianGroup:
    """A subgroup of Gamma(R) for a square-zero R, where
    (1 + A)(1 + B) = 1 + A + B.  Stored as an F_p-subspace of M_2(m)."""

    spec: RingSpec
    generators: tuple[Mat2, ...]

    @cached_property
    def generator_coords(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, 4 * ideal_dim(self.spec)), dtype=np.int64)
        return np.stack([first_order_coords(g) for g in self.generators])

    @cached_property
    def echelon(self) -> linalg.Echelon:
        return linalg.rref(self.generator_coords, self.spec.p)

    @property
    def rank(self) -> int:
        if self.generator_coords.shape[0] == 0:
            return 0
        return self.echelon.rank

    @property
    def order(self) -> int:
        return self.spec.p**self.rank

    @cached_property
    def independent_generators(self) -> tuple[int, ...]:
        """Indices of a maximal independent subset of generators, greedy in order."""
        chosen: list[int] = []
        p = self.spec.p
        for i in range(len(self.generators)):
            trial = self.generator_coords[chosen + [i]]
            if linalg.rank(trial, p) == len(chosen) + 1:
                chosen.append(i)
        return tuple(chosen)

    def __contains__(self, g: Mat2) -> bool:
        if g.parent != self.spec or not g.is_gamma():
            return False
        return linalg.in_span(self.generator_coords, first_order_coords(g), self.spec.p)

    def word(self, g: Mat2) -> Word:
        idx = self.independent_generators
        basis = self.generator_coords[list(idx)]
        if not idx:
            if first_order_coords(g).any():
                raise ValueError("element not in subgroup")
            return ()
        coeffs = linalg.coordinates(basis, first_order_coords(g), self.spec.p)[0]
        return tuple((i, int(c)) for i, c in zip(idx, coeffs) if c)

    def elements(self, budget: int | None = None) -> Iterator[Mat2]:
        check_budget("elementary abelian closure", self.order, budget)
        gens = [self.generators[i] for i in self.independent_generators]
        p = self.spec.p
        for exps in itertools.product(range(p), repeat=len(gens)):
            g = Mat2.identity(self.spec)
            for h, e in zip(gens, exps):
                if e:
                    g = g * h**e
            yield g

    def __iter__(self):
        return self.elements()


def subgroup_closure(
    generators: Iterable[Mat2], spec: RingSpec, budget: int | None = None
) -> FiniteMatrixGroup | ElementaryAbelianGroup:
    """The subgroup generated by ``generators``.

    Inside Gamma(R) with m^2 = 0 the closure is an F_p-span and is returned
    lazily as an ElementaryAbelianGroup.  Otherwise a breadth-first closure
    is run, hashing canonical keys and recording a word for each element.
    """
    gens = tuple(generators)
    for g in gens:
        if g.parent != spec:
            raise ParentMismatch(f"generator over {g.parent}, expected {spec}")
    if spec.is_square_zero and all(g.is_gamma() for g in gens):
        return ElementaryAbelianGroup(spec, gens)
    cap = get_budget(budget)
    moves = [(i, 1, g) for i, g in enumerate(gens)] + [
        (i, -1, g.inverse()) for i, g in enumerate(gens)
    ]
    one = Mat2.identity(spec)
    words: dict = {one.key(): ()}
    found = {one.key(): one}
    queue = deque([one])
    while queue:
        g = queue.popleft()
        w = words[g.key()]
        for i, e, h in moves:
            x = g * h
            kx = x.key()
            if kx not in found:
                found[kx] = x
                words[kx] = w + ((i, e),)
                queue.append(x)
                if len(found) > cap:
                    check_budget("subgroup closure", len(found), cap)
    elements = tuple(sorted(found.values(), key=Mat2.key))
    return FiniteMatrixGroup(spec, gens, elements, words)


def from_first_order_coords_arrays(spec: RingSpec, v: np.ndarray) -> np.ndarray:
    """Inverse of first_order_coords_arrays: coordinates -> 1 + M."""
    md = ideal_dim(spec)
    v = np.asarray(v, dtype=np.int64)
    blocks = v.reshape(v.shape[:-1] + (4, md))
    out = np.zeros(v.shape[:-1] + (4, spec.dim), dtype=np.int64)
    if spec.k == 2:
        out[..., 0] = spec.p * blocks[..., 0]
    elif spec.N == 2:
        out[..., 1:] = blocks
    out = out.reshape(v.shape[:-1] + (2, 2, spec.dim)) + identity_array(spec)
    return out % spec.modulus

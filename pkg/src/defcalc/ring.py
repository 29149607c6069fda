"""Finite local rings (Z/p^k)[x_1..x_m] / (monomials of total degree >= N).

These rings stand in for truncations of the Witt vectors Z_p (no variables)
and of power series rings over Z_p.  Elements are dense coefficient vectors
indexed by the monomials of total degree < N in graded-lex order.

Two layers live here:

* ``RingSpec`` / ``RingElement``: immutable scalar objects with operator
  overloading, used wherever clarity beats speed.
* ``*_arrays`` methods on ``RingSpec``: the same arithmetic on numpy arrays of
  shape ``(..., M)``, used by the exhaustive enumerations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import NotAUnit, ParentMismatch, PrecisionError, check_budget

Monomial = tuple[int, ...]

# keeps the int64 structure-constant products below 2**62
_MAX_MODULUS = 2**24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def graded_monomials(nvars: int, max_degree: int) -> tuple[Monomial, ...]:
    """Exponent vectors of total degree <= max_degree, graded-lex order."""
    out: list[Monomial] = []
    for d in range(max_degree + 1):
        block = [
            m for m in itertools.product(range(d + 1), repeat=nvars) if sum(m) == d
        ]
        block.sort(reverse=True)
        out.extend(block)
    return tuple(out)


def _product_array(choices: Sequence[np.ndarray]) -> np.ndarray:
    """Cartesian product as rows, first coordinate most significant."""
    if not choices:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*choices, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1).astype(np.int64)


@dataclass(frozen=True)
class RingSpec:
    """The ring (Z/p^k)[variables] modulo all monomials of degree >= N."""

    p: int
    k: int = 1
    variables: tuple[str, ...] = ()
    N: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.k < 1 or self.N < 1:
            raise ValueError("precision k and truncation N must be positive")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if not self.variables:
            object.__setattr__(self, "N", 1)
        if self.p**self.k > _MAX_MODULUS:
            raise ValueError(f"p^k = {self.p**self.k} is too large")

    # -- structure -------------------------------------------------------
    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def monomials(self) -> tuple[Monomial, ...]:
        return graded_monomials(self.nvars, self.N - 1)

    @cached_property
    def monomial_index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.monomials)}

    @property
    def dim(self) -> int:
        """Number of monomials of degree < N (rank of the ring over Z/p^k)."""
        return len(self.monomials)

    @cached_property
    def _mul_table(self):
        idx = self.monomial_index
        I, J, T = [], [], []
        for i, a in enumerate(self.monomials):
            for j, b in enumerate(self.monomials):
                t = idx.get(tuple(x + y for x, y in zip(a, b)))
                if t is not None:
                    I.append(i)
                    J.append(j)
                    T.append(t)
        S = np.zeros((len(T), self.dim), dtype=np.int64)
        S[np.arange(len(T)), T] = 1
        return np.array(I), np.array(J), np.array(T), S

    @cached_property
    def _unit_inverse_table(self) -> np.ndarray:
        q = self.modulus
        table = np.zeros(q, dtype=np.int64)
        for c in range(q):
            if c % self.p:
                table[c] = pow(c, -1, q)
        return table

    @property
    def cardinality(self) -> int:
        return self.modulus**self.dim

    @property
    def maximal_ideal_size(self) -> int:
        return self.cardinality // self.p

    @property
    def gamma_order(self) -> int:
        """|ker(GL_2(R) -> GL_2(F_p))| = |m|^4."""
        return self.maximal_ideal_size**4

    @property
    def nilpotency_index(self) -> int:
        """Least e with m^e = 0."""
        return self.k + self.N - 1

    @property
    def is_square_zero(self) -> bool:
        return self.nilpotency_index <= 2

    def __str__(self) -> str:
        head = f"F{self.p}" if self.k == 1 else f"Z/{self.p}^{self.k}"
        if not self.variables:
            return head
        return f"{head}[{','.join(self.variables)}]/m^{self.N}"

    # -- element construction -------------------------------------------
    def element(self, value=0) -> "RingElement":
        """Build an element from an int, a {monomial|name: coeff} dict, or a
        coefficient sequence."""
        q = self.modulus
        coeffs = [0] * self.dim
        if isinstance(value, RingElement):
            if value.parent != self:
                raise ParentMismatch(f"{value.parent} vs {self}")
            return value
        if isinstance(value, (int, np.integer)):
            coeffs[0] = int(value) % q
        elif isinstance(value, dict):
            for key, c in value.items():
                if isinstance(key, str):
                    key = self._var_monomial(key)
                i = self.monomial_index.get(tuple(key))
                if i is not None:
                    coeffs[i] = (coeffs[i] + int(c)) % q
        else:
            vals = list(value)
            if len(vals) != self.dim:
                raise ValueError(f"expected {self.dim} coefficients")
            coeffs = [int(c) % q for c in vals]
        return RingElement(self, tuple(coeffs))

    __call__ = element

    def _var_monomial(self, name: str) -> Monomial:
        i = self.variables.index(name)
        return tuple(int(j == i) for j in range(self.nvars))

    @property
    def zero(self) -> "RingElement":
        return self.element(0)

    @property
    def one(self) -> "RingElement":
        return self.element(1)

    def gen(self, which) -> "RingElement":
        if isinstance(which, int):
            which = self.variables[which]
        return self.element({which: 1})

    @property
    def gens(self) -> tuple["RingElement", ...]:
        return tuple(self.gen(v) for v in self.variables)

    def from_array(self, arr) -> "RingElement":
        return RingElement(self, tuple(int(c) for c in np.asarray(arr) % self.modulus))

    # -- array arithmetic -------------------------------------------------
    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        I, J, _, S = self._mul_table
        prod = a[..., I] * b[..., J]
        return (prod @ S) % self.modulus

    def add_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a + b) % self.modulus

    def sub_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (a - b) % self.modulus

    def inv_arrays(self, a: np.ndarray) -> np.ndarray:
        """Inverse of an array of units (not checked)."""
        c_inv = self._unit_inverse_table[a[..., 0] % self.modulus]
        scaled = (a * c_inv[..., None]) % self.modulus
        nil = scaled.copy()
        nil[..., 0] = (nil[..., 0] - 1) % self.modulus
        neg = (-nil) % self.modulus
        total = np.zeros_like(a)
        total[..., 0] = 1
        term = total.copy()
        for _ in range(self.nilpotency_index):
            term = self.mul_arrays(term, neg)
            total = (total + term) % self.modulus
        return (total * c_inv[..., None]) % self.modulus

    def one_array(self, shape=()) -> np.ndarray:
        out = np.zeros(tuple(shape) + (self.dim,), dtype=np.int64)
        out[..., 0] = 1
        return out

    def constant_array(self, c: int) -> np.ndarray:
        return (self.one_array() * c) % self.modulus


@dataclass(frozen=True)
class RingElement:
    parent: RingSpec
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.parent != self.parent:
                raise ParentMismatch(f"{self.parent} vs {other.parent}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.parent.element(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        q = self.parent.modulus
        return RingElement(
            self.parent, tuple((a + b) % q for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        q = self.parent.modulus
        return RingElement(self.parent, tuple((-a) % q for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        spec = self.parent
        q = spec.modulus
        out = [0] * spec.dim
        I, J, T, _ = spec._mul_table
        a, b = self.coeffs, other.coeffs
        for i, j, t in zip(I.tolist(), J.tolist(), T.tolist()):
            if a[i] and b[j]:
                out[t] += a[i] * b[j]
        return RingElement(spec, tuple(c % q for c in out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.parent.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.parent.p != 0

    def in_maximal_ideal(self) -> bool:
        return not self.is_unit()

    def residue(self) -> int:
        return self.coeffs[0] % self.parent.p

    def inverse(self) -> "RingElement":
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit")
        spec = self.parent
        c_inv = pow(self.coeffs[0], -1, spec.modulus)
        # self = c (1 + n) with n nilpotent; invert via a finite geometric series
        n = self * c_inv - 1
        total = spec.one
        term = spec.one
        for _ in range(spec.nilpotency_index):
            term = term * (-n)
            if term.is_zero():
                break
            total = total + term
        return total * c_inv

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def to_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def key(self) -> tuple[int, ...]:
        return self.coeffs

    def __str__(self) -> str:
        spec = self.parent
        terms = []
        for c, mono in zip(self.coeffs, spec.monomials):
            if not c:
                continue
            factors = []
            for name, e in zip(spec.variables, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                terms.append(str(c))
            elif c == 1:
                terms.append("*".join(factors))
            else:
                terms.append(f"{c}*" + "*".join(factors))
        return " + ".join(terms) if terms else "0"

    def __repr__(self) -> str:
        return f"RingElement({self.parent}: {self})"


# -- enumeration -----------------------------------------------------------


def element_array(spec: RingSpec, budget: int | None = None) -> np.ndarray:
    """All elements as coefficient rows, canonical order."""
    check_budget(f"elements of {spec}", spec.cardinality, budget)
    q = spec.modulus
    return _product_array([np.arange(q)] * spec.dim)


def maximal_ideal_array(spec: RingSpec, budget: int | None = None) -> np.ndarray:
    check_budget(f"maximal ideal of {spec}", spec.maximal_ideal_size, budget)
    q = spec.modulus
    return _product_array([np.arange(0, q, spec.p)] + [np.arange(q)] * (spec.dim - 1))


def enumerate_elements(spec: RingSpec, budget: int | None = None) -> Iterator[RingElement]:
    """Every element exactly once, in canonical (lexicographic coefficient) order."""
    check_budget(f"elements of {spec}", spec.cardinality, budget)
    for coeffs in itertools.product(range(spec.modulus), repeat=spec.dim):
        yield RingElement(spec, coeffs)


def enumerate_maximal_ideal(
    spec: RingSpec, budget: int | None = None
) -> Iterator[RingElement]:
    check_budget(f"maximal ideal of {spec}", spec.maximal_ideal_size, budget)
    q = spec.modulus
    ranges = [range(0, q, spec.p)] + [range(q)] * (spec.dim - 1)
    for coeffs in itertools.product(*ranges):
        yield RingElement(spec, coeffs)


def random_maximal_ideal_array(spec: RingSpec, rng: np.random.Generator, shape) -> np.ndarray:
    shape = tuple(np.atleast_1d(shape))
    out = rng.integers(0, spec.modulus, size=shape + (spec.dim,), dtype=np.int64)
    out[..., 0] = (out[..., 0] // spec.p) * spec.p
    return out


# -- substitution homomorphisms -----------------------------------------------


def _monomial_recipe(spec: RingSpec) -> list[tuple[int, int]]:
    """For each non-constant monomial: (index of a lower monomial, variable)
    such that monomial = lower * variable."""
    recipe = []
    for mono in spec.monomials[1:]:
        v = next(i for i, e in enumerate(mono) if e)
        lower = list(mono)
        lower[v] -= 1
        recipe.append((spec.monomial_index[tuple(lower)], v))
    return recipe


def monomial_values_arrays(
    source: RingSpec, target: RingSpec, images: np.ndarray
) -> np.ndarray:
    """Values of every source monomial at batched images.

    ``images`` has shape ``(..., nvars, target.dim)``; the result has shape
    ``(..., source.dim, target.dim)``.
    """
    batch = images.shape[:-2]
    vals = [target.one_array(batch)]
    for lower, v in _monomial_recipe(source):
        vals.append(target.mul_arrays(vals[lower], images[..., v, :]))
    return np.stack(vals, axis=-2)


def evaluate_arrays(
    source: RingSpec, target: RingSpec, coeffs: np.ndarray, monomial_values: np.ndarray
) -> np.ndarray:
    """Evaluate source polynomials with coefficient rows ``coeffs`` (shape
    ``(E, source.dim)``) at batched monomial values; result ``(..., E, target.dim)``."""
    c = np.asarray(coeffs, dtype=np.int64) % target.modulus
    return np.einsum("es,...st->...et", c, monomial_values) % target.modulus


@dataclass(frozen=True)
class RingHom:
    """The local homomorphism source -> target sending variable i to images[i]."""

    source: RingSpec
    target: RingSpec
    images: tuple[RingElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        check_substitution(self.source, self.target, self.images)

    @cached_property
    def _monomial_images(self) -> tuple[RingElement, ...]:
        vals = [self.target.one]
        for lower, v in _monomial_recipe(self.source):
            vals.append(vals[lower] * self.images[v])
        return tuple(vals)

    def __call__(self, x: RingElement) -> RingElement:
        if x.parent != self.source:
            raise ParentMismatch(f"{x.parent} is not the source {self.source}")
        total = self.target.zero
        for c, val in zip(x.coeffs, self._monomial_images):
            if c:
                total = total + val * c
        return total

    def images_array(self) -> np.ndarray:
        return np.stack([im.to_array() for im in self.images]) if self.images else (
            np.zeros((0, self.target.dim), dtype=np.int64)
        )

    def compose(self, inner: "RingHom") -> "RingHom":
        """self o inner."""
        if inner.target != self.source:
            raise ParentMismatch("composition of non-composable homomorphisms")
        return RingHom(inner.source, self.target, tuple(self(im) for im in inner.images))


def check_substitution(source: RingSpec, target: RingSpec, images: Sequence[RingElement]) -> None:
    if len(images) != source.nvars:
        raise ValueError(f"need {source.nvars} images, got {len(images)}")
    if target.p != source.p:
        raise PrecisionError("source and target have different residue characteristic")
    if target.k > source.k:
        raise PrecisionError(
            f"target precision p^{target.k} exceeds source precision p^{source.k}"
        )
    if source.nvars and source.N < target.nilpotency_index:
        raise PrecisionError(
            f"source truncation m^{source.N} does not dominate target {target} "
            f"(needs N >= {target.nilpotency_index})"
        )
    for im in images:
        if im.parent != target:
            raise ParentMismatch(f"image {im!r} does not lie in {target}")
        if im.is_unit():
            raise PrecisionError(f"image {im} is not in the maximal ideal")


def substitution_hom(
    source: RingSpec, target: RingSpec, images: Sequence[RingElement]
) -> RingHom:
    return RingHom(source, target, tuple(images))


def dominating_precision(targets: Sequence[RingSpec], k: int = 1, N: int = 2) -> tuple[int, int]:
    """Smallest (k, N), at least the given one, whose truncation maps onto every target."""
    for t in targets:
        k = max(k, t.k)
        N = max(N, t.nilpotency_index)
    return k, N

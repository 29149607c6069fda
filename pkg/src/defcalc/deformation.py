"""The deformation functor of a tame residual representation, at desk scale.

Two kinds of input:

* an explicit finite group with a presentation (S3, the trivial group), whose
  lifts to a finite local ring are enumerated by brute force and sorted into
  strict-equivalence classes;
* the tame datum: a truncation of the power series ring in X1..X4, Y1..Y4,
  the matrices X = 1 + (X_i), Y = 1 + (Y_i), the S3 lift sigma, and the group
  P generated by the twelve S3-conjugates of X and Y.  A point (A, B) of
  Gamma(R)^2 induces, by substituting the entries, an S3-equivariant
  homomorphism P -> Gamma(R).

Deformations of the semidirect product P x| S3 are stored as pairs
(phi, sigma_R) and evaluated as rho(g a) = phi(g) sigma_R(a).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import linalg, s3rep
from .errors import CheckFailure, ParentMismatch, PreconditionError, check_budget
from .matgroup import (
    ElementaryAbelianGroup,
    GammaElement,
    Mat2,
    S3Lift,
    build_sigma,
    conj_act,
    conj_act_arrays,
    first_order_coords_arrays,
    from_first_order_coords_arrays,
    gamma_array,
    ideal_dim,
    identity_array,
    mat_inv_arrays,
    mat_mul_arrays,
    mat_pow_arrays,
    random_gamma_arrays,
    subgroup_closure,
)
from .ring import (
    RingHom,
    RingSpec,
    check_substitution,
    dominating_precision,
    evaluate_arrays,
    maximal_ideal_array,
    monomial_values_arrays,
    random_maximal_ideal_array,
    substitution_hom,
)

S3 = s3rep.ELEMENTS
CHUNK = 1 << 15


# -- explicit finite groups --------------------------------------------------

Word = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ResidualRep:
    """A residual representation of a finitely presented group, given by
    integer matrices whose reductions mod p are the generator images."""

    name: str
    p: int
    generators: tuple[str, ...]
    relations: tuple[Word, ...]
    images: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def is_homomorphism(self) -> bool:
        spec = RingSpec(self.p)
        mats = [Mat2.from_ints(spec, m) for m in self.images]
        one = Mat2.identity(spec)
        return all(_eval_word_scalar(rel, mats, one) == one for rel in self.relations)


def _eval_word_scalar(word: Word, mats: Sequence[Mat2], one: Mat2) -> Mat2:
    out = one
    for i, e in word:
        out = out * mats[i] ** e
    return out


def s3_residual(p: int) -> ResidualRep:
    """rho_std mod p on <s, t | s^2, t^3, (st)^2>, s = (1 2), t = (1 2 3)."""
    s3rep.check_p(p)
    gens = s3rep.INTEGRAL_GENERATOR_MATRICES
    return ResidualRep(
        "S3",
        p,
        ("s", "t"),
        (((0, 2),), ((1, 3),), ((0, 1), (1, 1), (0, 1), (1, 1))),
        (gens[s3rep.TRANSPOSITION], gens[s3rep.THREE_CYCLE]),
    )


def trivial_residual(p: int) -> ResidualRep:
    return ResidualRep("1", p, (), (), ())


def residual_by_name(name: str, p: int) -> ResidualRep:
    if name == "s3":
        return s3_residual(p)
    if name == "trivial":
        return trivial_residual(p)
    raise KeyError(f"unknown group {name!r}")


Lift = tuple[Mat2, ...]


def _lift_key(lift: Lift) -> tuple[int, ...]:
    return tuple(x for m in lift for x in m.key())


def _word_arrays(spec: RingSpec, word: Word, gens: Sequence[np.ndarray], invs: Sequence[np.ndarray]) -> np.ndarray:
    shape = gens[0].shape if gens else (2, 2, spec.dim)
    out = np.broadcast_to(identity_array(spec), shape).copy()
    for i, e in word:
        base = gens[i] if e > 0 else invs[i]
        out = mat_mul_arrays(spec, out, mat_pow_arrays(spec, base, abs(e)))
    return out


def _run_chunks(fn, bounds, threads: int):
    if threads <= 1:
        return [fn(b) for b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, bounds))


def _chunks(total: int, size: int = CHUNK) -> list[tuple[int, int]]:
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _unravel(indices: np.ndarray, base: int, ndigits: int) -> list[np.ndarray]:
    out = []
    for j in range(ndigits):
        out.append((indices // base ** (ndigits - 1 - j)) % base)
    return out


def enumerate_lifts(
    rho: ResidualRep, R: RingSpec, budget: int | None = None, threads: int = 1
) -> list[Lift]:
    """All tuples of generator images in the Gamma(R)-cosets above rho's
    generator images that satisfy every relation, in canonical order."""
    if R.p != rho.p:
        raise ParentMismatch(f"ring {R} has residue field F_{R.p}, rho is over F_{rho.p}")
    ngen = len(rho.generators)
    if ngen == 0:
        ok = all(not rel for rel in rho.relations)
        return [()] if ok else []
    gamma = gamma_array(R, budget)
    total = len(gamma) ** ngen
    check_budget(f"lift search space over {R}", total, budget)
    cosets, coset_invs = [], []
    for img in rho.images:
        base = Mat2.from_ints(R, img).to_array()
        c = mat_mul_arrays(R, np.broadcast_to(base, gamma.shape), gamma)
        cosets.append(c)
        coset_invs.append(mat_inv_arrays(R, c))
    ident = identity_array(R)

    def work(bound):
        s, e = bound
        idx = _unravel(np.arange(s, e), len(gamma), ngen)
        gens = [cosets[j][idx[j]] for j in range(ngen)]
        invs = [coset_invs[j][idx[j]] for j in range(ngen)]
        mask = np.ones(e - s, dtype=bool)
        for rel in rho.relations:
            val = _word_arrays(R, rel, gens, invs)
            mask &= np.all(val == ident, axis=(-3, -2, -1))
        hits = np.nonzero(mask)[0]
        return [tuple(g[h] for g in gens) for h in hits]

    lifts: list[Lift] = []
    for part in _run_chunks(work, _chunks(total), threads):
        for arrs in part:
            lifts.append(tuple(Mat2.from_array(R, a) for a in arrs))
    lifts.sort(key=_lift_key)
    return lifts


@dataclass(frozen=True)
class DeformationClass:
    representative: Lift
    orbit_size: int

    def key(self):
        return _lift_key(self.representative)


def strict_equiv_classes(lifts: Sequence[Lift], R: RingSpec, budget: int | None = None) -> list[DeformationClass]:
    """Orbits of simultaneous Gamma(R)-conjugation; representative = minimum."""
    if not lifts:
        return []
    ngen = len(lifts[0])
    if ngen == 0:
        return [DeformationClass((), 1)]
    gamma = gamma_array(R, budget)
    gamma_inv = mat_inv_arrays(R, gamma)
    keyed = {_lift_key(l): l for l in lifts}
    remaining = set(keyed)
    classes = []
    for key in sorted(keyed):
        if key not in remaining:
            continue
        lift = keyed[key]
        arrs = [m.to_array() for m in lift]
        conj = [
            mat_mul_arrays(R, mat_mul_arrays(R, gamma, np.broadcast_to(a, gamma.shape)), gamma_inv)
            for a in arrs
        ]
        flat = np.concatenate([c.reshape(len(gamma), -1) for c in conj], axis=1)
        orbit = {tuple(row) for row in np.unique(flat, axis=0).tolist()}
        missing = orbit - set(keyed)
        if missing:
            raise CheckFailure(
                "a conjugate of a lift is missing from the lift set",
                {"lift": [str(m) for m in lift]},
            )
        remaining -= orbit
        rep = keyed[min(orbit)]
        classes.append(DeformationClass(rep, len(orbit)))
    classes.sort(key=DeformationClass.key)
    return classes


# -- the tame datum ----------------------------------------------------------


def variable_names(generators: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"{g}{i}" for g in generators for i in range(1, 5))


@dataclass(frozen=True, eq=False)
class TameDatum:
    """Truncated universal ring, generator matrices, and the subgroup P."""

    p: int
    k: int
    N: int
    generator_names: tuple[str, ...]
    ring: RingSpec
    generators: tuple[Mat2, ...]
    sigma: S3Lift

    @cached_property
    def conjugates(self) -> tuple[tuple[str, s3rep.S3Element, Mat2], ...]:
        """(generator name, a, sigma(a) g sigma(a)^-1), generator-major, S3 order."""
        return tuple(
            (name, a, conj_act(a, g, self.sigma))
            for name, g in zip(self.generator_names, self.generators)
            for a in S3
        )

    @cached_property
    def conjugate_arrays(self) -> np.ndarray:
        """Shape (ngen, 6, 2, 2, M)."""
        arr = np.stack([c[2].to_array() for c in self.conjugates])
        return arr.reshape(len(self.generators), len(S3), 2, 2, self.ring.dim)

    @cached_property
    def subgroup(self):
        """P_trunc: an ElementaryAbelianGroup when the ring is square-zero,
        otherwise a breadth-first closure (subject to the budget)."""
        return subgroup_closure([c[2] for c in self.conjugates], self.ring)

    @property
    def is_elementary_abelian(self) -> bool:
        return self.ring.is_square_zero

    def is_s3_stable(self) -> bool:
        """Conjugating any generator conjugate lands among the conjugates."""
        keys = {c[2].key() for c in self.conjugates}
        return all(
            conj_act(a, c[2], self.sigma).key() in keys for c in self.conjugates for a in S3
        )

    def __repr__(self) -> str:
        return f"TameDatum(p={self.p}, k={self.k}, N={self.N}, generators={self.generator_names})"


def build_datum(p: int, k: int = 1, N: int = 2, generators: Sequence[str] = ("X", "Y")) -> TameDatum:
    s3rep.check_p(p)
    if N < 2:
        raise PreconditionError("truncation N must be at least 2 to see the variables")
    ring = RingSpec(p, k, variable_names(generators), N)
    gens = []
    for name in generators:
        x1, x2, x3, x4 = (ring.gen(f"{name}{i}") for i in range(1, 5))
        gens.append(Mat2(ring.one + x1, x2, x3, ring.one + x4))
    return TameDatum(p, k, N, tuple(generators), ring, tuple(gens), build_sigma(ring))


@dataclass(frozen=True)
class BostonPoint:
    """Images of the free generators: a point of Gamma(R)^ngen."""

    images: tuple[Mat2, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(GammaElement.of(m) for m in self.images))

    @property
    def A(self) -> Mat2:
        return self.images[0]

    @property
    def B(self) -> Mat2:
        return self.images[1]

    @property
    def spec(self) -> RingSpec:
        return self.images[0].parent


def _substitution_images(point: BostonPoint) -> list:
    out = []
    for g in point.images:
        out.extend([g.a - 1, g.b, g.c, g.d - 1])
    return out


@dataclass(frozen=True, eq=False)
class BostonHom:
    """The homomorphism P_trunc -> Gamma(R) induced by substituting a point."""

    datum: TameDatum
    point: BostonPoint
    hom: RingHom
    sigma: S3Lift

    def __call__(self, g: Mat2) -> Mat2:
        return g.map(self.hom)

    def equivariance_failures(self) -> list[tuple[str, s3rep.S3Element]]:
        """Conjugate generators a.G where phi(a.G) != sigma_R(a) phi(G) sigma_R(a)^-1."""
        bad = []
        for (name, a, c), g in zip(
            self.datum.conjugates,
            [img for img in self.point.images for _ in S3],
        ):
            if self(c) != conj_act(a, g, self.sigma):
                bad.append((name, a))
        return bad

    def sends_generators_to_point(self) -> bool:
        return all(self(g) == img for g, img in zip(self.datum.generators, self.point.images))

    def deformation(self, g: Mat2, a: s3rep.S3Element) -> Mat2:
        """rho(g a) = phi(g) sigma_R(a) for g in P_trunc."""
        return self(g) * self.sigma[a]


def boston_point_to_hom(datum: TameDatum, point: BostonPoint) -> BostonHom:
    R = point.spec
    if len(point.images) != len(datum.generators):
        raise ValueError("one image per free generator required")
    hom = substitution_hom(datum.ring, R, _substitution_images(point))
    return BostonHom(datum, point, hom, build_sigma(R))


# -- first-order representations ----------------------------------------------


def first_order_rep(spec: RingSpec, sigma: S3Lift, basis: np.ndarray, name: str = "") -> s3rep.Representation:
    """S3 acting by sigma-conjugation on the span of first-order coordinate
    vectors ``basis`` (rows, independent) inside M_2(m) of a square-zero ring."""
    p = spec.p
    d = basis.shape[0]
    if d == 0:
        return s3rep.zero_rep(p)
    elems = from_first_order_coords_arrays(spec, basis)
    mats = {}
    for a in S3:
        moved = first_order_coords_arrays(spec, conj_act_arrays(spec, a, elems, sigma))
        coords = linalg.coordinates(basis, moved, p)  # row i: image of basis vector i
        mats[a] = coords.T % p
    return s3rep.Representation(p, d, mats, name)


def gamma_first_order_rep(R: RingSpec) -> s3rep.Representation:
    """Gamma(R) for square-zero R, as an F_p[S3]-module under sigma_R-conjugation."""
    n = 4 * ideal_dim(R)
    return first_order_rep(R, build_sigma(R), np.eye(n, dtype=np.int64), f"Gamma({R})")


def subgroup_first_order_rep(datum: TameDatum) -> s3rep.Representation:
    P = datum.subgroup
    if not isinstance(P, ElementaryAbelianGroup):
        raise PreconditionError("first-order part needs the square-zero truncation k=1, N=2")
    basis = P.echelon.basis
    return first_order_rep(datum.ring, datum.sigma, basis, "P_trunc")


def equivariant_hom_count(datum: TameDatum, R: RingSpec) -> tuple[int, int]:
    """(dim, p^dim) of Hom_S3(P_trunc, Gamma(R)) when both are elementary abelian."""
    if not R.is_square_zero:
        raise PreconditionError(f"Gamma({R}) is not elementary abelian")
    V = subgroup_first_order_rep(datum)
    W = gamma_first_order_rep(R)
    dim = s3rep.equivariant_hom_dim(V, W)
    return dim, R.p**dim


# -- Step 1 -----------------------------------------------------------------


@dataclass
class Step1Report:
    ring: str
    datum_precision: tuple[int, int]
    mode: str
    total_points: int
    points_checked: int
    equivariance_checks: int
    equivariant: bool
    homomorphism: bool
    homomorphism_method: str
    injective: bool
    distinct_homs: int
    surjective: bool
    surjectivity_method: str
    equivariant_hom_count: int | None = None
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.equivariant and self.homomorphism and self.injective and self.surjective

    def as_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["datum_precision"] = list(self.datum_precision)
        out["passed"] = self.passed
        return out


def _encode_rows(rows: np.ndarray, q: int) -> np.ndarray:
    """Injective encoding of integer rows in [0, q) as int64 or bytes."""
    width = rows.shape[1]
    if width * math.log2(q) < 62:
        weights = q ** np.arange(width - 1, -1, -1, dtype=np.int64)
        return rows @ weights
    return np.ascontiguousarray(rows).view(np.dtype((np.void, rows.dtype.itemsize * width))).ravel()


class _BatchedBoston:
    """Vectorized evaluation of the substitution homs for many points."""

    def __init__(self, datum: TameDatum, R: RingSpec):
        self.datum = datum
        self.R = R
        self.sigma = build_sigma(R)
        self.ngen = len(datum.generators)
        self.coeffs = datum.conjugate_arrays.reshape(-1, datum.ring.dim)

    def images(self, points: np.ndarray) -> np.ndarray:
        """points (n, ngen, 2, 2, Mt) -> variable images (n, 4 ngen, Mt)."""
        n = points.shape[0]
        M = (points - identity_array(self.R)) % self.R.modulus
        return M.reshape(n, 4 * self.ngen, self.R.dim)

    def evaluate(self, points: np.ndarray, coeffs: np.ndarray | None = None) -> np.ndarray:
        """phi_point applied to the conjugate generators: (n, ngen, 6, 2, 2, Mt)."""
        monovals = monomial_values_arrays(self.datum.ring, self.R, self.images(points))
        c = self.coeffs if coeffs is None else coeffs
        out = evaluate_arrays(self.datum.ring, self.R, c, monovals)
        if coeffs is not None:
            return out
        return out.reshape(points.shape[0], self.ngen, len(S3), 2, 2, self.R.dim)

    def expected(self, points: np.ndarray) -> np.ndarray:
        """sigma_R(a) point_j sigma_R(a)^-1: (n, ngen, 6, 2, 2, Mt)."""
        parts = [conj_act_arrays(self.R, a, points, self.sigma) for a in S3]
        return np.stack(parts, axis=2)


def verify_step1_bijection(
    datum: TameDatum,
    R: RingSpec,
    mode: str = "exhaustive",
    seed: int = 0,
    samples: int = 200,
    words: int = 8,
    word_length: int = 6,
    threads: int = 1,
    budget: int | None = None,
) -> Step1Report:
    """Check that points of Gamma(R)^ngen correspond bijectively to
    S3-equivariant homomorphisms P_trunc -> Gamma(R)."""
    check_substitution(datum.ring, R, [R.zero] * datum.ring.nvars)
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    engine = _BatchedBoston(datum, R)
    ngen = engine.ngen
    total = R.gamma_order**ngen
    rng = np.random.default_rng(seed)
    witness = None

    if mode == "exhaustive":
        check_budget(f"Boston points over {R}", total, budget)
        gamma = gamma_array(R, budget)

        def points_for(bound):
            idx = _unravel(np.arange(*bound), len(gamma), ngen)
            return np.stack([gamma[i] for i in idx], axis=1)

        bounds = _chunks(total)
    else:
        sampled = np.stack([random_gamma_arrays(R, rng, samples) for _ in range(ngen)], axis=1)
        sampled = np.unique(sampled.reshape(samples, -1), axis=0).reshape((-1, ngen, 2, 2, R.dim))

        def points_for(bound):
            return sampled[bound[0] : bound[1]]

        bounds = _chunks(len(sampled))

    def work(bound):
        pts = points_for(bound)
        got = engine.evaluate(pts)
        want = engine.expected(pts)
        ok = np.all(got == want, axis=(2, 3, 4, 5)).all(axis=1)
        codes = _encode_rows(got[:, :, 0].reshape(len(pts), -1), R.modulus)
        bad = None
        if not ok.all():
            i = int(np.nonzero(~ok)[0][0])
            bad = pts[i]
        return int(ok.sum()), codes, bad, pts if mode == "sampled" else None

    results = _run_chunks(work, bounds, threads)
    checked = sum(len(r[1]) for r in results)
    good = sum(r[0] for r in results)
    equivariant = good == checked
    for r in results:
        if r[2] is not None:
            witness = {
                "failure": "equivariance",
                "point": [str(Mat2.from_array(R, m)) for m in r[2]],
            }
            break
    codes = np.concatenate([r[1] for r in results])
    distinct = len(np.unique(codes))
    injective = distinct == checked
    if not injective and witness is None:
        witness = {"failure": "injectivity", "distinct_images": distinct, "points": checked}

    # homomorphism property and surjectivity
    count = None
    if datum.is_elementary_abelian and R.is_square_zero:
        hom_ok, hom_method = _elementary_abelian_hom_check(datum, R)
        _, count = equivariant_hom_count(datum, R)
        if mode == "exhaustive":
            surjective = injective and equivariant and distinct == count
            surj_method = "exact: point count equals p^dim Hom_S3(P_trunc, Gamma(R)) by linear algebra"
        else:
            surjective = total == count
            surj_method = "exact count: |Gamma(R)|^ngen equals p^dim Hom_S3(P_trunc, Gamma(R)); points sampled"
    else:
        sample_pts = (points_for(bounds[0]) if bounds else np.zeros((0, ngen, 2, 2, R.dim), dtype=np.int64))
        sample_pts = sample_pts[: min(len(sample_pts), 16)] if mode == "exhaustive" else sample_pts[:16]
        hom_ok = _word_checks(engine, sample_pts, rng, words, word_length)
        hom_method = f"sampled: {words} random words of length {word_length} on {len(sample_pts)} points"
        surjective = hom_ok
        surj_method = (
            "sampled: an equivariant hom is fixed by its values on the conjugate generators, "
            "checked on random words"
        )
    if not hom_ok and witness is None:
        witness = {"failure": "homomorphism"}
    if not surjective and witness is None:
        witness = {"failure": "surjectivity", "distinct_homs": distinct, "equivariant_homs": count}
    return Step1Report(
        ring=str(R),
        datum_precision=(datum.k, datum.N),
        mode=mode,
        total_points=total,
        points_checked=checked,
        equivariance_checks=checked * ngen * len(S3),
        equivariant=equivariant,
        homomorphism=hom_ok,
        homomorphism_method=hom_method,
        injective=injective,
        distinct_homs=distinct,
        surjective=surjective,
        surjectivity_method=surj_method,
        equivariant_hom_count=count,
        witness=witness,
    )


def _elementary_abelian_hom_check(datum: TameDatum, R: RingSpec) -> tuple[bool, str]:
    """P_trunc is elementary abelian on the conjugates; a map on generators
    extends to a hom iff the images satisfy the F_p-linear relations among
    the generators and the target is abelian of exponent p."""
    p = R.p
    basis = [Mat2.from_array(R, g) for g in from_first_order_coords_arrays(R, np.eye(4 * ideal_dim(R), dtype=np.int64))]
    one = Mat2.identity(R)
    target_ok = all(g**p == one for g in basis) and all(g * h == h * g for g in basis for h in basis)
    relations = linalg.nullspace(datum.subgroup.generator_coords.T, p)
    # relations among the conjugate generators, applied to sigma-conjugates of
    # every point, hold iff they hold for the first-order images
    rel_ok = True
    if relations.shape[0]:
        rel_ok = _relations_hold_for_all_points(datum, R, relations)
    method = (
        f"exact: P_trunc elementary abelian of rank {datum.subgroup.rank} with "
        f"{relations.shape[0]} linear relations among {len(datum.conjugates)} generators; "
        f"Gamma({R}) abelian of exponent {p}"
    )
    return target_ok and rel_ok, method


def _relations_hold_for_all_points(datum: TameDatum, R: RingSpec, relations: np.ndarray) -> bool:
    # images of conjugates are sigma_R(a) A sigma_R(a)^-1, linear in A's first-order part
    W = gamma_first_order_rep(R)
    ngen = len(datum.generators)
    d = W.dim
    p = R.p
    # map (coords of point) -> (coords of all conjugate images), then apply relations
    blocks = np.zeros((len(S3) * ngen * d, ngen * d), dtype=np.int64)
    for j in range(ngen):
        for ai, a in enumerate(S3):
            r = (j * len(S3) + ai) * d
            blocks[r : r + d, j * d : (j + 1) * d] = W[a]
    rel_expanded = np.kron(relations, np.eye(d, dtype=np.int64))
    return not np.any((rel_expanded @ blocks) % p)


def _word_checks(engine: _BatchedBoston, points: np.ndarray, rng, words: int, length: int) -> bool:
    """phi(w(conjugates)) == w(phi(conjugates)) on random words."""
    if len(points) == 0:
        return True
    datum, R = engine.datum, engine.R
    S = datum.ring
    conj = datum.conjugate_arrays.reshape(-1, 2, 2, S.dim)
    conj_inv = mat_inv_arrays(S, conj)
    targets = engine.expected(points).reshape(len(points), -1, 2, 2, R.dim)
    targets_inv = mat_inv_arrays(R, targets)
    for _ in range(words):
        letters = rng.integers(0, len(conj), size=length)
        signs = rng.choice([-1, 1], size=length)
        w_src = identity_array(S)
        w_tgt = np.broadcast_to(identity_array(R), targets[:, 0].shape).copy()
        for i, e in zip(letters.tolist(), signs.tolist()):
            w_src = mat_mul_arrays(S, w_src, conj[i] if e > 0 else conj_inv[i])
            w_tgt = mat_mul_arrays(R, w_tgt, targets[:, i] if e > 0 else targets_inv[:, i])
        got = engine.evaluate(points, w_src.reshape(4, S.dim)).reshape(len(points), 2, 2, R.dim)
        if not np.array_equal(got, w_tgt):
            return False
    return True


def verify_functoriality(
    datum: TameDatum, source: RingSpec, target: RingSpec, quotient: RingHom, samples: int = 8, seed: int = 0
) -> bool:
    """phi_{pi(pt)} == pi o phi_pt on every conjugate generator, for sampled points."""
    if quotient.source != source or quotient.target != target:
        raise ParentMismatch("quotient map does not match the rings")
    rng = np.random.default_rng(seed)
    ngen = len(datum.generators)
    for _ in range(samples):
        arrs = [random_gamma_arrays(source, rng, 1)[0] for _ in range(ngen)]
        pt = BostonPoint(tuple(Mat2.from_array(source, a) for a in arrs))
        pushed = BostonPoint(tuple(m.map(quotient) for m in pt.images))
        phi = boston_point_to_hom(datum, pt)
        phi_pushed = boston_point_to_hom(datum, pushed)
        for _, _, c in datum.conjugates:
            if phi(c).map(quotient) != phi_pushed(c):
                return False
    return True


# -- tangent space -------------------------------------------------------------


@dataclass(frozen=True)
class TangentResult:
    p: int
    generators: tuple[str, ...]
    route_count: int
    route_linear_algebra: int
    gamma_order: int

    @property
    def value(self) -> int:
        return self.route_count


def _exact_log(n: int, p: int) -> int:
    e = 0
    while n % p == 0 and n > 1:
        n //= p
        e += 1
    if n != 1:
        raise CheckFailure(f"{n} is not a power of {p}")
    return e


def tangent_dim(p: int, generators: Sequence[str] = ("X", "Y")) -> TangentResult:
    """dim of the tangent space D(F_p[e]), by point counting and by
    equivariant linear algebra on the first-order part of P_trunc."""
    s3rep.check_p(p)
    datum = build_datum(p, 1, 2, generators)
    dual_numbers = RingSpec(p, 1, ("e",), 2)
    gamma_size = len(gamma_array(dual_numbers))
    route1 = _exact_log(gamma_size ** len(generators), p)
    route2 = s3rep.equivariant_hom_dim(subgroup_first_order_rep(datum), gamma_first_order_rep(dual_numbers))
    if route1 != route2:
        raise CheckFailure(
            f"tangent routes disagree: {route1} vs {route2}",
            {"route_count": route1, "route_linear_algebra": route2},
        )
    return TangentResult(p, tuple(generators), route1, route2, gamma_size)


# -- universality ---------------------------------------------------------------


@dataclass
class UniversalityReport:
    ring: str
    datum_precision: tuple[int, int]
    maximal_ideal_size: int
    assignments: int
    gamma_order: int
    deformations_via_step1: int
    counts_agree: bool
    stabilizer_size: int
    stabilizer_scalar: bool
    sampled_assignments: int
    images_equivariant: bool
    pairwise_inequivalent: bool
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return (
            self.counts_agree
            and self.stabilizer_scalar
            and self.images_equivariant
            and self.pairwise_inequivalent
        )

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        out["datum_precision"] = list(self.datum_precision)
        out["passed"] = self.passed
        return out


def universality_check(
    datum: TameDatum, R: RingSpec, samples: int = 24, seed: int = 0, budget: int | None = None
) -> UniversalityReport:
    """Assignments m_R^8 -> D(R) via the universal truncated deformation."""
    check_substitution(datum.ring, R, [R.zero] * datum.ring.nvars)
    nvars = datum.ring.nvars
    ngen = len(datum.generators)
    m_size = len(maximal_ideal_array(R, budget))
    gamma = gamma_array(R, budget)
    assignments = m_size**nvars
    deformations = len(gamma) ** ngen
    sigma = build_sigma(R)

    # strict equivalences must commute with sigma_R(S3): compute that stabilizer
    stab_mask = np.ones(len(gamma), dtype=bool)
    for a in s3rep.GENERATORS:
        s = np.broadcast_to(sigma[a].to_array(), gamma.shape)
        stab_mask &= np.all(mat_mul_arrays(R, gamma, s) == mat_mul_arrays(R, s, gamma), axis=(1, 2, 3))
    stab = gamma[stab_mask]
    scalar = bool(
        np.all(stab[:, 0, 1] == 0) and np.all(stab[:, 1, 0] == 0) and np.all(stab[:, 0, 0] == stab[:, 1, 1])
    )

    rng = np.random.default_rng(seed)
    raw = random_maximal_ideal_array(R, rng, (samples, nvars))
    raw = np.unique(raw.reshape(samples, -1), axis=0).reshape(-1, nvars, R.dim)
    engine = _BatchedBoston(datum, R)
    pts = raw.reshape(-1, ngen, 2, 2, R.dim) + identity_array(R)
    pts %= R.modulus
    got = engine.evaluate(pts)
    equivariant = bool(np.array_equal(got, engine.expected(pts)))

    # rho_i ~ rho_j iff some stabilizer element conjugates X- and Y-images
    gens = got[:, :, 0]  # (n, ngen, 2, 2, Mt)
    inequivalent = True
    witness = None
    n = len(gens)
    for i in range(n):
        for j in range(i + 1, n):
            match = np.ones(len(stab), dtype=bool)
            for g in range(ngen):
                lhs = mat_mul_arrays(R, stab, np.broadcast_to(gens[i, g], stab.shape))
                rhs = mat_mul_arrays(R, np.broadcast_to(gens[j, g], stab.shape), stab)
                match &= np.all(lhs == rhs, axis=(1, 2, 3))
            if match.any():
                inequivalent = False
                witness = {"assignments": [i, j]}
                break
        if not inequivalent:
            break
    return UniversalityReport(
        ring=str(R),
        datum_precision=(datum.k, datum.N),
        maximal_ideal_size=m_size,
        assignments=assignments,
        gamma_order=len(gamma),
        deformations_via_step1=deformations,
        counts_agree=assignments == deformations,
        stabilizer_size=len(stab),
        stabilizer_scalar=scalar,
        sampled_assignments=n,
        images_equivariant=equivariant,
        pairwise_inequivalent=inequivalent,
        witness=witness,
    )


# -- the assembled counterexample report ----------------------------------------

DEFAULT_RINGS = ("F{p}", "F{p}[e]/m^2", "Z/{p}^2", "F{p}[x]/m^3")

CITATIONS = (
    "Mazur: the deformation functor of an absolutely irreducible residual "
    "representation satisfying the finiteness condition is representable (consumed as a theorem)",
    "Boston: for tame residual representations, deformations of P x| S3 correspond naturally "
    "to S3-equivariant homomorphisms P -> Gamma(R) (consumed as a theorem)",
    "Point/hom bijection: pairs in Gamma(R)^2 correspond to S3-equivariant homs P -> Gamma(R), "
    "functorially in R (verified at truncation)",
    "Tangent space: h1 = dim H^1(G, Ad) equals dim D(F_p[e]) (verified by two routes)",
    "Hochschild-Serre with p prime to |S3|: H^2(G, Ad) reduces to Hom_S3(H^2(P, F_p)^*, Ad) "
    "(finite ingredients verified)",
    "Zubkov: closed pro-p subgroups of GL_2 over profinite rings, p odd, satisfy a nontrivial "
    "identity, so the non-abelian free pro-p group P is not one of them; "
    "hence H^2(P, F_p) != 0 and h2 >= 1 (cited, not computed)",
)


def _ring_from_template(template: str, p: int) -> RingSpec:
    from .parser import parse_ring_spec

    return parse_ring_spec(template.format(p=p)).to_ring_spec()


def counterexample_report(
    p: int,
    k: int = 1,
    N: int = 2,
    rings: Sequence[RingSpec] | None = None,
    threads: int = 1,
    seed: int = 0,
    samples: int = 200,
    exhaustive_limit: int = 10**6,
):
    """Assemble every finite check behind the dimension counterexample."""
    from . import cohomology
    from .report import Report

    s3rep.check_p(p)
    if rings is None:
        rings = [_ring_from_template(t, p) for t in DEFAULT_RINGS]
    for R in rings:
        if R.p != p:
            raise ParentMismatch(f"ring {R} is not over F_{p}")
    report = Report(
        "report counterexample",
        {
            "p": p,
            "prec": [k, N],
            "rings": [str(R) for R in rings],
            "seed": seed,
            "samples": samples,
            "exhaustive_limit": exhaustive_limit,
        },
        citations=list(CITATIONS),
    )
    res = report.results

    # (i) Ad = triv + sign + std
    std = s3rep.standard_rep(p)
    ad = s3rep.adjoint_rep(std)
    mult = s3rep.decompose(ad)
    res["ad_decomposition"] = {"triv": mult[0], "sign": mult[1], "std": mult[2]}
    report.check("Ad decomposes as triv + sign + std", mult == (1, 1, 1), None if mult == (1, 1, 1) else list(mult))
    report.check("std is irreducible mod p (p prime to 6)", s3rep.decompose(std) == (0, 0, 1))

    # (ii) tangent dimension
    try:
        t = tangent_dim(p)
        res["tangent_dim"] = {"route_count": t.route_count, "route_linear_algebra": t.route_linear_algebra}
        report.check("tangent dimension is 8 by both routes", t.route_count == t.route_linear_algebra == 8)
    except CheckFailure as exc:
        res["tangent_dim"] = exc.witness
        report.check("tangent dimension is 8 by both routes", False, exc.witness)

    # (iii) Step 1 and (iv) universality, with the datum precision raised to dominate each ring
    datum0 = build_datum(p, k, N)
    res["universal_ring"] = {
        "variables": list(datum0.ring.variables),
        "krull_dim_mod_p": datum0.ring.nvars,
        "truncation": str(datum0.ring),
    }
    report.check("truncated universal ring has 8 variables", datum0.ring.nvars == 8)
    report.check("P_trunc is S3-stable", datum0.is_s3_stable())
    step1, univ = {}, {}
    for R in rings:
        dk, dN = dominating_precision([R], k, N)
        datum = datum0 if (dk, dN) == (k, N) else build_datum(p, dk, dN)
        mode = "exhaustive" if R.gamma_order**2 <= exhaustive_limit else "sampled"
        s1 = verify_step1_bijection(datum, R, mode=mode, seed=seed, samples=samples, threads=threads)
        step1[str(R)] = s1.as_dict()
        report.check(f"Step 1 bijection over {R} ({mode})", s1.passed, s1.witness)
        u = universality_check(datum, R, seed=seed)
        univ[str(R)] = u.as_dict()
        report.check(f"universality over {R}", u.passed, u.witness)
    res["step1"] = step1
    res["universality"] = univ

    # (v) Maschke vanishing
    G = cohomology.module_from_rep(ad)
    h = [cohomology.cohomology_dim(G, i).dim for i in range(3)]
    res["cohomology_s3_ad"] = {"H0": h[0], "H1": h[1], "H2": h[2]}
    report.check("H^1(S3, Ad) = H^2(S3, Ad) = 0", h[1] == 0 and h[2] == 0)

    # (vi) finite ingredients of the h2 chain
    exact = cohomology.verify_invariants_exactness(cohomology.s3_sequences(p))
    res["invariants_exactness"] = [{"sequence": e.name, "dims": list(e.dims), "exact": e.exact} for e in exact]
    report.check("S3-invariants exact on Ad sequences", all(e.exact for e in exact))
    Q = cohomology.cyclic_group(p)
    tensor = {f"H{i}": list(cohomology.trivial_action_tensor_dims(Q, 4, i, p)) for i in range(3)}
    res["trivial_action_tensor"] = tensor
    report.check("H^i(Z/p, F_p^4) = 4 H^i(Z/p, F_p), i = 0, 1, 2", all(a == b for a, b in tensor.values()))
    occurs = {r.name: s3rep.equivariant_hom_dim(r, ad) for r in s3rep.irreducibles(p)}
    res["irreducibles_in_ad"] = occurs
    report.check("every irreducible S3-module maps nontrivially to Ad", all(v >= 1 for v in occurs.values()))
    res["h2"] = {
        "claim": "h2 >= 1",
        "status": "cited, not computed",
        "source": "Zubkov pro-p identity for GL_2",
        "chain": [
            "H^2(G, Ad) = Hom_S3(H^2(P, F_p)^*, Ad) (Hochschild-Serre, p prime to 6)",
            "H^2(P, F_p) != 0 (Zubkov, cited)",
            "every irreducible occurs in Ad, so the Hom space is nonzero (verified)",
        ],
    }

    # (vii) the inequality, conditional on the cited step
    h1 = (res["tangent_dim"] or {}).get("route_count")
    res["inequality"] = {
        "statement": f"Krull dim R/pR = 8 > h1 - h2 = {h1} - h2",
        "holds_if": "h2 >= 1",
        "status": "conditional on the cited h2 bound",
    }
    return report

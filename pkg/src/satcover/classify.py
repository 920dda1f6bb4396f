"""Isomorph-free exhaustive classification under PGammaL(3,q).

Canonical form of a point set = the minimum of its image bitmasks over the
whole collineation group.  For q <= 5 the group is materialized once as a
permutation array and the minimum is a single vectorized reduction; for
larger q a generator-driven orbit walk serves high-symmetry sets (orbit
capped).  Classes of each size are produced levelwise: extend every
canonical representative by every outside point, canonize, deduplicate.
An admissible coverage-deficit cut prunes branches that cannot reach the
target saturation level within the size budget.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bounds import length_lower_trivial, size_upper
from .geometry import Collineation, PointSet, Space, build_space
from .saturate import check_saturating, is_minimal, is_optimal

__all__ = [
    "ClassifyError", "EquivClass", "Spectrum", "group_order",
    "canonical_form", "stabilizer_order", "enumerate_classes",
    "all_subset_classes", "optimal_table", "generators",
]

FULL_GROUP_MAX_Q = 5
ORBIT_CAP = 2_000_000


class ClassifyError(ValueError):
    pass


def group_order(q: int, h: int = None) -> int:
    """|PGammaL(3,q)| = h * q^3 (q^3-1)(q^2-1)."""
    if h is None:
        from .galois import factor_prime_power
        _, h = factor_prime_power(q)
    return h * q**3 * (q**3 - 1) * (q**2 - 1)


# ---------------------------------------------------------------------------
# full-group permutation tables (q <= 5)


class _GroupTable:
    def __init__(self, space: Space):
        if space.N != 2:
            raise ClassifyError("classification implemented for planes only")
        if space.q > FULL_GROUP_MAX_Q:
            raise ClassifyError(
                f"full group table above scale for q = {space.q}")
        self.space = space
        self.perms = _pgammal_perms(space)           # (G, P) uint8
        self.order = self.perms.shape[0]
        want = group_order(space.q, space.field.h)
        if self.order != want:
            raise ClassifyError(f"group size {self.order} != {want}")
        self.lut = np.uint64(1) << np.arange(space.npoints, dtype=np.uint64)

    def image_masks(self, indices) -> np.ndarray:
        cols = self.perms[:, list(indices)]
        return np.bitwise_or.reduce(self.lut[cols], axis=1)

    def canonical(self, indices) -> int:
        return int(self.image_masks(indices).min())

    def stabilizer(self, indices, mask: int) -> int:
        return int((self.image_masks(indices) == np.uint64(mask)).sum())


_group_cache = {}


def _group_table(space: Space) -> _GroupTable:
    key = id(space)
    if key not in _group_cache:
        _group_cache[key] = _GroupTable(space)
    return _group_cache[key]


def _pgammal_perms(space: Space) -> np.ndarray:
    """Point permutations of every element of PGammaL(3,q), q <= 5."""
    f = space.field
    q = f.q
    mt = f.mul_table.astype(np.int64)
    at = f.add_table.astype(np.int64)
    neg = np.array([f.neg(a) for a in range(q)], dtype=np.int64)
    inv = f.inv_table.astype(np.int64)

    # all 3x3 matrices, normalized to first nonzero entry 1, invertible
    M = np.zeros((q**9, 9), dtype=np.int64)
    rest = np.arange(q**9, dtype=np.int64)
    for j in range(9):
        M[:, j] = rest % q
        rest //= q
    # first nonzero (in entry order) equals 1
    seen_nonzero = np.zeros(len(M), dtype=bool)
    first_ok = np.ones(len(M), dtype=bool)
    first_val = np.zeros(len(M), dtype=np.int64)
    for j in range(9):
        new = (~seen_nonzero) & (M[:, j] != 0)
        first_val[new] = M[new, j]
        seen_nonzero |= new
    keep = seen_nonzero & (first_val == 1)
    M = M[keep]

    def gf_mul(a, b):
        return mt[a, b]

    def gf_add(a, b):
        return at[a, b]

    def gf_sub(a, b):
        return at[a, neg[b]]

    a, b, c, d, e, ff_, g_, h_, i_ = (M[:, k] for k in range(9))
    det = gf_sub(gf_add(gf_add(gf_mul(a, gf_sub(gf_mul(e, i_), gf_mul(ff_, h_))),
                               gf_mul(c, gf_sub(gf_mul(d, h_), gf_mul(e, g_)))), 0),
                 gf_mul(b, gf_sub(gf_mul(d, i_), gf_mul(ff_, g_))))
    M = M[det != 0]
    if len(M) != q**3 * (q**3 - 1) * (q**2 - 1):
        raise ClassifyError("projective matrix enumeration miscounted")

    X = space.points  # (P, 3)
    P = space.npoints
    perms_list = []
    chunk = max(1, 3_000_000 // max(P, 1))
    frob_perms = []
    for e_ in range(f.h):
        fm = np.array([f.frobenius(x, e_) for x in range(q)], dtype=np.int64)
        Xe = fm[X]
        codes = Xe @ space._powers
        frob_perms.append(space._code_to_index[codes])
    for lo in range(0, len(M), chunk):
        Mc = M[lo:lo + chunk]
        rows = []
        for i in range(3):
            acc = gf_mul(Mc[:, 3 * i, None], X[None, :, 0])
            acc = gf_add(acc, gf_mul(Mc[:, 3 * i + 1, None], X[None, :, 1]))
            acc = gf_add(acc, gf_mul(Mc[:, 3 * i + 2, None], X[None, :, 2]))
            rows.append(acc)
        y0, y1, y2 = rows
        fac = np.where(y0 != 0, inv[y0], np.where(y1 != 0, inv[y1], inv[y2]))
        z0, z1, z2 = gf_mul(fac, y0), gf_mul(fac, y1), gf_mul(fac, y2)
        codes = z0 * q * q + z1 * q + z2
        perms_list.append(space._code_to_index[codes])
    mat_perms = np.vstack(perms_list)
    all_perms = [mat_perms]
    for e_ in range(1, f.h):
        all_perms.append(mat_perms[:, frob_perms[e_]])
    return np.vstack(all_perms).astype(np.uint8)


# ---------------------------------------------------------------------------
# generator-driven fallback for q in {7, 8, 9}


def generators(space: Space):
    """Point permutations of a generating set of PGammaL(3,q):
    a transvection, the coordinate cycle, diag(primitive,1,1), Frobenius."""
    f = space.field
    gens = [
        Collineation(((1, 1, 0), (0, 1, 0), (0, 0, 1))),
        Collineation(((0, 0, 1), (1, 0, 0), (0, 1, 0))),
    ]
    if f.q > 2:
        gens.append(Collineation(((f.generator, 0, 0), (0, 1, 0), (0, 0, 1))))
    if f.h > 1:
        gens.append(Collineation(Collineation.identity(3).matrix, frob=1))
    return [g.point_perm(space) for g in gens]


def _orbit_walk(space: Space, mask: int, cap: int = ORBIT_CAP):
    """BFS orbit of a set bitmask under the generators.

    Returns (orbit size, minimum mask seen).
    """
    gens = generators(space)
    seen = {mask}
    frontier = [mask]
    best = mask
    while frontier:
        new = []
        for m in frontier:
            idxs = []
            mm = m
            while mm:
                low = mm & -mm
                idxs.append(low.bit_length() - 1)
                mm ^= low
            for perm in gens:
                img = 0
                for i in idxs:
                    img |= 1 << int(perm[i])
                if img not in seen:
                    seen.add(img)
                    new.append(img)
                    if img < best:
                        best = img
                    if len(seen) > cap:
                        raise ClassifyError("orbit exceeds the tool-scale cap")
        frontier = new
    return len(seen), best


def canonical_form(space: Space, s: PointSet) -> int:
    """Minimum image bitmask of S over PGammaL(3,q); class invariant."""
    if space.q <= FULL_GROUP_MAX_Q:
        return _group_table(space).canonical(s.indices)
    return _orbit_walk(space, s.mask)[1]


def stabilizer_order(space: Space, s: PointSet) -> int:
    """Exact order of the setwise stabilizer of S in PGammaL(3,q)."""
    if space.q <= FULL_GROUP_MAX_Q:
        return _group_table(space).stabilizer(s.indices, s.mask)
    size, _ = _orbit_walk(space, s.mask)
    total = group_order(space.q, space.field.h)
    if total % size:
        raise ClassifyError("orbit size does not divide the group order")
    return total // size


# ---------------------------------------------------------------------------
# levelwise isomorph-free generation


def _prune_keep(space: Space, mask: int, size: int, mu: int, n_max: int) -> bool:
    """Admissible coverage-deficit cut.

    With m = n_max - size points still addable, a point Q outside the set
    can gain at most m*a(Q) + C(m,2) weighted coverage, a(Q) the largest
    current secant size through Q.  Every point that cannot reach mu must
    itself be swallowed by the set, so more than m hopeless points kill
    the branch.
    """
    m = n_max - size
    if m < 0:
        return False
    if size < 2:
        return True
    ind = np.zeros(space.npoints, dtype=np.int64)
    idxs = []
    mm = mask
    while mm:
        low = mm & -mm
        idxs.append(low.bit_length() - 1)
        mm ^= low
    ind[idxs] = 1
    k = ind[space.points_by_line].sum(axis=1)
    w = k * (k - 1) // 2
    cov = w[space.lines_by_point].sum(axis=1)
    amax = k[space.lines_by_point].max(axis=1)
    best = cov + m * amax + math.comb(m, 2)
    hopeless = int(((best < mu) & (ind == 0)).sum())
    return hopeless <= m


def all_subset_classes(space: Space, max_size: int, mu: int = None,
                       n_max: int = None, threads: int = 1, seed: int = None,
                       checkpoint=None, resume=None):
    """Canonical representatives of subset classes, levelwise.

    Yields (size, sorted list of canonical masks) for size = 1..max_size.
    When mu and n_max are given, branches whose coverage deficit is
    unreachable within n_max points are cut (solutions are unaffected).
    """
    if resume is not None:
        with open(resume) as fh:
            state = json.load(fh)
        if state["q"] != space.q or state["mu"] != mu or state["n_max"] != n_max:
            raise ClassifyError("checkpoint does not match this run")
        levels = {int(k): [int(x, 16) for x in v]
                  for k, v in state["levels"].items()}
        start = max(levels)
        for size in sorted(levels):
            yield size, levels[size]
        frontier = levels[start]
    else:
        levels = {1: [canonical_form(space, PointSet.from_indices(space, [0]))]}
        start = 1
        frontier = levels[1]
        yield 1, list(frontier)

    table = _group_table(space) if space.q <= FULL_GROUP_MAX_Q else None
    rng = np.random.default_rng(seed) if seed is not None else None

    def canon(mask: int) -> int:
        idxs = []
        mm = mask
        while mm:
            low = mm & -mm
            idxs.append(low.bit_length() - 1)
            mm ^= low
        if table is not None:
            return table.canonical(idxs)
        return _orbit_walk(space, mask)[1]

    for size in range(start, max_size):
        raw_children = set()
        for m in frontier:
            if mu is not None and not _prune_keep(space, m, size, mu, n_max):
                continue
            for p in range(space.npoints):
                if not (m >> p) & 1:
                    raw_children.add(m | (1 << p))
        raw_children = list(raw_children)
        if rng is not None:
            rng.shuffle(raw_children)  # scheduling only; the set below is unordered
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                canon_masks = set(ex.map(canon, raw_children))
        else:
            canon_masks = {canon(m) for m in raw_children}
        frontier = sorted(canon_masks)
        levels[size + 1] = frontier
        if checkpoint is not None:
            with open(checkpoint, "w") as fh:
                json.dump({"q": space.q, "mu": mu, "n_max": n_max,
                           "levels": {str(k): [hex(x) for x in v]
                                      for k, v in levels.items()}}, fh)
        yield size + 1, frontier


# ---------------------------------------------------------------------------
# spectra


@dataclass
class EquivClass:
    size: int
    mu: int
    stabilizer_order: int
    canonical_mask: int
    points: list            # coordinate rows of the canonical representative

    def to_dict(self):
        return {"size": self.size, "mu": self.mu,
                "stabilizer_order": self.stabilizer_order,
                "canonical_mask": hex(self.canonical_mask),
                "points": self.points}


@dataclass
class Spectrum:
    q: int
    mu: int
    predicate: str
    size_range: tuple
    counts: dict = dc_field(default_factory=dict)
    classes: list = dc_field(default_factory=list)

    def to_dict(self):
        return {"q": self.q, "mu": self.mu, "predicate": self.predicate,
                "size_range": list(self.size_range),
                "spectrum": {str(k): v for k, v in sorted(self.counts.items())},
                "classes": [c.to_dict() for c in self.classes]}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def default_size_range(q: int, mu: int):
    return (length_lower_trivial(q, mu), min(size_upper(q, mu), q * q + q))


def enumerate_classes(q: int, mu: int, predicate: str = "minimal",
                      size_range=None, prune: bool = True, threads: int = 1,
                      seed: int = None, checkpoint=None, resume=None,
                      space: Space = None) -> Spectrum:
    """Exact class counts per size of minimal or optimal (1,mu)-saturating
    sets in PG(2,q), by exhaustive isomorph-free generation."""
    if predicate not in ("minimal", "optimal"):
        raise ClassifyError("predicate must be 'minimal' or 'optimal'")
    space = space or build_space(2, q)
    lo, hi = size_range or default_size_range(q, mu)
    spec = Spectrum(q=q, mu=mu, predicate=predicate, size_range=(lo, hi))
    gen = all_subset_classes(space, hi, mu=mu if prune else None,
                             n_max=hi if prune else None, threads=threads,
                             seed=seed, checkpoint=checkpoint, resume=resume)
    for size, masks in gen:
        if size < lo:
            continue
        for mask in masks:
            s = PointSet(space, mask)
            rep = check_saturating(space, s, mu, with_minimality=False)
            if not rep.saturating:
                continue
            if predicate == "minimal":
                if not is_minimal(space, s, mu):
                    continue
            else:
                if not (rep.optimal and rep.coverage_min == mu):
                    continue
            spec.counts[size] = spec.counts.get(size, 0) + 1
            spec.classes.append(EquivClass(
                size=size, mu=mu,
                stabilizer_order=stabilizer_order(space, s),
                canonical_mask=mask,
                points=[list(space.point_coords(i)) for i in s.indices]))
    return spec


def optimal_table(q: int, max_size: int = None, threads: int = 1,
                  space: Space = None):
    """All optimal classes of every size and mu at once: list of
    (size, mu, count) plus the classes themselves, from one unpruned run."""
    space = space or build_space(2, q)
    max_size = max_size or (q * q + q)
    counts = {}
    classes = []
    for size, masks in all_subset_classes(space, max_size, threads=threads):
        for mask in masks:
            s = PointSet(space, mask)
            ok, mu = is_optimal(space, s)
            if not ok:
                continue
            counts[(size, mu)] = counts.get((size, mu), 0) + 1
            classes.append(EquivClass(
                size=size, mu=mu, stabilizer_order=stabilizer_order(space, s),
                canonical_mask=mask,
                points=[list(space.point_coords(i)) for i in s.indices]))
    return counts, classes

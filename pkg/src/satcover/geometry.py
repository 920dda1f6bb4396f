"""PG(N,q) as an indexed incidence structure: points, lines, collineations.

Points are normalized homogeneous coordinate tuples (first nonzero
coordinate 1), enumerated in lexicographic order, so indices are stable
given the field descriptor.  For planes the full line set is generated as
the orbit of the line x0=0 under a Singer cycle and then re-indexed by the
lexicographic order of the dual coordinates; for N >= 3 lines come from
pairwise spans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .galois import Field, GaloisError, field_for_order, is_prime

__all__ = [
    "Space", "PointSet", "Collineation", "GeometryError",
    "build_space", "line_through", "apply_collineation", "singer_generator",
    "write_points_file", "read_points_file", "load_pointset",
]

MAX_POINTS = 1_100_000
PAIR_TABLE_MAX_POINTS = 2400  # full pair->line table for planes up to here


class GeometryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small vector helpers over a Field (codes as ints)


def vec_add(field, u, v):
    return tuple(field.add(a, b) for a, b in zip(u, v))


def vec_scale(field, c, u):
    return tuple(field.mul(c, a) for a in u)


def normalize(field, u):
    """Scale so the first nonzero coordinate is 1; None for the zero vector."""
    for a in u:
        if a:
            inv = field.inv(a)
            return tuple(field.mul(inv, x) for x in u)
    return None


def cross(field, u, v):
    """Dual coordinates of the line through two plane points."""
    m, s = field.mul, field.sub
    return (s(m(u[1], v[2]), m(u[2], v[1])),
            s(m(u[2], v[0]), m(u[0], v[2])),
            s(m(u[0], v[1]), m(u[1], v[0])))


# ---------------------------------------------------------------------------


class Space:
    """Immutable PG(N,q) with canonical point/line enumerations."""

    def __init__(self, N: int, field: Field):
        if N < 2:
            raise GeometryError("projective dimension must be >= 2")
        q = field.q
        npoints = (q ** (N + 1) - 1) // (q - 1)
        if npoints > MAX_POINTS:
            raise GeometryError(
                f"PG({N},{q}) has {npoints} points, above the tool scale")
        self.N = N
        self.q = q
        self.field = field
        self.npoints = npoints
        self._build_points()
        if N == 2:
            self._build_lines_plane()
        else:
            self._build_lines_general()
        self.nlines = len(self.points_by_line)
        self._line_masks = None
        self._pair_table = None

    # -- points ---------------------------------------------------------------

    def _build_points(self):
        N, q = self.N, self.q
        blocks = []
        for lead in range(N, -1, -1):
            free = N - lead
            block = np.zeros((q**free, N + 1), dtype=np.int64)
            block[:, lead] = 1
            rest = np.arange(q**free, dtype=np.int64)
            for j in range(free):
                block[:, N - j] = rest % q
                rest = rest // q
            blocks.append(block)
        pts = np.vstack(blocks)
        self.points = pts
        powers = q ** np.arange(N, -1, -1, dtype=np.int64)
        self.point_codes = pts @ powers
        code_to_index = np.full(q ** (N + 1), -1, dtype=np.int64)
        code_to_index[self.point_codes] = np.arange(self.npoints)
        self._code_to_index = code_to_index
        self._powers = powers

    def point_index(self, coords) -> int:
        v = normalize(self.field, tuple(coords))
        if v is None:
            raise GeometryError("zero vector is not a projective point")
        idx = int(self._code_to_index[int(np.dot(v, self._powers))])
        return idx

    def point_coords(self, index: int):
        return tuple(int(x) for x in self.points[index])

    def affine_piece(self, i: int) -> range:
        """Indices of the points with x_0=...=x_{i-1}=0, x_i != 0.

        The piece for i < N is a copy of AG(N-i, q); the piece for i = N is
        the single point (0,...,0,1).  Pieces partition the space.
        """
        if not 0 <= i <= self.N:
            raise GeometryError("piece index out of range")
        q = self.q
        sizes = [q ** (self.N - j) for j in range(self.N, i - 1, -1)]
        start = sum(sizes[:-1])
        return range(start, start + sizes[-1])

    # -- lines, plane case via a Singer orbit ---------------------------------

    def _normalize_rows(self, rows):
        """Vectorized projective normalization of an (n, N+1) code array."""
        f = self.field
        rows = rows.copy()
        done = np.zeros(len(rows), dtype=bool)
        for j in range(rows.shape[1]):
            col = rows[:, j]
            sel = (~done) & (col != 0)
            if np.any(sel):
                factors = f.inv_table[col[sel]].astype(np.int64)
                for k in range(rows.shape[1]):
                    rows[sel, k] = f.mul_table[factors, rows[sel, k]]
                done |= sel
        if not done.all():
            raise GeometryError("zero row while normalizing")
        return rows

    def _build_lines_plane(self):
        q = self.q
        n = self.npoints
        g = singer_generator(q)
        gperm = g.point_perm(self)
        first = np.arange(q + 1, dtype=np.int64)  # the line x0 = 0
        lines = np.empty((n, q + 1), dtype=np.int64)
        cur = first
        for k in range(n):
            lines[k] = cur
            cur = gperm[cur]
        if not np.array_equal(np.sort(cur), first):
            raise GeometryError("Singer cycle failed to close on lines")
        lines.sort(axis=1)
        # dual coordinates from the two lowest points of each line
        f = self.field
        u = self.points[lines[:, 0]]
        v = self.points[lines[:, 1]]
        mt, at = f.mul_table, f.add_table

        def vmul(a, b):
            return mt[a, b].astype(np.int64)

        def vsub(a, b):
            neg = np.array([f.neg(x) for x in range(q)], dtype=np.int64)
            return at[a, neg[b]].astype(np.int64)

        duals = np.stack([
            vsub(vmul(u[:, 1], v[:, 2]), vmul(u[:, 2], v[:, 1])),
            vsub(vmul(u[:, 2], v[:, 0]), vmul(u[:, 0], v[:, 2])),
            vsub(vmul(u[:, 0], v[:, 1]), vmul(u[:, 1], v[:, 0])),
        ], axis=1)
        duals = self._normalize_rows(duals)
        dual_codes = duals @ self._powers
        order = np.argsort(dual_codes)
        if len(np.unique(dual_codes)) != n:
            raise GeometryError("duplicate lines in Singer orbit")
        self.points_by_line = lines[order]
        self.line_duals = duals[order]
        self._line_dual_codes = dual_codes[order]
        self._invert_incidence()

    def _build_lines_general(self):
        f = self.field
        n = self.npoints
        seen_pairs = np.zeros((n, n), dtype=bool)
        pair_table = np.full((n, n), -1, dtype=np.int64)
        lines = []
        for i in range(n):
            vi = self.point_coords(i)
            for j in range(i + 1, n):
                if seen_pairs[i, j]:
                    continue
                vj = self.point_coords(j)
                pts = [i]
                for lam in range(self.q):
                    w = vec_add(f, vec_scale(f, lam, vi), vj)
                    pts.append(self.point_index(w))
                pts.sort()
                idx = len(lines)
                lines.append(pts)
                for a in range(len(pts)):
                    for b in range(a + 1, len(pts)):
                        seen_pairs[pts[a], pts[b]] = True
                        pair_table[pts[a], pts[b]] = idx
                        pair_table[pts[b], pts[a]] = idx
        self.points_by_line = np.array(lines, dtype=np.int64)
        self.line_duals = None
        self._line_dual_codes = None
        self._pair_table = pair_table
        self._invert_incidence()

    def _invert_incidence(self):
        nl, ppl = self.points_by_line.shape
        flat = self.points_by_line.ravel()
        line_ids = np.repeat(np.arange(nl, dtype=np.int64), ppl)
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.npoints)
        if not np.all(counts == counts[0]):
            raise GeometryError("incidence is not point-regular")
        self.lines_by_point = line_ids[order].reshape(self.npoints, counts[0])

    # -- lookup ----------------------------------------------------------------

    @property
    def line_masks(self):
        """Per-line bitmask of member points (python ints)."""
        if self._line_masks is None:
            masks = []
            for row in self.points_by_line:
                m = 0
                for p in row:
                    m |= 1 << int(p)
                masks.append(m)
            self._line_masks = masks
        return self._line_masks

    @property
    def pair_to_line(self):
        if self._pair_table is None:
            if self.npoints > PAIR_TABLE_MAX_POINTS:
                raise GeometryError("pair table above tool scale; use line_through")
            table = np.full((self.npoints, self.npoints), -1, dtype=np.int64)
            for idx, row in enumerate(self.points_by_line):
                pts = row
                for a in range(len(pts)):
                    table[pts[a], pts[a + 1:]] = idx
                    table[pts[a + 1:], pts[a]] = idx
            self._pair_table = table
        return self._pair_table

    def line_through(self, p: int, r: int) -> int:
        if p == r:
            raise GeometryError("line through a repeated point is undefined")
        if self._pair_table is not None:
            return int(self._pair_table[p, r])
        if self.N == 2:
            d = cross(self.field, self.point_coords(p), self.point_coords(r))
            d = normalize(self.field, d)
            code = int(np.dot(d, self._powers))
            idx = int(np.searchsorted(self._line_dual_codes, code))
            return idx
        return int(self.pair_to_line[p, r])

    def line_points(self, line: int):
        return tuple(int(x) for x in self.points_by_line[line])

    def descriptor(self) -> str:
        return f"PG({self.N},{self.q}); {self.field.descriptor()}"

    def __repr__(self):
        return f"Space(PG({self.N},{self.q}))"


@lru_cache(maxsize=32)
def build_space(N: int, q: int) -> Space:
    """Build (and cache) PG(N,q); deterministic given the field modulus."""
    return Space(N, field_for_order(q))


def line_through(space: Space, p: int, r: int) -> int:
    return space.line_through(p, r)


# ---------------------------------------------------------------------------
# point sets


class PointSet:
    """A frozen subset of a Space's points, stored as a bit vector."""

    __slots__ = ("space", "mask", "_indices", "_indicator")

    def __init__(self, space: Space, mask: int):
        self.space = space
        self.mask = mask
        self._indices = None
        self._indicator = None

    @classmethod
    def from_indices(cls, space: Space, indices) -> "PointSet":
        m = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < space.npoints:
                raise GeometryError(f"point index {i} out of range")
            m |= 1 << i
        return cls(space, m)

    @classmethod
    def from_coords(cls, space: Space, coord_rows) -> "PointSet":
        return cls.from_indices(space, (space.point_index(c) for c in coord_rows))

    @property
    def indices(self):
        if self._indices is None:
            m = self.mask
            out = []
            while m:
                low = m & -m
                out.append(low.bit_length() - 1)
                m ^= low
            self._indices = tuple(out)
        return self._indices

    @property
    def indicator(self):
        if self._indicator is None:
            arr = np.zeros(self.space.npoints, dtype=np.int64)
            arr[list(self.indices)] = 1
            self._indicator = arr
        return self._indicator

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, i: int):
        return bool(self.mask >> int(i) & 1)

    def __iter__(self):
        return iter(self.indices)

    def add(self, i: int) -> "PointSet":
        return PointSet(self.space, self.mask | (1 << int(i)))

    def remove(self, i: int) -> "PointSet":
        return PointSet(self.space, self.mask & ~(1 << int(i)))

    def union(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, self.mask | other.mask)

    def intersection(self, other: "PointSet") -> "PointSet":
        return PointSet(self.space, self.mask & other.mask)

    def complement(self) -> "PointSet":
        full = (1 << self.space.npoints) - 1
        return PointSet(self.space, full & ~self.mask)

    def isdisjoint(self, other: "PointSet") -> bool:
        return not (self.mask & other.mask)

    def coord_rows(self):
        return [self.space.point_coords(i) for i in self.indices]

    def __eq__(self, other):
        return (isinstance(other, PointSet)
                and self.space is other.space and self.mask == other.mask)

    def __hash__(self):
        return hash((id(self.space), self.mask))

    def __repr__(self):
        return f"PointSet({len(self)} points in PG({self.space.N},{self.space.q}))"


# ---------------------------------------------------------------------------
# collineations


@dataclass(frozen=True)
class Collineation:
    """Element of PGammaL(N+1,q): invertible matrix plus Frobenius power.

    Acts on column coordinate vectors as x -> M . x^(p^e), Frobenius first.
    """

    matrix: tuple  # rows of element codes
    frob: int = 0

    def dim(self):
        return len(self.matrix)

    def apply_coords(self, field: Field, coords):
        x = [field.frobenius(c, self.frob) if self.frob else c for c in coords]
        out = []
        for row in self.matrix:
            acc = 0
            for a, b in zip(row, x):
                acc = field.add(acc, field.mul(a, b))
            out.append(acc)
        return tuple(out)

    def point_perm(self, space: Space) -> np.ndarray:
        """The induced permutation of point indices, as an index array."""
        if self.dim() != space.N + 1:
            raise GeometryError("collineation dimension mismatch")
        f = space.field
        X = space.points
        if self.frob:
            frob_map = np.array([f.frobenius(a, self.frob) for a in range(f.q)],
                                dtype=np.int64)
            X = frob_map[X]
        mt, at = f.mul_table, f.add_table
        d = space.N + 1
        rows = []
        for i in range(d):
            acc = mt[self.matrix[i][0], X[:, 0]].astype(np.int64)
            for j in range(1, d):
                acc = at[acc, mt[self.matrix[i][j], X[:, j]]].astype(np.int64)
            rows.append(acc)
        Y = np.stack(rows, axis=1)
        Y = space._normalize_rows(Y)
        codes = Y @ space._powers
        return space._code_to_index[codes]

    def compose(self, other: "Collineation", field: Field) -> "Collineation":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        e1, e2 = self.frob, other.frob
        d = self.dim()
        # self(other(x)) = M1 . sigma^e1(M2 . sigma^e2(x))
        m2f = [[field.frobenius(other.matrix[i][j], e1) for j in range(d)]
               for i in range(d)]
        prod = [[0] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                acc = 0
                for k in range(d):
                    acc = field.add(acc, field.mul(self.matrix[i][k], m2f[k][j]))
                prod[i][j] = acc
        return Collineation(tuple(tuple(r) for r in prod), (e1 + e2) % field.h)

    @staticmethod
    def identity(d: int) -> "Collineation":
        return Collineation(tuple(tuple(1 if i == j else 0 for j in range(d))
                                  for i in range(d)))


def apply_collineation(space: Space, g: Collineation, s: PointSet) -> PointSet:
    perm = g.point_perm(space)
    return PointSet.from_indices(space, perm[list(s.indices)])


# ---------------------------------------------------------------------------
# Singer cycle


def _cubic_is_primitive(field: Field, c0, c1, c2, prime_factors):
    """Is x primitive modulo the monic cubic x^3 + c2 x^2 + c1 x + c0?"""
    q = field.q
    # irreducible <=> no root, for degree 3
    for t in range(q):
        v = field.add(field.add(field.pow(t, 3), field.mul(c2, field.pow(t, 2))),
                      field.add(field.mul(c1, t), c0))
        if v == 0:
            return False
    mod = (c0, c1, c2)

    def mul3(a, b):
        res = [0] * 5
        for i in range(3):
            if a[i]:
                for j in range(3):
                    res[i + j] = field.add(res[i + j], field.mul(a[i], b[j]))
        for i in (4, 3):
            c = res[i]
            if c:
                res[i] = 0
                for j in range(3):
                    res[i - 3 + j] = field.sub(res[i - 3 + j], field.mul(c, mod[j]))
        return tuple(res[:3])

    def xpow(e):
        result = (1, 0, 0)
        base = (0, 1, 0)
        while e:
            if e & 1:
                result = mul3(result, base)
            base = mul3(base, base)
            e >>= 1
        return result

    order = q**3 - 1
    for r in prime_factors:
        if xpow(order // r) == (1, 0, 0):
            return False
    return True


@lru_cache(maxsize=64)
def singer_generator(q: int) -> Collineation:
    """Collineation of order q^2+q+1 acting regularly on points and lines.

    Companion matrix of the least primitive monic cubic over GF(q); the
    polynomial choice is deterministic so orbit labelings are stable.
    """
    field = field_for_order(q)
    order = q**3 - 1
    factors = []
    m = order
    d = 2
    while d * d <= m:
        if m % d == 0:
            factors.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        factors.append(m)
    for code in range(q**3):
        c0 = code % q
        c1 = (code // q) % q
        c2 = code // (q * q)
        if _cubic_is_primitive(field, c0, c1, c2, factors):
            n = field.neg
            mat = ((0, 0, n(c0)),
                   (1, 0, n(c1)),
                   (0, 1, n(c2)))
            return Collineation(mat)
    raise GeometryError(f"no primitive cubic over GF({q})")


# ---------------------------------------------------------------------------
# point-set files: line 1 "PG N q", then one normalized tuple per line


def write_points_file(path, space: Space, s: PointSet):
    with open(path, "w") as fh:
        fh.write(f"PG {space.N} {space.q}\n")
        for i in s.indices:
            fh.write(",".join(str(c) for c in space.point_coords(i)) + "\n")


def read_points_file(path):
    """Parse a point-set file; returns (N, q, coordinate rows)."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[0] != "PG":
            raise GeometryError(f"{path}: malformed header")
        N, q = int(header[1]), int(header[2])
        rows = []
        for ln in fh:
            ln = ln.strip()
            if not ln:
                continue
            rows.append(tuple(int(x) for x in ln.split(",")))
        for r in rows:
            if len(r) != N + 1:
                raise GeometryError(f"{path}: tuple of wrong length {r}")
    return N, q, rows


def load_pointset(path):
    """Read a point-set file and return (space, PointSet)."""
    N, q, rows = read_points_file(path)
    space = build_space(N, q)
    return space, PointSet.from_coords(space, rows)

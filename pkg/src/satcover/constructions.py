"""Named point-set constructions with self-verified claims.

Every family builds its set from explicit coordinates, then runs the
verification engine and compares against the closed-form size, coverage
minimum, optimality and density it is supposed to have.  A mismatch is a
construction bug and raises by default instead of passing silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional

from .geometry import GeometryError, PointSet, Space, build_space
from .saturate import (CoverageVector, SaturationReport, b3_count,
                       check_saturating, is_minimal, is_optimal)

__all__ = [
    "ConstructionResult", "ConstructionError", "construct", "catalog_names",
    "oval", "hyperoval", "denniston_arc", "hermitian", "baer",
    "elliptic_quadric", "complement_construction", "line_plus_two_points",
    "two_chords_config", "aligned_config", "concurrent_lines",
    "pencil_partial", "triangle", "complement_vertexless_triangle",
    "disjoint_copies", "even_q_set",
]


class ConstructionError(ValueError):
    pass


@dataclass
class Claims:
    n: int
    mu: int
    kind: str                    # "OS" or "MCF"
    mu_exact: bool = True        # claimed mu is the exact minimum coverage
    gamma: Optional[Fraction] = None
    minimal: Optional[bool] = None
    mode: str = "weighted"
    pmcf: Optional[bool] = None  # optimal and no collinear triple
    size_check: Optional[Callable[[int], Optional[str]]] = None
    extra: list = dc_field(default_factory=list)  # (label, fn(space, ps) -> err|None)


@dataclass
class ConstructionResult:
    name: str
    parameters: dict
    space: Space
    point_set: PointSet
    claimed_n: int
    claimed_mu: int
    claimed_kind: str
    claimed_gamma: Optional[Fraction]
    claimed_minimal: Optional[bool]
    counting_mode: str
    verified: bool
    discrepancies: list
    report: SaturationReport

    def to_dict(self):
        return {
            "name": self.name,
            "parameters": self.parameters,
            "space": self.space.descriptor(),
            "n": len(self.point_set),
            "claimed_n": self.claimed_n,
            "claimed_mu": self.claimed_mu,
            "claimed_kind": self.claimed_kind,
            "claimed_gamma": None if self.claimed_gamma is None else
                [self.claimed_gamma.numerator, self.claimed_gamma.denominator],
            "claimed_minimal": self.claimed_minimal,
            "counting_mode": self.counting_mode,
            "verified": self.verified,
            "discrepancies": self.discrepancies,
            "report": self.report.to_dict(),
        }


def _require(cond, msg):
    if not cond:
        raise ConstructionError(msg)


def _is_square(q):
    r = math.isqrt(q)
    return r * r == q


def _two_power(q):
    return q > 1 and q & (q - 1) == 0


# ---------------------------------------------------------------------------
# plane conics and friends


def _conic_points(space):
    """(1,t,t^2) for all t, plus (0,0,1): the conic x1^2 = x0 x2."""
    f = space.field
    rows = [(1, t, f.mul(t, t)) for t in range(space.q)]
    rows.append((0, 0, 1))
    return rows


def oval(q, space=None):
    _require(q % 2 == 1, "oval family needs odd q")
    space = space or build_space(2, q)
    ps = PointSet.from_coords(space, _conic_points(space))
    return space, ps, Claims(
        n=q + 1, mu=(q - 1) // 2, kind="MCF",
        gamma=Fraction(q + 1, q), pmcf=None)


def hyperoval(q, space=None):
    _require(_two_power(q), "hyperoval family needs even q")
    space = space or build_space(2, q)
    rows = _conic_points(space) + [(0, 1, 0)]  # nucleus
    ps = PointSet.from_coords(space, rows)
    return space, ps, Claims(
        n=q + 2, mu=(q + 2) // 2, kind="OS", gamma=Fraction(1), pmcf=True)


def denniston_arc(q, s, space=None):
    """Maximal (n,s)-arc: {(1,x,y) : a x^2 + x y + y^2 in H}.

    a is the least element of trace 1 (so the form is anisotropic) and H
    the span of the first log2(s) power-basis elements, i.e. codes < s.
    """
    _require(_two_power(q), "denniston family needs even q")
    _require(_two_power(s) and 2 <= s <= q, "s must be a power of 2 in [2, q]")
    space = space or build_space(2, q)
    f = space.field
    a = next(c for c in range(q) if f.trace_to_prime(c) == 1)
    rows = []
    for x in range(q):
        for y in range(q):
            v = f.add(f.add(f.mul(a, f.mul(x, x)), f.mul(x, y)), f.mul(y, y))
            if v < s:
                rows.append((1, x, y))
    ps = PointSet.from_coords(space, rows)
    n = (s - 1) * q + s

    def zero_or_s(space, ps):
        k = ps.indicator[space.points_by_line].sum(axis=1)
        bad = set(int(v) for v in k) - {0, s}
        return None if not bad else f"line meets arc in {sorted(bad)} points"

    return space, ps, Claims(
        n=n, mu=(s - 1) * n // 2, kind="OS", gamma=Fraction(1),
        pmcf=(s == 2), extra=[("0-or-s secants", zero_or_s)])


def hermitian(q, space=None):
    _require(_is_square(q), "hermitian family needs square q")
    space = space or build_space(2, q)
    f = space.field
    r = math.isqrt(q)
    rows = []
    for i in range(space.npoints):
        x = space.point_coords(i)
        v = 0
        for c in x:
            v = f.add(v, f.pow(c, r + 1))
        if v == 0:
            rows.append(i)
    ps = PointSet.from_indices(space, rows)
    return space, ps, Claims(
        n=q * r + 1, mu=(q * q - q) // 2, kind="OS", gamma=Fraction(1), pmcf=False)


def baer(q, space=None):
    _require(_is_square(q), "baer family needs square q")
    space = space or build_space(2, q)
    f = space.field
    r = math.isqrt(q)
    sub = {a for a in range(q) if f.pow(a, r) == a}
    rows = [i for i in range(space.npoints)
            if all(c in sub for c in space.point_coords(i))]
    ps = PointSet.from_indices(space, rows)
    return space, ps, Claims(
        n=q + r + 1, mu=(q + r) // 2, kind="OS", gamma=Fraction(1), pmcf=False)


def elliptic_quadric(q, space=None):
    """x0 x1 + f(x2,x3) = 0 in PG(3,q) with f an irreducible binary form."""
    space = space or build_space(3, q)
    f = space.field
    ab = None
    for code in range(q * q):
        a, b = code % q, code // q
        if all(f.add(f.add(f.mul(z, z), f.mul(a, z)), b) != 0 for z in range(q)):
            ab = (a, b)
            break
    _require(ab is not None, "no irreducible quadratic found")
    a, b = ab
    rows = []
    for i in range(space.npoints):
        x = space.point_coords(i)
        quad = f.add(f.add(f.mul(x[2], x[2]), f.mul(a, f.mul(x[2], x[3]))),
                     f.mul(b, f.mul(x[3], x[3])))
        if f.add(f.mul(x[0], x[1]), quad) == 0:
            rows.append(i)
    ps = PointSet.from_indices(space, rows)
    return space, ps, Claims(
        n=q * q + 1, mu=(q * q - q) // 2, kind="OS", gamma=Fraction(1), pmcf=True)


# ---------------------------------------------------------------------------
# complements


def complement_construction(space, base: PointSet, base_name="set"):
    """Complement of a set whose per-point secant distribution is constant.

    Through each point of the base the number of i-secants must be a fixed
    x_i; the complement is then optimal with mu = sum x_i * C(q+1-i, 2).
    """
    q = space.q
    ind = base.indicator
    k = ind[space.points_by_line].sum(axis=1)
    dist = None
    for p in base.indices:
        through = k[space.lines_by_point[p]]
        profile = tuple(sorted(int(v) for v in through))
        if dist is None:
            dist = profile
        elif dist != profile:
            raise ConstructionError(
                f"{base_name}: secant distribution is not constant over its points")
    if dist is None:
        raise ConstructionError("complement of an empty set is not supported")
    mu = sum(math.comb(q + 1 - i, 2) for i in dist)
    ps = base.complement()
    claims = Claims(n=space.npoints - len(base), mu=mu, kind="OS",
                    gamma=Fraction(1))
    return space, ps, claims


def _complement_family(q, base, base_params=None, space=None):
    space = space or build_space(2, q)
    if isinstance(base, str):
        builder = CATALOG[base]
        space2, base_ps, _ = builder(q, space=space, **(base_params or {}))
        name = base
    else:
        base_ps, name = base, "set"
    return complement_construction(space, base_ps, name)


# ---------------------------------------------------------------------------
# small minimal (1,2)-saturating families


def line_plus_two_points(q, space=None):
    space = space or build_space(2, q)
    line0 = set(space.line_points(0))
    extra = [i for i in range(space.npoints) if i not in line0][:2]
    ps = PointSet.from_indices(space, sorted(line0) + extra)
    return space, ps, Claims(
        n=q + 3, mu=2, kind="MCF", mu_exact=False, minimal=True)


def two_chords_config(q, space=None):
    """(line minus two points) plus a chord pair R,S / R,T through them."""
    _require(q >= 4, "needs q >= 4")
    space = space or build_space(2, q)
    ell = [space.point_index(c) for c in [(0, 1, y) for y in range(q)] + [(0, 0, 1)]]
    P = space.point_index((0, 0, 1))
    Q = space.point_index((0, 1, 0))
    rest = [i for i in ell if i not in (P, Q)]
    R = space.point_index((1, 0, 0))
    S = space.point_index((1, 0, 1))   # P,R,S on x1 = 0
    T = space.point_index((1, 1, 0))   # Q,R,T on x2 = 0
    ps = PointSet.from_indices(space, rest + [R, S, T])
    return space, ps, Claims(
        n=q + 2, mu=2, kind="MCF", mu_exact=False, minimal=True)


def aligned_config(q, space=None):
    """(line minus two points) plus three collinear points through one of them."""
    _require(q >= 4, "needs q >= 4")
    space = space or build_space(2, q)
    ell = [space.point_index(c) for c in [(0, 1, y) for y in range(q)] + [(0, 0, 1)]]
    P = space.point_index((0, 0, 1))
    Q = space.point_index((0, 1, 0))
    rest = [i for i in ell if i not in (P, Q)]
    # P,R,S,T on the line x1 = 0
    R = space.point_index((1, 0, 0))
    S = space.point_index((1, 0, 1))
    T = space.point_index((1, 0, 2))
    ps = PointSet.from_indices(space, rest + [R, S, T])
    return space, ps, Claims(
        n=q + 2, mu=2, kind="MCF", mu_exact=False, minimal=True)


# ---------------------------------------------------------------------------
# unions of lines


def concurrent_lines(q, L, space=None):
    _require(2 <= L <= q, "need 2 <= L <= q")
    space = space or build_space(2, q)
    vertex = 0
    mask = 0
    for ln in space.lines_by_point[vertex][:L]:
        for p in space.line_points(int(ln)):
            mask |= 1 << p
    ps = PointSet(space, mask)
    return space, ps, Claims(
        n=1 + L * q, mu=math.comb(L, 2) * q, kind="OS", gamma=Fraction(1))


def pencil_partial(q, b, space=None):
    _require(1 <= b <= q - 1, "need 1 <= b <= q-1")
    space = space or build_space(2, q)
    vertex = 0
    lines = [int(x) for x in space.lines_by_point[vertex]]
    mask = 0
    for ln in lines[:q]:
        for p in space.line_points(ln):
            mask |= 1 << p
    last = [p for p in space.line_points(lines[q]) if p != vertex]
    for p in last[:b]:
        mask |= 1 << p
    ps = PointSet(space, mask)
    return space, ps, Claims(
        n=1 + q * q + b, mu=math.comb(b + 1, 2) + math.comb(q, 2) * q,
        kind="OS", gamma=Fraction(1))


def _triangle_sides(space):
    return [space.line_through(space.point_index((0, 1, 0)), space.point_index((0, 0, 1))),
            space.line_through(space.point_index((1, 0, 0)), space.point_index((0, 0, 1))),
            space.line_through(space.point_index((1, 0, 0)), space.point_index((0, 1, 0)))]


def triangle(q, space=None):
    space = space or build_space(2, q)
    mask = 0
    for ln in _triangle_sides(space):
        for p in space.line_points(ln):
            mask |= 1 << p
    ps = PointSet(space, mask)
    return space, ps, Claims(
        n=3 * q, mu=3 * (q - 1), kind="OS", gamma=Fraction(1))


def complement_vertexless_triangle(q, space=None):
    space = space or build_space(2, q)
    verts = {space.point_index(c) for c in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}
    mask = 0
    for ln in _triangle_sides(space):
        for p in space.line_points(ln):
            if p not in verts:
                mask |= 1 << p
    ps = PointSet(space, mask).complement()
    mu = 1 + math.comb(q, 2) + (q - 1) * math.comb(q - 2, 2)
    return space, ps, Claims(
        n=q * q - 2 * q + 4, mu=mu, kind="OS", gamma=Fraction(1))


def disjoint_copies(space, copies):
    """Union of pairwise disjoint 1-saturating sets; mu >= number of copies."""
    _require(len(copies) >= 1, "need at least one copy")
    union_mask = 0
    for i, c in enumerate(copies):
        if union_mask & c.mask:
            raise ConstructionError(f"copy {i} overlaps an earlier copy")
        rep = check_saturating(space, c, 1, with_minimality=False)
        if not rep.saturating:
            raise ConstructionError(f"copy {i} is not 1-saturating")
        union_mask |= c.mask
    ps = PointSet(space, union_mask)
    return space, ps, Claims(
        n=len(ps), mu=len(copies), kind="MCF", mu_exact=False)


# ---------------------------------------------------------------------------
# q even, distinct-secant family


def _ceil_s(q):
    """Smallest s with 2s-1 >= sqrt(4q-7), i.e. ceil((1+sqrt(4q-7))/2)."""
    s = 1
    while (2 * s - 1) ** 2 < 4 * q - 7:
        s += 1
    return s


def even_q_set(N, q, space=None):
    """Small set covering every external point by >= (q-2)/2 distinct secants.

    Piecewise over the coordinate flats pi_i (each an AG(N-i,q)): even
    dimensions get the graph cap of the squaring map, odd dimensions s
    stacked copies of the one-lower cap, dimension one s collinear points
    (including the direction uncovered by the cap chords), plus the final
    point.  For q=16 the smaller square-order variant is used.
    """
    _require(q % 2 == 0 and q > 2, "needs even q > 2")
    _require(N >= 2, "needs N >= 2")
    space = space or build_space(N, q)
    f = space.field
    square_variant = q == 16
    s = math.isqrt(q) if square_variant else _ceil_s(q)
    rows = [tuple([0] * N + [1])]
    for i in range(N):
        j = N - i  # affine dimension of the piece
        prefix = tuple([0] * i + [1])
        if j == 1:
            rows += [prefix + (y,) for y in range(s)]
        elif j == 2:
            rows += [prefix + (x, f.mul(x, x)) for x in range(q)]
        elif j == 3:
            rows += [prefix + (x, f.mul(x, x), a)
                     for a in range(s) for x in range(q)]
        else:
            rows += [prefix + c for c in _big_field_cap(f, j)]
    ps = PointSet.from_coords(space, rows)
    mu = (q - 2) // 2

    if square_variant:
        def size_check(n, N=N, q=q):
            r = math.isqrt(q)
            want = (r ** (N + 1) - 1) // (r - 1)
            return None if n == want else f"size {n} != {want}"
    else:
        def size_check(n, N=N, q=q, s=s):
            # n <= 1 + s * sum_{j=0..N-1} q^(j/2), compared exactly by
            # splitting integer and sqrt(q)-multiples
            A = sum(q ** (j // 2) for j in range(0, N, 2))
            B = sum(q ** ((j - 1) // 2) for j in range(1, N, 2))
            lhs = n - 1 - s * A
            if lhs <= 0 or lhs * lhs <= s * s * B * B * q:
                return None
            return f"size {n} above the bound 1 + {s}*(A + B*sqrt(q))"

    return space, ps, Claims(
        n=len(ps), mu=mu, kind="MCF", mu_exact=False, mode="distinct",
        size_check=size_check)


def _big_field_cap(field, j):
    """Graph cap of squaring over GF(q^(j/2)), written in GF(q) coordinates."""
    if j % 2:
        raise ConstructionError("pieces of odd dimension > 3 are above tool scale")
    m = j // 2
    from .galois import make_field
    big = make_field(field.p, field.h * m)
    # basis 1, g, ..., g^(m-1) of the big field over the small one via the
    # subfield embedding: small-field codes are identified by Frobenius fixing
    sub = sorted(a for a in range(big.q) if big.pow(a, field.q) == a)
    sub_index = {a: i for i, a in enumerate(sub)}
    g = big.generator
    basis = [big.pow(g, k) for k in range(m)]
    # decomposition table over the basis 1, g, ..., g^(m-1)
    decomp = {}
    combos = [()]
    for _ in range(m):
        combos = [c + (a,) for c in combos for a in sub]
    for c in combos:
        e = 0
        for ck, bk in zip(c, basis):
            e = big.add(e, big.mul(ck, bk))
        decomp[e] = tuple(sub_index[x] for x in c)
    if len(decomp) != big.q:
        raise ConstructionError("subfield basis failed to span")
    return [decomp[x] + decomp[big.mul(x, x)] for x in range(big.q)]


# ---------------------------------------------------------------------------
# dispatcher


CATALOG = {
    "oval": oval,
    "hyperoval": hyperoval,
    "denniston_arc": denniston_arc,
    "hermitian": hermitian,
    "baer": baer,
    "elliptic_quadric": elliptic_quadric,
    "complement": _complement_family,
    "line_plus_two_points": line_plus_two_points,
    "two_chords_config": two_chords_config,
    "aligned_config": aligned_config,
    "concurrent_lines": concurrent_lines,
    "pencil_partial": pencil_partial,
    "triangle": triangle,
    "complement_vertexless_triangle": complement_vertexless_triangle,
    "even_q_set": even_q_set,
}


def catalog_names():
    return sorted(CATALOG)


def construct(name, q, params=None, strict=True):
    """Build a catalog family and verify every claim it carries.

    With strict=True (default) a verification mismatch raises; otherwise
    the result records the discrepancies and verified=False.
    """
    if name not in CATALOG:
        raise ConstructionError(f"unknown family {name!r}; see catalog_names()")
    params = dict(params or {})
    builder = CATALOG[name]
    if name == "even_q_set":
        N = params.pop("N", 2)
        space, ps, claims = builder(N, q, **params)
        params = {"N": N, **params}
    else:
        space, ps, claims = builder(q, **params)
    return _verify(name, params, space, ps, claims, strict)


def _verify(name, params, space, ps, claims: Claims, strict):
    disc = []
    if len(ps) != claims.n:
        disc.append(f"size {len(ps)} != claimed {claims.n}")
    report = check_saturating(space, ps, claims.mu, mode=claims.mode,
                              with_minimality=False)
    if not report.saturating:
        disc.append(f"not (1,{claims.mu})-saturating: "
                    f"m1={report.m1} m2={report.m2} m3={report.m3} "
                    f"min={report.coverage_min}")
    if claims.mu_exact and report.coverage_min != claims.mu:
        disc.append(f"minimum coverage {report.coverage_min} != claimed {claims.mu}")
    if claims.kind == "OS":
        ok, mu_opt = is_optimal(space, ps)
        if not ok:
            disc.append("claimed optimal but coverage is not constant")
        elif mu_opt != claims.mu:
            disc.append(f"optimal with mu={mu_opt}, claimed {claims.mu}")
    if claims.gamma is not None and report.saturating and report.gamma != claims.gamma:
        disc.append(f"gamma {report.gamma} != claimed {claims.gamma}")
    if claims.minimal and report.saturating:
        if not is_minimal(space, ps, claims.mu, claims.mode):
            disc.append("claimed minimal but a point can be removed")
    if claims.pmcf is not None and report.saturating:
        actually = report.optimal and b3_count(space, ps) == 0
        if actually != claims.pmcf:
            disc.append(f"triple-free optimality {actually} != claimed {claims.pmcf}")
    if claims.size_check is not None:
        err = claims.size_check(len(ps))
        if err:
            disc.append(err)
    for label, fn in claims.extra:
        err = fn(space, ps)
        if err:
            disc.append(f"{label}: {err}")
    result = ConstructionResult(
        name=name, parameters=params, space=space, point_set=ps,
        claimed_n=claims.n, claimed_mu=claims.mu, claimed_kind=claims.kind,
        claimed_gamma=claims.gamma, claimed_minimal=claims.minimal,
        counting_mode=claims.mode, verified=not disc, discrepancies=disc,
        report=report)
    if strict and disc:
        raise ConstructionError(f"{name}(q={space.q}, {params}): " + "; ".join(disc))
    return result

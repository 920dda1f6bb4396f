"""Cyclic partitions of PG(2,q) and block-double-circulant weight formulas.

A Singer cycle g orders the points as g^0(B), g^1(B), ...; the subgroup of
index t (t | q^2+q+1) then partitions points and lines into t orbits of
size d = (q^2+q+1)/t by exponent residue.  The incidence matrix in this
ordering is block double-circulant and a single weight vector
w = (|l0 ∩ P_0|, ..., |l0 ∩ P_{t-1}|) drives the coverage arithmetic of
every union of consecutive point orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import PointSet, Space, build_space, singer_generator

__all__ = ["SingerPartition", "BdcEvaluation", "singer_partition",
           "bdc_evaluate", "orbit_union_set", "SingerError"]


class SingerError(ValueError):
    pass


@dataclass
class SingerPartition:
    q: int
    t: int
    d: int
    space: Space
    point_orbits: list          # t arrays of point indices, orbit v
    line_orbits: list           # t arrays of line indices
    weight_vector: tuple        # w_j = |l0 ∩ P_j| for the base line l0

    def evaluate(self, m: int) -> "BdcEvaluation":
        return bdc_evaluate(self.weight_vector, m, d=self.d)

    def orbit_of_point(self, p: int) -> int:
        return int(self._point_orbit_id[p])


@dataclass
class BdcEvaluation:
    m: int
    set_size: int               # m*d; None when d was not supplied
    n_values: dict              # v -> N_v for m <= v <= t-1
    mu: int
    gamma: Fraction

    def gamma_4dp(self) -> str:
        return f"{float(self.gamma):.4f}"


def singer_partition(q: int, t: int, space: Space = None) -> SingerPartition:
    """Point/line orbit partition under the index-t Singer subgroup.

    Orbit v collects g^k(base) for k = v (mod t), where the base point and
    base line are the lexicographically least ones; so consecutive orbits
    are images of each other under g and the incidence matrix is block
    double-circulant in this labeling.
    """
    n = q * q + q + 1
    if n % t:
        raise SingerError(f"t = {t} does not divide q^2+q+1 = {n}")
    d = n // t
    space = space or build_space(2, q)
    g = singer_generator(q)
    gperm = g.point_perm(space)

    point_orbit_id = np.full(space.npoints, -1, dtype=np.int64)
    point_orbits = [[] for _ in range(t)]
    x = 0  # least point
    for k in range(n):
        point_orbits[k % t].append(x)
        point_orbit_id[x] = k % t
        x = int(gperm[x])
    if x != 0:
        raise SingerError("Singer cycle failed to close on points")

    # line orbit of a line = orbit label walked on any member pair's line;
    # walk the line cycle the same way starting from line 0
    line_orbit_id = np.full(space.nlines, -1, dtype=np.int64)
    line_orbits = [[] for _ in range(t)]
    ln = 0
    cur = np.array(space.line_points(0), dtype=np.int64)
    for k in range(n):
        idx = space.line_through(int(cur[0]), int(cur[1]))
        line_orbits[k % t].append(idx)
        line_orbit_id[idx] = k % t
        cur = gperm[cur]
    if line_orbit_id.min() < 0:
        raise SingerError("Singer cycle failed to close on lines")

    base_line = line_orbits[0][0]
    w = [0] * t
    for p in space.line_points(base_line):
        w[int(point_orbit_id[p])] += 1
    part = SingerPartition(q=q, t=t, d=d, space=space,
                           point_orbits=[np.array(o) for o in point_orbits],
                           line_orbits=[np.array(o) for o in line_orbits],
                           weight_vector=tuple(w))
    part._point_orbit_id = point_orbit_id
    if sum(w) != q + 1:
        raise SingerError(f"weight vector {w} does not sum to q+1")
    return part


def bdc_evaluate(w, m: int, d: int = None) -> BdcEvaluation:
    """Coverage numbers N_v, their minimum mu, and the exact density for the
    union of the first m point orbits, all straight from the weight vector.

    N_v = sum_u w[t-u+v] * C(w_u^(m), 2) with w_u^(m) = sum_{j<m} w[t-u+j],
    indices mod t; gamma = (sum_{v>=m} N_v) / (mu * (t-m)).
    """
    t = len(w)
    if not 1 <= m <= t - 1:
        raise SingerError(f"m = {m} out of range 1..{t - 1}")
    wm = [sum(w[(t - u + j) % t] for j in range(m)) for u in range(t)]
    n_values = {}
    for v in range(m, t):
        n_values[v] = sum(w[(t - u + v) % t] * math.comb(wm[u], 2)
                          for u in range(t))
    mu = min(n_values.values())
    if mu <= 0:
        gamma = None
    else:
        gamma = Fraction(sum(n_values.values()), mu * (t - m))
    return BdcEvaluation(m=m, set_size=None if d is None else m * d,
                         n_values=n_values, mu=mu, gamma=gamma)


def orbit_union_set(partition: SingerPartition, m: int) -> PointSet:
    """Union of the first m point orbits as a PointSet."""
    if not 1 <= m <= partition.t - 1:
        raise SingerError(f"m = {m} out of range 1..{partition.t - 1}")
    idx = np.concatenate(partition.point_orbits[:m])
    return PointSet.from_indices(partition.space, idx)

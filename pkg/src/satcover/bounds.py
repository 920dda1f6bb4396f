"""Closed-form size bounds for minimal (1,mu)-saturating sets in PG(2,q).

All integer bounds are computed with exact integer arithmetic (isqrt-based
ceilings); only the probabilistic bound touches floats, since it involves
a logarithm.  Preconditions are echoed in the report so a consumer cannot
misapply a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

__all__ = [
    "BoundReport", "BoundError", "mu_max", "size_upper",
    "length_lower_trivial", "length_upper_probabilistic", "baer_upper",
    "secant_lower", "bound_report",
]


class BoundError(ValueError):
    pass


def mu_max(q: int) -> int:
    """Largest mu any set in PG(2,q) can saturate: (q+1)*C(q,2)."""
    return (q + 1) * math.comb(q, 2)


def size_upper(q: int, mu: int) -> int:
    """Upper bound on the size of a minimal (1,mu)-saturating set."""
    if mu < 1:
        raise BoundError("mu must be positive")
    if mu > mu_max(q):
        raise BoundError(f"mu = {mu} exceeds mu_max(q) = {mu_max(q)}")
    if mu <= q + 2:
        return q + mu + 1
    return min(q + mu, q * q + q)


def _ceil_sqrt(n: int) -> int:
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def length_lower_trivial(q: int, mu: int) -> int:
    """ceil(sqrt(2*mu*q)), exact."""
    return _ceil_sqrt(2 * mu * q)


def probabilistic_applicable(q: int, mu: int):
    """The bound needs mu < 121*q*log(q); the log base is not pinned down,
    so applicability is reported under both natural log and log10."""
    return {
        "ln": mu < 121 * q * math.log(q),
        "log10": mu < 121 * q * math.log10(q),
    }


def length_upper_probabilistic(q: int, mu: int) -> int:
    """Largest integer strictly below 66*sqrt(mu*q*ln(q)).

    Raises when the precondition fails under the natural-log reading.
    """
    appl = probabilistic_applicable(q, mu)
    if not appl["ln"]:
        raise BoundError(
            f"probabilistic bound needs mu < 121*q*ln(q) = {121*q*math.log(q):.1f}")
    x = 66.0 * math.sqrt(mu * q * math.log(q))
    return math.ceil(x) - 1


def baer_upper(q: int, mu: int) -> int:
    """mu*(3*sqrt(q) - 1); square q only."""
    r = math.isqrt(q)
    if r * r != q:
        raise BoundError("Baer bound needs square q")
    return mu * (3 * r - 1)


def _ceil_half_odd_sqrt(r: int, disc: int) -> int:
    """Least integer k with k >= r + 1/2 + sqrt(disc)/2, i.e. the least k
    with 2(k-r)-1 >= sqrt(disc), exactly."""
    m = (1 + math.isqrt(disc)) // 2 + 1  # start near the answer, adjust down/up
    while m >= 1 and (2 * m - 1) ** 2 >= disc:
        m -= 1
    m += 1
    return r + m


def secant_lower(q: int, mu: int, r: int, s: int) -> int:
    """Size lower bound for a (1,mu)-saturating set having an r-secant and an
    s-secant, s >= r >= 2: ceiling of the smaller of the two radicals."""
    if s < r or r < 2:
        raise BoundError("need s >= r >= 2")
    if s > q + 1:
        raise BoundError("a secant has at most q+1 points")
    d1 = 4 * ((s - r) * (s + r - 2) + 2 * mu * (q - r + 1)) + 5
    d2 = 4 * ((s - r) * (s + r - 1) + 2 * mu * (q - r)) + 1
    bounds = [_ceil_half_odd_sqrt(r, d1)]
    if d2 >= 0:  # the second counting argument is vacuous for a full line
        bounds.append(_ceil_half_odd_sqrt(r, d2))
    return min(bounds)


@dataclass
class BoundReport:
    q: int
    mu: int
    mu_max: int
    size_upper: Optional[int]
    length_lower_trivial: int
    probabilistic_preconditions: dict
    length_upper_probabilistic: Optional[int]
    baer_upper: Optional[int]
    secant_lower: dict = dc_field(default_factory=dict)  # (r,s) -> bound

    def to_dict(self):
        return {
            "q": self.q,
            "mu": self.mu,
            "mu_max": self.mu_max,
            "size_upper": self.size_upper,
            "length_lower_trivial": self.length_lower_trivial,
            "probabilistic_preconditions": self.probabilistic_preconditions,
            "length_upper_probabilistic": self.length_upper_probabilistic,
            "baer_upper": self.baer_upper,
            "baer_precondition": "q must be a square",
            "secant_lower": {f"{r},{s}": v
                             for (r, s), v in sorted(self.secant_lower.items())},
        }


def bound_report(q: int, mu: int, secant_pairs=()) -> BoundReport:
    """All bounds at once, with inapplicable ones left as None."""
    appl = probabilistic_applicable(q, mu)
    prob = length_upper_probabilistic(q, mu) if appl["ln"] else None
    rq = math.isqrt(q)
    return BoundReport(
        q=q, mu=mu, mu_max=mu_max(q),
        size_upper=size_upper(q, mu) if mu <= mu_max(q) else None,
        length_lower_trivial=length_lower_trivial(q, mu),
        probabilistic_preconditions=appl,
        length_upper_probabilistic=prob,
        baer_upper=baer_upper(q, mu) if rq * rq == q else None,
        secant_lower={(r, s): secant_lower(q, mu, r, s)
                      for (r, s) in secant_pairs},
    )

"""Exact arithmetic for the finite fields GF(p^h), q = p^h <= 2**16.

Elements are integer codes in [0, q): the code of sum(c_i * x^i) is
sum(c_i * p^i), so prime-subfield elements are the codes 0..p-1 and the
code order is the lexicographic order of coefficient tuples (low degree
first).  The modulus is the irreducible monic polynomial of degree h
with the least such code, which makes every derived enumeration (points,
lines, group elements) reproducible bit for bit.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["Field", "FieldElement", "make_field", "GaloisError"]

MAX_Q = 1 << 16
# Full q x q add/mul tables are kept below this order; beyond it only the
# log/antilog tables are stored and addition falls back to digit arithmetic.
FULL_TABLE_MAX_Q = 4096


class GaloisError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), coefficients low-degree first


def _poly_mul_mod(a, b, mod, p):
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _poly_rem(res, mod, p)


def _poly_rem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    lead_inv = pow(mod[-1], p - 2, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            f = (c * lead_inv) % p
            for j, mj in enumerate(mod):
                a[i - dm + j] = (a[i - dm + j] - f * mj) % p
    a = a[:dm]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_pow_x_mod(e, mod, p):
    """x**e reduced mod the polynomial `mod`."""
    result = [1]
    base = _poly_rem([0, 1], mod, p)
    while e:
        if e & 1:
            result = _poly_mul_mod(result, base, mod, p)
        base = _poly_mul_mod(base, base, mod, p)
        e >>= 1
    return result


def _poly_mod_general(a, b, p):
    a = list(a)
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
    db = len(b) - 1
    inv = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = (a[-1] * inv) % p
        off = len(a) - 1 - db
        for j in range(db + 1):
            a[off + j] = (a[off + j] - f * b[j]) % p
        a.pop()
        while len(a) > 1 and a[-1] == 0:
            a.pop()
    if not a:
        a = [0]
    return a


def _poly_gcd(a, b, p):
    a, b = list(a), list(b)
    while any(b):
        a, b = b, _poly_mod_general(a, b, p)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _is_irreducible(mod, p):
    """Rabin test for a monic polynomial over GF(p), low-degree-first coeffs."""
    h = len(mod) - 1
    if h == 1:
        return True
    if mod[0] == 0:  # divisible by x
        return False
    # x^(p^h) == x (mod f)
    xq = _poly_pow_x_mod(p**h, mod, p)
    x = _poly_rem([0, 1], mod, p)
    if xq != x:
        return False
    # gcd(x^(p^(h/r)) - x, f) == 1 for every prime r dividing h
    for r in {r for r in range(2, h + 1) if h % r == 0 and is_prime(r)}:
        g = _poly_pow_x_mod(p ** (h // r), mod, p)
        g = g + [0] * (h - len(g))
        diff = [(gi - xi) % p for gi, xi in zip(g, x + [0] * (h - len(x)))]
        while len(diff) > 1 and diff[-1] == 0:
            diff.pop()
        if not any(diff):
            return False
        d = _poly_gcd(list(mod), diff, p)
        if len(d) > 1:
            return False
    return True


def _least_irreducible(p, h):
    """Monic degree-h irreducible over GF(p) with least coefficient code."""
    if h == 1:
        return (0, 1)
    for code in range(p**h):
        coeffs = []
        c = code
        for _ in range(h):
            coeffs.append(c % p)
            c //= p
        mod = coeffs + [1]
        if _is_irreducible(mod, p):
            return tuple(mod)
    raise GaloisError(f"no irreducible polynomial of degree {h} over GF({p})")


# ---------------------------------------------------------------------------


class Field:
    """Immutable arithmetic context for GF(p^h); safe to share across workers.

    All operations act on integer element codes.  Multiplication runs on
    log/antilog tables; addition is XOR in characteristic 2, mod-p for prime
    fields, and a table (or digit arithmetic) otherwise.
    """

    def __init__(self, p: int, h: int):
        if not is_prime(p):
            raise GaloisError(f"p = {p} is not prime")
        if h < 1:
            raise GaloisError(f"extension degree must be >= 1, got {h}")
        q = p**h
        if q > MAX_Q:
            raise GaloisError(f"field order {q} exceeds the 2^16 tool scale")
        self.p = p
        self.h = h
        self.q = q
        self.modulus = _least_irreducible(p, h)
        self._build_tables()

    # -- construction -------------------------------------------------------

    def _code_to_poly(self, a):
        coeffs = []
        for _ in range(self.h):
            coeffs.append(a % self.p)
            a //= self.p
        return coeffs

    def _poly_to_code(self, coeffs):
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + c
        return code

    def _raw_mul(self, a, b):
        pa, pb = self._code_to_poly(a), self._code_to_poly(b)
        return self._poly_to_code(_poly_mul_mod(pa, pb, list(self.modulus), self.p))

    def _build_tables(self):
        p, q = self.p, self.q
        # digitwise addition, vectorized over codes
        codes = np.arange(q, dtype=np.int64)
        digits = np.empty((self.h, q), dtype=np.int64)
        c = codes.copy()
        for i in range(self.h):
            digits[i] = c % p
            c //= p
        if q <= FULL_TABLE_MAX_Q:
            add = np.zeros((q, q), dtype=np.int64)
            for i in range(self.h):
                add += ((digits[i][:, None] + digits[i][None, :]) % p) * p**i
            self.add_table = add.astype(np.uint16)
        else:
            self.add_table = None

        # multiplicative structure: find a generator, build exp/log
        order = q - 1
        factors = {f for f in range(2, order + 1) if order % f == 0 and is_prime(f)}

        def elt_pow(a, e):
            r = 1
            while e:
                if e & 1:
                    r = self._raw_mul(r, a)
                a = self._raw_mul(a, a)
                e >>= 1
            return r

        gen = None
        for cand in range(2, q):
            if all(elt_pow(cand, order // f) != 1 for f in factors) or order == 1:
                gen = cand
                break
        if order == 1:
            gen = 1
        if gen is None:
            raise GaloisError("no multiplicative generator found")
        self.generator = gen

        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for k in range(order):
            exp[k] = x
            exp[k + order] = x
            log[x] = k
            x = self._raw_mul(x, gen)
        self._exp = exp
        self._log = log

        if q <= FULL_TABLE_MAX_Q:
            mul = np.zeros((q, q), dtype=np.int64)
            nz = codes[1:]
            mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % order]
            self.mul_table = mul.astype(np.uint16)
            inv = np.zeros(q, dtype=np.int64)
            inv[1:] = exp[(order - log[nz]) % order]
            self.inv_table = inv.astype(np.uint16)
        else:
            self.mul_table = None
            self.inv_table = None

    # -- scalar operations on codes ------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.h == 1:
            return (a + b) % self.p
        if self.add_table is not None:
            return int(self.add_table[a, b])
        return self._poly_to_code(
            [(x + y) % self.p
             for x, y in zip(self._code_to_poly(a), self._code_to_poly(b))])

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return self._poly_to_code([(-x) % self.p for x in self._code_to_poly(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by 0")
        if a == 0:
            return 0
        return int(self._exp[(self._log[a] - self._log[b]) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        return int(self._exp[(self._log[a] * e) % (self.q - 1)])

    def sqrt(self, a: int) -> int:
        """Unique square root; defined for q even (squaring is bijective)."""
        if self.p != 2:
            raise GaloisError("sqrt is only defined here for even q")
        return self.pow(a, self.q // 2)

    def frobenius(self, a: int, e: int = 1) -> int:
        return self.pow(a, self.p**e) if a else 0

    def trace_to_prime(self, a: int) -> int:
        """a + a^p + ... + a^(p^(h-1)); lands in the prime subfield 0..p-1."""
        t = 0
        x = a
        for _ in range(self.h):
            t = self.add(t, x)
            x = self.frobenius(x)
        return t

    # -- misc -----------------------------------------------------------------

    def elements(self):
        return range(self.q)

    def nonzero(self):
        return range(1, self.q)

    def el(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def descriptor(self) -> str:
        return f"GF({self.p}^{self.h}); modulus={list(self.modulus)}"

    def __repr__(self):
        return f"Field(GF({self.q}))"

    def __eq__(self, other):
        return (isinstance(other, Field)
                and (self.p, self.h, self.modulus) == (other.p, other.h, other.modulus))

    def __hash__(self):
        return hash((self.p, self.h, self.modulus))


class FieldElement:
    """A field element bound to its Field; convenience operator wrapper."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value: int):
        if not 0 <= value < field.q:
            raise GaloisError(f"element code {value} out of range for GF({field.q})")
        self.field = field
        self.value = value

    def _check(self, other):
        if isinstance(other, int):
            other = FieldElement(self.field, other)
        if other.field != self.field:
            raise GaloisError("field mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.div(self.value, other.value))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def sqrt(self):
        return FieldElement(self.field, self.field.sqrt(self.value))

    def trace(self):
        return FieldElement(self.field, self.field.trace_to_prime(self.value))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other
        return (isinstance(other, FieldElement)
                and self.field == other.field and self.value == other.value)

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __repr__(self):
        return f"FieldElement({self.value} in GF({self.field.q}))"


@lru_cache(maxsize=None)
def make_field(p: int, h: int) -> Field:
    """Build (and cache) GF(p^h) with the deterministic least modulus."""
    return Field(p, h)


@lru_cache(maxsize=None)
def factor_prime_power(q: int):
    """q -> (p, h) with q = p^h, p prime; raises if q is not a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                break
            h = 0
            m = q
            while m % p == 0:
                m //= p
                h += 1
            if m == 1:
                return p, h
            break
    raise GaloisError(f"{q} is not a prime power")


def field_for_order(q: int) -> Field:
    p, h = factor_prime_power(q)
    return make_field(p, h)

"""Arithmetic in small finite fields F_q, q = p^f.

Elements are integer codes in [0, q): the coefficient of t^j in the residue
polynomial is the j-th base-p digit of the code.  For q <= 256 the field
carries full q x q add/sub/mul tables (uint8) so that numpy arrays of codes
can be combined by fancy indexing; larger fields fall back to log/exp tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ORDER = 1 << 16
TABLE_ORDER = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod_rem(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m (constant-first lists)."""
    a = _poly_trim(list(a))
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
        _poly_trim(a)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    f = len(poly) - 1
    if f < 1 or poly[-1] != 1:
        return False
    for d in range(1, f // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_divmod_rem(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree f, constant-first."""
    for low in itertools.product(range(p), repeat=f):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError(f"no irreducible polynomial of degree {f} over F_{p}")


class FieldSpec:
    """The field F_q with q = p^f, built by :func:`field_make`.

    Scalar and array arguments are both accepted by the code-level methods
    (``add``, ``mul``, ...); arrays must hold integer codes.
    """

    def __init__(self, p: int, f: int, modulus: tuple[int, ...]):
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = modulus
        q = self.q
        self.zero = 0
        self.one = 1

        codes = np.arange(q, dtype=np.int64)
        self._digits = np.stack([(codes // p**j) % p for j in range(f)], axis=1)
        self._weights = np.array([p**j for j in range(f)], dtype=np.int64)

        # exp/log tables from a primitive element found by brute force
        exp = None
        for g in range(1, q):
            seq = [1]
            for _ in range(q - 2):
                seq.append(self._slow_mul(seq[-1], g))
            if len(set(seq)) == q - 1:
                exp = seq
                break
        assert exp is not None
        self.generator = exp[1] if q > 2 else 1
        self.exp = np.array(exp + exp, dtype=np.int64)
        self.log = np.zeros(q, dtype=np.int64)
        self.log[np.array(exp)] = np.arange(q - 1)

        self.neg_t = self._digits_to_code((-self._digits) % p)
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = self.exp[(q - 1 - self.log[1:]) % (q - 1)]
        self.inv_t = inv

        self.has_tables = q <= TABLE_ORDER
        if self.has_tables:
            dt = np.uint8
            a = codes[:, None]
            b = codes[None, :]
            self.add_t = self._add_codes(a, b).astype(dt)
            self.sub_t = self._add_codes(a, self.neg_t[b]).astype(dt)
            self.mul_t = self._mul_codes(a, b).astype(dt)
            self.neg_t = self.neg_t.astype(dt)
            self.inv_t = self.inv_t.astype(dt)
            self.sq_t = np.diagonal(self.mul_t).copy()
            # plain-list copies for scalar loops (numpy scalar indexing is slow)
            self.add_l = self.add_t.tolist()
            self.sub_l = self.sub_t.tolist()
            self.mul_l = self.mul_t.tolist()
            self.inv_l = self.inv_t.tolist()

    # -- construction helpers -------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        p, f = self.p, self.f
        da = [(a // p**j) % p for j in range(f)]
        db = [(b // p**j) % p for j in range(f)]
        r = _poly_divmod_rem(_poly_mul(da, db, p), list(self.modulus), p) if f > 1 else [
            (da[0] * db[0]) % p
        ]
        return sum(c * p**j for j, c in enumerate(r))

    def _digits_to_code(self, digits: np.ndarray) -> np.ndarray:
        return (digits * self._weights).sum(axis=-1)

    def _add_codes(self, a, b):
        if self.f == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        da = self._digits[np.asarray(a)]
        db = self._digits[np.asarray(b)]
        return self._digits_to_code((da + db) % self.p)

    def _mul_codes(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.f == 1:
            return (a * b) % self.p
        la = self.log[a]
        lb = self.log[b]
        out = self.exp[la + lb]
        return np.where((a == 0) | (b == 0), 0, out)

    # -- code-level arithmetic (ints or arrays) -------------------------------

    def add(self, a, b):
        if self.has_tables:
            return self.add_t[a, b]
        return self._add_codes(a, b)

    def sub(self, a, b):
        if self.has_tables:
            return self.sub_t[a, b]
        return self._add_codes(a, self.neg_t[b])

    def mul(self, a, b):
        if self.has_tables:
            return self.mul_t[a, b]
        return self._mul_codes(a, b)

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        return self.inv_t[a]

    def pow(self, a: int, n: int) -> int:
        a = int(a)
        if a == 0:
            return 0 if n > 0 else 1
        return int(self.exp[(int(self.log[a]) * n) % (self.q - 1)])

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    def element(self, code: int) -> FieldElement:
        return FieldElement(self, code)

    def squares(self) -> set[int]:
        return {int(self.mul(x, x)) for x in self.elements()}

    # -- identity -------------------------------------------------------------

    def _key(self):
        return (self.p, self.f, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldSpec(p={self.p}, f={self.f}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def field_make(p: int, f: int = 1) -> FieldSpec:
    """Build F_{p^f} with the smallest irreducible modulus (cached per (p, f))."""
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if f < 1:
        raise ValueError(f"extension degree must be >= 1, got {f}")
    if p**f > MAX_ORDER:
        raise ValueError(f"q = {p}^{f} exceeds the size cap {MAX_ORDER}")
    modulus = smallest_irreducible(p, f) if f > 1 else (0, 1)
    return FieldSpec(p, f, modulus)


def field_from_order(q: int) -> FieldSpec:
    for p in range(2, q + 1):
        if q % p == 0:
            f, r = 0, q
            while r % p == 0:
                r //= p
                f += 1
            if r != 1:
                raise ValueError(f"{q} is not a prime power")
            return field_make(p, f)
    raise ValueError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.field.q:
            raise ValueError(f"code {self.code} out of range for F_{self.field.q}")

    def _check(self, other: FieldElement) -> None:
        if self.field != other.field:
            raise ValueError("operands belong to different fields")

    def __add__(self, other: FieldElement) -> FieldElement:
        return field_add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        return field_add(self, field_neg(other))

    def __mul__(self, other: FieldElement) -> FieldElement:
        return field_mul(self, other)

    def __neg__(self) -> FieldElement:
        return field_neg(self)

    def __pow__(self, n: int) -> FieldElement:
        return FieldElement(self.field, self.field.pow(self.code, n))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self):
        return f"F{self.field.q}({self.code})"


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.field, int(a.field.add(a.code, b.code)))


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement(a.field, int(a.field.mul(a.code, b.code)))


def field_neg(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, int(a.field.neg(a.code)))


def field_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, int(a.field.inv(a.code)))


def is_square(a: FieldElement) -> bool:
    F = a.field
    if F.p == 2 or a.code == 0:
        return True
    return F.pow(a.code, (F.q - 1) // 2) == 1


def absolute_trace(a: FieldElement) -> int:
    """a + a^p + ... + a^(p^(f-1)), returned as an integer in [0, p)."""
    F = a.field
    acc = 0
    x = a.code
    for _ in range(F.f):
        acc = int(F.add(acc, x))
        x = F.pow(x, F.p)
    assert acc < F.p, "absolute trace left the prime field"
    return acc


def nonsquare(F: FieldSpec) -> int:
    """Smallest nonsquare code of an odd-order field."""
    if F.p == 2:
        raise ValueError("every element of a field of even order is a square")
    return next(a for a in F.nonzero() if not is_square(F.element(a)))


def trace_one_element(F: FieldSpec) -> int:
    """Smallest code with absolute trace 1 (exists in every field)."""
    return next(a for a in F.nonzero() if absolute_trace(F.element(a)) == 1)

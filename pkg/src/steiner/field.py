"""Arithmetic in GF(p^n) with log/antilog tables.

Elements are plain integers: the base-p little-endian encoding of the
coefficient vector of the residue polynomial, so code 0 is zero, code 1 is
one and code p is the class of ``x`` (for n > 1).  Fields up to
``TABLE_LIMIT`` elements carry full log/antilog tables; larger ones fall back
to polynomial arithmetic with square-and-multiply powering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    MixedFields,
    NonPrimeCharacteristic,
    NonPrimitivePolynomial,
    OrderDoesNotDivide,
    SizeBudgetExceeded,
)

TABLE_LIMIT = 1 << 20


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


def prime_factors(m: int) -> list[int]:
    """Distinct prime divisors of ``m`` in increasing order."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    return out


def divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


# -- polynomials over Z_p, little-endian coefficient lists -------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    n = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) > n:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - n
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _polymulmod(a: list[int], b: list[int], f: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _polymod(out, f, p)


def _polypowmod(a: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _polymod(list(a), f, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        e >>= 1
    return result


def _polysub(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _trim([c % p for c in out])


def _polygcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _polymod(a, b, p)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over Z_p."""
    n = len(poly) - 1
    if n == 1:
        return True
    x = [0, 1]
    for r in prime_factors(n):
        h = _polysub(_polypowmod(x, p ** (n // r), poly, p), x, p)
        if len(_polygcd(list(poly), h, p)) != 1:
            return False
    return not _polysub(_polypowmod(x, p**n, poly, p), x, p)


# -- public types -------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    p: int
    n: int
    poly: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(int(c) for c in self.poly))

    @property
    def q(self) -> int:
        return self.p**self.n

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "poly": list(self.poly)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(int(data["p"]), int(data["n"]), tuple(data["poly"]))

    def __str__(self) -> str:
        terms = []
        for i in range(self.n, -1, -1):
            c = self.poly[i]
            if c == 0:
                continue
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i else f"{c}{'' if i == 0 else '*' + mono}")
        return f"GF({self.p}^{self.n}):{'+'.join(terms)}"


class Element(NamedTuple):
    """A code tagged with its field, for callers that mix fields."""

    field: "FieldTable"
    code: int


class FieldTable:
    """A concrete GF(p^n).  Immutable after construction."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = spec.p
        self.n = spec.n
        self.q = spec.q
        self.order = self.q - 1
        self.tabled = self.q <= TABLE_LIMIT
        # monic reduction: x^n = -(poly[0] + ... + poly[n-1] x^(n-1))
        self._reduce = [(-c) % self.p for c in spec.poly[:-1]]
        if self.p == 2:
            self._poly_int = sum(c << i for i, c in enumerate(spec.poly))
        self.x = (-spec.poly[0]) % self.p if self.n == 1 else self.p
        self.log: list[int] = []
        self.antilog: list[int] = []
        self._zech: list[int] = []
        if self.tabled:
            self._build_tables()

    def _build_tables(self) -> None:
        q, order = self.q, self.order
        antilog = [0] * (2 * order)
        log = [-1] * q
        c = 1
        for e in range(order):
            if log[c] != -1:
                raise NonPrimitivePolynomial(
                    f"{self.spec}: x has multiplicative order {e} < {order}")
            antilog[e] = c
            log[c] = e
            c = self._mul_by_x(c)
        if c != 1:
            raise NonPrimitivePolynomial(f"{self.spec}: x^{order} != 1")
        antilog[order:] = antilog[:order]
        self.antilog = antilog
        self.log = log
        if self.p != 2:
            # zech[e] = log(1 + x^e), -1 when 1 + x^e = 0
            add = self._add_digits
            self._zech = [log[add(1, antilog[e])] for e in range(order)]

    # -- encoding --------------------------------------------------------

    def digits(self, code: int) -> list[int]:
        out = []
        for _ in range(self.n):
            code, d = divmod(code, self.p)
            out.append(d)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        code = 0
        for d in reversed(digits):
            code = code * self.p + (d % self.p)
        return code

    def _mul_by_x(self, code: int) -> int:
        if self.p == 2:
            code <<= 1
            if code >> self.n:
                code ^= self._poly_int
            return code
        d = self.digits(code)
        top = d[-1]
        d = [0] + d[:-1]
        if top:
            d = [(a + top * r) % self.p for a, r in zip(d, self._reduce)]
        return self.from_digits(d)

    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        out, place = 0, 1
        while a or b:
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + db) % p) * place
            place *= p
        return out

    # -- arithmetic ------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if not self.tabled:
            return self._add_digits(a, b)
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self.log[a], self.log[b]
        z = self._zech[(lb - la) % self.order]
        return 0 if z < 0 else self.antilog[la + z]

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        return self.from_digits([-d for d in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.tabled:
            return self.antilog[self.log[a] + self.log[b]]
        return self._polymul(a, b)

    def _polymul(self, a: int, b: int) -> int:
        if self.p == 2:
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> self.n:
                    a ^= self._poly_int
            return r
        prod = _polymulmod(self.digits(a), self.digits(b), self.spec.poly, self.p)
        return self.from_digits(prod)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 1 if e == 0 else 0
        if self.tabled:
            return self.antilog[(self.log[a] * e) % self.order]
        e %= self.order
        result, base = 1, a
        while e:
            if e & 1:
                result = self._polymul(result, base)
            base = self._polymul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, -1)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def exp(self, e: int) -> int:
        """x**e."""
        if self.tabled:
            return self.antilog[e % self.order]
        return self.pow(self.x, e)

    def log_of(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        if not self.tabled:
            raise SizeBudgetExceeded(f"no log table for q={self.q}")
        return self.log[a]

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        order = self.order
        for r in prime_factors(self.order):
            while order % r == 0 and self.pow(a, order // r) == 1:
                order //= r
        return order

    def sum(self, codes: Iterable[int]) -> int:
        if self.p == 2:
            return reduce(lambda s, c: s ^ c, codes, 0)
        return reduce(self.add, codes, 0)

    def elements(self) -> range:
        return range(self.q)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTable) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"FieldTable({self.spec})"


def build_field(spec: FieldSpec) -> FieldTable:
    """Construct GF(p^n) after checking that ``spec.poly`` is primitive."""
    p, n, poly = spec.p, spec.n, spec.poly
    if not is_prime(p):
        raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
    if n < 1 or len(poly) != n + 1 or poly[-1] % p != 1:
        raise NonPrimitivePolynomial(f"{poly} is not a monic polynomial of degree {n}")
    if any(not 0 <= c < p for c in poly):
        raise NonPrimitivePolynomial(f"coefficients of {poly} not reduced mod {p}")
    _check_primitive(p, n, poly)
    return FieldTable(spec)


def _check_primitive(p: int, n: int, poly: Sequence[int]) -> None:
    if not is_irreducible(poly, p):
        raise NonPrimitivePolynomial(f"{poly} is reducible over Z_{p}")
    order = p**n - 1
    x = [0, 1] if n > 1 else [(-poly[0]) % p]
    for r in prime_factors(order):
        if _polypowmod(x, order // r, poly, p) == [1]:
            raise NonPrimitivePolynomial(
                f"{poly} is irreducible but x has order dividing {order // r}, not {order}")


def find_primitive_poly(p: int, n: int) -> tuple[int, ...]:
    """First primitive monic polynomial of degree n over Z_p (constant term first)."""
    for tail in itertools.product(range(p), repeat=n):
        poly = tail[::-1] + (1,)
        if poly[0] == 0:
            continue
        try:
            _check_primitive(p, n, poly)
        except NonPrimitivePolynomial:
            continue
        return poly
    raise NonPrimitivePolynomial(f"no primitive polynomial of degree {n} over Z_{p}")


def default_field(p: int, n: int) -> FieldTable:
    """The fields used throughout, with fixed polynomials."""
    known = {
        (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),  # x^8+x^4+x^3+x^2+1
        (3, 5): (1, 2, 0, 0, 0, 1),  # x^5+2x+1
        (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),  # x^9+x^4+1
    }
    poly = known.get((p, n)) or find_primitive_poly(p, n)
    return build_field(FieldSpec(p, n, poly))


@dataclass(frozen=True)
class UnityRoots:
    """The order-n subgroup of GF(q)^*, listed as powers of x^((q-1)/n)."""

    field: FieldTable
    n: int
    generator: int
    elements: tuple[int, ...]

    def power(self, e: int) -> int:
        """generator**e with e read mod n."""
        return self.elements[e % self.n]

    def exponent(self, code: int) -> int:
        """Inverse of power(): the exponent of ``code`` w.r.t. the generator."""
        try:
            return self._index[code]
        except KeyError:
            raise ValueError(f"{code} is not in R_{{{self.field.q},{self.n}}}") from None

    @property
    def _index(self) -> dict[int, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {c: i for i, c in enumerate(self.elements)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def __contains__(self, code: int) -> bool:
        return code in self._index

    def __len__(self) -> int:
        return self.n


def roots_of_unity(field: FieldTable, n: int) -> UnityRoots:
    if n < 1 or field.order % n:
        raise OrderDoesNotDivide(f"{n} does not divide q-1 = {field.order}")
    g = field.exp(field.order // n)
    elems = [1]
    for _ in range(n - 1):
        elems.append(field.mul(elems[-1], g))
    return UnityRoots(field, n, g, tuple(elems))


def _resolve(s: Iterable, field: FieldTable | None) -> tuple[FieldTable, list[int]]:
    items = list(s)
    fields = {it.field for it in items if isinstance(it, Element)}
    if field is not None:
        fields.add(field)
    if len(fields) > 1:
        raise MixedFields("elements come from different fields")
    if not fields:
        raise MixedFields("cannot infer the field of plain integer codes")
    f = fields.pop()
    codes = [it.code if isinstance(it, Element) else int(it) for it in items]
    if any(not 0 <= c < f.q for c in codes):
        raise MixedFields(f"code outside GF({f.q})")
    return f, codes


def is_zero_sum(s: Iterable, field: FieldTable | None = None) -> bool:
    """True iff the field sum of ``s`` is zero.  The empty set is zero-sum."""
    items = list(s)
    if not items:
        return True
    f, codes = _resolve(items, field)
    return f.sum(codes) == 0


def zero_sum_k_subsets(s: Sequence[int], k: int, field: FieldTable,
                       limit: int | None = None) -> list[tuple[int, ...]]:
    """k-subsets of ``s`` with zero sum, lexicographic by position.

    The last element of each subset is looked up rather than enumerated, so
    the cost is C(|s|, k-1) additions.
    """
    s = list(s)
    if k > len(s):
        raise ValueError("k exceeds |s|")
    if k == 0:
        return [()]
    position = {c: i for i, c in enumerate(s)}
    out: list[tuple[int, ...]] = []
    for prefix in itertools.combinations(range(len(s)), k - 1):
        j = position.get(field.neg(field.sum(s[i] for i in prefix)))
        if j is None or (prefix and j <= prefix[-1]):
            continue
        out.append(tuple(s[i] for i in prefix) + (s[j],))
        if limit is not None and len(out) >= limit:
            break
    return out

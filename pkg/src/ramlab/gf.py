"""Finite fields F_q for small q, built over a fixed table of irreducible
polynomials, plus dense polynomial helpers over F_q.

Elements are plain ints in ``range(q)``: the base-p digits of the int are the
coefficients (constant term first) of the residue class modulo the defining
polynomial. Multiplication goes through exp/log tables.
"""

from __future__ import annotations

from functools import lru_cache

__all__ = ["GF", "IRREDUCIBLE", "poly_is_irreducible"]

# Conway polynomials, coefficients constant term first (monic, leading 1 implied
# by the last entry).
IRREDUCIBLE = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (7, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


class GF:
    """The field with ``p**k`` elements."""

    _cache: dict = {}

    def __new__(cls, p: int, k: int = 1):
        key = (p, k)
        if key in cls._cache:
            return cls._cache[key]
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if k > 1 and key not in IRREDUCIBLE:
            raise ValueError(f"no irreducible polynomial tabulated for F_{p}^{k}")
        self = super().__new__(cls)
        self.p, self.k, self.q = p, k, p**k
        self.modulus = IRREDUCIBLE.get(key, (0, 1))
        self._build_tables()
        cls._cache[key] = self
        return self

    def __reduce__(self):
        return (GF, (self.p, self.k))

    # -- digit vectors
    def _vec(self, a: int):
        v = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            v.append(r)
        return v

    def _int(self, v) -> int:
        n = 0
        for c in reversed(v):
            n = n * self.p + c % self.p
        return n

    def _mul_slow(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        if k == 1:
            return a * b % p
        va, vb = self._vec(a), self._vec(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        m = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                for j in range(k):
                    prod[d - k + j] = (prod[d - k + j] - c * m[j]) % p
                prod[d] = 0
        return self._int(prod[:k])

    def _build_tables(self):
        q = self.q
        for g in range(2, q) if q > 2 else [1]:
            exp, x = [], 1
            for _ in range(q - 1):
                exp.append(x)
                x = self._mul_slow(x, g)
            if len(set(exp)) == q - 1:
                break
        else:  # pragma: no cover - every finite field has a generator
            raise RuntimeError("no generator found")
        self._exp = exp
        self._log = {x: i for i, x in enumerate(exp)}

    # -- arithmetic
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        va, vb = self._vec(a), self._vec(b)
        return self._int([x + y for x, y in zip(va, vb)])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self._int([-x for x in self._vec(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._exp[-self._log[a] % (self.q - 1)]

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if n == 0 else 0
        return self._exp[self._log[a] * n % (self.q - 1)]

    def scalar(self, n: int) -> int:
        """Image of the integer n."""
        return n % self.p

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def frobenius_inverse(self, a: int) -> int:
        """The unique p-th root; Frobenius has order k on F_{p^k}."""
        return self.pow(a, self.p ** (self.k - 1)) if self.k > 1 else a

    def trace(self, a: int) -> int:
        """Absolute trace to F_p, returned as an element of the prime field."""
        t, x = 0, a
        for _ in range(self.k):
            t = self.add(t, x)
            x = self.frobenius(x)
        return t

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"GF({self.q})"

    def __str__(self):
        return f"F_{self.q}"


# -- dense polynomials over GF, coefficient lists constant term first


def _trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_eval(F: GF, f, x: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_deriv(F: GF, f):
    return _trim([F.mul(F.scalar(i), c) for i, c in enumerate(f)][1:])


def poly_mul(F: GF, f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
    return _trim(out)


def poly_divmod(F: GF, f, g):
    f, g = _trim(f), _trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = F.inv(g[-1])
    q = [0] * max(len(f) - len(g) + 1, 0)
    r = list(f)
    while len(r) >= len(g):
        c = F.mul(r[-1], lead_inv)
        d = len(r) - len(g)
        q[d] = c
        for j, b in enumerate(g):
            r[d + j] = F.sub(r[d + j], F.mul(c, b))
        r = _trim(r)
    return _trim(q), r


def poly_gcd(F: GF, f, g):
    f, g = _trim(f), _trim(g)
    while g:
        f, g = g, poly_divmod(F, f, g)[1]
    if f:
        inv = F.inv(f[-1])
        f = [F.mul(c, inv) for c in f]
    return f


def _powmod(F: GF, base, n: int, mod):
    result, b = [1], poly_divmod(F, base, mod)[1]
    while n:
        if n & 1:
            result = poly_divmod(F, poly_mul(F, result, b), mod)[1]
        b = poly_divmod(F, poly_mul(F, b, b), mod)[1]
        n >>= 1
    return result


@lru_cache(maxsize=None)
def _irreducible_cached(p, k, f):
    F = GF(p, k)
    f = list(f)
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    h = x
    for _ in range(1, n // 2 + 1):
        h = _powmod(F, h, F.q, f)
        diff = _trim([F.sub(a, b) for a, b in _zip_pad(h, x)])
        if len(poly_gcd(F, f, diff)) > 1:
            return False
    return True


def _zip_pad(f, g):
    n = max(len(f), len(g))
    return zip(list(f) + [0] * (n - len(f)), list(g) + [0] * (n - len(g)))


def poly_is_irreducible(F: GF, f) -> bool:
    """Ben-Or test: no factor of degree <= n/2."""
    return _irreducible_cached(F.p, F.k, tuple(_trim(f)))


def poly_roots(F: GF, f):
    f = _trim(f)
    return [x for x in F.elements() if poly_eval(F, f, x) == 0]

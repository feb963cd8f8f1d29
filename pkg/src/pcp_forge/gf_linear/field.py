"""Finite fields GF(q) for q prime or q = 2^k (k <= 16).

Elements are plain ints in ``[0, q)``. For ``q = 2^k`` an element is the bit
vector of its polynomial coefficients, and multiplication goes through
log/antilog tables built from the smallest primitive polynomial of degree k.
"""

from __future__ import annotations

from functools import lru_cache


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _primitive_tables(k: int) -> tuple[list[int], list[int], int]:
    """Find the smallest primitive polynomial of degree k and build exp/log tables."""
    order = (1 << k) - 1
    top = 1 << k
    for poly in range(top | 1, top << 1, 2):
        exp = [0] * (2 * order)
        x = 1
        ok = True
        for i in range(order):
            if i > 0 and x == 1:
                ok = False
                break
            exp[i] = x
            x <<= 1
            if x & top:
                x ^= poly
        if not ok or x != 1:
            continue
        for i in range(order, 2 * order):
            exp[i] = exp[i - order]
        log = [0] * (1 << k)
        for i in range(order):
            log[exp[i]] = i
        return exp, log, poly
    raise FieldError(f"no primitive polynomial of degree {k}")  # pragma: no cover


class Field:
    """Arithmetic in GF(q).

    Parameters
    ----------
    q : int
        Field order: a prime below 2^16 or 2^k with 1 <= k <= 16.
    """

    def __init__(self, q: int):
        self.q = q
        self.char2 = False
        self.poly = None
        if q >= 2 and q & (q - 1) == 0 and q > 2:
            k = q.bit_length() - 1
            if k > 16:
                raise FieldError(f"unsupported field order {q}")
            self.char2 = True
            self._exp, self._log, self.poly = _primitive_tables(k)
            self._order = q - 1
            self.characteristic = 2
        elif _is_prime(q) and q < (1 << 16):
            self.char2 = q == 2
            self.characteristic = q
        else:
            raise FieldError(f"unsupported field order {q}")
        self._binary_tables = self.char2 and q > 2

    def __repr__(self):
        return f"Field({self.q})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(("Field", self.q))

    def __reduce__(self):
        return (get_field, (self.q,))

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if self.char2:
            return a ^ b
        return (a + b) % self.q

    def neg(self, a: int) -> int:
        if self.char2:
            return a
        return (-a) % self.q

    def sub(self, a: int, b: int) -> int:
        if self.char2:
            return a ^ b
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._binary_tables:
            return self._exp[self._log[a] + self._log[b]]
        if self.q == 2:
            return 1
        return (a * b) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self._binary_tables:
            return self._exp[(self._order - self._log[a]) % self._order]
        if self.q == 2:
            return 1
        return pow(a, self.q - 2, self.q)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.q)

    # vector helpers; vectors are tuples or lists of ints
    def vadd(self, u, v) -> tuple:
        if self.char2:
            return tuple(a ^ b for a, b in zip(u, v))
        q = self.q
        return tuple((a + b) % q for a, b in zip(u, v))

    def vsub(self, u, v) -> tuple:
        if self.char2:
            return tuple(a ^ b for a, b in zip(u, v))
        q = self.q
        return tuple((a - b) % q for a, b in zip(u, v))

    def vscale(self, c: int, v) -> tuple:
        if c == 1:
            return tuple(v)
        return tuple(self.mul(c, a) for a in v)

    def axpy(self, u, c: int, v) -> list:
        """Return ``u + c*v`` as a list."""
        if c == 0:
            return list(u)
        if self.char2:
            if c == 1:
                return [a ^ b for a, b in zip(u, v)]
            return [a ^ self.mul(c, b) for a, b in zip(u, v)]
        q = self.q
        return [(a + c * b) % q for a, b in zip(u, v)]

    def combine(self, coeffs, vectors, n: int) -> tuple:
        """Linear combination sum(c_i * v_i) of length-n vectors."""
        acc = [0] * n
        for c, v in zip(coeffs, vectors):
            if c:
                acc = self.axpy(acc, c, v)
        return tuple(acc)


@lru_cache(maxsize=None)
def get_field(q: int) -> Field:
    return Field(q)


def field_arith(q: int, a: int, b: int | None, op: str) -> int:
    """Dispatch ``add``/``mul``/``inv``/``neg`` on GF(q) elements."""
    F = get_field(q)
    if op == "add":
        return F.add(a, b)
    if op == "mul":
        return F.mul(a, b)
    if op == "inv":
        return F.inv(a)
    if op == "neg":
        return F.neg(a)
    raise FieldError(f"unknown op {op!r}")

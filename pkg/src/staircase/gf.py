"""Arithmetic in GF(2^q) through log/antilog tables."""

from __future__ import annotations

# x^q + ... as bit masks; bit i is the coefficient of x^i
PRIMITIVE_POLYNOMIALS = {
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
}


def clmul_mod(a: int, b: int, poly: int, q: int) -> int:
    """Carry-less product of two field elements reduced modulo ``poly``."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> q:
            a ^= poly
    return result


class GaloisField:
    """The field GF(2^q) generated by a primitive polynomial.

    Elements are integers in ``[0, 2^q)``; addition is XOR. ``exp`` has
    length ``2 * order`` so products of two logs never need a modulo.
    """

    def __init__(self, q: int, primitive_polynomial: int | None = None):
        if not 2 <= q <= 16:
            raise ValueError(f"extension degree must be in [2, 16], got {q}")
        if primitive_polynomial is None:
            if q not in PRIMITIVE_POLYNOMIALS:
                raise ValueError(f"no built-in primitive polynomial for q={q}")
            primitive_polynomial = PRIMITIVE_POLYNOMIALS[q]
        if primitive_polynomial.bit_length() != q + 1:
            raise ValueError("polynomial degree does not match q")

        self.q = q
        self.primitive_polynomial = primitive_polynomial
        self.size = 1 << q
        self.order = self.size - 1

        exp = [0] * (2 * self.order)
        log = [-1] * self.size
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise ValueError(
                    f"polynomial {primitive_polynomial:#x} is not primitive: "
                    f"alpha has order {i} < {self.order}"
                )
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.size:
                x ^= primitive_polynomial
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]
        self.exp = exp
        self.log = log
        self._half = None

    def __repr__(self):
        return f"GaloisField(q={self.q}, primitive_polynomial={self.primitive_polynomial:#x})"

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^q)")
        if a == 0:
            return 0
        return self.exp[self.log[a] - self.log[b] + self.order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[self.order - self.log[a]]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return self.exp[(self.log[a] * e) % self.order]

    def alpha_pow(self, e: int) -> int:
        return self.exp[e % self.order]

    def trace(self, a: int) -> int:
        """Absolute trace to GF(2): a + a^2 + ... + a^(2^(q-1))."""
        acc = 0
        x = a
        for _ in range(self.q):
            acc ^= x
            x = self.mul(x, x)
        return acc

    def half_solution(self, c: int) -> int | None:
        """A root y of y^2 + y = c, or None when the trace of c is 1.

        The other root is ``y ^ 1``.
        """
        if self._half is None:
            half: list[int | None] = [None] * self.size
            for y in range(self.size):
                c_y = self.mul(y, y) ^ y
                if half[c_y] is None:
                    half[c_y] = y
            self._half = half
        return self._half[c]


def build_field(q: int, primitive_polynomial: int | None = None) -> GaloisField:
    return GaloisField(q, primitive_polynomial)

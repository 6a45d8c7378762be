"""Extended, shortened binary BCH component codes.

Bit ``u`` of a component word maps to the coefficient of ``x^(N - s - 1 - u)``
of the cyclic BCH code of length ``N = 2^q - 1`` shortened by ``s`` leading
information bits, so the first ``k`` bits are the information bits. For an
extended code the overall parity bit sits at ``u = n - 1``.

Syndromes are packed into one integer: the power sums ``S_1, S_3, ...,
S_(2t-1)`` occupy ``q`` bits each (``S_1`` lowest) and the parity check bit
sits above them. Flipping bit ``u`` of a word XORs ``columns[u]`` into its
syndrome, which is what the staircase decoders rely on.
"""

from __future__ import annotations

import enum
from typing import NamedTuple, Sequence

import numpy as np

from staircase.gf import GaloisField


class Status(enum.Enum):
    NO_ERROR = "no_error"
    CORRECTED = "corrected"
    DETECTED = "detected"


class DecodeOutcome(NamedTuple):
    status: Status
    positions: tuple[int, ...] = ()

    @property
    def corrected(self) -> bool:
        return self.status is Status.CORRECTED


NO_ERROR = DecodeOutcome(Status.NO_ERROR)
DETECTED = DecodeOutcome(Status.DETECTED)


def _poly_mul(a: int, b: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def _poly_mod(a: int, g: int) -> int:
    dg = g.bit_length() - 1
    while a and a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


def minimal_polynomial(field: GaloisField, i: int) -> int:
    """Binary minimal polynomial of alpha^i as a bit mask."""
    coset = []
    e = i % field.order
    while e not in coset:
        coset.append(e)
        e = (2 * e) % field.order
    # coefficients over GF(2^q), lowest degree first
    coeffs = [1]
    for e in coset:
        root = field.alpha_pow(e)
        shifted = [0] + coeffs
        for d, c in enumerate(coeffs):
            shifted[d] ^= field.mul(c, root)
        coeffs = shifted
    mask = 0
    for d, c in enumerate(coeffs):
        if c not in (0, 1):
            raise ArithmeticError("minimal polynomial has non-binary coefficient")
        mask |= c << d
    return mask


class BchCode:
    """A t-error-correcting binary BCH code, optionally extended and shortened.

    Use :func:`build_bch` to construct one. Instances are immutable after
    construction apart from an internal decode cache keyed by syndrome.
    """

    def __init__(self, field: GaloisField, t: int, extended: bool = True, shorten: int = 0):
        if t < 1:
            raise ValueError(f"t must be >= 1, got {t}")
        if 2 * t * field.q >= field.order:
            raise ValueError(f"t={t} too large for GF(2^{field.q})")

        self.field = field
        self.t = t
        self.extended = bool(extended)
        self.shorten = int(shorten)

        g = 1
        seen = set()
        for i in range(1, 2 * t, 2):
            m_i = minimal_polynomial(field, i)
            if m_i not in seen:
                seen.add(m_i)
                g = _poly_mul(g, m_i)
        self.generator_polynomial = g
        self.redundancy_bch = g.bit_length() - 1

        N = field.order
        k_full = N - self.redundancy_bch
        if not 0 <= self.shorten < k_full:
            raise ValueError(f"shorten must be in [0, {k_full}), got {shorten}")
        self.k = k_full - self.shorten
        self.bch_length = N - self.shorten
        self.n = self.bch_length + int(self.extended)
        self.d_min = 2 * t + 2 if self.extended else 2 * t + 1

        q = field.q
        self.syndrome_bits = q * t + int(self.extended)
        self.parity_bit = (1 << (q * t)) if self.extended else 0
        self._field_mask = (1 << q) - 1

        columns = []
        for u in range(self.bch_length):
            e = self.exponent(u)
            col = 0
            for i in range(t):
                col |= field.alpha_pow((2 * i + 1) * e) << (q * i)
            columns.append(col | self.parity_bit)
        if self.extended:
            columns.append(self.parity_bit)
        self.columns = tuple(columns)
        self._exp_to_pos = {self.exponent(u): u for u in range(self.bch_length)}

        # binary parity-check matrix, one row per word bit
        H = np.zeros((self.n, self.syndrome_bits), dtype=np.float64)
        for u, col in enumerate(columns):
            for b in range(self.syndrome_bits):
                H[u, b] = (col >> b) & 1
        self._H = H
        self._weights = np.array([1 << b for b in range(self.syndrome_bits)], dtype=np.int64)

        # systematic parity generator: row u is the redundancy of info unit vector u
        P = np.zeros((self.k, self.n - self.k), dtype=np.float64)
        for u in range(self.k):
            rem = _poly_mod(1 << self.exponent(u), g)
            for e in range(self.redundancy_bch):
                if (rem >> e) & 1:
                    P[u, self.redundancy_bch - 1 - e] = 1
            if self.extended:
                P[u, -1] = (1 + bin(rem).count("1")) & 1
        self._P = P

        self._cache: dict[int, DecodeOutcome] = {0: NO_ERROR}

    def __repr__(self):
        return (
            f"BchCode(n={self.n}, k={self.k}, t={self.t}, d_min={self.d_min}, "
            f"q={self.field.q}, extended={self.extended}, shorten={self.shorten})"
        )

    def exponent(self, u: int) -> int:
        """Power of x carried by word bit ``u`` (BCH part only)."""
        return self.bch_length - 1 - u

    @property
    def parity_position(self) -> int | None:
        return self.n - 1 if self.extended else None

    # -- encoding -----------------------------------------------------------

    def encode(self, info) -> np.ndarray:
        """Systematic encoding; accepts shape ``(k,)`` or ``(rows, k)``."""
        info = np.asarray(info, dtype=np.uint8)
        if info.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} information bits, got {info.shape[-1]}")
        parity = (info.astype(np.float64) @ self._P).astype(np.int64) & 1
        return np.concatenate([info, parity.astype(np.uint8)], axis=-1)

    # -- syndromes ----------------------------------------------------------

    def syndrome(self, word) -> int:
        """Packed syndrome of a single word of length ``n``."""
        word = np.asarray(word)
        if word.shape != (self.n,):
            raise ValueError(f"expected a word of length {self.n}, got shape {word.shape}")
        s = 0
        for u in np.flatnonzero(word):
            s ^= self.columns[u]
        return s

    def syndromes(self, words) -> np.ndarray:
        """Packed syndromes of every row of a ``(rows, n)`` array."""
        words = np.asarray(words)
        bits = (words.astype(np.float64) @ self._H).astype(np.int64) & 1
        return bits @ self._weights

    def split_syndrome(self, s: int) -> tuple[list[int], int]:
        """Unpack into ``([S_1, S_3, ...], parity)``."""
        q = self.field.q
        sums = [(s >> (q * i)) & self._field_mask for i in range(self.t)]
        parity = 1 if (self.extended and s & self.parity_bit) else 0
        return sums, parity

    # -- decoding -----------------------------------------------------------

    def decode_syndrome(self, s: int) -> DecodeOutcome:
        """Bounded-distance decoding from a packed syndrome (cached)."""
        outcome = self._cache.get(s)
        if outcome is None:
            outcome = self._decode_uncached(s)
            self._cache[s] = outcome
        return outcome

    def decode(self, word) -> DecodeOutcome:
        return self.decode_syndrome(self.syndrome(word))

    def correct(self, word) -> tuple[np.ndarray, DecodeOutcome]:
        """Return the decoder's output word together with the outcome."""
        out = np.array(word, dtype=np.uint8, copy=True)
        outcome = self.decode(out)
        for u in outcome.positions:
            out[u] ^= 1
        return out, outcome

    def _decode_uncached(self, s: int) -> DecodeOutcome:
        sums, parity = self.split_syndrome(s)
        if self.t == 1:
            exps = self._locate_single(sums[0])
        elif self.t == 2:
            exps = self._locate_quadratic(sums[0], sums[1])
        else:
            exps = self.locate_bm(sums)
        if exps is None:
            return DETECTED
        positions = []
        for e in exps:
            u = self._exp_to_pos.get(e)
            if u is None:
                # root in a shortened position
                return DETECTED
            positions.append(u)
        if self.extended and (len(positions) & 1) != parity:
            positions.append(self.n - 1)
        if len(positions) > self.t:
            return DETECTED
        if not positions:
            return NO_ERROR
        return DecodeOutcome(Status.CORRECTED, tuple(sorted(positions)))

    def _locate_single(self, s1: int) -> list[int]:
        return [] if s1 == 0 else [self.field.log[s1]]

    def _locate_quadratic(self, s1: int, s3: int) -> list[int] | None:
        gf = self.field
        if s1 == 0:
            return [] if s3 == 0 else None
        s1_cubed = gf.mul(gf.mul(s1, s1), s1)
        if s3 == s1_cubed:
            return [gf.log[s1]]
        # X^2 + S1 X + sigma2 = 0, substitute X = S1 * y
        sigma2 = gf.div(s3 ^ s1_cubed, s1)
        y = gf.half_solution(gf.div(sigma2, gf.mul(s1, s1)))
        if y is None:
            return None
        return [gf.log[gf.mul(s1, y)], gf.log[gf.mul(s1, y ^ 1)]]

    def locate_bm(self, odd_sums: Sequence[int]) -> list[int] | None:
        """Error exponents via Berlekamp-Massey and a Chien search.

        Returns None when the locator does not split into distinct roots at
        unshortened positions.
        """
        gf = self.field
        t = self.t
        S = [0] * (2 * t + 1)
        for i, v in enumerate(odd_sums):
            S[2 * i + 1] = v
        for j in range(2, 2 * t + 1, 2):
            S[j] = gf.mul(S[j // 2], S[j // 2])
        if not any(S):
            return []

        C = [1] + [0] * (2 * t)
        B = [1] + [0] * (2 * t)
        L, shift, b = 0, 1, 1
        for r in range(2 * t):
            d = S[r + 1]
            for i in range(1, L + 1):
                d ^= gf.mul(C[i], S[r + 1 - i])
            if d == 0:
                shift += 1
                continue
            coef = gf.div(d, b)
            T = C[:]
            for i in range(len(B) - shift):
                C[i + shift] ^= gf.mul(coef, B[i])
            if 2 * L <= r:
                L, B, b, shift = r + 1 - L, T, d, 1
            else:
                shift += 1
        if L > t or any(C[L + 1:]):
            return None

        roots = []
        for e in self._exp_to_pos:
            # locator root at X^-1 = alpha^-e
            x_inv = gf.alpha_pow(-e)
            acc = 0
            xp = 1
            for i in range(L + 1):
                acc ^= gf.mul(C[i], xp)
                xp = gf.mul(xp, x_inv)
            if acc == 0:
                roots.append(e)
        if len(roots) != L:
            return None
        return roots


def build_bch(field: GaloisField, t: int, extended: bool = True, shorten: int = 0) -> BchCode:
    return BchCode(field, t, extended=extended, shorten=shorten)

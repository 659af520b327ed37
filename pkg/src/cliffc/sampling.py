"""Entropy-optimal random generation of Clifford and GL(n) group elements.

The samplers draw uniform group elements by sampling the layer data (h, S)
from its exact marginal (the quantum Mallows distribution for Clifford
operators, the Mallows distribution for invertible matrices) and then filling
the remaining canonical-form bits with fair coin flips: free bits
unconditionally, gated bits only where the rule pattern for (h, S) allows a
nonzero entry.  Because the layer marginal is sampled exactly and every other
bit is an unbiased Bernoulli draw, the output is exactly uniform and the
number of Bernoulli bits consumed equals the information content of the
output given (h, S).

All draws go through a RandomSource, which provides bit-exact reproducible
streams (same seed and stream id give the same sequence on every platform),
counts every raw bit consumed, and attributes consumption to named sections
so the layer draw, the gated draws, and the free draws can be reported
separately.  Uniform integers over non-power-of-two ranges use counted
rejection; rejected bits are tallied on their own so expected consumption can
be assessed apart from rejection overhead.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .canonical import CanonicalForm
from .f2core import BitMatrix, Permutation, mat_mul, perm_matrix, transpose
from .hfree import _rank_greater_masks, free_bit_count
from .pauli import PauliOp

__all__ = [
    "TooLarge",
    "RandomSource",
    "sample_qmallows",
    "sample_mallows",
    "random_clifford",
    "random_gl",
    "exact_qmallows_pmf",
    "bit_count_report",
]


class TooLarge(Exception):
    """Raised when an exact table is requested for too many qubits."""


_FNV_OFFSET64 = 0xCBF29CE484222325
_FNV_PRIME64 = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a64(data: bytes) -> int:
    value = _FNV_OFFSET64
    for byte in data:
        value = ((value ^ byte) * _FNV_PRIME64) & _MASK64
    return value


def _mix(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed via FNV-1a hashing."""
    value = _FNV_OFFSET64
    for part in parts:
        chunk = (part & _MASK64).to_bytes(8, "little")
        value = ((value ^ _fnv1a64(chunk)) * _FNV_PRIME64) & _MASK64
    return (value ^ (value >> 33)) & _MASK64


class RandomSource:
    """Seedable uniform-bit stream with bit accounting.

    The stream is owned by a single consumer.  For parallel batches, derive
    one child stream per record index with child(); the derivation depends
    only on (seed, stream, index), so results do not depend on how records
    are distributed over workers.
    """

    def __init__(self, seed: int = 0, stream: int = 0) -> None:
        self.seed = seed
        self.stream = stream
        self._rng = random.Random(_mix(seed, stream))
        self._bit_counter = 0
        self._rejected_bits = 0
        self._sections: dict[str, int] = {}
        self._label: str | None = None

    @property
    def bit_counter(self) -> int:
        """Total raw bits consumed, including rejected draws."""
        return self._bit_counter

    @property
    def rejected_bits(self) -> int:
        """Bits consumed by draws that were rejected and retried."""
        return self._rejected_bits

    def bits(self, count: int) -> int:
        """Return count uniform bits as an integer."""
        if count < 0:
            raise ValueError("bit count must be nonnegative")
        if count == 0:
            return 0
        self._bit_counter += count
        if self._label is not None:
            self._sections[self._label] += count
        return self._rng.getrandbits(count)

    def uniform_int(self, bound: int) -> int:
        """Uniform integer in [0, bound) via counted rejection."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        width = (bound - 1).bit_length()
        while True:
            value = self.bits(width)
            if value < bound:
                return value
            self._rejected_bits += width

    def mark(self, label: str) -> None:
        """Attribute subsequent consumption to the named section."""
        self._label = label
        self._sections.setdefault(label, 0)

    def section_counts(self) -> dict[str, int]:
        """Bits consumed per named section (unmarked consumption excluded)."""
        return dict(self._sections)

    def child(self, index: int) -> RandomSource:
        """Independent stream for record index, derived from (seed, stream)."""
        return RandomSource(self.seed, _mix(self.stream, index))


def bit_count_report(rng: RandomSource) -> int:
    """Total raw bits the source has consumed.

    After random_clifford, the section counts of the source break this down:
    "layer" covers the (h, S) draw including rejection overhead, while
    "conditional" and "free" are pure Bernoulli bits whose totals equal
    free_bit_count(h, S) and n^2 + 2n exactly.
    """
    return rng.bit_counter


def sample_qmallows(n: int, rng: RandomSource) -> tuple[int, Permutation]:
    """Draw layer data (h, S) from the quantum Mallows distribution.

    Each step draws a uniform integer u in [0, 4^m - 1) for m remaining
    candidates and maps it through the inverse CDF of the weights
    2^(2m-a) for a = 1..2m: a <= m selects h_i = 1 and the a-th smallest
    candidate, a > m selects h_i = 0 and the (2m+1-a)-th smallest.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pool = list(range(n))
    h = 0
    images = [0] * n
    for i in range(n):
        m = len(pool)
        u = rng.uniform_int((1 << (2 * m)) - 1)
        a = 2 * m - ((u + 1).bit_length() - 1)
        if a <= m:
            h |= 1 << i
            rho = a
        else:
            rho = 2 * m + 1 - a
        images[i] = pool.pop(rho - 1)
    return h, Permutation(tuple(images))


def sample_mallows(n: int, rng: RandomSource) -> Permutation:
    """Draw a permutation from the Mallows distribution with weight 2^inversions.

    Each step draws a uniform integer u in [0, 2^m - 1) and selects the
    rho-th smallest remaining candidate with probability 2^(rho-1)/(2^m - 1).
    """
    if n < 1:
        raise ValueError("n must be positive")
    pool = list(range(n))
    images = [0] * n
    for i in range(n):
        m = len(pool)
        if m == 1:
            images[i] = pool.pop()
            continue
        u = rng.uniform_int((1 << m) - 1)
        rho = (u + 1).bit_length()
        images[i] = pool.pop(rho - 1)
    return Permutation(tuple(images))


def _scatter(value: int, mask: int) -> int:
    """Deposit the low bits of value into the set positions of mask."""
    if mask == 0:
        return 0
    low = mask & -mask
    if mask & (mask + low) == 0:
        return value * low
    out = 0
    while mask:
        low = mask & -mask
        if value & 1:
            out |= low
        value >>= 1
        mask ^= low
    return out


def _mirror_lower(n: int, lower_rows: list[int]) -> BitMatrix:
    """Symmetric matrix from rows that carry the lower triangle and diagonal."""
    lower = BitMatrix(n, n, tuple(lower_rows))
    upper = transpose(lower)
    return BitMatrix(n, n, tuple(a | b for a, b in zip(lower.rows, upper.rows)))


def random_clifford(n: int, rng: RandomSource) -> CanonicalForm:
    """Draw a uniformly random Clifford operator as a canonical form.

    Consumes, beyond the (h, S) draw, exactly free_bit_count(h, S) gated bits
    for (Gamma, Delta) and n^2 + 2n free bits for (Gamma', Delta', O'), which
    together account for the full information content of a uniform group
    element given (h, S).
    """
    rng.mark("layer")
    h, s = sample_qmallows(n, rng)
    greater = _rank_greater_masks(s)
    full = (1 << n) - 1

    rng.mark("conditional")
    conditional_start = rng.section_counts()["conditional"]
    gamma_rows = [0] * n
    for i in range(n):
        if h >> i & 1:
            gamma_rows[i] = rng.bits(1) << i
    for i in range(n):
        below = (1 << i) - 1
        if h >> i & 1:
            mask = (h | (greater[i] & ~h & full)) & below
        else:
            mask = h & ~greater[i] & below
        gamma_rows[i] |= _scatter(rng.bits(mask.bit_count()), mask)
    delta_rows = [0] * n
    for i in range(n):
        below = (1 << i) - 1
        if h >> i & 1:
            mask = h & ~greater[i] & below
        else:
            mask = (h | (greater[i] & ~h & full)) & below
        delta_rows[i] = _scatter(rng.bits(mask.bit_count()), mask) | 1 << i
    conditional = rng.section_counts()["conditional"] - conditional_start
    assert conditional == free_bit_count(h, s)

    rng.mark("free")
    free_start = rng.section_counts()["free"]
    diag = rng.bits(n)
    gamma_prime_rows = [rng.bits(i) | (diag >> i & 1) << i for i in range(n)]
    delta_prime_rows = [rng.bits(i) | 1 << i for i in range(n)]
    oprime = PauliOp(n, rng.bits(n), rng.bits(n), 0)
    assert rng.section_counts()["free"] - free_start == n * n + 2 * n

    return CanonicalForm(
        n=n,
        gamma=_mirror_lower(n, gamma_rows),
        delta=BitMatrix(n, n, tuple(delta_rows)),
        h=h,
        s=s,
        oprime=oprime,
        gamma_prime=_mirror_lower(n, gamma_prime_rows),
        delta_prime=BitMatrix(n, n, tuple(delta_prime_rows)),
    )


def random_gl(n: int, rng: RandomSource) -> BitMatrix:
    """Draw a uniformly random invertible n x n matrix over GF(2).

    Samples the factorization L * P(S) * R with L uniform lower unit
    triangular, S Mallows-distributed, and R lower unit triangular with
    R[i, j] free exactly when S(i) < S(j); the factorization is unique, so
    the product is uniform over the group.
    """
    s = sample_mallows(n, rng)
    greater = _rank_greater_masks(s)
    l_rows = tuple(rng.bits(i) | 1 << i for i in range(n))
    r_rows = []
    for i in range(n):
        mask = greater[i] & ((1 << i) - 1)
        r_rows.append(_scatter(rng.bits(mask.bit_count()), mask) | 1 << i)
    left = BitMatrix(n, n, l_rows)
    right = BitMatrix(n, n, tuple(r_rows))
    return mat_mul(left, mat_mul(perm_matrix(s), right))


def exact_qmallows_pmf(n: int) -> dict[tuple[int, Permutation], Fraction]:
    """Exact probability table of the quantum Mallows distribution.

    Returns P(h, S) = 2^free_bit_count(h, S) / prod_{i=1..n} (4^i - 1) for
    every pair, as exact rationals.  The table has 2^n * n! entries, so only
    n <= 6 is supported.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > 6:
        raise TooLarge("exact tables are limited to 6 qubits")
    denominator = 1
    for i in range(1, n + 1):
        denominator *= (1 << (2 * i)) - 1
    table = {}
    for images in itertools.permutations(range(n)):
        s = Permutation(images)
        for h in range(1 << n):
            table[(h, s)] = Fraction(1 << free_bit_count(h, s), denominator)
    return table

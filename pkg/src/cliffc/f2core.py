"""Exact linear algebra over GF(2) and permutation utilities.

Matrices are dense and bit-packed: row i is a Python int whose bit j is the
entry in row i, column j.  Qubits, rows, and columns are numbered 1..n in
documentation and serialized formats, 0..n-1 in storage; conversion happens
only at the serialization boundary.  A bit vector is a plain int whose bit i
is coordinate i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "BitMatrix",
    "Permutation",
    "Singular",
    "Inconsistent",
    "Underdetermined",
    "zeros",
    "identity",
    "from_rows",
    "mat_add",
    "mat_mul",
    "mat_vec_mul",
    "vec_mat_mul",
    "mat_inv",
    "solve_linear",
    "transpose",
    "is_lower_unit_triangular",
    "is_symmetric",
    "is_invertible",
    "rank",
    "inversion_number",
    "identity_permutation",
    "perm_matrix",
    "vector_to_string",
    "vector_from_string",
]


class Singular(Exception):
    """Raised when a matrix expected to be invertible has rank < n."""


class Inconsistent(Exception):
    """Raised when a linear system has no solution."""


class Underdetermined(Exception):
    """Raised when a linear system has more than one solution."""


@dataclass(frozen=True)
class BitMatrix:
    """Dense matrix over GF(2) with bit-packed rows (bit j of rows[i] = entry i,j)."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if len(self.rows) != self.n_rows:
            raise ValueError("row count does not match n_rows")
        mask = (1 << self.n_cols) - 1
        if any(row & ~mask for row in self.rows):
            raise ValueError("row has bits beyond n_cols")

    def get(self, i: int, j: int) -> int:
        """Entry at row i, column j (0-based)."""
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        """Column j as a bit vector."""
        out = 0
        for i in range(self.n_rows):
            out |= ((self.rows[i] >> j) & 1) << i
        return out

    def to_json(self) -> dict:
        """JSON-ready dict: rows as '0101...' strings, character k = column k."""
        return {
            "n_rows": self.n_rows,
            "n_cols": self.n_cols,
            "rows": [vector_to_string(row, self.n_cols) for row in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BitMatrix":
        """Parse the dict produced by to_json."""
        n_rows = int(obj["n_rows"])
        n_cols = int(obj["n_cols"])
        rows = [vector_from_string(s, n_cols) for s in obj["rows"]]
        return cls(n_rows, n_cols, tuple(rows))


def vector_to_string(vec: int, n: int) -> str:
    """Bit vector as a '0101...' string; character k is coordinate k."""
    return "".join("1" if (vec >> k) & 1 else "0" for k in range(n))


def vector_from_string(s: str, n: int) -> int:
    """Parse the string form produced by vector_to_string."""
    if len(s) != n or set(s) - {"0", "1"}:
        raise ValueError(f"expected a {n}-character 0/1 string, got {s!r}")
    out = 0
    for k, ch in enumerate(s):
        if ch == "1":
            out |= 1 << k
    return out


def zeros(n_rows: int, n_cols: int) -> BitMatrix:
    """All-zero matrix."""
    return BitMatrix(n_rows, n_cols, (0,) * n_rows)


def identity(n: int) -> BitMatrix:
    """n-by-n identity matrix."""
    return BitMatrix(n, n, tuple(1 << i for i in range(n)))


def from_rows(rows: Sequence[Iterable[int]]) -> BitMatrix:
    """Build a matrix from nested 0/1 entries (row-major)."""
    packed = []
    n_cols = None
    for entries in rows:
        entries = list(entries)
        if n_cols is None:
            n_cols = len(entries)
        elif len(entries) != n_cols:
            raise ValueError("ragged rows")
        row = 0
        for j, e in enumerate(entries):
            if e not in (0, 1):
                raise ValueError("entries must be 0 or 1")
            row |= e << j
        packed.append(row)
    if n_cols is None:
        raise ValueError("no rows")
    return BitMatrix(len(packed), n_cols, tuple(packed))


def mat_add(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Entrywise sum mod 2."""
    if (a.n_rows, a.n_cols) != (b.n_rows, b.n_cols):
        raise ValueError("shape mismatch")
    return BitMatrix(a.n_rows, a.n_cols, tuple(x ^ y for x, y in zip(a.rows, b.rows)))


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product mod 2."""
    if a.n_cols != b.n_rows:
        raise ValueError("inner dimensions do not match")
    out = []
    for row in a.rows:
        acc = 0
        r = row
        while r:
            low = r & -r
            acc ^= b.rows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BitMatrix(a.n_rows, b.n_cols, tuple(out))


def mat_vec_mul(a: BitMatrix, v: int) -> int:
    """Product A*v with v a bit vector of length a.n_cols."""
    out = 0
    for i, row in enumerate(a.rows):
        out |= ((row & v).bit_count() & 1) << i
    return out


def vec_mat_mul(v: int, a: BitMatrix) -> int:
    """Product v^T * A (a bit vector of length a.n_cols)."""
    acc = 0
    r = v
    while r:
        low = r & -r
        acc ^= a.rows[low.bit_length() - 1]
        r ^= low
    return acc


def transpose(a: BitMatrix) -> BitMatrix:
    """Transpose."""
    side = max(a.n_rows, a.n_cols)
    if side <= 64:
        out = [0] * a.n_cols
        for i, row in enumerate(a.rows):
            r = row
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(a.n_cols, a.n_rows, tuple(out))
    # Butterfly transpose on a padded power-of-two square: each round swaps
    # one row-index bit with the matching column-index bit, using whole-row
    # integer operations instead of per-entry loops.
    width = 1 << (side - 1).bit_length()
    rows = list(a.rows) + [0] * (width - a.n_rows)
    half = width >> 1
    while half:
        stride = half << 1
        spaced = ((1 << width) - 1) // ((1 << stride) - 1)
        mask = spaced * ((1 << half) - 1)
        for base in range(0, width, stride):
            for i in range(base, base + half):
                t = ((rows[i] >> half) ^ rows[i + half]) & mask
                rows[i] ^= t << half
                rows[i + half] ^= t
        half >>= 1
    row_mask = (1 << a.n_rows) - 1
    return BitMatrix(a.n_cols, a.n_rows, tuple(r & row_mask for r in rows[: a.n_cols]))


def _eliminate(rows: list[int], n_cols: int) -> tuple[list[int], list[int]]:
    """Row-reduce in place; returns (pivot column per pivot row, pivot rows used).

    Pivoting is deterministic: for each column left to right, the first row
    (top to bottom among unused rows) with a 1 in that column becomes the
    pivot.
    """
    pivot_cols = []
    row_idx = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row_idx, len(rows)):
            if (rows[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        rows[row_idx], rows[pivot] = rows[pivot], rows[row_idx]
        for r in range(len(rows)):
            if r != row_idx and ((rows[r] >> col) & 1):
                rows[r] ^= rows[row_idx]
        pivot_cols.append(col)
        row_idx += 1
        if row_idx == len(rows):
            break
    return rows, pivot_cols


def rank(a: BitMatrix) -> int:
    """Rank over GF(2)."""
    _, pivot_cols = _eliminate(list(a.rows), a.n_cols)
    return len(pivot_cols)


def is_lower_unit_triangular(a: BitMatrix) -> bool:
    """True iff a is square, lower-triangular, with all-ones diagonal."""
    if a.n_rows != a.n_cols:
        return False
    for i, row in enumerate(a.rows):
        if row >> i != 1:
            return False
    return True


def is_symmetric(a: BitMatrix) -> bool:
    """True iff a is square and equals its transpose."""
    return a.n_rows == a.n_cols and a == transpose(a)


def is_invertible(a: BitMatrix) -> bool:
    """True iff a is square with full rank."""
    return a.n_rows == a.n_cols and rank(a) == a.n_rows


def mat_inv(a: BitMatrix) -> BitMatrix:
    """Inverse over GF(2); raises Singular if rank < n."""
    if a.n_rows != a.n_cols:
        raise ValueError("matrix must be square")
    n = a.n_rows
    # Augment each row with an identity block in bits n..2n-1.
    work = [a.rows[i] | (1 << (n + i)) for i in range(n)]
    work, pivot_cols = _eliminate(work, n)
    if len(pivot_cols) < n:
        raise Singular(f"matrix has rank {len(pivot_cols)} < {n}")
    mask = (1 << n) - 1
    # After full reduction the left block is a permutation of identity rows;
    # sort rows by their pivot column to read off the inverse.
    inv_rows = [0] * n
    for i, col in enumerate(pivot_cols):
        inv_rows[col] = work[i] >> n
    return BitMatrix(n, n, tuple(r & mask for r in inv_rows))


def solve_linear(a: BitMatrix, b: int) -> int:
    """Solve A*x = b for the unique x; raises Inconsistent or Underdetermined."""
    n_cols = a.n_cols
    work = [a.rows[i] | (((b >> i) & 1) << n_cols) for i in range(a.n_rows)]
    work, pivot_cols = _eliminate(work, n_cols)
    n_pivots = len(pivot_cols)
    coeff_mask = (1 << n_cols) - 1
    for r in range(n_pivots, len(work)):
        if work[r] & ~coeff_mask:
            raise Inconsistent("system has no solution")
    if n_pivots < n_cols:
        raise Underdetermined(f"system has {n_cols - n_pivots} free variables")
    x = 0
    for i, col in enumerate(pivot_cols):
        x |= ((work[i] >> n_cols) & 1) << col
    return x


@dataclass(frozen=True)
class Permutation:
    """Permutation of {0..n-1} stored as the tuple of images (images[i] = S(i))."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if n < 1:
            raise ValueError("permutation must have positive size")
        if sorted(self.images) != list(range(n)):
            raise ValueError("images are not a bijection on 0..n-1")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Permutation":
        """The inverse permutation."""
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def to_one_based(self) -> list[int]:
        """Image list with both positions and values 1-based (for serialization)."""
        return [j + 1 for j in self.images]

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        """Parse the 1-based image list produced by to_one_based."""
        return cls(tuple(int(j) - 1 for j in images))


def identity_permutation(n: int) -> Permutation:
    """Identity permutation on n elements."""
    return Permutation(tuple(range(n)))


def perm_matrix(s: Permutation) -> BitMatrix:
    """Matrix M with M[S(i), i] = 1, so that M maps e_i to e_{S(i)}."""
    rows = [0] * s.n
    for i, j in enumerate(s.images):
        rows[j] |= 1 << i
    return BitMatrix(s.n, s.n, tuple(rows))


def inversion_number(s: Permutation) -> int:
    """Number of pairs i < j with S(i) > S(j)."""
    count = 0
    for i in range(s.n):
        for j in range(i + 1, s.n):
            if s.images[i] > s.images[j]:
                count += 1
    return count

"""n-qubit Pauli operators with exact phase tracking.

A PauliOp stores the operator i^phase * X(x) * Z(z), where X(x) is the tensor
product of Pauli X over the set bits of x (and likewise Z(z)), and phase is an
exponent of i taken mod 4.  On a single qubit X*Z = -i*Y, so the text form
re-expresses the operator over letters {I, X, Y, Z} with a prefix from
{'', 'i', '-', '-i'}.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "PauliOp",
    "identity_pauli",
    "pauli_mul",
    "pauli_inverse",
    "commutes",
    "single_qubit_support",
]

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LETTER.items()}
_PREFIX = {0: "", 1: "i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliOp:
    """The operator i^phase * X(x_bits) * Z(z_bits) on n qubits."""

    n: int
    x_bits: int
    z_bits: int
    phase: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("qubit count must be positive")
        mask = (1 << self.n) - 1
        if (self.x_bits & ~mask) or (self.z_bits & ~mask):
            raise ValueError("bits beyond qubit count")
        if not 0 <= self.phase <= 3:
            raise ValueError("phase must be in 0..3")

    def is_identity(self) -> bool:
        """True iff the operator is exactly +1 times identity."""
        return self.x_bits == 0 and self.z_bits == 0 and self.phase == 0

    def to_string(self) -> str:
        """Text form, e.g. '-iXZI': prefix then one letter per qubit."""
        y_count = (self.x_bits & self.z_bits).bit_count()
        prefix = _PREFIX[(self.phase - y_count) % 4]
        letters = "".join(
            _LETTER[((self.x_bits >> i) & 1, (self.z_bits >> i) & 1)]
            for i in range(self.n)
        )
        return prefix + letters

    @classmethod
    def from_string(cls, s: str) -> "PauliOp":
        """Parse the text form; accepts prefixes +, -, i, +i, -i or none."""
        body = s
        sign = 0
        for prefix, value in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2), ("i", 1)):
            if body.startswith(prefix):
                sign = value
                body = body[len(prefix):]
                break
        if not body or set(body) - set("IXYZ"):
            raise ValueError(f"bad Pauli string {s!r}")
        x = z = 0
        for i, ch in enumerate(body):
            xb, zb = _BITS[ch]
            x |= xb << i
            z |= zb << i
        y_count = (x & z).bit_count()
        return cls(len(body), x, z, (sign + y_count) % 4)


def identity_pauli(n: int) -> PauliOp:
    """The identity operator on n qubits."""
    return PauliOp(n, 0, 0, 0)


def pauli_mul(p: PauliOp, q: PauliOp) -> PauliOp:
    """Group product p*q with exact phase."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    # Moving Z(z_p) past X(x_q) contributes (-1) per overlapping qubit.
    phase = (p.phase + q.phase + 2 * (p.z_bits & q.x_bits).bit_count()) % 4
    return PauliOp(p.n, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits, phase)


def pauli_inverse(p: PauliOp) -> PauliOp:
    """Group inverse with exact phase."""
    phase = (-p.phase + 2 * (p.x_bits & p.z_bits).bit_count()) % 4
    return PauliOp(p.n, p.x_bits, p.z_bits, phase)


def commutes(p: PauliOp, q: PauliOp) -> bool:
    """True iff p and q commute (symplectic inner product vanishes)."""
    if p.n != q.n:
        raise ValueError("qubit counts differ")
    overlap = (p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()
    return overlap % 2 == 0


def single_qubit_support(p: PauliOp) -> int | None:
    """The unique qubit p acts on, or None for identity or multi-qubit support."""
    support = p.x_bits | p.z_bits
    if support == 0 or support & (support - 1):
        return None
    return support.bit_length() - 1

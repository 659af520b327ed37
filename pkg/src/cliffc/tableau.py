"""Stabilizer tableaux: Clifford operators as images of the Pauli generators.

A Tableau stores the 2n Paulis U X_i U^-1 and U Z_i U^-1 with exact signs;
global phase never enters.  compose(a, b) is the tableau of the operator a
composed after b (b acts first).  Circuits execute their gate list top to
bottom, so appending a gate multiplies on the left.
"""

from __future__ import annotations

from dataclasses import dataclass

from .f2core import BitMatrix, rank
from .pauli import PauliOp, commutes, identity_pauli, pauli_mul

__all__ = [
    "Gate",
    "Circuit",
    "Tableau",
    "identity_tableau",
    "apply_gate",
    "from_circuit",
    "compose",
    "inverse",
    "conjugate_pauli",
    "equal_up_to_global_phase",
    "is_valid_tableau",
    "tableau_bit_matrix",
    "circuit_to_text",
    "parse_circuit",
    "parse_gate_line",
]

_ONE_QUBIT = {"X", "Z", "P", "H"}
_TWO_QUBIT = {"CNOT", "CZ", "SWAP"}


@dataclass(frozen=True)
class Gate:
    """A single gate: kind in {X, Z, P, H, CNOT, CZ, SWAP}, 0-based qubits."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind in _ONE_QUBIT:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} takes one qubit")
        elif self.kind in _TWO_QUBIT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind} takes two distinct qubits")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on n qubits, executed first to last."""

    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise ValueError("qubit count must be positive")
        for g in self.gates:
            if any(q >= self.n for q in g.qubits):
                raise ValueError(f"gate {g} exceeds {self.n} qubits")

    def two_qubit_count(self) -> int:
        """Number of two-qubit gates."""
        return sum(1 for g in self.gates if g.kind in _TWO_QUBIT)


@dataclass(frozen=True)
class Tableau:
    """Images of X_i and Z_i under conjugation by a Clifford operator."""

    n: int
    x_images: tuple[PauliOp, ...]
    z_images: tuple[PauliOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_images", tuple(self.x_images))
        object.__setattr__(self, "z_images", tuple(self.z_images))
        if self.n < 1:
            raise ValueError("qubit count must be positive")
        if len(self.x_images) != self.n or len(self.z_images) != self.n:
            raise ValueError("need exactly n X images and n Z images")

    def to_json(self) -> dict:
        """JSON-ready dict with Pauli strings for all images."""
        return {
            "n": self.n,
            "x_images": [p.to_string() for p in self.x_images],
            "z_images": [p.to_string() for p in self.z_images],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Tableau":
        """Parse the dict produced by to_json."""
        n = int(obj["n"])
        return cls(
            n,
            tuple(PauliOp.from_string(s) for s in obj["x_images"]),
            tuple(PauliOp.from_string(s) for s in obj["z_images"]),
        )


def identity_tableau(n: int) -> Tableau:
    """Tableau of the identity operator."""
    return Tableau(
        n,
        tuple(PauliOp(n, 1 << i, 0, 0) for i in range(n)),
        tuple(PauliOp(n, 0, 1 << i, 0) for i in range(n)),
    )


def _conjugate_by_gate(p: PauliOp, g: Gate) -> PauliOp:
    """g * p * g^-1 for a single gate, exact phase."""
    x, z, phase = p.x_bits, p.z_bits, p.phase
    if g.kind == "X":
        a = g.qubits[0]
        phase += 2 * ((z >> a) & 1)
    elif g.kind == "Z":
        a = g.qubits[0]
        phase += 2 * ((x >> a) & 1)
    elif g.kind == "P":
        a = g.qubits[0]
        xa = (x >> a) & 1
        phase += xa
        z ^= xa << a
    elif g.kind == "H":
        a = g.qubits[0]
        xa = (x >> a) & 1
        za = (z >> a) & 1
        phase += 2 * (xa & za)
        if xa != za:
            x ^= 1 << a
            z ^= 1 << a
    elif g.kind == "CNOT":
        a, b = g.qubits
        x ^= ((x >> a) & 1) << b
        z ^= ((z >> b) & 1) << a
    elif g.kind == "CZ":
        a, b = g.qubits
        xa = (x >> a) & 1
        xb = (x >> b) & 1
        phase += 2 * (xa & xb)
        z ^= (xa << b) ^ (xb << a)
    else:  # SWAP
        a, b = g.qubits
        xa = (x >> a) & 1
        xb = (x >> b) & 1
        if xa != xb:
            x ^= (1 << a) | (1 << b)
        za = (z >> a) & 1
        zb = (z >> b) & 1
        if za != zb:
            z ^= (1 << a) | (1 << b)
    return PauliOp(p.n, x, z, phase % 4)


def apply_gate(t: Tableau, g: Gate, side: str = "left") -> Tableau:
    """Tableau of g∘U (side='left') or U∘g (side='right')."""
    if any(q >= t.n for q in g.qubits):
        raise ValueError(f"gate {g} exceeds {t.n} qubits")
    if side == "left":
        return Tableau(
            t.n,
            tuple(_conjugate_by_gate(p, g) for p in t.x_images),
            tuple(_conjugate_by_gate(p, g) for p in t.z_images),
        )
    if side != "right":
        raise ValueError("side must be 'left' or 'right'")
    # U∘g conjugates X_i by g first, then pushes the result through U; each
    # gate below rewrites the affected generator images as products of images.
    xi = list(t.x_images)
    zi = list(t.z_images)

    def flip(p: PauliOp) -> PauliOp:
        return PauliOp(p.n, p.x_bits, p.z_bits, (p.phase + 2) % 4)

    def times_i(p: PauliOp) -> PauliOp:
        return PauliOp(p.n, p.x_bits, p.z_bits, (p.phase + 1) % 4)

    if g.kind == "X":
        a = g.qubits[0]
        zi[a] = flip(zi[a])
    elif g.kind == "Z":
        a = g.qubits[0]
        xi[a] = flip(xi[a])
    elif g.kind == "P":
        a = g.qubits[0]
        xi[a] = times_i(pauli_mul(xi[a], zi[a]))
    elif g.kind == "H":
        a = g.qubits[0]
        xi[a], zi[a] = zi[a], xi[a]
    elif g.kind == "CNOT":
        a, b = g.qubits
        xi[a] = pauli_mul(xi[a], xi[b])
        zi[b] = pauli_mul(zi[a], zi[b])
    elif g.kind == "CZ":
        a, b = g.qubits
        xi[a], xi[b] = pauli_mul(xi[a], zi[b]), pauli_mul(zi[a], xi[b])
    else:  # SWAP
        a, b = g.qubits
        xi[a], xi[b] = xi[b], xi[a]
        zi[a], zi[b] = zi[b], zi[a]
    return Tableau(t.n, tuple(xi), tuple(zi))


def from_circuit(c: Circuit) -> Tableau:
    """Tableau of the whole circuit (gates applied in list order)."""
    t = identity_tableau(c.n)
    for g in c.gates:
        t = apply_gate(t, g, side="left")
    return t


def conjugate_pauli(t: Tableau, q: PauliOp) -> PauliOp:
    """U q U^-1 where U is the operator of tableau t."""
    if t.n != q.n:
        raise ValueError("qubit counts differ")
    out = PauliOp(q.n, 0, 0, q.phase)
    for j in range(q.n):
        if (q.x_bits >> j) & 1:
            out = pauli_mul(out, t.x_images[j])
    for j in range(q.n):
        if (q.z_bits >> j) & 1:
            out = pauli_mul(out, t.z_images[j])
    return out


def compose(a: Tableau, b: Tableau) -> Tableau:
    """Tableau of a∘b (b acts first)."""
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    return Tableau(
        a.n,
        tuple(conjugate_pauli(a, p) for p in b.x_images),
        tuple(conjugate_pauli(a, p) for p in b.z_images),
    )


def tableau_bit_matrix(t: Tableau) -> BitMatrix:
    """2n x 2n bit matrix: column j holds the (x|z) bits of the j-th image."""
    n = t.n
    rows = [0] * (2 * n)
    for j, p in enumerate(list(t.x_images) + list(t.z_images)):
        for i in range(n):
            rows[i] |= ((p.x_bits >> i) & 1) << j
            rows[n + i] |= ((p.z_bits >> i) & 1) << j
    return BitMatrix(2 * n, 2 * n, tuple(rows))


def inverse(t: Tableau) -> Tableau:
    """Tableau of the inverse operator."""
    from .f2core import mat_inv

    n = t.n
    m_inv = mat_inv(tableau_bit_matrix(t))
    mask = (1 << n) - 1

    def column_pauli(j: int) -> PauliOp:
        col = m_inv.column(j)
        return PauliOp(n, col & mask, col >> n, 0)

    xi = []
    zi = []
    for j in range(n):
        for bucket, col in ((xi, j), (zi, n + j)):
            candidate = column_pauli(col)
            # Conjugating the candidate through t must give back the exact
            # generator; the residual phase fixes the candidate's phase.
            echo = conjugate_pauli(t, candidate)
            bucket.append(
                PauliOp(n, candidate.x_bits, candidate.z_bits, (-echo.phase) % 4)
            )
    return Tableau(n, tuple(xi), tuple(zi))


def equal_up_to_global_phase(a: Tableau, b: Tableau) -> bool:
    """Exact equality of all 2n images (global phase never enters a tableau)."""
    return a == b


def is_valid_tableau(t: Tableau) -> bool:
    """Check Hermitian images and the full symplectic commutation pattern."""
    n = t.n
    images = list(t.x_images) + list(t.z_images)
    for p in images:
        if p.n != n:
            return False
        if p.phase % 2 != (p.x_bits & p.z_bits).bit_count() % 2:
            return False
    for i in range(n):
        for j in range(n):
            if commutes(t.x_images[i], t.z_images[j]) != (i != j):
                return False
            if i < j:
                if not commutes(t.x_images[i], t.x_images[j]):
                    return False
                if not commutes(t.z_images[i], t.z_images[j]):
                    return False
    return rank(tableau_bit_matrix(t)) == 2 * n


_GATE_NAMES = {k.lower(): k for k in (_ONE_QUBIT | _TWO_QUBIT)}


def parse_gate_line(line: str) -> Gate:
    """Parse one circuit-text line such as 'cnot 1 2' (1-based qubits)."""
    parts = line.split()
    kind = _GATE_NAMES.get(parts[0].lower())
    if kind is None:
        raise ValueError(f"unknown gate {parts[0]!r}")
    try:
        qubits = tuple(int(tok) - 1 for tok in parts[1:])
    except ValueError as exc:
        raise ValueError(f"bad qubit index in {line!r}") from exc
    if any(q < 0 for q in qubits):
        raise ValueError(f"qubit indices are 1-based in {line!r}")
    return Gate(kind, qubits)


def parse_circuit(text: str, n: int | None = None) -> Circuit:
    """Parse circuit text: one gate per line, '#' comments, 1-based qubits."""
    gates = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        gates.append(parse_gate_line(line))
    if n is None:
        n = max((q + 1 for g in gates for q in g.qubits), default=1)
    return Circuit(n, tuple(gates))


def circuit_to_text(c: Circuit) -> str:
    """Serialize a circuit to text (1-based qubits, lowercase gate names)."""
    lines = [
        " ".join([g.kind.lower()] + [str(q + 1) for q in g.qubits]) for g in c.gates
    ]
    return "\n".join(lines)

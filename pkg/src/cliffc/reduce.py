"""Circuit-level applications of the canonical form.

Two reductions are provided.  measurement_reduction appends a cheap circuit D
to a Clifford circuit C so that C followed by D is Hadamard-free: D consists
of at most n*k - k(k+1)/2 two-qubit gates, where k counts the Hadamard layer
of the canonical form of C.  nine_stage_decomposition rewrites any Clifford
operator as the fixed stage sequence -X-Z-P-CX-CZ-H-CZ-H-P-, with exactly
three two-qubit stages.

Diagonal stages are tracked as phase polynomials: a function
f(x) = sum_i a_i x_i + 2 * sum_{i<j} c_ij x_i x_j evaluated mod 4, realized
by P^a_i gates and CZ gates.  Substituting a linear map into f stays in this
class, which is what lets diagonal stages commute across CNOT stages.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import CanonicalForm, canonical_form
from .f2core import (
    BitMatrix,
    from_rows,
    is_symmetric,
    mat_add,
    mat_inv,
    mat_mul,
    mat_vec_mul,
    transpose,
)
from .hfree import tableau_to_hfree
from .tableau import Circuit, Gate, Tableau, circuit_to_text, compose, from_circuit
from .tableau import inverse as tableau_inverse

__all__ = [
    "BadBlockPattern",
    "PhasePoly",
    "StagedCircuit",
    "measurement_reduction",
    "block_diagonalize_delta",
    "commute_diag_past_linear",
    "nine_stage_decomposition",
]


class BadBlockPattern(Exception):
    """Raised when a matrix does not have the required block layout."""


_STAGE_KINDS = {"X": "X", "Z": "Z", "P": "P", "CX": "CNOT", "CZ": "CZ", "H": "H"}


@dataclass(frozen=True)
class StagedCircuit:
    """A circuit partitioned into labeled stages, executed first to last.

    Stage labels come from {X, Z, P, CX, CZ, H} and each stage holds only
    gates of its labeled kind (a P stage realizes higher powers of P by
    repetition).  Concatenating the stages gives the full circuit.
    """

    n: int
    stages: tuple[tuple[str, Circuit], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        for label, circuit in self.stages:
            kind = _STAGE_KINDS.get(label)
            if kind is None:
                raise ValueError(f"unknown stage label {label!r}")
            if circuit.n != self.n:
                raise ValueError("stage width mismatch")
            for gate in circuit.gates:
                if gate.kind != kind:
                    raise ValueError(f"{label} stage holds a {gate.kind} gate")

    def to_circuit(self) -> Circuit:
        """All stages concatenated into one flat circuit."""
        gates = []
        for _, circuit in self.stages:
            gates.extend(circuit.gates)
        return Circuit(self.n, tuple(gates))

    def to_text(self) -> str:
        """Circuit text with a '# stage: <label>' delimiter before each stage."""
        lines = []
        for label, circuit in self.stages:
            lines.append(f"# stage: {label}")
            body = circuit_to_text(circuit)
            if body:
                lines.append(body)
        return "\n".join(lines)


@dataclass(frozen=True)
class PhasePoly:
    """Diagonal-stage phase function f(x) = sum a_i x_i + 2 sum_{i<j} c_ij x_i x_j mod 4.

    a holds one exponent mod 4 per qubit (realized by repeated P gates) and
    c is a hollow symmetric bit matrix (realized by CZ gates).
    """

    n: int
    a: tuple[int, ...]
    c: BitMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(value % 4 for value in self.a))
        if len(self.a) != self.n:
            raise ValueError("need one exponent per qubit")
        if self.c.n_rows != self.n or self.c.n_cols != self.n:
            raise ValueError("quadratic part must be n x n")
        if not is_symmetric(self.c) or any(
            self.c.get(i, i) for i in range(self.n)
        ):
            raise ValueError("quadratic part must be hollow symmetric")

    @classmethod
    def from_gamma(cls, gamma: BitMatrix) -> "PhasePoly":
        """The phase function x^T Gamma x of a symmetric bit matrix."""
        n = gamma.n_rows
        hollow_rows = tuple(row & ~(1 << i) for i, row in enumerate(gamma.rows))
        return cls(
            n,
            tuple(gamma.get(i, i) for i in range(n)),
            BitMatrix(n, n, hollow_rows),
        )

    def evaluate(self, x: int) -> int:
        """f(x) for a bit vector x, as an integer mod 4."""
        total = sum(self.a[i] for i in range(self.n) if x >> i & 1)
        for i in range(self.n):
            if x >> i & 1:
                total += 2 * ((self.c.rows[i] & x) >> (i + 1)).bit_count()
        return total % 4

    def substitute(self, m: BitMatrix) -> "PhasePoly":
        """The phase function x -> f(m x)."""
        if m.n_rows != self.n or m.n_cols != self.n:
            raise ValueError("substitution matrix must be n x n")
        columns = transpose(m).rows
        parity = from_rows(
            [
                [(self.a[i] & 1) if i == j else self.c.get(i, j) for j in range(self.n)]
                for i in range(self.n)
            ]
        )
        folded = mat_mul(transpose(m), mat_mul(parity, m))
        new_c_rows = tuple(row & ~(1 << i) for i, row in enumerate(folded.rows))
        new_a = []
        for j in range(self.n):
            col = columns[j]
            linear = sum(self.a[r] for r in range(self.n) if col >> r & 1)
            edge_ends = sum(
                (self.c.rows[r] & col).bit_count()
                for r in range(self.n)
                if col >> r & 1
            )
            new_a.append((linear + edge_ends) % 4)
        return PhasePoly(self.n, tuple(new_a), BitMatrix(self.n, self.n, new_c_rows))

    def subtract(self, other: "PhasePoly") -> "PhasePoly":
        """The pointwise difference f - g mod 4 (quadratic parts XOR)."""
        if self.n != other.n:
            raise ValueError("width mismatch")
        return PhasePoly(
            self.n,
            tuple((x - y) % 4 for x, y in zip(self.a, other.a)),
            mat_add(self.c, other.c),
        )

    def negate(self) -> "PhasePoly":
        """The pointwise negation -f mod 4 (CZ gates are self-inverse)."""
        return PhasePoly(self.n, tuple(-value % 4 for value in self.a), self.c)

    def is_zero(self) -> bool:
        return all(value == 0 for value in self.a) and all(
            row == 0 for row in self.c.rows
        )

    def cz_gates(self) -> list[Gate]:
        """CZ gates for the quadratic part, pairs in ascending order."""
        gates = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.c.get(i, j):
                    gates.append(Gate("CZ", (i, j)))
        return gates

    def p_gates(self) -> list[Gate]:
        """P gates for the linear part: a_i mod 4 repetitions on qubit i."""
        gates = []
        for i in range(self.n):
            for _ in range(self.a[i] % 4):
                gates.append(Gate("P", (i,)))
        return gates

    def to_gates(self) -> list[Gate]:
        """One diagonal stage: the CZ gates followed by the P gates."""
        return self.cz_gates() + self.p_gates()


def commute_diag_past_linear(
    gamma: PhasePoly | BitMatrix, delta: BitMatrix, placement: str = "after"
) -> tuple[PhasePoly, str]:
    """Move a diagonal stage across a CNOT stage realizing the linear map delta.

    placement names the diagonal stage's current side in execution order:
    "after" means its gates execute after the CNOT stage.  The returned
    phase polynomial on the opposite side gives the same overall tableau:
    moving from after to before substitutes delta, the reverse substitutes
    its inverse.
    """
    poly = gamma if isinstance(gamma, PhasePoly) else PhasePoly.from_gamma(gamma)
    if placement == "after":
        return poly.substitute(delta), "before"
    if placement == "before":
        return poly.substitute(mat_inv(delta)), "after"
    raise ValueError("placement must be 'after' or 'before'")


@dataclass(frozen=True)
class _ReductionParts:
    form: CanonicalForm
    support: tuple[int, ...]
    cosupport: tuple[int, ...]
    cnot_gates: tuple[Gate, ...]
    residual_delta: BitMatrix
    keep_poly: PhasePoly


def _reduction_parts(u: Tableau) -> _ReductionParts:
    """Canonical form of u plus the pieces of the reduction circuit.

    The CNOT gates clear the Delta entries in rows outside the Hadamard
    support and columns inside it, leaving Delta block-diagonal with respect
    to the support split; keep_poly is the support-block phase function
    transported through the residual linear map.
    """
    cf = canonical_form(u)
    n = cf.n
    support = tuple(i for i in range(n) if cf.h >> i & 1)
    cosupport = tuple(i for i in range(n) if not cf.h >> i & 1)
    delta_rows = list(cf.delta.rows)
    cnot_gates = []
    for i in cosupport:
        for j in reversed(support):
            if delta_rows[i] >> j & 1:
                cnot_gates.append(Gate("CNOT", (j, i)))
                delta_rows[i] ^= delta_rows[j]
    residual_delta = BitMatrix(n, n, tuple(delta_rows))
    support_mask = cf.h
    keep_rows = tuple(
        cf.gamma.rows[i] & support_mask if cf.h >> i & 1 else 0 for i in range(n)
    )
    keep_gamma = BitMatrix(n, n, keep_rows)
    keep_poly = PhasePoly.from_gamma(keep_gamma).substitute(mat_inv(residual_delta))
    assert all(
        keep_poly.a[i] == 0 and keep_poly.c.rows[i] == 0
        for i in cosupport
    ), "transported phase function must stay on the support block"
    return _ReductionParts(
        cf, support, cosupport, tuple(cnot_gates), residual_delta, keep_poly
    )


def measurement_reduction(u: Tableau) -> tuple[Circuit, int]:
    """A circuit D that makes u followed by D Hadamard-free, and k = |h|.

    D consists of CNOT gates (at most k(n-k)), CZ gates on the Hadamard
    support (at most k(k-1)/2), P gates, and the Hadamard layer itself, so
    its two-qubit gate count is at most n*k - k(k+1)/2.
    """
    parts = _reduction_parts(u)
    n = u.n
    if not parts.support:
        return Circuit(n, ()), 0
    gates = list(parts.cnot_gates)
    gates.extend(parts.keep_poly.cz_gates())
    gates.extend(parts.keep_poly.negate().p_gates())
    for i in parts.support:
        gates.append(Gate("H", (i,)))
    return Circuit(n, tuple(gates)), len(parts.support)


def block_diagonalize_delta(delta: BitMatrix, k: int) -> tuple[Circuit, BitMatrix]:
    """CNOTs that zero the lower-left block of a block-triangular matrix.

    delta must be invertible with the pattern [[A, 0], [B, C]] where A is
    k x k; the returned gates (controls below k, targets at or above k) add
    top rows into bottom rows so that replaying them on delta zeroes B.  The
    gate count is at most k * (n - k).
    """
    n = delta.n_rows
    if delta.n_cols != n or not 0 <= k <= n:
        raise BadBlockPattern("need a square matrix and 0 <= k <= n")
    top_mask = (1 << k) - 1
    for i in range(k):
        if delta.rows[i] & ~top_mask:
            raise BadBlockPattern("upper-right block must be zero")
    if k == 0 or k == n:
        return Circuit(n, ()), delta
    top = BitMatrix(k, k, delta.rows[:k])
    bottom_left = BitMatrix(n - k, k, tuple(row & top_mask for row in delta.rows[k:]))
    coefficients = mat_mul(bottom_left, mat_inv(top))
    gates = []
    for j in range(k):
        for i in range(n - k):
            if coefficients.get(i, j):
                gates.append(Gate("CNOT", (j, k + i)))
    residual_rows = list(delta.rows)
    for gate in gates:
        control, target = gate.qubits
        residual_rows[target] ^= residual_rows[control]
    residual = BitMatrix(n, n, tuple(residual_rows))
    assert all(residual.rows[i] & top_mask == 0 for i in range(k, n))
    return Circuit(n, tuple(gates)), residual


def _linear_layer_gates(delta: BitMatrix) -> list[Gate]:
    """CNOT gates whose circuit realizes the invertible linear map delta.

    Gauss-Jordan elimination over GF(2) reduces delta to the identity with
    row additions only (a missing pivot is filled from a lower row, which
    always exists for invertible input); replaying the inverse operations in
    reverse builds the map, and each row addition is one CNOT.
    """
    n = delta.n_rows
    rows = list(delta.rows)
    operations = []
    for col in range(n):
        if not rows[col] >> col & 1:
            source = next(r for r in range(col + 1, n) if rows[r] >> col & 1)
            rows[col] ^= rows[source]
            operations.append((source, col))
        for r in range(n):
            if r != col and rows[r] >> col & 1:
                rows[r] ^= rows[col]
                operations.append((col, r))
    assert rows == [1 << i for i in range(n)]
    return [Gate("CNOT", (c, t)) for c, t in reversed(operations)]


def _diag_vector(m: BitMatrix) -> int:
    out = 0
    for i in range(m.n_rows):
        out |= m.get(i, i) << i
    return out


def _diag_matrix(n: int, bits: int) -> BitMatrix:
    return BitMatrix(n, n, tuple((bits >> i & 1) << i for i in range(n)))


def nine_stage_decomposition(u: Tableau) -> StagedCircuit:
    """Decompose a Clifford operator into the stages -X-Z-P-CX-CZ-H-CZ-H-P-.

    All nine stages are emitted (some possibly empty); concatenating them
    reproduces u exactly, and only the CX and two CZ stages hold two-qubit
    gates.
    """
    parts = _reduction_parts(u)
    n = u.n
    reduction, _ = measurement_reduction(u)
    tail = tableau_to_hfree(compose(from_circuit(reduction), u))
    delta_t = tail.delta
    gamma_t = tail.gamma

    # Split the tail's quadratic form into a CZ stage after the CX stage and
    # a P stage before it.  The diagonal correction d below is the unique
    # choice that makes the transported quadratic part hollow again.
    hollow_rows = tuple(row & ~(1 << i) for i, row in enumerate(gamma_t.rows))
    cross = BitMatrix(n, n, hollow_rows)
    delta_inv = mat_inv(delta_t)
    delta_inv_t = transpose(delta_inv)
    pushed = mat_mul(delta_inv_t, mat_mul(cross, delta_inv))
    correction = mat_vec_mul(transpose(delta_t), _diag_vector(pushed))
    stage5_c = mat_mul(
        delta_inv_t,
        mat_mul(mat_add(cross, _diag_matrix(n, correction)), delta_inv),
    )
    stage5_poly = PhasePoly(n, (0,) * n, stage5_c)
    residual = PhasePoly.from_gamma(gamma_t).subtract(stage5_poly.substitute(delta_t))
    assert all(row == 0 for row in residual.c.rows), "P stage must be purely diagonal"

    stage3 = Circuit(n, tuple(residual.p_gates()))
    stage4 = Circuit(n, tuple(_linear_layer_gates(delta_t)))
    stage5 = Circuit(n, tuple(stage5_poly.cz_gates()))

    # Head stages: the reduction circuit runs in reverse after the tail.  Its
    # CNOTs (controls on the support, targets off it) pairwise commute, so
    # rewriting each as H CZ H on its target collapses into one CZ stage
    # between two H layers; the support Hadamards and the diagonal gates
    # commute past disjoint qubit sets into the fixed stage slots.
    botset = sorted({gate.qubits[1] for gate in parts.cnot_gates})
    stage6 = Circuit(
        n, tuple(Gate("H", (q,)) for q in sorted(set(parts.support) | set(botset)))
    )
    stage7_gates = list(parts.keep_poly.cz_gates())
    for gate in parts.cnot_gates:
        control, target = gate.qubits
        stage7_gates.append(Gate("CZ", tuple(sorted((control, target)))))
    stage7 = Circuit(n, tuple(stage7_gates))
    stage8 = Circuit(n, tuple(Gate("H", (q,)) for q in botset))
    stage9 = Circuit(n, tuple(parts.keep_poly.p_gates()))

    later = [
        ("P", stage3),
        ("CX", stage4),
        ("CZ", stage5),
        ("H", stage6),
        ("CZ", stage7),
        ("H", stage8),
        ("P", stage9),
    ]
    gates = []
    for _, circuit in later:
        gates.extend(circuit.gates)
    partial = from_circuit(Circuit(n, tuple(gates)))
    pauli_fix = compose(tableau_inverse(partial), u)
    x_bits = 0
    z_bits = 0
    for j in range(n):
        ximg = pauli_fix.x_images[j]
        zimg = pauli_fix.z_images[j]
        assert ximg.x_bits == 1 << j and ximg.z_bits == 0 and ximg.phase in (0, 2)
        assert zimg.z_bits == 1 << j and zimg.x_bits == 0 and zimg.phase in (0, 2)
        if zimg.phase == 2:
            x_bits |= 1 << j
        if ximg.phase == 2:
            z_bits |= 1 << j
    stage1 = Circuit(n, tuple(Gate("X", (j,)) for j in range(n) if x_bits >> j & 1))
    stage2 = Circuit(n, tuple(Gate("Z", (j,)) for j in range(n) if z_bits >> j & 1))

    staged = StagedCircuit(n, tuple([("X", stage1), ("Z", stage2)] + later))
    assert from_circuit(staged.to_circuit()) == u
    return staged

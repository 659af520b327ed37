"""Hadamard sandwiches over CNOT circuits and two-qubit-count reduction tools.

A pure-CNOT circuit computes an invertible linear map U on basis states.
Conjugating a window W of such a circuit by Hadamard layers, H(b) W H(a) with
H(a) = product of H over the support of the mask a, sometimes leaves the
operator Hadamard-free, and under a stronger condition leaves it equal to W.
In the second case the inserted Hadamards are free to absorb a neighbouring
CNOT into a CZ, which in turn dissolves into single-qubit phase gates, taking
the two-qubit count below the pure-CNOT optimum.  This module detects both
conditions, runs that rewrite, builds the three-Hadamard-layer circuit for a
symmetric linear map, and provides an exhaustive CNOT-cost table for small n.
"""

from .f2core import (
    BitMatrix,
    Singular,
    is_invertible,
    is_symmetric,
    mat_inv,
    transpose,
    zeros,
)
from .hfree import HFreeOp, hfree_to_tableau
from .pauli import identity_pauli
from .tableau import Circuit, Gate, compose, from_circuit
from .tableau import inverse as tableau_inverse

__all__ = [
    "NotCNOTCircuit",
    "NotSymmetric",
    "TooLarge",
    "circuit_linear_matrix",
    "subspace_image_matches",
    "sandwich_is_hfree",
    "sandwich_is_identity",
    "example1_rewrite",
    "gstar_symmetric_circuit",
    "cnot_cost_oracle",
]


class NotCNOTCircuit(Exception):
    """The circuit contains a gate other than CNOT."""


class NotSymmetric(Exception):
    """The matrix is not symmetric."""


class TooLarge(Exception):
    """The requested exhaustive computation is out of range."""


def _mask_bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask >> i:
        if mask >> i & 1:
            out.append(i)
        i += 1
    return out


def _column(m: BitMatrix, j: int) -> int:
    col = 0
    for i in range(m.n_rows):
        col |= (m.rows[i] >> j & 1) << i
    return col


def circuit_linear_matrix(c: Circuit) -> BitMatrix:
    """The invertible matrix computed by a pure-CNOT circuit.

    Raises NotCNOTCircuit if any gate is not a CNOT.
    """
    rows = [1 << i for i in range(c.n)]
    for gate in c.gates:
        if gate.kind != "CNOT":
            raise NotCNOTCircuit(f"{gate.kind} gate in CNOT-only circuit")
        control, target = gate.qubits
        rows[target] ^= rows[control]
    return BitMatrix(c.n, c.n, tuple(rows))


def subspace_image_matches(u: BitMatrix, a: int, b: int) -> bool:
    """True iff u maps the coordinate subspace of mask a onto that of mask b.

    The subspace of a mask is the span of the basis vectors at its set bits.
    Since u is invertible the image has the same dimension, so equality holds
    exactly when the masks have equal weight and every column of u at a set
    bit of a is supported inside b.  Raises Singular if u is not invertible.
    """
    if not is_invertible(u):
        raise Singular("matrix is not invertible")
    if a.bit_count() != b.bit_count():
        return False
    return all(_column(u, j) & ~b == 0 for j in _mask_bits(a))


def sandwich_is_hfree(u: BitMatrix, a: int, b: int) -> bool:
    """True iff H(b) W H(a) is Hadamard-free, for W the CNOT circuit of u.

    H(m) is a Hadamard on every qubit in the mask m.  The sandwich stays
    Hadamard-free exactly when u maps the subspace of a onto that of b.
    """
    return subspace_image_matches(u, a, b)


def sandwich_is_identity(u: BitMatrix, a: int, b: int) -> bool:
    """True when H(b) W H(a) = W is guaranteed, for W the CNOT circuit of u.

    The guarantee needs u to map the subspace of a onto that of b and to
    agree with the inverse transpose of u on that subspace.  This is a
    sufficient condition; a False return does not rule out equality.
    """
    if not subspace_image_matches(u, a, b):
        return False
    inv_t = transpose(mat_inv(u))
    return all(_column(u, j) == _column(inv_t, j) for j in _mask_bits(a))


def _support_pairs(n: int, max_weight: int):
    """Mask pairs (a, b) of equal weight, lightest first, zero excluded."""
    by_weight: dict[int, list[int]] = {}
    for mask in range(1, 1 << n):
        by_weight.setdefault(mask.bit_count(), []).append(mask)
    for weight in range(1, max_weight + 1):
        masks = by_weight.get(weight, ())
        for a in masks:
            for b in masks:
                yield a, b


def _frames(gates: tuple[Gate, ...], n: int) -> list[list[frozenset]]:
    """Linear function carried by each wire at every gate boundary.

    Functions are symbol sets combined by XOR; each input wire starts with
    its own symbol and every Hadamard replaces its wire's function with a
    fresh symbol.  Boundary t is the point after the first t gates.
    """
    wires = [frozenset([("in", i)]) for i in range(n)]
    out = [list(wires)]
    for pos, gate in enumerate(gates):
        if gate.kind == "CNOT":
            control, target = gate.qubits
            wires[target] = wires[target] ^ wires[control]
        elif gate.kind == "SWAP":
            i, j = gate.qubits
            wires[i], wires[j] = wires[j], wires[i]
        elif gate.kind == "H":
            wires[gate.qubits[0]] = frozenset([("h", pos)])
        out.append(list(wires))
    return out


def _eliminate_cz(gates: list[Gate], idx: int, n: int) -> list[Gate] | None:
    """Replace the CZ at idx with phase gates, or None if no spot exists.

    The CZ contributes (-1)^(x*y) for the wire functions x, y at its
    boundary.  That equals P on a wire carrying x, P on a wire carrying y
    and P-inverse on a wire carrying x XOR y, each placed at any boundary
    where the function is present; the first boundary carrying x XOR y on
    some wire hosts the P-inverse.
    """
    frames = _frames(tuple(gates), n)
    control, target = gates[idx].qubits
    wanted = frames[idx][control] ^ frames[idx][target]
    spot = None
    for boundary, wires in enumerate(frames):
        for wire, func in enumerate(wires):
            if func == wanted:
                spot = (boundary, wire)
                break
        if spot:
            break
    if spot is None:
        return None
    boundary, wire = spot
    inverse_phase = [Gate("Z", (wire,)), Gate("P", (wire,))]
    out: list[Gate] = []
    for pos, gate in enumerate(gates):
        if pos == boundary:
            out.extend(inverse_phase)
        if pos == idx:
            out.extend([Gate("P", (control,)), Gate("P", (target,))])
        else:
            out.append(gate)
    if boundary == len(gates):
        out.extend(inverse_phase)
    return out


def _window_candidate(
    gates: tuple[Gate, ...], start: int, end: int, a: int, b: int, n: int
) -> list[Gate] | None:
    """Insert H layers around the window and dissolve one adjacent CNOT."""
    prefix = list(gates[:start])
    if not prefix or prefix[-1].kind != "CNOT":
        return None
    control, target = prefix[-1].qubits
    if not (a >> target & 1) or a >> control & 1:
        return None
    prefix.pop()
    h_a = [Gate("H", (q,)) for q in _mask_bits(a)]
    h_b = [Gate("H", (q,)) for q in _mask_bits(b)]
    assembled = (
        prefix
        + h_a
        + [Gate("CZ", (control, target))]
        + list(gates[start:end])
        + h_b
        + list(gates[end:])
    )
    return _eliminate_cz(assembled, len(prefix) + len(h_a), n)


def _improving_rewrite(circuit: Circuit, max_weight: int) -> Circuit | None:
    target = from_circuit(circuit)
    baseline = circuit.two_qubit_count()
    n = circuit.n
    gates = circuit.gates
    windows = [
        (start, end)
        for size in range(len(gates), 0, -1)
        for start in range(len(gates) - size + 1)
        for end in [start + size]
        if all(g.kind == "CNOT" for g in gates[start:end])
    ]
    for start, end in windows:
        w = circuit_linear_matrix(Circuit(n, gates[start:end]))
        for a, b in _support_pairs(n, max_weight):
            if not sandwich_is_identity(w, a, b):
                continue
            new_gates = _window_candidate(gates, start, end, a, b, n)
            if new_gates is None:
                continue
            candidate = Circuit(n, tuple(new_gates))
            if candidate.two_qubit_count() >= baseline:
                continue
            if from_circuit(candidate) != target:
                continue
            return candidate
    return None


def example1_rewrite(c: Circuit, max_support_weight: int = 2) -> Circuit:
    """Lower the two-qubit count of a CNOT circuit via Hadamard sandwiches.

    Scans contiguous CNOT windows, largest first, for Hadamard masks under
    which conjugation leaves the window unchanged, then trades one CNOT
    adjacent to the window for a CZ and dissolves that CZ into phase gates.
    Every rewrite is checked for exact tableau equality and kept only when
    it strictly lowers the two-qubit count; the input is returned unchanged
    when no such rewrite exists.  Raises NotCNOTCircuit for non-CNOT input.
    """
    for gate in c.gates:
        if gate.kind != "CNOT":
            raise NotCNOTCircuit(f"{gate.kind} gate in CNOT-only circuit")
    current = c
    while True:
        candidate = _improving_rewrite(current, max_support_weight)
        if candidate is None:
            return current
        current = candidate


def gstar_symmetric_circuit(a_mat: BitMatrix) -> Circuit:
    """Circuit for the linear map of a symmetric invertible matrix, built from
    three Hadamard layers around two diagonal-phase layers.

    The output sends |x> to |a_mat x> up to a diagonal-phase operator, and
    its two-qubit gates are the CZ gates of the two diagonal layers: one per
    off-diagonal set entry of the inverse and of the matrix itself.  Bit-flip
    discrepancies of the raw sandwich are cancelled by trailing X gates so
    that only the diagonal-phase discrepancy remains.  Raises NotSymmetric
    or Singular for bad input.
    """
    n = a_mat.n_rows
    if a_mat.n_cols != n or not is_symmetric(a_mat):
        raise NotSymmetric("matrix must be square and symmetric")
    inv = mat_inv(a_mat)
    h_layer = [Gate("H", (i,)) for i in range(n)]

    def diagonal_layer(m: BitMatrix) -> list[Gate]:
        gates = [Gate("P", (i,)) for i in range(n) if m.rows[i] >> i & 1]
        gates += [
            Gate("CZ", (i, j))
            for i in range(n)
            for j in range(i + 1, n)
            if m.rows[i] >> j & 1
        ]
        return gates

    body = h_layer + diagonal_layer(inv) + h_layer + diagonal_layer(a_mat) + h_layer
    raw = from_circuit(Circuit(n, tuple(body)))
    linear = hfree_to_tableau(HFreeOp(n, identity_pauli(n), zeros(n, n), a_mat))
    residue = compose(raw, tableau_inverse(linear))
    fixes = []
    for i in range(n):
        image = residue.z_images[i]
        assert image.x_bits == 0 and image.z_bits == 1 << i
        if image.phase == 2:
            fixes.append(Gate("X", (i,)))
    return Circuit(n, tuple(body + fixes))


def cnot_cost_oracle(n: int) -> dict[BitMatrix, int]:
    """Minimal CNOT count for every invertible matrix, by breadth-first search.

    Builds the full distance table from the identity over the n(n-1)
    single-CNOT generators.  Raises TooLarge for n > 4.
    """
    if n > 4:
        raise TooLarge("exhaustive CNOT-cost table is limited to n <= 4")
    generators = [(c, t) for c in range(n) for t in range(n) if c != t]
    start = tuple(1 << i for i in range(n))
    costs = {start: 0}
    frontier = [start]
    while frontier:
        next_frontier = []
        for rows in frontier:
            for control, target in generators:
                new_rows = list(rows)
                new_rows[target] ^= new_rows[control]
                key = tuple(new_rows)
                if key not in costs:
                    costs[key] = costs[rows] + 1
                    next_frontier.append(key)
        frontier = next_frontier
    return {BitMatrix(n, n, rows): cost for rows, cost in costs.items()}

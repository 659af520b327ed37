"""Dense complex-matrix oracles used only by the test suite."""

import numpy as np

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_P = np.array([[1, 0], [0, 1j]], dtype=complex)

_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

_SINGLE = {"X": _X, "Z": _Z, "P": _P, "H": _H}
_DOUBLE = {"CNOT": _CNOT, "CZ": _CZ, "SWAP": _SWAP}

# Basis convention: qubit 0 is the first tensor factor, i.e. the most
# significant bit of the basis index (matching np.kron accumulation order).


def _qubit_bit(index, i, n):
    return (index >> (n - 1 - i)) & 1


def pauli_to_matrix(p):
    """Dense 2^n matrix of a PauliOp, phase included."""
    acc = np.eye(1, dtype=complex)
    for i in range(p.n):
        factor = np.eye(2, dtype=complex)
        if (p.x_bits >> i) & 1:
            factor = factor @ _X
        if (p.z_bits >> i) & 1:
            factor = factor @ _Z
        acc = np.kron(acc, factor)
    return (1j ** p.phase) * acc


def gate_to_matrix(gate, n):
    """Dense matrix of a Gate on n qubits, built column by column."""
    if gate.kind in _SINGLE:
        op = _SINGLE[gate.kind]
        qubits = [gate.qubits[0]]
    else:
        op = _DOUBLE[gate.kind]
        qubits = list(gate.qubits)
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        local_in = 0
        for q in qubits:
            local_in = (local_in << 1) | _qubit_bit(col, q, n)
        for local_out in range(2 ** len(qubits)):
            amp = op[local_out, local_in]
            if amp == 0:
                continue
            row = col
            for pos, q in enumerate(qubits):
                bit = (local_out >> (len(qubits) - 1 - pos)) & 1
                shift = n - 1 - q
                row = (row & ~(1 << shift)) | (bit << shift)
            out[row, col] += amp
    return out


def circuit_to_matrix(circ):
    """Dense unitary of a Circuit (gates applied in list order)."""
    acc = np.eye(2 ** circ.n, dtype=complex)
    for gate in circ.gates:
        acc = gate_to_matrix(gate, circ.n) @ acc
    return acc


def equal_up_to_phase(u, v, tol=1e-9):
    """True iff u = c*v for a unit scalar c."""
    idx = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(v[idx]) < tol:
        return np.allclose(u, v, atol=tol)
    c = u[idx] / v[idx]
    if abs(abs(c) - 1) > 1e-6:
        return False
    return np.allclose(u, c * v, atol=tol)


def tableau_consistent_with_unitary(t, u):
    """Check all 2n Pauli images of t against conjugation by the unitary u."""
    from cliffc.pauli import PauliOp

    n = t.n
    u_dag = u.conj().T
    for i in range(n):
        for source, image in (
            (PauliOp(n, 1 << i, 0, 0), t.x_images[i]),
            (PauliOp(n, 0, 1 << i, 0), t.z_images[i]),
        ):
            lhs = u @ pauli_to_matrix(source) @ u_dag
            if not np.allclose(lhs, pauli_to_matrix(image), atol=1e-9):
                return False
    return True


def random_bitmatrix(rng, n_rows, n_cols):
    from cliffc.f2core import BitMatrix

    return BitMatrix(n_rows, n_cols, tuple(rng.getrandbits(n_cols) for _ in range(n_rows)))


def random_symmetric(rng, n):
    from cliffc.f2core import from_rows

    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = rng.getrandbits(1)
    return from_rows(rows)


def random_lower_unit(rng, n):
    from cliffc.f2core import BitMatrix

    return BitMatrix(
        n, n, tuple((rng.getrandbits(i) if i else 0) | (1 << i) for i in range(n))
    )


def random_invertible(rng, n):
    from cliffc.f2core import is_invertible

    while True:
        m = random_bitmatrix(rng, n, n)
        if is_invertible(m):
            return m


def random_pauli(rng, n, phase=None):
    from cliffc.pauli import PauliOp

    if phase is None:
        phase = rng.randrange(4)
    return PauliOp(n, rng.getrandbits(n), rng.getrandbits(n), phase)


def random_permutation(rng, n):
    from cliffc.f2core import Permutation

    images = list(range(n))
    rng.shuffle(images)
    return Permutation(tuple(images))


def random_hfree(rng, n, borel=False, phase=0):
    from cliffc.hfree import HFreeOp

    delta = random_lower_unit(rng, n) if borel else random_invertible(rng, n)
    return HFreeOp(n, random_pauli(rng, n, phase), random_symmetric(rng, n), delta)

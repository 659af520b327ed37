"""Hadamard-free Clifford operators and the Borel subgroup.

A Hadamard-free operator is parameterized as F(O, Gamma, Delta) acting on a
basis state |x> by F|x> = i^(x^T Gamma x) * O |Delta x>, where O is a Pauli
operator, Gamma is a symmetric bit matrix (the quadratic form is evaluated
as an integer mod 4: diagonal entries weigh 1, off-diagonal pairs weigh 2),
and Delta is invertible over GF(2).  The phase exponent is read on the input
x, before Delta acts.  Borel operators are those with Delta lower triangular
and unit diagonal.

The rule predicates C1..C5 select, for layer data (h, S), which Gamma/Delta
entries of a Borel operator may be nonzero; the same rules with h negated
select the Borel operators whose conjugate by the Hadamard-permutation layer
W(h, S) stays Hadamard-free.
"""

from __future__ import annotations

from dataclasses import dataclass

from .f2core import (
    BitMatrix,
    Permutation,
    from_rows,
    identity,
    is_invertible,
    is_lower_unit_triangular,
    is_symmetric,
    mat_add,
    mat_inv,
    mat_mul,
    mat_vec_mul,
    solve_linear,
    transpose,
)
from .pauli import PauliOp, identity_pauli, pauli_inverse, pauli_mul
from .tableau import (
    Circuit,
    Gate,
    Tableau,
    compose,
    inverse as tableau_inverse,
    tableau_bit_matrix,
)

__all__ = [
    "NotBorel",
    "NotHFree",
    "HFreeOp",
    "HSLayer",
    "identity_hfree",
    "hfree_mul",
    "hfree_inverse",
    "borel_to_circuit",
    "hfree_to_tableau",
    "tableau_to_hfree",
    "hslayer_to_tableau",
    "check_rules_c1c5",
    "free_bit_count",
    "conjugate_by_hs",
]


class NotBorel(Exception):
    """Raised when an operation requires Delta to be lower unit triangular."""


class NotHFree(Exception):
    """Raised when a tableau has Hadamard content (an X bit in some Z image)."""


@dataclass(frozen=True)
class HFreeOp:
    """Hadamard-free operator F(O, Gamma, Delta); see the module docstring."""

    n: int
    pauli: PauliOp
    gamma: BitMatrix
    delta: BitMatrix

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.pauli.n != self.n:
            raise ValueError("Pauli part has wrong width")
        for m, name in ((self.gamma, "gamma"), (self.delta, "delta")):
            if m.n_rows != self.n or m.n_cols != self.n:
                raise ValueError(f"{name} must be {self.n}x{self.n}")
        if not is_symmetric(self.gamma):
            raise ValueError("gamma must be symmetric")
        if not is_invertible(self.delta):
            raise ValueError("delta must be invertible")

    @property
    def is_borel(self) -> bool:
        return is_lower_unit_triangular(self.delta)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pauli": self.pauli.to_string(),
            "gamma": self.gamma.to_json(),
            "delta": self.delta.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HFreeOp":
        return cls(
            int(obj["n"]),
            PauliOp.from_string(obj["pauli"]),
            BitMatrix.from_json(obj["gamma"]),
            BitMatrix.from_json(obj["delta"]),
        )


@dataclass(frozen=True)
class HSLayer:
    """Layer W(h, S): relabel qubits by S, then apply H where h is set.

    W maps X_j to X at qubit S^-1(j), switched to Z when the h bit at that
    qubit is set.  Its basis action is W|x> = H^h |y> with y_i = x_{S(i)}.
    """

    n: int
    h: int
    s: Permutation

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.s.n != self.n:
            raise ValueError("permutation has wrong size")
        if not 0 <= self.h < (1 << self.n):
            raise ValueError("h out of range")


def identity_hfree(n: int) -> HFreeOp:
    """The identity operator as F(I, 0, I)."""
    return HFreeOp(n, identity_pauli(n), BitMatrix(n, n, (0,) * n), identity(n))


def _conjugated_by_pauli(o: PauliOp, q: PauliOp) -> PauliOp:
    return pauli_mul(pauli_mul(o, q), pauli_inverse(o))


def hfree_to_tableau(f: HFreeOp) -> Tableau:
    """Tableau of F(O, Gamma, Delta).

    The X image of qubit j is i^(Gamma_jj) X(Delta e_j) Z(Delta^-T Gamma e_j)
    and the Z image is Z(Delta^-T e_j), each sign-flipped where it
    anticommutes with O.
    """
    n = f.n
    delta_inv_t = transpose(mat_inv(f.delta))
    x_images = []
    z_images = []
    for j in range(n):
        xq = PauliOp(
            n,
            f.delta.column(j),
            mat_vec_mul(delta_inv_t, f.gamma.column(j)),
            f.gamma.get(j, j),
        )
        zq = PauliOp(n, 0, mat_vec_mul(delta_inv_t, 1 << j), 0)
        x_images.append(_conjugated_by_pauli(f.pauli, xq))
        z_images.append(_conjugated_by_pauli(f.pauli, zq))
    return Tableau(n, tuple(x_images), tuple(z_images))


def tableau_to_hfree(t: Tableau) -> HFreeOp:
    """Recover F(O, Gamma, Delta) from a tableau.

    Raises NotHFree when some Z image has an X bit, i.e. the operator does
    not map the computational basis to itself.
    """
    n = t.n
    for zq in t.z_images:
        if zq.x_bits:
            raise NotHFree("Z image has X content")
    delta = from_rows(
        [[t.x_images[j].x_bits >> i & 1 for j in range(n)] for i in range(n)]
    )
    lower_left = from_rows(
        [[t.x_images[j].z_bits >> i & 1 for j in range(n)] for i in range(n)]
    )
    gamma = mat_mul(transpose(delta), lower_left)
    if not is_symmetric(gamma):
        raise NotHFree("X images are not symplectically consistent")
    base = hfree_to_tableau(HFreeOp(n, identity_pauli(n), gamma, delta))
    rows = []
    rhs = 0
    for k, (img, ref) in enumerate(
        list(zip(t.x_images, base.x_images)) + list(zip(t.z_images, base.z_images))
    ):
        if (img.x_bits, img.z_bits) != (ref.x_bits, ref.z_bits):
            raise NotHFree("bit pattern does not match any Hadamard-free form")
        diff = (img.phase - ref.phase) % 4
        if diff % 2:
            raise NotHFree("image phases differ by an odd power of i")
        rows.append(img.z_bits | img.x_bits << n)
        rhs |= (diff // 2) << k
    sol = solve_linear(BitMatrix(2 * n, 2 * n, tuple(rows)), rhs)
    ox = sol & (1 << n) - 1
    oz = sol >> n
    return HFreeOp(n, PauliOp(n, ox, oz, 0), gamma, delta)


def hfree_mul(f2: HFreeOp, f1: HFreeOp) -> HFreeOp:
    """Product f2 * f1 (f1 acts first)."""
    if f2.n != f1.n:
        raise ValueError("operator widths differ")
    result = tableau_to_hfree(compose(hfree_to_tableau(f2), hfree_to_tableau(f1)))
    assert result.delta == mat_mul(f2.delta, f1.delta)
    assert result.gamma == mat_add(
        f1.gamma, mat_mul(transpose(f1.delta), mat_mul(f2.gamma, f1.delta))
    )
    return result


def hfree_inverse(f: HFreeOp) -> HFreeOp:
    """Inverse operator, with Gamma mapped to Delta^-T Gamma Delta^-1."""
    result = tableau_to_hfree(tableau_inverse(hfree_to_tableau(f)))
    delta_inv = mat_inv(f.delta)
    assert result.delta == delta_inv
    assert result.gamma == mat_mul(transpose(delta_inv), mat_mul(f.gamma, delta_inv))
    return result


def borel_to_circuit(f: HFreeOp) -> Circuit:
    """Circuit for a Borel operator.

    Execution order: P gates from the Gamma diagonal, CZ gates from the
    Gamma off-diagonal, the CNOT realization of Delta column by column with
    control index decreasing, then Z and X gates from the Pauli part.  The
    phase layer runs first so that the quadratic form is read on the inputs.
    """
    if not f.is_borel:
        raise NotBorel("delta is not lower unit triangular")
    n = f.n
    gates = []
    for i in range(n):
        if f.gamma.get(i, i):
            gates.append(Gate("P", (i,)))
    for i in range(n):
        for j in range(i + 1, n):
            if f.gamma.get(i, j):
                gates.append(Gate("CZ", (i, j)))
    for j in range(n - 1, -1, -1):
        for i in range(j + 1, n):
            if f.delta.get(i, j):
                gates.append(Gate("CNOT", (j, i)))
    for i in range(n):
        if f.pauli.z_bits >> i & 1:
            gates.append(Gate("Z", (i,)))
    for i in range(n):
        if f.pauli.x_bits >> i & 1:
            gates.append(Gate("X", (i,)))
    return Circuit(n, tuple(gates))


def hslayer_to_tableau(w: HSLayer) -> Tableau:
    """Tableau of W(h, S): X_j maps to X or Z at qubit S^-1(j)."""
    n = w.n
    s_inv = w.s.inverse()
    x_images = []
    z_images = []
    for j in range(n):
        i = s_inv(j)
        if w.h >> i & 1:
            x_images.append(PauliOp(n, 0, 1 << i, 0))
            z_images.append(PauliOp(n, 1 << i, 0, 0))
        else:
            x_images.append(PauliOp(n, 1 << i, 0, 0))
            z_images.append(PauliOp(n, 0, 1 << i, 0))
    return Tableau(n, tuple(x_images), tuple(z_images))


def check_rules_c1c5(h: int, s: Permutation, gamma: BitMatrix, delta: BitMatrix) -> bool:
    """True when (gamma, delta) obey the zero rules C1..C5 for (h, s).

    C1: h_i = h_j = 0 forces Gamma_ij = 0 (including i = j).
    C2: h_i = 1, h_j = 0, S(i) > S(j) forces Gamma_ij = 0.
    C3: h_i = h_j = 0, S(i) > S(j) forces Delta_ij = 0.
    C4: h_i = h_j = 1, S(i) < S(j) forces Delta_ij = 0.
    C5: h_i = 1, h_j = 0 forces Delta_ij = 0.
    """
    n = s.n
    for i in range(n):
        hi = h >> i & 1
        for j in range(n):
            hj = h >> j & 1
            if hi == 0 and hj == 0 and gamma.get(i, j):
                return False
            if hi == 1 and hj == 0 and s(i) > s(j) and gamma.get(i, j):
                return False
            if hi == 0 and hj == 0 and s(i) > s(j) and delta.get(i, j):
                return False
            if hi == 1 and hj == 1 and s(i) < s(j) and delta.get(i, j):
                return False
            if hi == 1 and hj == 0 and delta.get(i, j):
                return False
    return True


def free_bit_count(h: int, s: Permutation) -> int:
    """Number of free Gamma/Delta bits left to a Borel operator by C1..C5.

    Equals n(n-1)/2 + |h| + sum over pairs i < j with S(i) < S(j) of +1 when
    h_i = 1 and -1 when h_i = 0.
    """
    n = s.n
    total = n * (n - 1) // 2 + h.bit_count()
    greater = _rank_greater_masks(s)
    for i in range(n):
        count = (greater[i] >> (i + 1)).bit_count()
        total += count if h >> i & 1 else -count
    return total


def _rank_greater_masks(s: Permutation) -> list[int]:
    """For each qubit i, the bitmask of qubits j with S(j) > S(i)."""
    n = s.n
    greater = [0] * n
    acc = 0
    for i in sorted(range(n), key=s, reverse=True):
        greater[i] = acc
        acc |= 1 << i
    return greater


def conjugate_by_hs(f: HFreeOp, w: HSLayer) -> HFreeOp | None:
    """W^-1 f W for a Borel f, or None when the result is not Hadamard-free."""
    if not f.is_borel:
        raise NotBorel("delta is not lower unit triangular")
    tw = hslayer_to_tableau(w)
    conj = compose(compose(tableau_inverse(tw), hfree_to_tableau(f)), tw)
    try:
        return tableau_to_hfree(conj)
    except NotHFree:
        return None

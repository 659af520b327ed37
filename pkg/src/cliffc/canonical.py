"""Canonical factorization of Clifford operators.

Every Clifford tableau factors uniquely as F1 * W * F2 where F1 = F(Id,
Gamma, Delta) is a Borel operator whose labels obey the rules C1..C5 for the
layer data (h, S), W = W(h, S) is the Hadamard-permutation layer, and F2 =
F(O', Gamma', Delta') is Borel.  The factorization is computed by
disentangling the tableau one qubit at a time with Borel operators on both
sides, reading (h, S) off the resulting non-entangling operator, and then
splitting the left Borel factor against the rule patterns by solving a
linear system over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .f2core import (
    BitMatrix,
    Inconsistent,
    Permutation,
    Underdetermined,
    from_rows,
    identity,
    identity_permutation,
    is_lower_unit_triangular,
    is_symmetric,
    mat_inv,
    mat_mul,
    solve_linear,
    vector_from_string,
    vector_to_string,
)
from .hfree import (
    HFreeOp,
    HSLayer,
    NotBorel,
    check_rules_c1c5,
    conjugate_by_hs,
    hfree_inverse,
    hfree_mul,
    hfree_to_tableau,
    hslayer_to_tableau,
    identity_hfree,
    tableau_to_hfree,
)
from .pauli import PauliOp, identity_pauli, single_qubit_support
from .tableau import (
    Circuit,
    Gate,
    Tableau,
    apply_gate,
    compose,
    conjugate_pauli,
    from_circuit,
    identity_tableau,
    inverse as tableau_inverse,
    is_valid_tableau,
)

__all__ = [
    "NotNonEntangling",
    "NoSolution",
    "NonUniqueSolution",
    "InvalidTableau",
    "CanonicalForm",
    "disentangle_pauli",
    "disentangle_clifford_step",
    "decompose_nonentangling",
    "split_borel",
    "canonical_form",
    "canonical_to_tableau",
    "gamma_free_positions",
    "delta_free_positions",
]


class NotNonEntangling(Exception):
    """Raised when an operator expected to have single-qubit images does not."""


class NoSolution(Exception):
    """Raised when the Borel split system is infeasible (an internal bug)."""


class NonUniqueSolution(Exception):
    """Raised when the Borel split system is underdetermined (an internal bug)."""


class InvalidTableau(Exception):
    """Raised when an input tableau is not symplectic or has bad phases."""


@dataclass(frozen=True)
class CanonicalForm:
    """The five-layer factorization F(Id,Gamma,Delta) * W(h,S) * F(O',Gamma',Delta')."""

    n: int
    gamma: BitMatrix
    delta: BitMatrix
    h: int
    s: Permutation
    oprime: PauliOp
    gamma_prime: BitMatrix
    delta_prime: BitMatrix

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        for m, name in (
            (self.gamma, "gamma"),
            (self.delta, "delta"),
            (self.gamma_prime, "gamma_prime"),
            (self.delta_prime, "delta_prime"),
        ):
            if m.n_rows != self.n or m.n_cols != self.n:
                raise ValueError(f"{name} must be {self.n}x{self.n}")
        if not (is_symmetric(self.gamma) and is_symmetric(self.gamma_prime)):
            raise ValueError("gamma parts must be symmetric")
        if not (
            is_lower_unit_triangular(self.delta)
            and is_lower_unit_triangular(self.delta_prime)
        ):
            raise ValueError("delta parts must be lower unit triangular")
        if self.s.n != self.n or self.oprime.n != self.n:
            raise ValueError("layer data has wrong size")
        if not 0 <= self.h < (1 << self.n):
            raise ValueError("h out of range")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "gamma": self.gamma.to_json(),
            "delta": self.delta.to_json(),
            "h": vector_to_string(self.h, self.n),
            "s": self.s.to_one_based(),
            "oprime": self.oprime.to_string(),
            "gamma_prime": self.gamma_prime.to_json(),
            "delta_prime": self.delta_prime.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CanonicalForm":
        n = int(obj["n"])
        return cls(
            n,
            BitMatrix.from_json(obj["gamma"]),
            BitMatrix.from_json(obj["delta"]),
            vector_from_string(obj["h"], n),
            Permutation.from_one_based(obj["s"]),
            PauliOp.from_string(obj["oprime"]),
            BitMatrix.from_json(obj["gamma_prime"]),
            BitMatrix.from_json(obj["delta_prime"]),
        )


def gamma_free_positions(h: int, s: Permutation) -> list[tuple[int, int]]:
    """Gamma positions (i <= j) the rules C1..C5 leave free for (h, s)."""
    out = []
    for i in range(s.n):
        hi = h >> i & 1
        for j in range(i, s.n):
            hj = h >> j & 1
            if i == j:
                free = hi == 1
            elif hi and hj:
                free = True
            elif hi and not hj:
                free = s(i) < s(j)
            elif hj and not hi:
                free = s(i) > s(j)
            else:
                free = False
            if free:
                out.append((i, j))
    return out


def delta_free_positions(h: int, s: Permutation) -> list[tuple[int, int]]:
    """Delta positions (i > j) the rules C1..C5 leave free for (h, s)."""
    out = []
    for i in range(s.n):
        hi = h >> i & 1
        for j in range(i):
            hj = h >> j & 1
            if hi and hj:
                free = s(i) > s(j)
            elif hi and not hj:
                free = False
            elif hj and not hi:
                free = True
            else:
                free = s(i) < s(j)
            if free:
                out.append((i, j))
    return out


def disentangle_pauli(o: PauliOp) -> tuple[HFreeOp, PauliOp]:
    """Borel b (CNOT and CZ gates) such that b o b^-1 is a single-qubit Pauli.

    With x part alpha and z part beta: when alpha is nonzero, CNOTs from the
    first set qubit of alpha clear the other alpha bits, then CZs from that
    qubit clear the off-pivot beta bits.  When alpha is zero, CNOTs into the
    last set qubit of beta clear the other beta bits.  The identity returns
    b = identity.
    """
    n = o.n
    gates = []
    if o.x_bits:
        pivot = (o.x_bits & -o.x_bits).bit_length() - 1
        for j in range(pivot + 1, n):
            if o.x_bits >> j & 1:
                gates.append(Gate("CNOT", (pivot, j)))
        beta = o.z_bits
        for g in gates:
            # CNOT(a, b) moves the z bit of b onto a.
            if beta >> g.qubits[1] & 1:
                beta ^= 1 << pivot
        for j in range(n):
            if j != pivot and beta >> j & 1:
                gates.append(Gate("CZ", (pivot, j)))
    elif o.z_bits:
        pivot = o.z_bits.bit_length() - 1
        for i in range(pivot):
            if o.z_bits >> i & 1:
                gates.append(Gate("CNOT", (i, pivot)))
    else:
        return identity_hfree(n), o
    t = from_circuit(Circuit(n, tuple(gates)))
    b = tableau_to_hfree(t)
    result = conjugate_pauli(t, o)
    assert single_qubit_support(result) is not None
    return b, result


def _touches(p: PauliOp, k: int) -> bool:
    return bool((p.x_bits | p.z_bits) >> k & 1)


def disentangle_clifford_step(
    u: Tableau, row: int, done: set[int]
) -> tuple[int, HFreeOp, HFreeOp]:
    """One disentangling round: make B1 * u * B2 single-qubit on `row`.

    B1 (applied on the output side) turns the Z image of `row` into a
    single-qubit Pauli at a fresh qubit k; B2 (input side) then multiplies
    the later columns by that image wherever they touch k, which clears k
    from every other column and leaves the X image of `row` single-qubit at
    k as well.  Columns before `row` are never touched.
    """
    n = u.n
    b1, res = disentangle_pauli(u.z_images[row])
    k = single_qubit_support(res)
    assert k is not None and k not in done
    t = compose(hfree_to_tableau(b1), u)
    tb2 = identity_tableau(n)
    for i in range(row + 1, n):
        if _touches(t.z_images[i], k):
            g = Gate("CNOT", (row, i))
            t = apply_gate(t, g, side="right")
            tb2 = apply_gate(tb2, g, side="right")
        if _touches(t.x_images[i], k):
            g = Gate("CZ", (row, i))
            t = apply_gate(t, g, side="right")
            tb2 = apply_gate(tb2, g, side="right")
    assert single_qubit_support(t.x_images[row]) == k
    assert single_qubit_support(t.z_images[row]) == k
    b2 = tableau_to_hfree(tb2)
    assert b1.is_borel and b2.is_borel
    return k, b1, b2


_SINGLE_QUBIT_BORELS = [
    HFreeOp(1, PauliOp(1, x, z, 0), from_rows([[g]]), identity(1))
    for g in (0, 1)
    for x in (0, 1)
    for z in (0, 1)
]


def decompose_nonentangling(
    u: Tableau,
) -> tuple[HFreeOp, int, Permutation, HFreeOp]:
    """Factor an operator with single-qubit images as F1 * W(h, S) * F2.

    F1 is a layer of P gates (diagonal Gamma, identity Delta), F2 a tensor
    product of single-qubit Borel operators.  Raises NotNonEntangling when
    some column's images are not single-qubit on a common qubit.
    """
    n = u.n
    s_images = [-1] * n
    h = 0
    support = []
    for i in range(n):
        j = single_qubit_support(u.z_images[i])
        if j is None or single_qubit_support(u.x_images[i]) != j:
            raise NotNonEntangling(f"images of column {i + 1} are not single-qubit")
        if s_images[j] != -1:
            raise NotNonEntangling(f"two columns map to qubit {j + 1}")
        s_images[j] = i
        support.append(j)
        if u.z_images[i].x_bits >> j & 1:
            h |= 1 << j
    s = Permutation(tuple(s_images))
    p_diag = [0] * n
    f2_parts = []
    for i in range(n):
        j = support[i]
        hj = h >> j & 1
        x_local = PauliOp(
            1, u.x_images[i].x_bits >> j & 1, u.x_images[i].z_bits >> j & 1,
            u.x_images[i].phase,
        )
        z_local = PauliOp(
            1, u.z_images[i].x_bits >> j & 1, u.z_images[i].z_bits >> j & 1,
            u.z_images[i].phase,
        )
        found = None
        for a in (0, 1):
            for b in _SINGLE_QUBIT_BORELS:
                cand = [Gate("H", (0,))] * hj + [Gate("P", (0,))] * a
                tb = compose(from_circuit(Circuit(1, tuple(cand))), hfree_to_tableau(b))
                if tb.x_images[0] == x_local and tb.z_images[0] == z_local:
                    found = (a, b)
                    break
            if found:
                break
        if found is None:
            raise NotNonEntangling(f"column {i + 1} has no Hadamard-free transfer")
        a, b = found
        p_diag[j] = a
        f2_parts.append(b)
    f1 = HFreeOp(
        n,
        identity_pauli(n),
        from_rows([[p_diag[i] if i == j else 0 for j in range(n)] for i in range(n)]),
        identity(n),
    )
    ox = sum(b.pauli.x_bits << i for i, b in enumerate(f2_parts))
    oz = sum(b.pauli.z_bits << i for i, b in enumerate(f2_parts))
    gdiag = [b.gamma.get(0, 0) for b in f2_parts]
    f2 = HFreeOp(
        n,
        PauliOp(n, ox, oz, 0),
        from_rows([[gdiag[i] if i == j else 0 for j in range(n)] for i in range(n)]),
        identity(n),
    )
    return f1, h, s, f2


def split_borel(ell: HFreeOp, h: int, s: Permutation) -> tuple[HFreeOp, HFreeOp]:
    """Split a Borel operator as K * M with K rule-patterned and M negated.

    K = F(Id, Gamma_K, Delta_K) has labels obeying C1..C5 for (h, s); M obeys
    the same rules with h negated, which makes its conjugate by W(h, s)
    Borel.  Solved in two stages: a linear system for E = Delta_M^-1 (the
    product Delta_L * E must vanish on rule-forced positions), then a linear
    system for the Gamma parts.
    """
    if not ell.is_borel:
        raise NotBorel("delta is not lower unit triangular")
    n = ell.n
    hbar = ((1 << n) - 1) ^ h
    b_free = delta_free_positions(hbar, s)
    c_free = set(delta_free_positions(h, s))
    c_forced = [(i, j) for i in range(n) for j in range(i) if (i, j) not in c_free]
    rows = []
    rhs = 0
    for eq, (i, j) in enumerate(c_forced):
        row = 0
        for var, (r, c) in enumerate(b_free):
            if c == j and ell.delta.get(i, r):
                row |= 1 << var
        rows.append(row)
        if ell.delta.get(i, j):
            rhs |= 1 << eq
    assert len(c_forced) == len(b_free)
    if not c_forced:
        sol = 0
    else:
        try:
            sol = solve_linear(
                BitMatrix(len(c_forced), len(b_free), tuple(rows)), rhs
            )
        except Inconsistent as exc:
            raise NoSolution("no rule-patterned Delta split") from exc
        except Underdetermined as exc:
            raise NonUniqueSolution("Delta split is not unique") from exc
    e_rows = [1 << i for i in range(n)]
    for var, (r, c) in enumerate(b_free):
        if sol >> var & 1:
            e_rows[r] |= 1 << c
    e = BitMatrix(n, n, tuple(e_rows))
    delta_m = mat_inv(e)
    delta_k = mat_mul(ell.delta, e)

    gamma_c = gamma_free_positions(h, s)
    gamma_b = set(gamma_free_positions(hbar, s))
    sym = [(i, j) for i in range(n) for j in range(i, n)]
    b_vars = [p for p in sym if p in gamma_b]
    n_vars = len(gamma_c) + len(b_vars)
    g_rows = []
    g_rhs = 0
    for eq, (i, j) in enumerate(sym):
        row = 0
        for var, (p, q) in enumerate(gamma_c):
            coeff = delta_m.get(p, i) & delta_m.get(q, j)
            if p != q:
                coeff ^= delta_m.get(q, i) & delta_m.get(p, j)
            if coeff:
                row |= 1 << var
        for var, pos in enumerate(b_vars):
            if pos == (i, j):
                row |= 1 << (len(gamma_c) + var)
        g_rows.append(row)
        if ell.gamma.get(i, j):
            g_rhs |= 1 << eq
    try:
        g_sol = solve_linear(BitMatrix(len(sym), n_vars, tuple(g_rows)), g_rhs)
    except Inconsistent as exc:
        raise NoSolution("no rule-patterned Gamma split") from exc
    except Underdetermined as exc:
        raise NonUniqueSolution("Gamma split is not unique") from exc
    gk_rows = [[0] * n for _ in range(n)]
    for var, (p, q) in enumerate(gamma_c):
        if g_sol >> var & 1:
            gk_rows[p][q] = gk_rows[q][p] = 1
    gamma_k = from_rows(gk_rows)
    k = HFreeOp(n, identity_pauli(n), gamma_k, delta_k)
    m = hfree_mul(hfree_inverse(k), ell)
    assert m.delta == delta_m
    assert check_rules_c1c5(h, s, k.gamma, k.delta)
    assert check_rules_c1c5(hbar, s, m.gamma, m.delta)
    assert hfree_mul(k, m) == ell
    return k, m


def canonical_form(u: Tableau) -> CanonicalForm:
    """Canonical factorization of a Clifford tableau; see the module docstring."""
    if not is_valid_tableau(u):
        raise InvalidTableau("input is not a valid stabilizer tableau")
    n = u.n
    tl = identity_tableau(n)
    tr = identity_tableau(n)
    cur = u
    done: set[int] = set()
    for row in range(n):
        k, b1, b2 = disentangle_clifford_step(cur, row, done)
        t1 = hfree_to_tableau(b1)
        t2 = hfree_to_tableau(b2)
        cur = compose(compose(t1, cur), t2)
        tl = compose(t1, tl)
        tr = compose(tr, t2)
        done.add(k)
    f1p, h, s, f2p = decompose_nonentangling(cur)
    left = hfree_mul(tableau_to_hfree(tableau_inverse(tl)), f1p)
    right = hfree_mul(f2p, tableau_to_hfree(tableau_inverse(tr)))
    k_op, m_op = split_borel(left, h, s)
    m_conj = conjugate_by_hs(m_op, HSLayer(n, h, s))
    assert m_conj is not None and m_conj.is_borel
    f2 = hfree_mul(m_conj, right)
    cf = CanonicalForm(
        n, k_op.gamma, k_op.delta, h, s, f2.pauli, f2.gamma, f2.delta
    )
    assert canonical_to_tableau(cf) == u
    return cf


def canonical_to_tableau(cf: CanonicalForm) -> Tableau:
    """Compose the layers of a canonical form back into one tableau."""
    t_f1 = hfree_to_tableau(
        HFreeOp(cf.n, identity_pauli(cf.n), cf.gamma, cf.delta)
    )
    t_w = hslayer_to_tableau(HSLayer(cf.n, cf.h, cf.s))
    t_f2 = hfree_to_tableau(
        HFreeOp(cf.n, cf.oprime, cf.gamma_prime, cf.delta_prime)
    )
    return compose(compose(t_f1, t_w), t_f2)

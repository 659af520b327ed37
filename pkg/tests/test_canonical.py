"""Tests for the canonical factorization pipeline."""

import itertools
import random

import pytest

from cliffc.canonical import (
    CanonicalForm,
    InvalidTableau,
    NotNonEntangling,
    canonical_form,
    canonical_to_tableau,
    decompose_nonentangling,
    delta_free_positions,
    disentangle_clifford_step,
    disentangle_pauli,
    gamma_free_positions,
    split_borel,
)
from cliffc.f2core import (
    Permutation,
    from_rows,
    identity,
    identity_permutation,
)
from cliffc.hfree import (
    HFreeOp,
    check_rules_c1c5,
    free_bit_count,
    hfree_mul,
    hfree_to_tableau,
    identity_hfree,
)
from cliffc.pauli import PauliOp, identity_pauli, single_qubit_support
from cliffc.tableau import (
    Tableau,
    compose,
    from_circuit,
    identity_tableau,
    parse_circuit,
)

from helpers import random_hfree, random_pauli, random_permutation

from test_tableau import random_circuit


def test_free_positions_match_count():
    for n in (1, 2, 3):
        for h in range(1 << n):
            for images in itertools.permutations(range(n)):
                s = Permutation(images)
                total = len(gamma_free_positions(h, s)) + len(
                    delta_free_positions(h, s)
                )
                assert total == free_bit_count(h, s)


def test_disentangle_pauli_trivial_cases():
    ident = identity_pauli(3)
    b, res = disentangle_pauli(ident)
    assert b == identity_hfree(3) and res == ident
    z3 = PauliOp(3, 0, 0b100, 0)
    b, res = disentangle_pauli(z3)
    assert b == identity_hfree(3) and res == z3


def test_disentangle_pauli_xx():
    b, res = disentangle_pauli(PauliOp(2, 0b11, 0, 0))
    assert res == PauliOp(2, 0b01, 0, 0)
    assert b.delta == from_rows([[1, 0], [1, 1]])


def test_disentangle_pauli_exhaustive():
    n = 4
    for bits in range(1, 1 << (2 * n)):
        for phase in (0, 2):
            o = PauliOp(n, bits & 0b1111, bits >> n, phase)
            b, res = disentangle_pauli(o)
            assert b.is_borel
            t = hfree_to_tableau(b)
            from cliffc.tableau import conjugate_pauli

            assert conjugate_pauli(t, o) == res
            assert single_qubit_support(res) is not None


def test_disentangle_step_identity():
    k, b1, b2 = disentangle_clifford_step(identity_tableau(2), 0, set())
    assert k == 0
    assert b1 == identity_hfree(2) and b2 == identity_hfree(2)


def test_disentangle_step_examples():
    u = from_circuit(parse_circuit("h 1", n=2))
    k, b1, b2 = disentangle_clifford_step(u, 0, set())
    t = compose(compose(hfree_to_tableau(b1), u), hfree_to_tableau(b2))
    assert single_qubit_support(t.x_images[0]) == k
    assert single_qubit_support(t.z_images[0]) == k


def test_disentangle_full_loop():
    rng = random.Random(50)
    for _ in range(1000):
        u = from_circuit(random_circuit(rng, 5, 25))
        cur = u
        done = set()
        for row in range(5):
            k, b1, b2 = disentangle_clifford_step(cur, row, done)
            cur = compose(
                compose(hfree_to_tableau(b1), cur), hfree_to_tableau(b2)
            )
            done.add(k)
        for i in range(5):
            assert single_qubit_support(cur.x_images[i]) is not None
            assert single_qubit_support(cur.z_images[i]) == single_qubit_support(
                cur.x_images[i]
            )


def test_decompose_nonentangling_identity():
    f1, h, s, f2 = decompose_nonentangling(identity_tableau(3))
    assert f1 == identity_hfree(3) and f2 == identity_hfree(3)
    assert h == 0 and s == identity_permutation(3)


def test_decompose_nonentangling_swap():
    u = from_circuit(parse_circuit("swap 1 2", n=2))
    f1, h, s, f2 = decompose_nonentangling(u)
    assert h == 0
    assert s == Permutation((1, 0))
    assert f1 == identity_hfree(2) and f2 == identity_hfree(2)


def test_decompose_nonentangling_ph():
    u = from_circuit(parse_circuit("h 1\np 2", n=2))
    f1, h, s, f2 = decompose_nonentangling(u)
    assert h == 0b01
    assert s == identity_permutation(2)
    w = compose(hfree_to_tableau(f1), _w_tableau(2, h, s))
    assert compose(w, hfree_to_tableau(f2)) == u


def _w_tableau(n, h, s):
    from cliffc.hfree import HSLayer, hslayer_to_tableau

    return hslayer_to_tableau(HSLayer(n, h, s))


def test_decompose_nonentangling_random():
    rng = random.Random(51)
    for _ in range(200):
        n = rng.randrange(1, 5)
        h = rng.getrandbits(n)
        s = random_permutation(rng, n)
        parts = []
        for i in range(n):
            parts.append(random_hfree(rng, 1, borel=True, phase=0))
        gates = []
        u = identity_tableau(n)
        # Build W * F2 with F2 a tensor product, then a P layer on top.
        f2_gamma = from_rows(
            [[parts[i].gamma.get(0, 0) if i == j else 0 for j in range(n)] for i in range(n)]
        )
        ox = sum(parts[i].pauli.x_bits << i for i in range(n))
        oz = sum(parts[i].pauli.z_bits << i for i in range(n))
        f2_in = HFreeOp(n, PauliOp(n, ox, oz, 0), f2_gamma, identity(n))
        a_diag = [rng.getrandbits(1) for _ in range(n)]
        f1_in = HFreeOp(
            n,
            identity_pauli(n),
            from_rows([[a_diag[i] if i == j else 0 for j in range(n)] for i in range(n)]),
            identity(n),
        )
        u = compose(
            compose(hfree_to_tableau(f1_in), _w_tableau(n, h, s)),
            hfree_to_tableau(f2_in),
        )
        f1, h2, s2, f2 = decompose_nonentangling(u)
        assert (h2, s2) == (h, s)
        rebuilt = compose(
            compose(hfree_to_tableau(f1), _w_tableau(n, h2, s2)),
            hfree_to_tableau(f2),
        )
        assert rebuilt == u


def test_decompose_nonentangling_rejects_entangler():
    u = from_circuit(parse_circuit("cnot 1 2", n=2))
    with pytest.raises(NotNonEntangling):
        decompose_nonentangling(u)


def all_borel_ops(n, paulis):
    from test_hfree import all_borel_labels

    for gamma, delta in all_borel_labels(n):
        for p in paulis:
            yield HFreeOp(n, p, gamma, delta)


def test_split_borel_identity():
    for n in (1, 2, 3):
        ident = identity_hfree(n)
        for h in range(1 << n):
            k, m = split_borel(ident, h, identity_permutation(n))
            assert k == ident and m == ident


def test_split_borel_exhaustive_n2():
    rng = random.Random(52)
    paulis = [identity_pauli(2)] + [random_pauli(rng, 2, phase=0) for _ in range(3)]
    layers = [
        (h, Permutation(p))
        for h in range(4)
        for p in itertools.permutations(range(2))
    ]
    for ell in all_borel_ops(2, paulis):
        for h, s in layers:
            k, m = split_borel(ell, h, s)
            assert hfree_mul(k, m) == ell
            assert k.pauli == identity_pauli(2)
            assert check_rules_c1c5(h, s, k.gamma, k.delta)
            assert check_rules_c1c5(0b11 ^ h, s, m.gamma, m.delta)


def test_split_borel_random_n5():
    rng = random.Random(53)
    for _ in range(100):
        ell = random_hfree(rng, 5, borel=True)
        h = rng.getrandbits(5)
        s = random_permutation(rng, 5)
        k, m = split_borel(ell, h, s)
        assert hfree_mul(k, m) == ell


def test_canonical_form_identity():
    cf = canonical_form(identity_tableau(3))
    assert cf.h == 0 and cf.s == identity_permutation(3)
    assert cf.gamma == from_rows([[0] * 3] * 3)
    assert cf.delta == identity(3)
    assert cf.oprime == identity_pauli(3)
    assert canonical_to_tableau(cf) == identity_tableau(3)


def test_canonical_form_worked_example():
    u = from_circuit(parse_circuit("cnot 2 1\nh 1\ncnot 2 1", n=2))
    cf = canonical_form(u)
    assert cf.h == 0b01
    assert cf.s == identity_permutation(2)
    off = from_rows([[0, 1], [1, 0]])
    assert cf.gamma == off and cf.gamma_prime == off
    assert cf.delta == identity(2) and cf.delta_prime == identity(2)
    assert cf.oprime == PauliOp(2, 0, 0b10, 0)
    assert canonical_to_tableau(cf) == u


def test_canonical_round_trip_random():
    rng = random.Random(54)
    for n in (1, 2, 3, 4, 5):
        for _ in range(40):
            u = from_circuit(random_circuit(rng, n, 20))
            cf = canonical_form(u)
            assert canonical_to_tableau(cf) == u
            assert check_rules_c1c5(cf.h, cf.s, cf.gamma, cf.delta)


def test_canonical_idempotent():
    rng = random.Random(55)
    for _ in range(40):
        u = from_circuit(random_circuit(rng, 4, 16))
        cf = canonical_form(u)
        assert canonical_form(canonical_to_tableau(cf)) == cf


def test_layer_data_invariant_under_borel_factors():
    rng = random.Random(56)
    for _ in range(30):
        n = 4
        u = from_circuit(random_circuit(rng, n, 15))
        cf = canonical_form(u)
        b_left = hfree_to_tableau(random_hfree(rng, n, borel=True))
        b_right = hfree_to_tableau(random_hfree(rng, n, borel=True))
        cf2 = canonical_form(compose(compose(b_left, u), b_right))
        assert (cf2.h, cf2.s) == (cf.h, cf.s)


def test_canonical_exhaustive_single_qubit():
    from cliffc.tableau import Gate, apply_gate

    gens = [Gate("X", (0,)), Gate("P", (0,)), Gate("H", (0,))]
    seen = {identity_tableau(1)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for t in frontier:
            for g in gens:
                u2 = apply_gate(t, g, side="left")
                if u2 not in seen:
                    seen.add(u2)
                    nxt.append(u2)
        frontier = nxt
    assert len(seen) == 24
    forms = set()
    for t in seen:
        cf = canonical_form(t)
        assert canonical_to_tableau(cf) == t
        forms.add(cf)
    assert len(forms) == 24


def test_invalid_tableau_rejected():
    t = identity_tableau(2)
    bad = Tableau(2, t.x_images, (t.z_images[1], t.z_images[0]))
    with pytest.raises(InvalidTableau):
        canonical_form(bad)


def test_canonical_json_round_trip():
    rng = random.Random(57)
    u = from_circuit(random_circuit(rng, 3, 12))
    cf = canonical_form(u)
    assert CanonicalForm.from_json(cf.to_json()) == cf

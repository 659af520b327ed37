"""Tests for measurement reduction and the nine-stage decomposition."""

import random

import pytest

from cliffc.canonical import InvalidTableau, canonical_form, canonical_to_tableau
from cliffc.f2core import BitMatrix, Singular, from_rows, identity, mat_vec_mul
from cliffc.hfree import HFreeOp, hfree_to_tableau, tableau_to_hfree
from cliffc.pauli import PauliOp, identity_pauli
from cliffc.reduce import (
    BadBlockPattern,
    PhasePoly,
    StagedCircuit,
    block_diagonalize_delta,
    commute_diag_past_linear,
    measurement_reduction,
    nine_stage_decomposition,
)
from cliffc.sampling import RandomSource, random_clifford
from cliffc.tableau import (
    Circuit,
    Gate,
    Tableau,
    compose,
    from_circuit,
    identity_tableau,
    parse_circuit,
)

from helpers import random_bitmatrix, random_invertible, random_symmetric

NINE_LABELS = ["X", "Z", "P", "CX", "CZ", "H", "CZ", "H", "P"]


def random_tableau(n, src):
    return canonical_to_tableau(random_clifford(n, src))


def random_phase_poly(rng, n):
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.getrandbits(1):
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return PhasePoly(
        n, tuple(rng.randrange(4) for _ in range(n)), BitMatrix(n, n, tuple(rows))
    )


class TestPhasePoly:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhasePoly(2, (1,), identity(2))
        with pytest.raises(ValueError):
            PhasePoly(2, (0, 0), identity(2))
        with pytest.raises(ValueError):
            PhasePoly(2, (0, 0), from_rows([[0, 1], [0, 0]]))

    def test_from_gamma_evaluates_quadratic_form(self):
        rng = random.Random(0)
        for _ in range(50):
            n = rng.randrange(1, 5)
            gamma = random_symmetric(rng, n)
            poly = PhasePoly.from_gamma(gamma)
            for x in range(1 << n):
                direct = sum(
                    gamma.get(i, i) for i in range(n) if x >> i & 1
                ) + 2 * sum(
                    gamma.get(i, j)
                    for i in range(n)
                    for j in range(i + 1, n)
                    if x >> i & 1 and x >> j & 1
                )
                assert poly.evaluate(x) == direct % 4

    def test_substitute_matches_composition(self):
        rng = random.Random(1)
        for _ in range(300):
            n = rng.randrange(1, 5)
            poly = random_phase_poly(rng, n)
            m = random_bitmatrix(rng, n, n)
            sub = poly.substitute(m)
            for x in range(1 << n):
                assert sub.evaluate(x) == poly.evaluate(mat_vec_mul(m, x))

    def test_substitute_identity(self):
        rng = random.Random(2)
        poly = random_phase_poly(rng, 4)
        assert poly.substitute(identity(4)) == poly

    def test_subtract_and_negate(self):
        rng = random.Random(3)
        for _ in range(50):
            n = rng.randrange(1, 5)
            f = random_phase_poly(rng, n)
            g = random_phase_poly(rng, n)
            assert f.subtract(f).is_zero()
            for x in range(1 << n):
                assert f.negate().evaluate(x) == (-f.evaluate(x)) % 4
            diff = f.subtract(g)
            assert diff.c == from_rows(
                [
                    [f.c.get(i, j) ^ g.c.get(i, j) for j in range(n)]
                    for i in range(n)
                ]
            )

    def test_gates_realize_binary_form(self):
        rng = random.Random(4)
        for _ in range(30):
            n = rng.randrange(1, 5)
            gamma = random_symmetric(rng, n)
            circuit = Circuit(n, tuple(PhasePoly.from_gamma(gamma).to_gates()))
            op = HFreeOp(n, identity_pauli(n), gamma, identity(n))
            assert from_circuit(circuit) == hfree_to_tableau(op)

    def test_repeated_p_equals_z(self):
        twice = from_circuit(Circuit(1, (Gate("P", (0,)), Gate("P", (0,)))))
        assert twice == from_circuit(Circuit(1, (Gate("Z", (0,)),)))


class TestCommuteDiagPastLinear:
    def test_identity_linear_map(self):
        rng = random.Random(5)
        poly = random_phase_poly(rng, 3)
        moved, placement = commute_diag_past_linear(poly, identity(3))
        assert moved == poly and placement == "before"

    def test_round_trip(self):
        rng = random.Random(6)
        for _ in range(50):
            n = rng.randrange(1, 6)
            poly = random_phase_poly(rng, n)
            delta = random_invertible(rng, n)
            moved, placement = commute_diag_past_linear(poly, delta, "after")
            assert placement == "before"
            back, placement = commute_diag_past_linear(moved, delta, "before")
            assert placement == "after"
            assert back == poly

    def test_restaging_preserves_tableau(self):
        rng = random.Random(7)
        for _ in range(500):
            n = rng.randrange(1, 6)
            poly = random_phase_poly(rng, n)
            delta = random_invertible(rng, n)
            # Gamma accepted as a plain symmetric matrix too.
            if rng.getrandbits(1):
                gamma_in = random_symmetric(rng, n)
                poly = PhasePoly.from_gamma(gamma_in)
            linear_gates = list(
                from_circuit_gates_for(delta)
            )
            after = Circuit(n, tuple(linear_gates + poly.to_gates()))
            moved, _ = commute_diag_past_linear(poly, delta, "after")
            before = Circuit(n, tuple(moved.to_gates() + linear_gates))
            assert from_circuit(after) == from_circuit(before)

    def test_bad_placement(self):
        with pytest.raises(ValueError):
            commute_diag_past_linear(PhasePoly(1, (0,), identity(1)), identity(1), "x")


def from_circuit_gates_for(delta):
    """CNOT gates realizing an invertible linear map, for staging tests."""
    from cliffc.reduce import _linear_layer_gates

    return _linear_layer_gates(delta)


class TestLinearLayerGates:
    def test_realizes_matrix(self):
        rng = random.Random(8)
        for _ in range(100):
            n = rng.randrange(1, 7)
            delta = random_invertible(rng, n)
            circuit = Circuit(n, tuple(from_circuit_gates_for(delta)))
            op = tableau_to_hfree(from_circuit(circuit))
            assert op.delta == delta
            assert all(row == 0 for row in op.gamma.rows)


class TestMeasurementReduction:
    def test_hadamard_free_input_gives_empty_circuit(self):
        d, k = measurement_reduction(identity_tableau(3))
        assert k == 0 and d.gates == ()
        u = from_circuit(parse_circuit("cnot 1 2\np 2\ncz 2 3", n=3))
        d, k = measurement_reduction(u)
        assert k == 0 and d.gates == ()

    def test_single_hadamard(self):
        u = from_circuit(parse_circuit("h 1", n=2))
        d, k = measurement_reduction(u)
        assert k == 1
        assert d.two_qubit_count() <= 2 * 1 - 1
        tableau_to_hfree(compose(from_circuit(d), u))

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_random_cliffords(self, n):
        src = RandomSource(seed=n, stream=70)
        for _ in range(60):
            u = random_tableau(n, src)
            d, k = measurement_reduction(u)
            assert k == canonical_form(u).h.bit_count()
            assert d.two_qubit_count() <= n * k - k * (k + 1) // 2
            cnots = [g for g in d.gates if g.kind == "CNOT"]
            czs = [g for g in d.gates if g.kind == "CZ"]
            assert len(cnots) <= k * (n - k)
            assert len(czs) <= k * (k - 1) // 2
            # Stage order within D: CNOTs, then CZs, then P, then H.
            kinds = [g.kind for g in d.gates]
            boundary = {"CNOT": 0, "CZ": 1, "P": 2, "H": 3}
            assert kinds == sorted(kinds, key=boundary.get)
            tableau_to_hfree(compose(from_circuit(d), u))

    def test_five_qubit_worst_case_bound(self):
        src = RandomSource(seed=55)
        worst = 0
        for _ in range(120):
            d, _ = measurement_reduction(random_tableau(5, src))
            worst = max(worst, d.two_qubit_count())
        assert worst <= 10

    def test_invalid_tableau(self):
        p = PauliOp(2, 1, 0, 0)
        bad = Tableau(2, (p, p), (PauliOp(2, 0, 1, 0), PauliOp(2, 0, 2, 0)))
        with pytest.raises(InvalidTableau):
            measurement_reduction(bad)


class TestBlockDiagonalizeDelta:
    def test_already_block_diagonal(self):
        delta = from_rows([[1, 0, 0], [0, 1, 0], [0, 1, 1]])
        gates, residual = block_diagonalize_delta(delta, 1)
        assert gates.gates == () and residual == delta

    def test_single_entry(self):
        delta = from_rows([[1, 0], [1, 1]])
        gates, residual = block_diagonalize_delta(delta, 1)
        assert [g.qubits for g in gates.gates] == [(0, 1)]
        assert residual == identity(2)

    def test_rejects_upper_right_block(self):
        delta = from_rows([[1, 1], [0, 1]])
        with pytest.raises(BadBlockPattern):
            block_diagonalize_delta(delta, 1)
        with pytest.raises(BadBlockPattern):
            block_diagonalize_delta(from_rows([[1, 0], [0, 1]]), 3)

    def test_singular_top_block(self):
        delta = from_rows([[0, 0, 0], [1, 0, 0], [0, 1, 1]])
        with pytest.raises(Singular):
            block_diagonalize_delta(delta, 2)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_random_patterns(self, k):
        rng = random.Random(k)
        n = 6
        for _ in range(40):
            top = random_invertible(rng, k)
            bottom = random_invertible(rng, n - k)
            rows = [top.rows[i] for i in range(k)]
            for i in range(n - k):
                rows.append(rng.getrandbits(k) | bottom.rows[i] << k)
            delta = BitMatrix(n, n, tuple(rows))
            gates, residual = block_diagonalize_delta(delta, k)
            assert gates.two_qubit_count() <= k * (n - k)
            replay = list(delta.rows)
            for gate in gates.gates:
                control, target = gate.qubits
                assert control < k <= target
                replay[target] ^= replay[control]
            assert tuple(replay) == residual.rows
            mask = (1 << k) - 1
            assert all(residual.rows[i] & mask == 0 for i in range(k, n))

    def test_trivial_splits(self):
        delta = from_rows([[1, 0], [1, 1]])
        for k in (0, 2):
            gates, residual = block_diagonalize_delta(delta, k)
            assert gates.gates == () and residual == delta


class TestNineStage:
    def test_identity_all_stages_empty(self):
        staged = nine_stage_decomposition(identity_tableau(3))
        assert [label for label, _ in staged.stages] == NINE_LABELS
        assert all(circuit.gates == () for _, circuit in staged.stages)

    def test_all_hadamard_populates_only_h_stages(self):
        u = from_circuit(parse_circuit("h 1\nh 2\nh 3"))
        staged = nine_stage_decomposition(u)
        for label, circuit in staged.stages:
            if label != "H":
                assert circuit.gates == ()
        assert from_circuit(staged.to_circuit()) == u

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_random_cliffords_round_trip(self, n):
        src = RandomSource(seed=n, stream=90)
        for _ in range(40):
            u = random_tableau(n, src)
            staged = nine_stage_decomposition(u)
            assert [label for label, _ in staged.stages] == NINE_LABELS
            assert from_circuit(staged.to_circuit()) == u
            two_qubit_labels = [
                label
                for label, circuit in staged.stages
                if circuit.two_qubit_count() > 0
            ]
            assert set(two_qubit_labels) <= {"CX", "CZ"}

    def test_text_serialization_round_trips(self):
        src = RandomSource(seed=17)
        u = random_tableau(4, src)
        staged = nine_stage_decomposition(u)
        text = staged.to_text()
        assert text.count("# stage:") == 9
        parsed = parse_circuit(text, n=4)
        assert parsed == staged.to_circuit()

    def test_invalid_tableau(self):
        p = PauliOp(2, 1, 0, 0)
        bad = Tableau(2, (p, p), (PauliOp(2, 0, 1, 0), PauliOp(2, 0, 2, 0)))
        with pytest.raises(InvalidTableau):
            nine_stage_decomposition(bad)


class TestStagedCircuit:
    def test_rejects_wrong_gate_kind(self):
        with pytest.raises(ValueError):
            StagedCircuit(2, (("P", Circuit(2, (Gate("Z", (0,)),))),))

    def test_rejects_unknown_label(self):
        with pytest.raises(ValueError):
            StagedCircuit(2, (("Q", Circuit(2, ())),))

    def test_rejects_width_mismatch(self):
        with pytest.raises(ValueError):
            StagedCircuit(2, (("P", Circuit(3, ())),))

    def test_text_format(self):
        staged = StagedCircuit(
            2,
            (
                ("H", Circuit(2, (Gate("H", (0,)),))),
                ("CZ", Circuit(2, (Gate("CZ", (0, 1)),))),
            ),
        )
        assert staged.to_text() == "# stage: H\nh 1\n# stage: CZ\ncz 1 2"

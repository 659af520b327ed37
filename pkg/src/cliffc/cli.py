"""Command-line front end: sampling, canonicalization, reduction, rewriting.

Subcommands of the cliffc program:

  sample   draw Clifford operators, invertible matrices, or layer data
  canon    canonicalize a circuit or tableau from a file or stdin
  reduce   measurement reduction or the nine-stage decomposition
  rewrite  Hadamard-sandwich rewrite of a pure-CNOT circuit

Exit codes: 0 on success, 1 on semantic failure (invalid tableau, failed
verification), 2 on usage or parse errors.  Sampling is deterministic in
(--seed, --stream): record i always uses the child stream at index i, so
--jobs changes scheduling but never the output.  The seed comes from the
--seed flag when given, else the CLIFFC_SEED environment variable, else 0.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from .canonical import CanonicalForm, InvalidTableau, canonical_form, canonical_to_tableau
from .cnotadv import NotCNOTCircuit, _improving_rewrite
from .f2core import Permutation, vector_to_string
from .hfree import HFreeOp
from .pauli import identity_pauli
from .reduce import PhasePoly, _linear_layer_gates, measurement_reduction, nine_stage_decomposition
from .sampling import RandomSource, random_clifford, random_gl, sample_mallows, sample_qmallows
from .tableau import Circuit, Gate, Tableau, circuit_to_text, from_circuit, parse_circuit

_SAMPLE_KINDS = ("clifford", "gl", "mallows", "qmallows")
_CIRCUIT_FORMATS = {"clifford"}


def permutation_gates(s: Permutation) -> list[Gate]:
    """SWAP gates after which wire i carries input bit s(i)."""
    n = s.n
    carried = list(range(n))
    gates = []
    for i in range(n):
        want = s.images[i]
        if carried[i] == want:
            continue
        j = carried.index(want, i + 1)
        gates.append(Gate("SWAP", (i, j)))
        carried[i], carried[j] = carried[j], carried[i]
    return gates


def _hfree_gates(op: HFreeOp) -> list[Gate]:
    """Gates executing the phase layer, then the linear layer, then the Pauli."""
    gates = PhasePoly.from_gamma(op.gamma).to_gates()
    gates += _linear_layer_gates(op.delta)
    gates += [Gate("Z", (i,)) for i in range(op.n) if op.pauli.z_bits >> i & 1]
    gates += [Gate("X", (i,)) for i in range(op.n) if op.pauli.x_bits >> i & 1]
    return gates


def form_to_circuit(cf: CanonicalForm) -> Circuit:
    """Circuit executing the canonical form's layers in order."""
    n = cf.n
    gates = _hfree_gates(HFreeOp(n, cf.oprime, cf.gamma_prime, cf.delta_prime))
    gates += permutation_gates(cf.s)
    gates += [Gate("H", (i,)) for i in range(n) if cf.h >> i & 1]
    gates += _hfree_gates(HFreeOp(n, identity_pauli(n), cf.gamma, cf.delta))
    return Circuit(n, tuple(gates))


def _sample_record(kind: str, n: int, seed: int, stream: int, fmt: str, index: int) -> str:
    rng = RandomSource(seed, stream).child(index)
    if kind == "clifford":
        cf = random_clifford(n, rng)
        if fmt == "json":
            return json.dumps(cf.to_json())
        if fmt == "tableau":
            return json.dumps(canonical_to_tableau(cf).to_json())
        return circuit_to_text(form_to_circuit(cf))
    if kind == "gl":
        return json.dumps(random_gl(n, rng).to_json())
    if kind == "qmallows":
        h, s = sample_qmallows(n, rng)
        return json.dumps({"h": vector_to_string(h, n), "s": s.to_one_based()})
    h_s = sample_mallows(n, rng)
    return json.dumps({"s": h_s.to_one_based()})


def _emit_records(records, fmt: str, out) -> None:
    for index, record in enumerate(records):
        if fmt == "circuit" and index:
            out.write("\n")
        out.write(record + "\n")


def _resolve_seed(args, parser) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CLIFFC_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        parser.error(f"CLIFFC_SEED must be an integer, got {env!r}")


def _open_output(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w"), True


def _read_input(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path) as handle:
        return handle.read()


def _parse_operator(text: str) -> Tableau:
    """Read a tableau from JSON or from circuit text.

    Raises ValueError for unparseable input and InvalidTableau for input
    that parses but is not a valid Clifford tableau.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
            return Tableau.from_json(obj)
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"bad tableau JSON: {exc}") from exc
    if not stripped:
        raise ValueError("empty input")
    return from_circuit(parse_circuit(text))


def _cmd_sample(args, parser) -> int:
    if args.n < 1:
        parser.error("-n must be at least 1")
    if args.count < 0:
        parser.error("--count must be non-negative")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if args.format != "json" and args.kind not in _CIRCUIT_FORMATS:
        parser.error(f"--format {args.format} is only available for clifford samples")
    seed = _resolve_seed(args, parser)
    worker = partial(_sample_record, args.kind, args.n, seed, args.stream, args.format)
    out, owned = _open_output(args.output)
    try:
        if args.jobs == 1:
            _emit_records(map(worker, range(args.count)), args.format, out)
        else:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                _emit_records(
                    pool.map(worker, range(args.count)), args.format, out
                )
    finally:
        if owned:
            out.close()
    return 0


def _cmd_canon(args, parser) -> int:
    try:
        text = _read_input(args.input)
        t = _parse_operator(text)
    except OSError as exc:
        print(f"cliffc canon: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cliffc canon: {exc}", file=sys.stderr)
        return 2
    try:
        cf = canonical_form(t)
    except InvalidTableau as exc:
        print(f"cliffc canon: invalid tableau: {exc}", file=sys.stderr)
        return 1
    if args.verify and canonical_to_tableau(cf) != t:
        print("cliffc canon: recomposition does not match the input", file=sys.stderr)
        return 1
    out, owned = _open_output(args.output)
    try:
        if args.format == "json":
            out.write(json.dumps(cf.to_json()) + "\n")
        elif args.format == "tableau":
            out.write(json.dumps(canonical_to_tableau(cf).to_json()) + "\n")
        else:
            out.write(circuit_to_text(form_to_circuit(cf)) + "\n")
    finally:
        if owned:
            out.close()
    return 0


def _cmd_reduce(args, parser) -> int:
    try:
        t = _parse_operator(_read_input(args.input))
    except (OSError, ValueError) as exc:
        print(f"cliffc reduce: {exc}", file=sys.stderr)
        return 2
    try:
        if args.mode == "measurement":
            d, k = measurement_reduction(t)
            n = t.n
            report = {
                "mode": "measurement",
                "n": n,
                "k": k,
                "gate_count": len(d.gates),
                "two_qubit_count": d.two_qubit_count(),
                "bound": n * k - k * (k + 1) // 2,
            }
            body = circuit_to_text(d)
        else:
            staged = nine_stage_decomposition(t)
            full = staged.to_circuit()
            report = {
                "mode": "nine-stage",
                "n": t.n,
                "stages": [
                    {"label": label, "gate_count": len(circuit.gates)}
                    for label, circuit in staged.stages
                ],
                "gate_count": len(full.gates),
                "two_qubit_count": full.two_qubit_count(),
            }
            body = staged.to_text()
    except InvalidTableau as exc:
        print(f"cliffc reduce: invalid tableau: {exc}", file=sys.stderr)
        return 1
    out, owned = _open_output(args.output)
    try:
        if body:
            out.write(body + "\n")
    finally:
        if owned:
            out.close()
    print(json.dumps(report), file=sys.stderr)
    return 0


def _cmd_rewrite(args, parser) -> int:
    try:
        text = _read_input(args.input)
        if not text.strip():
            raise ValueError("empty input")
        circuit = parse_circuit(text)
        for gate in circuit.gates:
            if gate.kind != "CNOT":
                raise NotCNOTCircuit(f"{gate.kind} gate in CNOT-only circuit")
    except (OSError, ValueError, NotCNOTCircuit) as exc:
        print(f"cliffc rewrite: {exc}", file=sys.stderr)
        return 2
    current = circuit
    windows = 0
    while True:
        candidate = _improving_rewrite(current, args.max_weight)
        if candidate is None:
            break
        current = candidate
        windows += 1
    report = {
        "input_2q": circuit.two_qubit_count(),
        "output_2q": current.two_qubit_count(),
        "windows_applied": windows,
    }
    out, owned = _open_output(args.output)
    try:
        out.write(circuit_to_text(current) + "\n")
    finally:
        if owned:
            out.close()
    print(json.dumps(report), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cliffc",
        description="Clifford canonical forms, sampling, and circuit reductions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample", help="draw random samples")
    sample.add_argument("kind", choices=_SAMPLE_KINDS)
    sample.add_argument("-n", type=int, required=True, help="number of qubits")
    sample.add_argument("--count", type=int, default=1, help="number of samples")
    sample.add_argument("--seed", type=int, default=None)
    sample.add_argument("--stream", type=int, default=0)
    sample.add_argument(
        "--format", choices=("json", "circuit", "tableau"), default="json"
    )
    sample.add_argument("--jobs", type=int, default=1, help="worker processes")
    sample.add_argument("-o", "--output", default=None)

    canon = sub.add_parser("canon", help="canonicalize a circuit or tableau")
    canon.add_argument("-i", "--input", default=None)
    canon.add_argument("-o", "--output", default=None)
    canon.add_argument(
        "--format", choices=("json", "circuit", "tableau"), default="json"
    )
    canon.add_argument(
        "--verify",
        action="store_true",
        help="recompose the form and require exact equality with the input",
    )

    reduce_p = sub.add_parser("reduce", help="reduce an operator to circuit stages")
    reduce_p.add_argument(
        "--mode", choices=("measurement", "nine-stage"), default="measurement"
    )
    reduce_p.add_argument("-i", "--input", default=None)
    reduce_p.add_argument("-o", "--output", default=None)

    rewrite = sub.add_parser("rewrite", help="reduce the CNOT count of a circuit")
    rewrite.add_argument("-i", "--input", default=None)
    rewrite.add_argument("-o", "--output", default=None)
    rewrite.add_argument(
        "--max-weight",
        type=int,
        default=2,
        help="largest Hadamard-mask weight tried per window",
    )

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sample":
        return _cmd_sample(args, parser)
    if args.command == "canon":
        return _cmd_canon(args, parser)
    if args.command == "reduce":
        return _cmd_reduce(args, parser)
    return _cmd_rewrite(args, parser)


if __name__ == "__main__":
    sys.exit(main())

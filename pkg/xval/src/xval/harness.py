"""End-to-end cross-validation of the cliffc samplers.

Runs the installed ``cliffc`` command as a subprocess, draws matching
samples from the transcribed reference listings, and compares the two
distributionally: (h, S) layer marginals for n up to 3 and
phase-quotiented operator classes for n up to 2, each with a two-sample
chi-square at threshold p > 0.001.  A separate probe measures both the
verbatim and the corrected layer sampler against the exact law and
reports a verdict on the reference listing's rounding formula.

The JSON report goes to stdout (or the --output file); a human-readable
summary always goes to stderr.  Exit codes: 0 all comparisons agree and
the probe reached a verdict, 1 a comparison disagreed, 2 the primary
command failed or was not found.
"""

import argparse
import json
import shlex
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from .compare import (
    DEFAULT_THRESHOLD,
    compare_distributions,
    exact_chisquare,
    exact_layer_pmf,
    layer_key_from_reference,
)
from .reference import (
    corrected_sample_qmallows,
    reference_random_clifford,
    reference_sample_qmallows,
)


def default_cliffc():
    if shutil.which("cliffc"):
        return ["cliffc"]
    return [sys.executable, "-m", "cliffc"]


def run_primary_sample(command, kind, n, count, seed, stream, output, extra=()):
    argv = command + [
        "sample",
        kind,
        "-n",
        str(n),
        "--count",
        str(count),
        "--seed",
        str(seed),
        "--stream",
        str(stream),
        "-o",
        str(output),
        *extra,
    ]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True)
    except OSError as exc:
        raise RuntimeError(f"could not run {argv[0]}: {exc}") from exc
    if proc.returncode != 0:
        raise RuntimeError(
            f"{' '.join(argv)} exited {proc.returncode}: {proc.stderr.strip()}"
        )


def probe_layer_formulas(n, draws, seed, threshold):
    """Measure both rounding formulas against the exact layer law."""
    pmf = exact_layer_pmf(n)
    entries = {}
    for offset, (name, sampler) in enumerate(
        (
            ("verbatim", reference_sample_qmallows),
            ("corrected", corrected_sample_qmallows),
        ),
        start=1,
    ):
        rng = np.random.RandomState([seed, 1000 + offset])
        counts = {}
        for _ in range(draws):
            key = layer_key_from_reference(*sampler(n, rng))
            counts[key] = counts.get(key, 0) + 1
        stat, dof, p_value = exact_chisquare(counts, pmf)
        entries[name] = {
            "n": n,
            "draws": draws,
            "distinct_classes": len(counts),
            "statistic": stat,
            "dof": dof,
            "p_value": p_value,
            "matches_exact": p_value > threshold,
        }
    return entries


def formula_verdict(probe):
    verbatim = probe["verbatim"]
    corrected = probe["corrected"]
    if not verbatim["matches_exact"] and corrected["matches_exact"]:
        return (
            "defective: the verbatim rounding formula is degenerate (it collapsed "
            f"{verbatim['draws']} draws onto {verbatim['distinct_classes']} layer "
            f"class(es), rejected against the exact law with p={verbatim['p_value']:.2e}); "
            "the corrected formula -ceil(log2(r + (1-r)*4^-m)) matches the exact law "
            f"(p={corrected['p_value']:.3g})"
        )
    if verbatim["matches_exact"]:
        return (
            "no defect detected: the verbatim rounding formula matches the exact "
            f"law (p={verbatim['p_value']:.3g})"
        )
    return (
        "inconclusive: both rounding formulas were rejected against the exact law "
        f"(verbatim p={verbatim['p_value']:.2e}, corrected p={corrected['p_value']:.2e})"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cliffc-xval",
        description="Compare the cliffc samplers against transcribed reference listings.",
    )
    parser.add_argument(
        "--cliffc",
        default=None,
        help="primary command to run (default: cliffc from PATH, else python -m cliffc)",
    )
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--layer-draws", type=int, default=20000)
    parser.add_argument("--tableau-draws", type=int, default=40000)
    parser.add_argument("--probe-draws", type=int, default=20000)
    parser.add_argument("--max-layer-n", type=int, default=3)
    parser.add_argument("--max-tableau-n", type=int, default=2)
    parser.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    parser.add_argument("-o", "--output", default=None, help="report file (default stdout)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    command = shlex.split(args.cliffc) if args.cliffc else default_cliffc()
    reports = []
    try:
        with tempfile.TemporaryDirectory(prefix="xval-") as tmp:
            tmpdir = Path(tmp)
            stream = 0
            for n in range(1, args.max_layer_n + 1):
                stream += 1
                path = tmpdir / f"layer-{n}.jsonl"
                run_primary_sample(
                    command, "qmallows", n, args.layer_draws, args.seed, stream, path
                )
                rng = np.random.RandomState([args.seed, stream])
                reference = [
                    corrected_sample_qmallows(n, rng) for _ in range(args.layer_draws)
                ]
                reports.append(
                    compare_distributions(path, reference, n, args.threshold)
                )
            for n in range(1, args.max_tableau_n + 1):
                stream += 1
                path = tmpdir / f"tableau-{n}.jsonl"
                run_primary_sample(
                    command,
                    "clifford",
                    n,
                    args.tableau_draws,
                    args.seed,
                    stream,
                    path,
                    extra=["--format", "tableau"],
                )
                rng = np.random.RandomState([args.seed, stream])
                reference = [
                    reference_random_clifford(n, rng)
                    for _ in range(args.tableau_draws)
                ]
                reports.append(
                    compare_distributions(path, reference, n, args.threshold)
                )
    except RuntimeError as exc:
        print(f"cliffc-xval: {exc}", file=sys.stderr)
        return 2

    probe = probe_layer_formulas(2, args.probe_draws, args.seed, args.threshold)
    verdict = formula_verdict(probe)
    all_agree = all(r.agreement for r in reports)

    document = {
        "seed": args.seed,
        "threshold": args.threshold,
        "comparisons": [r.to_json() for r in reports],
        "probe": probe,
        "rounding_formula_verdict": verdict,
        "all_agree": all_agree,
    }
    text = json.dumps(document, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)

    for report in reports:
        for line in report.summary_lines():
            print(line, file=sys.stderr)
    print(f"rounding formula: {verdict}", file=sys.stderr)
    print(
        f"overall: {'all comparisons agree' if all_agree else 'DISAGREEMENT found'}",
        file=sys.stderr,
    )
    if not all_agree:
        return 1
    if verdict.startswith("inconclusive"):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

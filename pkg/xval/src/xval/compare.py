"""Distributional comparison between cliffc output and the reference samplers.

The harness never imports cliffc: primary samples arrive as the JSON
lines the ``cliffc sample`` command writes, and everything here works on
those records plus the arrays produced by the transcribed reference
samplers.

Class keys
----------
Layer records key the (h, S) pair as (h_string, images): h_string is
the 0/1 string whose character i is the Hadamard bit of qubit i, and
images is the 1-based image tuple of the permutation.  This is exactly
the encoding of a ``sample qmallows`` JSON record.

Tableau records quotient out phases: every Pauli image string is
stripped of its sign prefix, and an operator is keyed by the bare
letter strings of the images of X_1..X_n followed by Z_1..Z_n.  The
reference sampler's bit matrices are read column by column in the same
order, so both sides land in one class space.
"""

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import chi2_contingency, chisquare

DEFAULT_THRESHOLD = 1e-3

_PAULI_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


def free_coupling_count(h_bits, images):
    """Number of free left-layer bits for the layer (h, S).

    One bit per Hadamard, plus for every qubit pair the quadratic and
    linear couplings the left layer may carry without leaving its
    canonical pattern.  2 raised to this count is the layer's weight in
    the exact law.
    """
    count = sum(h_bits)
    n = len(h_bits)
    for j in range(n):
        for i in range(j + 1, n):
            hi, hj = h_bits[i], h_bits[j]
            si, sj = images[i], images[j]
            if (hi and hj) or (hi and not hj and si < sj) or (not hi and hj and si > sj):
                count += 1
            if (not hi and hj) or (hi and hj and si > sj) or (not hi and not hj and si < sj):
                count += 1
    return count


def layer_weight_total(n):
    """Normalizer of the layer law: product of 4^i - 1 for i = 1..n."""
    total = 1
    for i in range(1, n + 1):
        total *= (1 << 2 * i) - 1
    return total


def exact_layer_pmf(n):
    """Exact (h, S) probabilities as Fractions, keyed like layer records."""
    table = {}
    total = 0
    for h_bits in itertools.product((0, 1), repeat=n):
        for images in itertools.permutations(range(n)):
            weight = 1 << free_coupling_count(h_bits, images)
            key = (
                "".join(str(b) for b in h_bits),
                tuple(i + 1 for i in images),
            )
            table[key] = weight
            total += weight
    assert total == layer_weight_total(n)
    return {key: Fraction(weight, total) for key, weight in table.items()}


def symplectic_class_count(n):
    """Number of phase-quotiented operator classes on n qubits."""
    return (1 << n * n) * layer_weight_total(n)


def layer_key(record):
    """Class key of a ``sample qmallows`` JSON record."""
    return record["h"], tuple(int(v) for v in record["s"])


def layer_key_from_reference(h, s):
    """Class key of a reference layer draw (h, S arrays)."""
    return (
        "".join(str(int(b)) for b in h),
        tuple(int(v) + 1 for v in s),
    )


def _strip_sign(pauli):
    return pauli.lstrip("+-i")


def tableau_key(record):
    """Phase-quotiented class key of a tableau JSON record."""
    return tuple(_strip_sign(p) for p in record["x_images"]) + tuple(
        _strip_sign(p) for p in record["z_images"]
    )


def tableau_key_from_reference(mat):
    """Phase-quotiented class key of a reference 2n x 2n bit matrix."""
    mat = np.asarray(mat)
    n = mat.shape[0] // 2
    def column_string(c):
        return "".join(
            _PAULI_LETTERS[(int(mat[q, c]) & 1, int(mat[n + q, c]) & 1)]
            for q in range(n)
        )
    return tuple(column_string(c) for c in range(2 * n))


def two_sample_chisquare(counts_a, counts_b):
    """Pearson chi-square on the 2 x k contingency table of two samples."""
    if not counts_a or not counts_b:
        raise ValueError("both samples must be non-empty")
    keys = sorted(set(counts_a) | set(counts_b))
    table = np.array(
        [
            [counts_a.get(k, 0) for k in keys],
            [counts_b.get(k, 0) for k in keys],
        ]
    )
    stat, p_value, dof, _ = chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(p_value)


def exact_chisquare(counts, pmf):
    """One-sample chi-square of observed counts against an exact pmf."""
    unknown = set(counts) - set(pmf)
    if unknown:
        raise ValueError(f"observed classes outside the law's support: {sorted(unknown)[:3]}")
    keys = sorted(pmf)
    total = sum(counts.values())
    observed = [counts.get(k, 0) for k in keys]
    expected = [float(pmf[k]) * total for k in keys]
    stat, p_value = chisquare(observed, expected)
    return float(stat), len(keys) - 1, float(p_value)


def uniform_chisquare(counts, class_count):
    """One-sample chi-square against the uniform law on class_count classes."""
    total = sum(counts.values())
    observed = list(counts.values()) + [0] * (class_count - len(counts))
    if len(observed) != class_count:
        raise ValueError(f"{len(counts)} observed classes exceed the {class_count} possible")
    stat, p_value = chisquare(observed)
    return float(stat), class_count - 1, float(p_value)


@dataclass
class XValReport:
    """Outcome of one primary-vs-reference comparison."""

    n: int
    mode: str
    primary_total: int
    reference_total: int
    classes: int
    statistic: float
    dof: int
    p_value: float
    threshold: float
    agreement: bool
    primary_vs_exact: dict | None
    reference_vs_exact: dict | None
    reference_deviates: bool
    class_counts: dict[str, list[int]] = field(repr=False)

    def __post_init__(self):
        primary_sum = sum(a for a, _ in self.class_counts.values())
        reference_sum = sum(b for _, b in self.class_counts.values())
        if primary_sum != self.primary_total or reference_sum != self.reference_total:
            raise ValueError(
                f"class counts sum to ({primary_sum}, {reference_sum}), "
                f"declared totals are ({self.primary_total}, {self.reference_total})"
            )

    def to_json(self):
        return {
            "n": self.n,
            "mode": self.mode,
            "primary_total": self.primary_total,
            "reference_total": self.reference_total,
            "classes": self.classes,
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "threshold": self.threshold,
            "agreement": self.agreement,
            "primary_vs_exact": self.primary_vs_exact,
            "reference_vs_exact": self.reference_vs_exact,
            "reference_deviates": self.reference_deviates,
            "class_counts": self.class_counts,
        }

    def summary_lines(self):
        lines = [
            f"{self.mode} n={self.n}: {self.primary_total} primary vs "
            f"{self.reference_total} reference draws over {self.classes} classes: "
            f"chi2={self.statistic:.1f} dof={self.dof} p={self.p_value:.3g} -> "
            f"{'agree' if self.agreement else 'DISAGREE'}"
        ]
        for name, entry in (
            ("primary", self.primary_vs_exact),
            ("reference", self.reference_vs_exact),
        ):
            if entry is not None:
                lines.append(
                    f"  {name} vs exact law: p={entry['p_value']:.3g} "
                    f"({'match' if entry['matches'] else 'MISMATCH'})"
                )
        return lines


def _key_to_string(mode, key):
    if mode == "layer":
        h_string, images = key
        return h_string + "|" + ",".join(str(v) for v in images)
    return "|".join(key)


def _read_records(path):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    records = []
    for line_number, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{line_number}: not a JSON record: {exc}") from exc
    if not records:
        raise ValueError(f"{path}: no records")
    return records


def _count(keys):
    counts = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    return counts


def compare_distributions(primary_output_file, reference_samples, n, threshold=DEFAULT_THRESHOLD):
    """Two-sample comparison of a cliffc output file against reference draws.

    primary_output_file holds the JSON lines written by ``cliffc sample
    qmallows`` (layer mode) or ``cliffc sample clifford --format
    tableau`` (tableau mode); the mode is detected from the records.
    reference_samples is a sequence of (h, S) pairs resp. 2n x 2n bit
    matrices from the transcribed samplers.  The layer mode also tests
    both sides against the exact layer law, and flags the reference
    sampler whenever it deviates from it; the tableau mode tests both
    sides against uniformity over all phase-quotiented classes.
    """
    records = _read_records(primary_output_file)
    reference_samples = list(reference_samples)
    if not reference_samples:
        raise ValueError("no reference samples")

    first = records[0]
    if "h" in first and "s" in first:
        mode = "layer"
        for record in records:
            if len(record["h"]) != n or len(record["s"]) != n:
                raise ValueError(f"layer record {record} does not have n={n}")
        primary_counts = _count(layer_key(r) for r in records)
        for h, s in reference_samples:
            if len(h) != n or len(s) != n:
                raise ValueError(f"reference layer sample of size {len(h)}, expected {n}")
        reference_counts = _count(
            layer_key_from_reference(h, s) for h, s in reference_samples
        )
        pmf = exact_layer_pmf(n)
        exact_tests = [exact_chisquare(primary_counts, pmf), exact_chisquare(reference_counts, pmf)]
    elif "x_images" in first and "z_images" in first:
        mode = "tableau"
        for record in records:
            if record.get("n") != n:
                raise ValueError(f"tableau record has n={record.get('n')}, expected {n}")
        primary_counts = _count(tableau_key(r) for r in records)
        for mat in reference_samples:
            if np.asarray(mat).shape != (2 * n, 2 * n):
                raise ValueError(f"reference matrix of shape {np.asarray(mat).shape}, expected {(2 * n, 2 * n)}")
        reference_counts = _count(
            tableau_key_from_reference(mat) for mat in reference_samples
        )
        class_count = symplectic_class_count(n)
        exact_tests = [
            uniform_chisquare(primary_counts, class_count),
            uniform_chisquare(reference_counts, class_count),
        ]
    else:
        raise ValueError(f"unrecognized record shape: {sorted(first)}")

    stat, dof, p_value = two_sample_chisquare(primary_counts, reference_counts)
    (p_stat, p_dof, p_p), (r_stat, r_dof, r_p) = exact_tests
    primary_vs_exact = {
        "statistic": p_stat,
        "dof": p_dof,
        "p_value": p_p,
        "matches": p_p > threshold,
    }
    reference_vs_exact = {
        "statistic": r_stat,
        "dof": r_dof,
        "p_value": r_p,
        "matches": r_p > threshold,
    }
    all_keys = sorted(set(primary_counts) | set(reference_counts))
    return XValReport(
        n=n,
        mode=mode,
        primary_total=len(records),
        reference_total=len(reference_samples),
        classes=len(all_keys),
        statistic=stat,
        dof=dof,
        p_value=p_value,
        threshold=threshold,
        agreement=p_value > threshold,
        primary_vs_exact=primary_vs_exact,
        reference_vs_exact=reference_vs_exact,
        reference_deviates=not reference_vs_exact["matches"],
        class_counts={
            _key_to_string(mode, key): [
                primary_counts.get(key, 0),
                reference_counts.get(key, 0),
            ]
            for key in all_keys
        },
    )

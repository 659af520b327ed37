"""Seedable transcriptions of the published reference samplers.

The layer sampler and the full operator sampler below mirror the
published reference listings line for line so that their output
distributions can be compared against the ``cliffc`` command line tool.
Two departures from the listings, both required to make the comparison
possible at all:

* module-global RNG calls are replaced by an explicit seeded generator,
  so every draw is reproducible;
* matrix arithmetic is carried out over GF(2).  The listings build the
  tableau blocks with a floating-point matrix inverse and never reduce
  products mod 2, which yields entries outside {0, 1}; the construction
  is only meaningful modulo 2.

``reference_sample_qmallows`` keeps the listing's rounding formula
verbatim even though that formula is degenerate (its log2 argument
always lies in (1, 1.25], so the computed index is the constant 1).
``corrected_sample_qmallows`` is the repaired variant.  The harness
measures both against the exact layer law and reports which one
matches; the full operator sampler defaults to the corrected layer so
that everything downstream of the layer draw can be validated
independently of the rounding defect.
"""

import numpy as np

__all__ = [
    "reference_sample_qmallows",
    "corrected_sample_qmallows",
    "reference_random_clifford",
    "is_symplectic",
]


def _as_rng(seed):
    """Accept an integer seed or an already-constructed generator."""
    if hasattr(seed, "uniform") and hasattr(seed, "randint"):
        return seed
    return np.random.RandomState(seed)


def reference_sample_qmallows(n, seed):
    """Layer sampler transcribed verbatim, defective rounding included.

    Returns (h, S) as integer arrays: h[i] is the Hadamard bit of qubit
    i and S[i] the image of position i under the permutation.  Because
    the index formula always evaluates to 1, the output is the same for
    every seed: h = (1, ..., 1, 0) and S the fixed permutation obtained
    by repeatedly taking the second-smallest remaining candidate.
    """
    rng = _as_rng(seed)
    h = np.zeros(n, dtype=int)
    S = np.zeros(n, dtype=int)
    A = list(range(n))
    for i in range(n):
        m = n - i
        r = rng.uniform(0, 1)
        index = int(np.ceil(np.log2(1 + (1 - r) * (4 ** (-m)))))
        h[i] = 1 * (index < m)
        if index < m:
            k = index
        else:
            k = 2 * m - index - 1
        S[i] = A[k]
        del A[k]
    return h, S


def corrected_sample_qmallows(n, seed):
    """Layer sampler with the rounding formula repaired.

    Identical to reference_sample_qmallows except for the index line:
    the uniform draw r is mapped through -ceil(log2(r + (1-r)*4^-m)),
    which realizes the geometric step weights 2^(2m-1-index) with the
    final two indices sharing weight; this is the exact layer law.
    """
    rng = _as_rng(seed)
    h = np.zeros(n, dtype=int)
    S = np.zeros(n, dtype=int)
    A = list(range(n))
    for i in range(n):
        m = n - i
        r = rng.uniform(0, 1)
        index = -int(np.ceil(np.log2(r + (1 - r) * 4.0 ** (-m))))
        h[i] = 1 * (index < m)
        if index < m:
            k = index
        else:
            k = 2 * m - index - 1
        S[i] = A[k]
        del A[k]
    return h, S


def _gf2_inv(mat):
    """Inverse of a square 0/1 matrix over GF(2) by Gauss-Jordan."""
    n = mat.shape[0]
    work = np.concatenate([mat % 2, np.identity(n, dtype=int)], axis=1)
    for col in range(n):
        pivot = next(r for r in range(col, n) if work[r, col])
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        for r in range(n):
            if r != col and work[r, col]:
                work[r] ^= work[col]
    return work[:, n:]


def reference_random_clifford(n, seed, layer_sampler=None):
    """Operator sampler transcribed from the published reference listing.

    Draws the (h, S) layer, fills the gated left-layer couplings and the
    free right-layer couplings bit by bit in the listing's order, and
    assembles the 2n x 2n bit matrix of the operator: columns are the
    images of X_1..X_n then Z_1..Z_n, rows the X parts over the Z parts.
    Phases are not tracked.

    layer_sampler defaults to corrected_sample_qmallows; pass
    reference_sample_qmallows to reproduce the verbatim listing with its
    degenerate layer distribution.
    """
    assert n <= 200
    rng = _as_rng(seed)
    if layer_sampler is None:
        layer_sampler = corrected_sample_qmallows

    ZR = np.zeros((n, n), dtype=int)
    ZR2 = np.zeros((2 * n, 2 * n), dtype=int)
    I = np.identity(n, dtype=int)

    h, S = layer_sampler(n, rng)

    Gamma1 = np.copy(ZR)
    Delta1 = np.copy(I)
    Gamma2 = np.copy(ZR)
    Delta2 = np.copy(I)

    for i in range(n):
        Gamma2[i, i] = rng.randint(2)
        if h[i]:
            Gamma1[i, i] = rng.randint(2)

    for j in range(n):
        for i in range(j + 1, n):
            b = rng.randint(2)
            Gamma2[i, j] = b
            Gamma2[j, i] = b
            Delta2[i, j] = rng.randint(2)
            if h[i] == 1 and h[j] == 1:
                b = rng.randint(2)
                Gamma1[i, j] = b
                Gamma1[j, i] = b
            if h[i] == 1 and h[j] == 0 and S[i] < S[j]:
                b = rng.randint(2)
                Gamma1[i, j] = b
                Gamma1[j, i] = b
            if h[i] == 0 and h[j] == 1 and S[i] > S[j]:
                b = rng.randint(2)
                Gamma1[i, j] = b
                Gamma1[j, i] = b
            if h[i] == 0 and h[j] == 1:
                Delta1[i, j] = rng.randint(2)
            if h[i] == 1 and h[j] == 1 and S[i] > S[j]:
                Delta1[i, j] = rng.randint(2)
            if h[i] == 0 and h[j] == 0 and S[i] < S[j]:
                Delta1[i, j] = rng.randint(2)

    PROD1 = Gamma1 @ Delta1 % 2
    PROD2 = Gamma2 @ Delta2 % 2
    INV1 = _gf2_inv(Delta1.T)
    INV2 = _gf2_inv(Delta2.T)
    F1 = np.block([[Delta1, ZR], [PROD1, INV1]])
    F2 = np.block([[Delta2, ZR], [PROD2, INV2]])

    U = np.copy(ZR2)
    for i in range(n):
        U[i, :] = F2[S[i], :]
        U[i + n, :] = F2[S[i] + n, :]
    for i in range(n):
        if h[i] == 1:
            U[(i, i + n), :] = U[(i + n, i), :]
    return F1 @ U % 2


def is_symplectic(mat):
    """Check U^T J U = J mod 2 for the X-over-Z commutation pairing J."""
    two_n = mat.shape[0]
    if mat.shape != (two_n, two_n) or two_n % 2:
        return False
    n = two_n // 2
    J = np.zeros((two_n, two_n), dtype=int)
    J[:n, n:] = np.identity(n, dtype=int)
    J[n:, :n] = np.identity(n, dtype=int)
    return bool(np.array_equal(mat.T @ J @ mat % 2, J))

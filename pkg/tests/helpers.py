"""Shared test utilities: seeded random expressions and independent bounds."""

import itertools

import numpy as np

from bellwerner import canonical_patterns, new_expression, strategy_matrix


def random_expression(rng, parties, *, max_terms=6, homogeneous=False, integer=False):
    """Random nonzero expression with coefficients from a seeded generator."""
    pats = canonical_patterns(parties)
    if homogeneous:
        pats = [p for p in pats if "_" not in p]
    count = int(rng.integers(1, min(max_terms, len(pats)) + 1))
    chosen = rng.choice(len(pats), size=count, replace=False)
    terms = []
    for i in chosen:
        if integer:
            c = 0
            while c == 0:
                c = int(rng.integers(-3, 4))
            terms.append((pats[i], float(c)))
        else:
            c = float(rng.normal())
            if c == 0.0:
                c = 1.0
            terms.append((pats[i], c))
    return new_expression(parties, terms)


def brute_force_bound(expr):
    """Max |value| over all +-1 assignments, written independently of the
    package's enumeration kernel."""
    m = expr.parties
    best = 0.0
    for assign in itertools.product((1, -1), repeat=2 * m):
        total = 0.0
        for pattern, coeff in expr.terms():
            prod = coeff
            for j, ch in enumerate(pattern):
                if ch == "_":
                    continue
                prod *= assign[2 * j + (0 if ch == "0" else 1)]
            total += prod
        best = max(best, abs(total))
    return best


def matrix_bound_blas(expr):
    """max |M alpha| through the library matmul."""
    m = strategy_matrix(expr.parties).astype(float)
    return float(np.abs(m @ expr.to_vector()).max())


def matrix_bound_ordered(expr):
    """max |M alpha| accumulated column by column in canonical slot order.

    Mirrors the enumeration kernel's float addition order, so agreement is
    expected bit for bit, not merely to rounding.
    """
    m = strategy_matrix(expr.parties)
    alpha = expr.to_vector()
    vals = np.zeros(m.shape[0])
    for k in np.nonzero(alpha)[0]:
        vals += alpha[k] * m[:, k]
    return float(np.abs(vals).max())

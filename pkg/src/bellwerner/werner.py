"""Werner-state detectability: thresholds, ranges, and sampling experiments.

A Werner mixture of a pure m-qubit state Psi is
rho_v = (1 - v)/2^m * I + v |Psi><Psi|.  This module collects the closed-form
thresholds that decide when such mixtures stay undetectable by two-setting
Bell expressions (separability thresholds, visibility lower bounds,
undetectable theta ranges), a pairwise upper bound on the separability
threshold of arbitrary pure states with its companion necessary check, the
measure machinery for how common undetectable-yet-entangled states are, and
an empirical visibility detector driven by the see-saw.

Index conventions: amplitudes are ordered by m-bit strings read as integers
(|0...0> first); the complement of index j is 2^m - 1 - j, so complement
lookups are array reversals.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .classical import lhv_bound
from .errors import CapExceeded
from .expressions import BellExpression
from .quantum import DEFAULT_RESTARTS, DEFAULT_TOL, bell_operator, seesaw_fixed_state

_NORM_TOL = 1e-12
_MC_CHUNK = 4096
DETECT_MAX_PARTIES = 6


class ThetaRange(NamedTuple):
    """A symmetric undetectable window (theta_lower, pi - theta_lower)."""

    theta_lower: float
    theta_upper: float
    measure: float  # (theta_upper - theta_lower) / pi


class MonteCarloEstimate(NamedTuple):
    fraction: float
    std_error: float
    hits: int
    samples: int


@dataclass(frozen=True)
class MeasureConditionVerdict:
    """Outcome of the block-ratio smallness test for measure arguments.

    satisfied mirrors strict_form (the tighter threshold); the looser
    rearranged form is reported alongside, never used for the verdict.
    """

    satisfied: bool
    strict_form: bool
    loose_form: bool
    sum_inverse_gammas: float
    threshold_strict: float
    threshold_loose: float

    def __bool__(self) -> bool:
        return self.satisfied


def ghz_amplitudes(parties: int, theta: float) -> np.ndarray:
    """cos(theta)|0...0> + sin(theta)|1...1> as a 2^m amplitude vector."""
    if parties < 1:
        raise ValueError("parties must be at least 1")
    vec = np.zeros(2 ** parties, dtype=complex)
    vec[0] = math.cos(theta)
    vec[-1] = math.sin(theta)
    return vec


@dataclass(frozen=True)
class GhzFamily:
    """Generalized GHZ family with theta strictly inside (0, pi/2)."""

    parties: int
    theta: float

    def __post_init__(self):
        if self.parties < 2:
            raise ValueError("parties must be at least 2")
        if not 0.0 < self.theta < math.pi / 2:
            raise ValueError(
                f"theta must lie strictly inside (0, pi/2), got {self.theta!r}"
            )

    def state_vector(self) -> np.ndarray:
        return ghz_amplitudes(self.parties, self.theta)


@dataclass(frozen=True, eq=False)
class PureFamily:
    """Arbitrary pure m-qubit state given by its 2^m amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = vec.shape[0]
        parties = n.bit_length() - 1
        if n < 2 or 2 ** parties != n:
            raise ValueError(f"amplitude count must be a power of two >= 2, got {n}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"amplitudes must be unit norm, got {norm!r}")
        object.__setattr__(self, "amplitudes", vec)

    @property
    def parties(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def state_vector(self) -> np.ndarray:
        return self.amplitudes


WernerFamily = Union[GhzFamily, PureFamily]


def werner_density(family: WernerFamily, v: float) -> np.ndarray:
    """rho_v = (1 - v)/2^m * I + v |Psi><Psi| for v in [0, 1]."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {v!r}")
    psi = family.state_vector()
    dim = psi.shape[0]
    return (1.0 - v) / dim * np.eye(dim, dtype=complex) + v * np.outer(psi, psi.conj())


def visibility_lower_bound(parties: int, c1: float, c2: float) -> float:
    """Least visibility that any detecting expression can certify.

    (2^m c1 - c1) / (2^m c2 - c1), clamped to [0, 1]; requires c2 > c1 > 0
    (equal bounds cannot detect anything).
    """
    if not c1 > 0.0:
        raise ValueError("classical bound must be positive")
    if not c2 > c1:
        raise ValueError("quantum bound must exceed the classical bound")
    d = float(2 ** parties)
    value = (d * c1 - c1) / (d * c2 - c1)
    return min(max(value, 0.0), 1.0)


def ghz_separability_threshold(parties: int, theta: float) -> float:
    """Exact full-separability threshold 1/(2^(m-1) sin(2 theta) + 1)."""
    if not 0.0 < theta < math.pi / 2:
        raise ValueError(f"theta must lie strictly inside (0, pi/2), got {theta!r}")
    return 1.0 / (2 ** (parties - 1) * math.sin(2.0 * theta) + 1.0)


def undetectable_range_homogeneous(parties: int) -> ThetaRange:
    """GHZ theta window undetectable by any full-correlation expression.

    theta_lower = arcsin((2 sqrt(3) - 2)/(2^m - 1))/2; the window is symmetric
    about pi/2 and its argument stays below 1 for every m >= 2.
    """
    if parties < 2:
        raise ValueError("parties must be at least 2")
    arg = (2.0 * math.sqrt(3.0) - 2.0) / (2 ** parties - 1)
    lower = 0.5 * math.asin(arg)
    upper = math.pi - lower
    return ThetaRange(lower, upper, (upper - lower) / math.pi)


def undetectable_range_general(
    parties: int, gammas: Sequence[float]
) -> Optional[ThetaRange]:
    """GHZ theta window undetectable by an expression with given block ratios.

    With S = sum(1/gamma): arcsin argument 2 sqrt(3) S / (2^m - 1).  An
    argument of 1 or more certifies no window; None is returned.
    """
    if parties < 2:
        raise ValueError("parties must be at least 2")
    total = 0.0
    for g in gammas:
        if not g > 0.0:
            raise ValueError(f"ratios must be positive, got {g!r}")
        total += 0.0 if math.isinf(g) else 1.0 / g
    arg = 2.0 * math.sqrt(3.0) * total / (2 ** parties - 1)
    if arg >= 1.0:
        return None
    lower = 0.5 * math.asin(arg)
    upper = math.pi - lower
    return ThetaRange(lower, upper, (upper - lower) / math.pi)


def _validated_probabilities(amplitudes) -> np.ndarray:
    vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n = vec.shape[0]
    parties = n.bit_length() - 1
    if n < 4 or 2 ** parties != n:
        raise ValueError(f"amplitude count must be a power of two >= 4, got {n}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"amplitudes must be unit norm, got {norm!r}")
    return np.abs(vec) ** 2


def separability_upper_bound(amplitudes) -> float:
    """Pairwise upper bound on the separability threshold of a pure state.

    Scan light pairs i (those with p_i + p_ic <= 2^(1-m), guaranteed to exist)
    against all pairs j through
    f(i, j) = 4^m p_j p_jc - 4^m p_i p_ic + 2^m (p_i + p_ic) - 1
    and return min(1/sqrt(|f|)) over |f| > 1e-12, capped at 1.
    """
    p = _validated_probabilities(amplitudes)
    n = p.shape[0]
    parties = n.bit_length() - 1
    pc = p[::-1]
    pair_sum = p + pc
    light = np.flatnonzero(pair_sum <= 2.0 ** (1 - parties) + 1e-12)
    if light.size == 0:  # pigeonhole says this cannot happen; guard anyway
        light = np.array([int(np.argmin(pair_sum))])
    products = p * pc
    best = 1.0
    four_m = float(4 ** parties)
    two_m = float(2 ** parties)
    for i in light:
        f = four_m * products - four_m * products[i] + two_m * pair_sum[i] - 1.0
        usable = np.abs(f) > 1e-12
        if np.any(usable):
            best = min(best, float(1.0 / math.sqrt(np.abs(f[usable]).max())))
    return best


def separability_necessary_check(amplitudes, v: float) -> bool:
    """Diagonal-dominance condition every fully separable mixture satisfies.

    Checks min_i sqrt(d_i d_ic) >= max_j |alpha_j||alpha_jc| * v where
    d_i are the diagonal entries of rho_v.  A False verdict certifies
    entanglement at that v.
    """
    p = _validated_probabilities(amplitudes)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"mixing weight must lie in [0, 1], got {v!r}")
    d = (1.0 - v) / p.shape[0] + v * p
    lhs = float(np.sqrt(d * d[::-1]).min())
    rhs = v * float(np.sqrt(p * p[::-1]).max())
    return lhs >= rhs


def necessary_check_first_failure(amplitudes, *, tol: float = 1e-6) -> Optional[float]:
    """Smallest v at which the necessary check starts failing, by bisection.

    None when the check holds all the way to v = 1.  Assumes a single
    crossing, which holds for the families treated here (the check is exact
    for GHZ states, where the crossing is the separability threshold).
    """
    p = _validated_probabilities(amplitudes)

    def holds(v: float) -> bool:
        d = (1.0 - v) / p.shape[0] + v * p
        lhs = float(np.sqrt(d * d[::-1]).min())
        rhs = v * float(np.sqrt(p * p[::-1]).max())
        return lhs >= rhs

    if holds(1.0):
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return hi


def undetectable_measure_condition(
    parties: int, gammas: Sequence[float], poly_value: float
) -> MeasureConditionVerdict:
    """Test whether block ratios are large enough for the measure argument.

    Strict form: sum(1/gamma) < poly_value/sqrt(3) - 1 (the verdict).  The
    rearranged variant sum(1/gamma) < (poly_value - 1)/sqrt(3) is looser and
    reported for reference only.
    """
    if parties < 2:
        raise ValueError("parties must be at least 2")
    if len(gammas) != parties - 1:
        raise ValueError(f"expected {parties - 1} ratios, got {len(gammas)}")
    if not poly_value > math.sqrt(3.0):
        raise ValueError("poly_value must exceed sqrt(3)")
    total = 0.0
    for g in gammas:
        if not g > 0.0:
            raise ValueError(f"ratios must be positive, got {g!r}")
        total += 0.0 if math.isinf(g) else 1.0 / g
    threshold_strict = poly_value / math.sqrt(3.0) - 1.0
    threshold_loose = (poly_value - 1.0) / math.sqrt(3.0)
    strict = total < threshold_strict
    return MeasureConditionVerdict(
        satisfied=strict,
        strict_form=strict,
        loose_form=total < threshold_loose,
        sum_inverse_gammas=total,
        threshold_strict=threshold_strict,
        threshold_loose=threshold_loose,
    )


def measure_lower_bound(parties: int, poly_value: float) -> float:
    """(1 - c^2)^(2^(m-1)) with c = 2^-m (poly_value + 1); needs 0 < c < 1."""
    if parties < 1:
        raise ValueError("parties must be at least 1")
    c = (poly_value + 1.0) / 2 ** parties
    if not 0.0 < c < 1.0:
        raise ValueError(f"derived constant c = {c!r} must lie in (0, 1)")
    return (1.0 - c * c) ** (2 ** (parties - 1))


def max_pair_product(amplitudes) -> float:
    """max_j p_j p_jc over complementary index pairs."""
    p = np.abs(np.asarray(amplitudes, dtype=complex).reshape(-1)) ** 2
    return float((p * p[::-1]).max())


def _mc_chunk_hits(parties: int, threshold: float, seed: int, chunk_index: int, count: int) -> int:
    rng = np.random.default_rng([seed, chunk_index])
    dim = 2 ** parties
    re = rng.standard_normal((count, dim))
    im = rng.standard_normal((count, dim))
    weights = re * re + im * im
    total = weights.sum(axis=1)
    pair = (weights[:, 0] + weights[:, -1]) / total
    return int(np.count_nonzero(pair > threshold))


def measure_monte_carlo(
    parties: int,
    poly_value: float,
    samples: int,
    seed: int = 0,
    *,
    threads: Optional[int] = None,
) -> MonteCarloEstimate:
    """Fraction of uniform pure states whose reference pair outweighs c^2.

    Draws amplitude vectors as normalized independent complex Gaussians and
    counts states with p_{0...0} + p_{1...1} > c^2, c = 2^-m (poly_value + 1).
    That event is the one the closed-form measure_lower_bound actually
    bounds; the per-pair product form of the test is unattainable once
    poly_value + 1 >= 2^(m-1) (pair products never exceed 1/4), so it is not
    used.  By symmetry of the uniform measure, any fixed complementary pair
    gives the same distribution.

    Sampling is chunked with substreams keyed by (seed, chunk index) and hit
    counts are integers, so the estimate is identical for any thread count.
    """
    if parties < 1:
        raise ValueError("parties must be at least 1")
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    c = (poly_value + 1.0) / 2 ** parties
    threshold = c * c
    chunks = []
    start = 0
    index = 0
    while start < samples:
        count = min(_MC_CHUNK, samples - start)
        chunks.append((index, count))
        start += count
        index += 1

    def run(chunk):
        idx, count = chunk
        return _mc_chunk_hits(parties, threshold, seed, idx, count)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(run, chunks))
    else:
        hits = sum(run(chunk) for chunk in chunks)
    fraction = hits / samples
    std_error = math.sqrt(fraction * (1.0 - fraction) / samples)
    return MonteCarloEstimate(fraction, std_error, hits, samples)


def detect_visibility(
    expr: BellExpression,
    family: WernerFamily,
    seed: int = 0,
    *,
    restarts: int = DEFAULT_RESTARTS,
    bisection_tol: float = 1e-6,
    threads: Optional[int] = None,
    max_parties: int = DETECT_MAX_PARTIES,
) -> Optional[float]:
    """Empirical visibility at which the Werner family starts violating expr.

    Optimizes the observable assignment for the pure state (v = 1) with the
    fixed-state see-saw, then bisects the linear-in-v value
    (1-v) Tr(B)/2^m + v <Psi|B|Psi> against the classical bound.  None when
    even v = 1 shows no violation.  The maximally mixed end never violates,
    so the crossing is bracketed whenever it exists.
    """
    if family.parties != expr.parties:
        raise ValueError(
            f"family has {family.parties} parties, expression has {expr.parties}"
        )
    if expr.parties > max_parties:
        raise CapExceeded(
            f"visibility detection caps at {max_parties} parties; "
            "raise max_parties to override"
        )
    psi = family.state_vector()
    c1 = lhv_bound(expr).value
    result = seesaw_fixed_state(
        expr, psi, restarts=restarts, tol=DEFAULT_TOL, seed=seed, threads=threads
    )
    operator = bell_operator(expr, result.witness)
    mixed_value = float(np.trace(operator).real) / psi.shape[0]
    pure_value = float(np.vdot(psi, operator @ psi).real)

    def violates(v: float) -> bool:
        return abs((1.0 - v) * mixed_value + v * pure_value) > c1

    if not violates(1.0):
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > bisection_tol:
        mid = 0.5 * (lo + hi)
        if violates(mid):
            hi = mid
        else:
            lo = mid
    return hi

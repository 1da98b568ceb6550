"""Quantum bounds: analytic upper bounds and a see-saw lower-bound search.

Upper bounds come in two analytic flavors for full-correlation expressions
(factor sqrt(3) for general single-qubit observables, sqrt(5/2) for
anticommuting ones, both applied to the closed-form classical value) plus a
composite bound assembled from block ratios.

Lower bounds come from a see-saw: alternate between the optimal state of the
current Bell operator and, party by party, the optimal pair of observables
given everyone else.  Each observable is a norm-at-most-one Hermitian qubit
operator A = ((l+ + l-)/2) I + ((l+ - l-)/2) n.sigma; for a fixed state the
best A for a party/setting is available in closed form (sign decomposition of
the effective 2x2 operator), so sweeps are exact coordinate ascent and the
objective is nondecreasing by construction.

The eigensolver is a shifted power iteration run on c I + H and c I - H with
c = 1 + max absolute row sum, which makes both shifted matrices positive
definite; the two dominant eigenvalues recover the extreme eigenvalues of H.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .classical import closed_form_classical, lhv_bound
from .errors import CapExceeded, PowerIterationError
from .expressions import ABSENT, BellExpression

DEFAULT_MAX_PARTIES = 8
DEFAULT_RESTARTS = 20
DEFAULT_TOL = 1e-9
_MAX_SWEEPS = 500

_I2 = np.eye(2, dtype=complex)

# Fixed offset for the power-iteration start vector so repeated calls on the
# same dimension use the same (generic) starting direction.
_START_SEED = 0xB311


def _sign(x: float) -> float:
    return 1.0 if x >= 0.0 else -1.0


@dataclass(frozen=True)
class QubitObservable:
    """Hermitian qubit observable with operator norm at most one.

    Parametrized by a Bloch axis and the eigenvalue pair (eig_plus for the
    +axis eigenvector, eig_minus for the -axis one), both in [-1, 1].
    """

    axis: tuple[float, float, float]
    eig_plus: float
    eig_minus: float

    def __post_init__(self):
        ax = tuple(float(v) for v in self.axis)
        if len(ax) != 3 or not all(math.isfinite(v) for v in ax):
            raise ValueError("axis must be a finite 3-vector")
        norm = math.sqrt(sum(v * v for v in ax))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"axis must be a unit vector, got norm {norm!r}")
        for eig in (self.eig_plus, self.eig_minus):
            if not math.isfinite(eig) or abs(eig) > 1.0 + 1e-12:
                raise ValueError(f"eigenvalues must lie in [-1, 1], got {eig!r}")
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "eig_plus", float(self.eig_plus))
        object.__setattr__(self, "eig_minus", float(self.eig_minus))

    @classmethod
    def projective(cls, axis) -> "QubitObservable":
        """The +-1-outcome observable n.sigma along the given axis."""
        return cls(tuple(axis), 1.0, -1.0)

    @classmethod
    def constant(cls, value: float) -> "QubitObservable":
        """A multiple of the identity (a deterministic assignment)."""
        return cls((0.0, 0.0, 1.0), value, value)

    def matrix(self) -> np.ndarray:
        nx, ny, nz = self.axis
        a0 = (self.eig_plus + self.eig_minus) / 2.0
        h = (self.eig_plus - self.eig_minus) / 2.0
        return np.array(
            [
                [a0 + h * nz, h * (nx - 1j * ny)],
                [h * (nx + 1j * ny), a0 - h * nz],
            ],
            dtype=complex,
        )


@dataclass(frozen=True)
class ObservableAssignment:
    """Per party, the pair of observables used for settings 0 and 1."""

    observables: tuple[tuple[QubitObservable, QubitObservable], ...]

    def __post_init__(self):
        obs = tuple(tuple(pair) for pair in self.observables)
        if not obs:
            raise ValueError("assignment needs at least one party")
        for pair in obs:
            if len(pair) != 2 or not all(isinstance(o, QubitObservable) for o in pair):
                raise ValueError("each party needs exactly two observables")
        object.__setattr__(self, "observables", obs)

    @property
    def parties(self) -> int:
        return len(self.observables)


class AnalyticUppers(NamedTuple):
    general: float
    anticommuting: float


@dataclass(frozen=True, eq=False)
class SeesawResult:
    value: float
    witness: ObservableAssignment
    state: Optional[np.ndarray]
    sweep_values: tuple[float, ...]
    restart_index: int


@dataclass(frozen=True, eq=False)
class QuantumBoundsReport:
    classical_bound: float
    closed_form: Optional[float]
    analytic_upper: Optional[float]
    anticommuting_upper: Optional[float]
    composite_upper: Optional[float]
    seesaw: SeesawResult


def analytic_quantum_upper(expr: BellExpression) -> AnalyticUppers:
    """(sqrt(3), sqrt(5/2)) multiples of the closed-form classical value.

    Only full-correlation expressions qualify; closed_form_classical raises
    otherwise.
    """
    cf = closed_form_classical(expr)
    return AnalyticUppers(math.sqrt(3.0) * cf, math.sqrt(2.5) * cf)


def composite_ratio_upper(gammas: Sequence[float]) -> float:
    """sqrt(3) * sum(1/gamma) + 1 over the supplied block ratios.

    Infinite entries contribute zero; an empty list gives the homogeneous
    limit 1.
    """
    total = 0.0
    for g in gammas:
        if not g > 0.0:
            raise ValueError(f"ratios must be positive, got {g!r}")
        total += 0.0 if math.isinf(g) else 1.0 / g
    return math.sqrt(3.0) * total + 1.0


def _check_cap(parties: int, max_parties: int) -> None:
    if parties > max_parties:
        raise CapExceeded(
            f"operator construction on 2^{parties} dimensions exceeds the cap "
            f"of {max_parties} parties; raise max_parties to override"
        )


def _operator_from_matrices(
    terms, mats: list[list[np.ndarray]], parties: int
) -> np.ndarray:
    dim = 2 ** parties
    out = np.zeros((dim, dim), dtype=complex)
    for pattern, coeff in terms:
        factors = [
            _I2 if ch == ABSENT else mats[j][0 if ch == "0" else 1]
            for j, ch in enumerate(pattern)
        ]
        out += coeff * reduce(np.kron, factors)
    return out


def bell_operator(
    expr: BellExpression,
    obs: ObservableAssignment,
    *,
    max_parties: int = DEFAULT_MAX_PARTIES,
) -> np.ndarray:
    """The 2^m x 2^m operator sum of coeff * tensor products of observables.

    Absent parties contribute identity factors.  The result is exactly
    Hermitian: every factor carries conjugate-symmetric storage and kron
    products and sums preserve it bit for bit.
    """
    if obs.parties != expr.parties:
        raise ValueError(
            f"assignment has {obs.parties} parties, expression has {expr.parties}"
        )
    _check_cap(expr.parties, max_parties)
    mats = [[pair[0].matrix(), pair[1].matrix()] for pair in obs.observables]
    return _operator_from_matrices(expr.terms(), mats, expr.parties)


def _validate_hermitian(matrix: np.ndarray) -> np.ndarray:
    h = np.asarray(matrix, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()) if h.size else 1.0)
    if float(np.abs(h - h.conj().T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian")
    return h


def _power_branch(
    shifted: np.ndarray, start: np.ndarray, rtol: float, max_iterations: int
) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a positive definite matrix by power iteration."""
    v = start
    for _ in range(max_iterations):
        w = shifted @ v
        mu = float(np.vdot(v, w).real)
        if float(np.linalg.norm(w - mu * v)) <= rtol * mu:
            return mu, v
        v = w / np.linalg.norm(w)
    raise PowerIterationError(
        f"power iteration did not reach relative residual {rtol} "
        f"within {max_iterations} iterations"
    )


def _dominant_eig(
    h: np.ndarray, *, rtol: float = 1e-10, max_iterations: int = 10000
) -> tuple[float, np.ndarray]:
    """Signed eigenvalue of largest magnitude and its eigenvector."""
    h = _validate_hermitian(h)
    n = h.shape[0]
    c = 1.0 + float(np.abs(h).sum(axis=1).max())
    rng = np.random.default_rng(_START_SEED + n)
    start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    start = start / np.linalg.norm(start)
    mu_plus, v_plus = _power_branch(c * np.eye(n) + h, start, rtol, max_iterations)
    mu_minus, v_minus = _power_branch(c * np.eye(n) - h, start, rtol, max_iterations)
    top = mu_plus - c  # largest eigenvalue of h
    bottom = c - mu_minus  # smallest eigenvalue of h
    if abs(top) >= abs(bottom):
        return top, v_plus
    return bottom, v_minus


def max_abs_eigenvalue(
    matrix: np.ndarray, *, rtol: float = 1e-10, max_iterations: int = 10000
) -> float:
    """Spectral radius of a Hermitian matrix via shifted power iteration."""
    value, _ = _dominant_eig(matrix, rtol=rtol, max_iterations=max_iterations)
    return abs(value)


def _effective_operator(
    terms_at, mats: list[list[np.ndarray]], j: int, setting: int, rho: np.ndarray, parties: int
) -> np.ndarray:
    """2x2 operator F with Tr(A F) = the objective piece linear in A_{j,setting}.

    F is the partial trace over the other parties of D rho, where D sums the
    relevant terms with an identity in slot j.
    """
    selected = terms_at[j][setting]
    dim = 2 ** parties
    if not selected:
        return np.zeros((2, 2), dtype=complex)
    d = np.zeros((dim, dim), dtype=complex)
    for pattern, coeff in selected:
        factors = [
            _I2 if (k == j or ch == ABSENT) else mats[k][0 if ch == "0" else 1]
            for k, ch in enumerate(pattern)
        ]
        d += coeff * reduce(np.kron, factors)
    dl = 2 ** j
    dr = 2 ** (parties - 1 - j)
    g = (d @ rho).reshape(dl, 2, dr, dl, 2, dr)
    f = np.einsum("apbaqb->pq", g)
    return (f + f.conj().T) / 2.0


def _optimal_observable(f: np.ndarray, previous: QubitObservable) -> QubitObservable:
    """Maximize Tr(A F) over the norm-at-most-one observable class.

    Decompose F = f0 I + fvec.sigma; the maximizer aligns the axis with fvec
    and picks each eigenvalue as the sign of f0 +- |fvec|.  A vanishing fvec
    leaves the axis free; keep the previous one.
    """
    f0 = (f[0, 0].real + f[1, 1].real) / 2.0
    fx = f[1, 0].real
    fy = f[1, 0].imag
    fz = (f[0, 0].real - f[1, 1].real) / 2.0
    norm = math.sqrt(fx * fx + fy * fy + fz * fz)
    if norm < 1e-14:
        lam = _sign(f0)
        return QubitObservable(previous.axis, lam, lam)
    axis = (fx / norm, fy / norm, fz / norm)
    return QubitObservable(axis, _sign(f0 + norm), _sign(f0 - norm))


def _split_terms_by_party(expr: BellExpression):
    """terms_at[j][x] = the (pattern, coeff) list with party j at setting x."""
    terms_at = [[[], []] for _ in range(expr.parties)]
    for pattern, coeff in expr.terms():
        for j, ch in enumerate(pattern):
            if ch != ABSENT:
                terms_at[j][0 if ch == "0" else 1].append((pattern, coeff))
    return terms_at


def _seesaw_run(
    expr: BellExpression,
    initial: ObservableAssignment,
    *,
    tol: float,
    max_sweeps: int = _MAX_SWEEPS,
    fixed_state: Optional[np.ndarray] = None,
) -> tuple[float, ObservableAssignment, Optional[np.ndarray], tuple[float, ...]]:
    """Coordinate-ascent sweeps from one starting assignment.

    With fixed_state the objective is |<psi|B|psi>| for that state; otherwise
    the state is refreshed each sweep to the extreme eigenvector of the
    current operator and the objective is the spectral radius.
    """
    m = expr.parties
    obs = [[pair[0], pair[1]] for pair in initial.observables]
    mats = [[o.matrix() for o in pair] for pair in obs]
    terms_at = _split_terms_by_party(expr)
    terms = expr.terms()

    def current_operator() -> np.ndarray:
        return _operator_from_matrices(terms, mats, m)

    if fixed_state is not None:
        psi = np.asarray(fixed_state, dtype=complex).reshape(-1)
        if psi.shape[0] != 2 ** m:
            raise ValueError(f"state must have dimension 2^{m}")
        rho = np.outer(psi, psi.conj())
        signed = float(np.vdot(psi, current_operator() @ psi).real)
        state = None
    else:
        signed, vec = _dominant_eig(current_operator())
        rho = np.outer(vec, vec.conj())
        state = vec
    value = abs(signed)
    sign = _sign(signed)
    sweep_values = [value]

    for _ in range(max_sweeps):
        for j in range(m):
            for setting in (0, 1):
                f = sign * _effective_operator(terms_at, mats, j, setting, rho, m)
                obs[j][setting] = _optimal_observable(f, obs[j][setting])
                mats[j][setting] = obs[j][setting].matrix()
        op = current_operator()
        if fixed_state is not None:
            signed = float(np.vdot(psi, op @ psi).real)
        else:
            signed, vec = _dominant_eig(op)
            rho = np.outer(vec, vec.conj())
            state = vec
        new_value = abs(signed)
        if new_value < value - 1e-9 * max(1.0, value):
            raise RuntimeError(
                "see-saw objective decreased; eigensolver or update fault"
            )
        sign = _sign(signed)
        sweep_values.append(new_value)
        improvement = new_value - value
        value = new_value
        if improvement < tol:
            break

    witness = ObservableAssignment(tuple((pair[0], pair[1]) for pair in obs))
    return value, witness, state, tuple(sweep_values)


def _random_assignment(parties: int, rng: np.random.Generator) -> ObservableAssignment:
    pairs = []
    for _ in range(parties):
        settings = []
        for _ in range(2):
            vec = rng.standard_normal(3)
            while np.linalg.norm(vec) < 1e-9:
                vec = rng.standard_normal(3)
            vec = vec / np.linalg.norm(vec)
            settings.append(QubitObservable.projective(tuple(vec)))
        pairs.append(tuple(settings))
    return ObservableAssignment(tuple(pairs))


def _witness_assignment(expr: BellExpression) -> ObservableAssignment:
    """Commuting warm start: the best deterministic strategy as identity multiples.

    Its operator is (strategy value) times identity, so the first sweep already
    attains the classical bound and ascent can only improve on it.
    """
    strategy = lhv_bound(expr).witness
    pairs = tuple(
        (QubitObservable.constant(float(a0)), QubitObservable.constant(float(a1)))
        for a0, a1 in strategy.assignments
    )
    return ObservableAssignment(pairs)


def _run_tasks(tasks, threads: Optional[int]):
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda fn: fn(), tasks))
    return [fn() for fn in tasks]


def seesaw_lower(
    expr: BellExpression,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    *,
    threads: Optional[int] = None,
    max_parties: int = DEFAULT_MAX_PARTIES,
    max_sweeps: int = _MAX_SWEEPS,
) -> SeesawResult:
    """Best see-saw value over seeded random restarts plus a classical warm start.

    Restart r draws its starting axes from a substream keyed by (seed, r), so
    results do not depend on worker count or execution order; ties go to the
    lowest restart index.  The warm start guarantees value >= classical bound.
    """
    if len(expr) == 0:
        raise ValueError("zero expression has no quantum bound")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    _check_cap(expr.parties, max_parties)

    def make_task(assignment: ObservableAssignment):
        def run():
            return _seesaw_run(expr, assignment, tol=tol, max_sweeps=max_sweeps)

        return run

    tasks = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        tasks.append(make_task(_random_assignment(expr.parties, rng)))
    tasks.append(make_task(_witness_assignment(expr)))

    outcomes = _run_tasks(tasks, threads)
    best = 0
    for idx in range(1, len(outcomes)):
        if outcomes[idx][0] > outcomes[best][0]:
            best = idx
    value, witness, state, sweeps = outcomes[best]
    return SeesawResult(
        value=value,
        witness=witness,
        state=state,
        sweep_values=sweeps,
        restart_index=best,
    )


def seesaw_fixed_state(
    expr: BellExpression,
    state: np.ndarray,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    *,
    threads: Optional[int] = None,
    max_parties: int = DEFAULT_MAX_PARTIES,
    max_sweeps: int = _MAX_SWEEPS,
) -> SeesawResult:
    """Best |<psi|B|psi>| over assignments for a fixed pure state.

    Same restart discipline as seesaw_lower; the warm start pins the result at
    or above the classical bound for any state.
    """
    if len(expr) == 0:
        raise ValueError("zero expression has no quantum bound")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    _check_cap(expr.parties, max_parties)
    psi = np.asarray(state, dtype=complex).reshape(-1)

    def make_task(assignment: ObservableAssignment):
        def run():
            value, witness, _, sweeps = _seesaw_run(
                expr, assignment, tol=tol, max_sweeps=max_sweeps, fixed_state=psi
            )
            return value, witness, None, sweeps

        return run

    tasks = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        tasks.append(make_task(_random_assignment(expr.parties, rng)))
    tasks.append(make_task(_witness_assignment(expr)))

    outcomes = _run_tasks(tasks, threads)
    best = 0
    for idx in range(1, len(outcomes)):
        if outcomes[idx][0] > outcomes[best][0]:
            best = idx
    value, witness, _, sweeps = outcomes[best]
    return SeesawResult(
        value=value,
        witness=witness,
        state=psi,
        sweep_values=sweeps,
        restart_index=best,
    )


def quantum_bounds_report(
    expr: BellExpression,
    *,
    restarts: int = DEFAULT_RESTARTS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    gammas: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    max_parties: int = DEFAULT_MAX_PARTIES,
) -> QuantumBoundsReport:
    """Bundle the classical bound, analytic uppers, and the see-saw lower."""
    classical = lhv_bound(expr, max_parties=max_parties)
    closed = analytic = anticommuting = None
    try:
        closed = closed_form_classical(expr)
    except ValueError:
        pass
    if closed is not None:
        analytic, anticommuting = analytic_quantum_upper(expr)
    composite = composite_ratio_upper(gammas) if gammas is not None else None
    seesaw = seesaw_lower(
        expr,
        restarts=restarts,
        tol=tol,
        seed=seed,
        threads=threads,
        max_parties=max_parties,
    )
    return QuantumBoundsReport(
        classical_bound=classical.value,
        closed_form=closed,
        analytic_upper=analytic,
        anticommuting_upper=anticommuting,
        composite_upper=composite,
        seesaw=seesaw,
    )

"""Codelength analyses of the coding game.

Covers the per-symbol minimax constancy of the projection code on
constraint-satisfying sequences, the coding-theoretic concentration residual
(which collapses to -log2 d_n), and the closed-form series of worst-case gaps
between the integer-prior mixture and the projection code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concentration import representative_sequence
from .errors import EnumerationInfeasibleError, ValidationError
from .lattice import (
    DEFAULT_CELL_BUDGET,
    ConstraintSpec,
    SampleSpace,
    _check_budget,
    _dense_shape,
    _reach_step,
)
from .priors import IntegerPrior
from .simulate import HypercompressionResult, RecurrenceResult
from .solver import MaxEntSolution
from .sumdist import central_series


def enumerate_constraint_sequences(space: SampleSpace, constraint: ConstraintSpec,
                                   n: int, limit: int = 10 ** 6) -> list:
    """All length-n sequences (as index tuples) satisfying the constraint,
    found by DFS with boolean reachability pruning."""
    center = constraint.center_units(n)
    if center is None:
        return []
    reach = [np.ones((1,) * constraint.dim, dtype=bool)]
    for m in range(1, n + 1):
        reach.append(_reach_step(reach[-1], _dense_shape(m, constraint.unit_max),
                                 sorted(set(constraint.units))))
    out: list = []

    def descend(prefix, units, depth):
        if depth == n:
            out.append(tuple(prefix))
            if len(out) > limit:
                raise EnumerationInfeasibleError(
                    f"constraint set at n={n} exceeds {limit} sequences"
                )
            return
        table = reach[n - depth - 1]
        for idx in range(space.size):
            candidate = tuple(a + b for a, b in
                              zip(units, constraint.units[idx]))
            needed = tuple(c - u for c, u in zip(center, candidate))
            if all(0 <= x < s for x, s in zip(needed, table.shape)) \
                    and table[needed]:
                prefix.append(idx)
                descend(prefix, candidate, depth + 1)
                prefix.pop()

    descend([], (0,) * constraint.dim, 0)
    return out


@dataclass
class AlternativeCheck:
    tag: str
    worst_per_symbol: float
    lower_bound: float
    satisfied: bool


@dataclass
class MinimaxReport:
    n: int
    constant: float
    max_abs_deviation: float
    sequence_count: int
    alternatives: tuple[AlternativeCheck, ...]


def verify_minimax_constancy(space: SampleSpace, constraint: ConstraintSpec,
                             solution: MaxEntSolution, n: int,
                             alternatives=(), limit: int = 10 ** 6,
                             cell_budget: int = DEFAULT_CELL_BUDGET
                             ) -> MinimaxReport:
    """Check that the projection's per-symbol redundancy against the prior is
    one constant on every constraint-satisfying sequence of length n.

    The constant is the relative entropy of the solution (in bits, negative
    unless the projection is the prior). Supplied alternative predictors are
    checked against the exact lower bound constant - (k/2n) log2 n +
    (1/n) log2 c_n, with c_n computed in the same run.
    """
    sequences = enumerate_constraint_sequences(space, constraint, n, limit)
    if not sequences:
        raise ValidationError(f"n={n} is infeasible for this constraint")
    logp = np.log2(solution.pmf)
    logq = np.log2(space.prior)
    constant = solution.entropy_bits
    max_dev = 0.0
    for seq in sequences:
        value = -sum(logp[idx] - logq[idx] for idx in seq) / n
        max_dev = max(max_dev, abs(value - constant))

    checks = []
    if alternatives:
        p_c = float(central_series(space, constraint, n, measure=solution,
                                   mode="float", cell_budget=cell_budget)[n])
        c_n = n ** (constraint.dim / 2.0) * p_c
        bound = constant - (constraint.dim / (2.0 * n)) * math.log2(n) \
            + math.log2(c_n) / n
        for alt in alternatives:
            worst = -math.inf
            for seq in sequences:
                lq = -sum(logq[idx] for idx in seq)
                worst = max(worst,
                            (alt.sequence_codelength(seq) - lq) / n)
            checks.append(AlternativeCheck(
                tag=alt.tag, worst_per_symbol=worst, lower_bound=bound,
                satisfied=worst >= bound - 1e-9))
    return MinimaxReport(n=n, constant=constant, max_abs_deviation=max_dev,
                         sequence_count=len(sequences),
                         alternatives=tuple(checks))


@dataclass
class ResidualRecord:
    n: int
    feasible: bool
    c_n: float | None
    d_n: float | None
    residual_direct: float | None
    residual_identity: float | None


def corollary1_residuals(space: SampleSpace, constraint: ConstraintSpec,
                         solution: MaxEntSolution, n_list,
                         cell_budget: int = DEFAULT_CELL_BUDGET
                         ) -> list[ResidualRecord]:
    """Concentration residual per n, computed two ways.

    Direct: codelength of a representative constraint sequence under the
    projection, minus its conditioned-prior codelength, minus
    (k/2) log2(2 pi n) + log2 sqrt(det Sigma) - sum_j log2 h_j.
    Identity: -log2 d_n. The two agree up to float rounding.
    """
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list or n_list[0] < 1:
        raise ValidationError("n_list must hold sizes >= 1")
    n_max = n_list[-1]
    k = constraint.dim
    det = float(np.linalg.det(solution.covariance))
    spans = math.prod(float(h) for h in constraint.spans_original)
    central_p = central_series(space, constraint, n_max, measure=solution,
                               mode="float", cell_budget=cell_budget)
    central_q = central_series(space, constraint, n_max, measure="q",
                               mode="float", cell_budget=cell_budget)
    logp = np.log2(solution.pmf)
    logq = np.log2(space.prior)
    out = []
    for n in n_list:
        p_c = float(central_p[n])
        if p_c <= 0.0:
            out.append(ResidualRecord(n=n, feasible=False, c_n=None, d_n=None,
                                      residual_direct=None,
                                      residual_identity=None))
            continue
        c_n = n ** (k / 2.0) * p_c
        d_n = p_c * math.sqrt((2.0 * math.pi * n) ** k * det) / spans
        rep = representative_sequence(space, constraint, n, cell_budget)
        counts = np.bincount(np.array(rep), minlength=space.size)
        len_proj = -float(counts @ logp)
        len_cond = -float(counts @ logq) + math.log2(float(central_q[n]))
        penalty = (k / 2.0) * math.log2(2.0 * math.pi * n) \
            + 0.5 * math.log2(det) - math.log2(spans)
        out.append(ResidualRecord(
            n=n, feasible=True, c_n=c_n, d_n=d_n,
            residual_direct=len_proj - len_cond - penalty,
            residual_identity=-math.log2(d_n)))
    return out


def min_hit_cost_series(constraint: ConstraintSpec, costs: dict, n_max: int,
                        cell_budget: int = DEFAULT_CELL_BUDGET) -> dict:
    """Minimum accumulated hit cost over constraint-satisfying sequences.

    Walking the unit lattice, a path pays ``costs[m]`` whenever its length-m
    prefix sits on the target cell. Returns, for each m in ``costs`` up to
    n_max, the minimum total cost over paths ending on the target at m
    (including their own hit at m).
    """
    _check_budget(_dense_shape(n_max, constraint.unit_max), cell_budget,
                  f"min-cost sweep to n={n_max}")
    unit_cells = sorted(set(constraint.units))
    table = np.zeros((1,) * constraint.dim)
    out: dict = {}
    for m in range(1, n_max + 1):
        new = np.full(_dense_shape(m, constraint.unit_max), np.inf)
        for u in unit_cells:
            region = tuple(slice(uj, uj + s) for uj, s in zip(u, table.shape))
            np.minimum(new[region], table, out=new[region])
        table = new
        center = constraint.center_units(m)
        if center is not None and np.isfinite(table[center]):
            if m in costs:
                table[center] += costs[m]
                out[m] = float(table[center])
    return out


@dataclass
class GapRecord:
    n: int
    component: int
    gap_bits: float
    gap_per_log2n: float


@dataclass
class CodelengthRecord:
    n: int
    predictor: str
    codelength_bits: float
    gap_vs_maxent_bits: float


@dataclass
class GameReport:
    """Aggregated coding-game results for one problem instance."""

    codelengths: tuple[CodelengthRecord, ...] = ()
    gap_series: tuple[GapRecord, ...] = ()
    minimax: MinimaxReport | None = None
    recurrence: RecurrenceResult | None = None
    hypercompression: tuple[HypercompressionResult, ...] = ()
    skipped_sizes: tuple[int, ...] = ()


def play_coding_game(space: SampleSpace, constraint: ConstraintSpec,
                     solution: MaxEntSolution, predictors: dict, n_list,
                     cell_budget: int = DEFAULT_CELL_BUDGET) -> GameReport:
    """Codelength table for named predictors over shared sequences.

    For each feasible n one representative constraint sequence is drawn and
    every predictor is scored on it, so the reported gaps compare like with
    like. The projection codelength is the gap baseline. A dict value may be
    a predictor or a callable building one from n (for horizon-dependent
    predictors). Infeasible sizes are skipped and recorded.
    """
    logp = np.log2(solution.pmf)
    records = []
    skipped = []
    for n in sorted(set(int(n) for n in n_list)):
        try:
            rep = representative_sequence(space, constraint, n, cell_budget)
        except (ValidationError, EnumerationInfeasibleError):
            skipped.append(n)
            continue
        baseline = -float(sum(logp[idx] for idx in rep))
        for tag, entry in predictors.items():
            predictor = entry(n) if callable(entry) else entry
            length = predictor.sequence_codelength(rep)
            records.append(CodelengthRecord(
                n=n, predictor=tag, codelength_bits=length,
                gap_vs_maxent_bits=length - baseline))
    return GameReport(codelengths=tuple(records),
                      skipped_sizes=tuple(skipped))


def mixture_gap_series(space: SampleSpace, constraint: ConstraintSpec,
                       solution: MaxEntSolution, prior: IntegerPrior,
                       n_max: int, horizon: int | None = None,
                       cell_budget: int = DEFAULT_CELL_BUDGET
                       ) -> list[GapRecord]:
    """Worst-case codelength gap of the mixture over the projection, per n.

    For each feasible n up to n_max this computes min over constraint
    sequences of log2(mixture mass / projection mass) in closed form: the
    mixture's mass ratio to the prior decomposes into hit terms (minimized by
    the cost sweep) plus a tail over components beyond n, and the projection's
    ratio to the prior is constant on the constraint set.
    """
    if horizon is None:
        horizon = 2 * n_max
    if horizon < n_max:
        raise ValidationError("horizon must cover n_max")
    central_q = central_series(space, constraint, horizon, measure="q",
                               mode="float", cell_budget=cell_budget)
    # a size is feasible exactly when the prior reaches its target cell
    sizes = [m for m in range(1, horizon + 1) if central_q[m] > 0.0]
    sizes = sizes[: prior.j_max]
    if not sizes:
        raise ValidationError("no feasible sizes below the horizon")
    weights = [float(prior.mass(j)) for j in range(1, len(sizes) + 1)]
    total = sum(weights)
    weights = [w / total for w in weights]
    costs = {n_j: weights[j] / float(central_q[n_j])
             for j, n_j in enumerate(sizes)}
    minima = min_hit_cost_series(constraint, costs, n_max, cell_budget)
    entropy = solution.entropy_bits
    out = []
    for j, n_j in enumerate(sizes):
        if n_j > n_max:
            break
        if n_j not in minima:
            continue
        tail = 0.0
        for jp in range(j + 1, len(sizes)):
            gain = float(central_q[sizes[jp] - n_j])
            if gain > 0.0:
                tail += weights[jp] * gain / float(central_q[sizes[jp]])
        ratio_min = minima[n_j] + tail
        gap = math.log2(ratio_min) + n_j * entropy
        out.append(GapRecord(n=n_j, component=j + 1, gap_bits=gap,
                             gap_per_log2n=gap / math.log2(n_j) if n_j > 1
                             else gap))
    return out

"""Distributions of n-step sums of a lattice statistic under a product measure.

Tables are indexed by unit coordinates: the scaled sum after n steps equals
n * offset + span * units, coordinatewise. Two arithmetic backends exist: a
dense float64 table (large n) and an exact map of Fractions (identity checks,
small n). Dense tables self-normalize because every step convolves probability
masses, so no log-domain rescaling is needed at the sizes this package allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LatticeBlowupError, ValidationError
from .lattice import (
    DEFAULT_CELL_BUDGET,
    ConstraintSpec,
    SampleSpace,
    _check_budget,
    _dense_shape,
    as_fraction,
)
from .solver import MaxEntSolution


def resolve_measure(space: SampleSpace, measure, mode: str):
    """Normalize a measure argument to (measure_id, per-outcome weights).

    Accepts 'q' (the prior), a MaxEntSolution (float mode only), or a
    ``(tag, weights)`` pair with exact rationals in rational mode.
    """
    if measure == "q":
        if mode == "rational":
            return "q", list(space.prior_fractions)
        return "q", [float(w) for w in space.prior_fractions]
    if isinstance(measure, MaxEntSolution):
        if mode == "rational":
            raise ValidationError("the projection has irrational masses; "
                                  "rational mode needs a rational measure")
        return measure.measure_id, [float(p) for p in measure.pmf]
    if isinstance(measure, tuple) and len(measure) == 2:
        tag, weights = measure
        weights = list(weights)
        if len(weights) != space.size:
            raise ValidationError("measure weights must match the outcome count")
        if mode == "rational":
            return str(tag), [as_fraction(w) for w in weights]
        return str(tag), [float(w) for w in weights]
    raise ValidationError(f"cannot interpret measure {measure!r}")


def _one_step_cells(constraint: ConstraintSpec, weights):
    agg: dict = {}
    for u, w in zip(constraint.units, weights):
        prev = agg.get(u)
        agg[u] = w if prev is None else prev + w
    return sorted(agg.items())


def _dense_step(table: np.ndarray, shape_new, cells) -> np.ndarray:
    new = np.zeros(shape_new)
    for u, w in cells:
        region = tuple(slice(uj, uj + s) for uj, s in zip(u, table.shape))
        new[region] += w * table
    return new


def _sparse_step(table: dict, cells, cell_budget: int) -> dict:
    new: dict = {}
    for u0, m in table.items():
        for u, w in cells:
            key = tuple(a + b for a, b in zip(u0, u))
            prev = new.get(key)
            new[key] = m * w if prev is None else prev + m * w
    if len(new) > cell_budget:
        raise LatticeBlowupError(
            f"lattice blow-up: sparse sum support has {len(new)} cells "
            f"(budget {cell_budget})"
        )
    return new


@dataclass
class SumDistribution:
    """Distribution of the n-step unit-sum vector under one product measure."""

    n: int
    measure_id: str
    mode: str
    constraint: ConstraintSpec
    dense: np.ndarray | None = None
    sparse: dict | None = None

    def mass_units(self, units):
        units = tuple(units)
        if self.dense is not None:
            for uj, s in zip(units, self.dense.shape):
                if uj < 0 or uj >= s:
                    return 0.0
            return float(self.dense[units])
        zero = Fraction(0) if self.mode == "rational" else 0.0
        return self.sparse.get(units, zero)

    def mass_at_target(self):
        """Mass of the cell where the n-sample average equals the target;
        zero when that cell is off the lattice."""
        center = self.constraint.center_units(self.n)
        if center is None:
            return Fraction(0) if self.mode == "rational" else 0.0
        return self.mass_units(center)

    def total(self):
        if self.dense is not None:
            return float(self.dense.sum())
        return sum(self.sparse.values())

    def items(self):
        """Support cells with nonzero mass."""
        if self.dense is not None:
            for idx in np.argwhere(self.dense > 0.0):
                yield tuple(int(i) for i in idx), float(self.dense[tuple(idx)])
        else:
            for u, m in self.sparse.items():
                if m != 0:
                    yield u, m


def _advance(sd: SumDistribution, cells, cell_budget: int) -> SumDistribution:
    n = sd.n + 1
    if sd.dense is not None:
        shape = _dense_shape(n, sd.constraint.unit_max)
        return SumDistribution(n=n, measure_id=sd.measure_id, mode=sd.mode,
                               constraint=sd.constraint,
                               dense=_dense_step(sd.dense, shape, cells))
    return SumDistribution(n=n, measure_id=sd.measure_id, mode=sd.mode,
                           constraint=sd.constraint,
                           sparse=_sparse_step(sd.sparse, cells, cell_budget))


def _initial(constraint: ConstraintSpec, measure_id: str, mode: str,
             dense: bool) -> SumDistribution:
    if dense:
        table = np.ones((1,) * constraint.dim)
        return SumDistribution(n=0, measure_id=measure_id, mode=mode,
                               constraint=constraint, dense=table)
    one = Fraction(1) if mode == "rational" else 1.0
    return SumDistribution(n=0, measure_id=measure_id, mode=mode,
                           constraint=constraint,
                           sparse={(0,) * constraint.dim: one})


def sum_distribution(space: SampleSpace, constraint: ConstraintSpec, n: int,
                     measure="q", mode: str = "float",
                     cell_budget: int = DEFAULT_CELL_BUDGET) -> SumDistribution:
    """Distribution of the n-step statistic sum by successive convolution."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    measure_id, weights = resolve_measure(space, measure, mode)
    cells = _one_step_cells(constraint, weights)
    use_dense = mode == "float"
    if use_dense:
        _check_budget(_dense_shape(n, constraint.unit_max), cell_budget,
                      f"sum distribution at n={n}")
    sd = _initial(constraint, measure_id, mode, use_dense)
    for _ in range(n):
        sd = _advance(sd, cells, cell_budget)
    return sd


def convolve(a: SumDistribution, b: SumDistribution) -> SumDistribution:
    """Exact convolution of two sum distributions of the same statistic."""
    if a.constraint is not b.constraint or a.measure_id != b.measure_id \
            or a.mode != b.mode:
        raise ValidationError("can only convolve tables of one statistic and measure")
    out: dict = {}
    for u1, m1 in a.items():
        for u2, m2 in b.items():
            key = tuple(x + y for x, y in zip(u1, u2))
            prev = out.get(key)
            out[key] = m1 * m2 if prev is None else prev + m1 * m2
    return SumDistribution(n=a.n + b.n, measure_id=a.measure_id, mode=a.mode,
                           constraint=a.constraint, sparse=out)


def constraint_prob(space: SampleSpace, constraint: ConstraintSpec, n: int,
                    measure="q", mode: str = "float",
                    cell_budget: int = DEFAULT_CELL_BUDGET):
    """Probability that the n-sample average of the statistic is on target.

    Zero (not an error) for infeasible n, so sweeps over n stay uninterrupted.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    return sum_distribution(space, constraint, n, measure=measure, mode=mode,
                            cell_budget=cell_budget).mass_at_target()


def central_series(space: SampleSpace, constraint: ConstraintSpec, n_max: int,
                   measure="q", mode: str = "float",
                   cell_budget: int = DEFAULT_CELL_BUDGET) -> list:
    """Constraint probabilities for every n up to n_max in one sweep.

    Keeps only the running table, so memory stays at one table of the largest
    size. Entry 0 is the empty-sum mass 1.
    """
    measure_id, weights = resolve_measure(space, measure, mode)
    cells = _one_step_cells(constraint, weights)
    use_dense = mode == "float"
    if use_dense:
        _check_budget(_dense_shape(n_max, constraint.unit_max), cell_budget,
                      f"central-mass sweep to n={n_max}")
    sd = _initial(constraint, measure_id, mode, use_dense)
    out = [sd.mass_at_target()]
    for _ in range(n_max):
        sd = _advance(sd, cells, cell_budget)
        out.append(sd.mass_at_target())
    return out


class SumTableProvider:
    """Lazily grown cache of sum distributions for sizes 0..m.

    Not thread-safe; confine one provider to one thread of work. Concurrent
    runs should build independent providers, which compute identical values.
    """

    def __init__(self, space: SampleSpace, constraint: ConstraintSpec,
                 measure="q", mode: str = "float",
                 cell_budget: int = DEFAULT_CELL_BUDGET):
        self.space = space
        self.constraint = constraint
        self.mode = mode
        self.cell_budget = cell_budget
        self.measure_id, self.weights = resolve_measure(space, measure, mode)
        self._cells = _one_step_cells(constraint, self.weights)
        self._tables = [_initial(constraint, self.measure_id, mode, mode == "float")]
        self._cells_used = 1

    def table(self, m: int) -> SumDistribution:
        if m < 0:
            raise ValidationError("suffix size must be >= 0")
        while len(self._tables) <= m:
            nxt = _advance(self._tables[-1], self._cells, self.cell_budget)
            self._cells_used += int(nxt.dense.size) if nxt.dense is not None \
                else len(nxt.sparse)
            if self._cells_used > self.cell_budget:
                raise LatticeBlowupError(
                    f"lattice blow-up: cached sum tables hold {self._cells_used} "
                    f"cells (budget {self.cell_budget}); shrink the horizon"
                )
            self._tables.append(nxt)
        return self._tables[m]

    def mass(self, m: int, units):
        return self.table(m).mass_units(units)

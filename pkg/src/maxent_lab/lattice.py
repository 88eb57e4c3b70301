"""Finite sample spaces, exact rational priors, and integer-lattice statistics.

All constraint arithmetic here is exact: inputs are rationals, each statistic
coordinate is rescaled to integers, and spans/offsets/feasibility are derived
with gcd arithmetic. Floats only appear as cached views for the numeric layers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

import numpy as np

from .errors import (
    DegenerateCoordinateError,
    LatticeBlowupError,
    TargetOutsideHullError,
    ValidationError,
)

DEFAULT_CELL_BUDGET = 50_000_000


def as_fraction(value) -> Fraction:
    """Parse an exact rational: Fraction, int, or a string like '1/6' or '0.25'.

    Floats are rejected; lattice derivation is not float-safe.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse {value!r} as a rational") from exc
    raise ValidationError(
        f"expected an exact rational (Fraction, int, or string), got {type(value).__name__}"
    )


@dataclass(frozen=True)
class SampleSpace:
    """Finite outcome set with a strictly positive rational prior."""

    outcomes: tuple
    prior_fractions: tuple[Fraction, ...]
    dropped: tuple = ()

    @cached_property
    def prior(self) -> np.ndarray:
        return np.array([float(w) for w in self.prior_fractions])

    @cached_property
    def _index(self) -> dict:
        return {label: i for i, label in enumerate(self.outcomes)}

    @property
    def size(self) -> int:
        return len(self.outcomes)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(f"unknown outcome {label!r}") from None


def build_space(labels, prior_weights) -> SampleSpace:
    """Build a sample space from labels and non-negative rational weights.

    Weights are normalized to sum exactly to one; zero-weight outcomes are
    dropped and recorded in ``dropped``.
    """
    labels = list(labels)
    if not labels:
        raise ValidationError("empty outcome list")
    if len(set(labels)) != len(labels):
        raise ValidationError("outcome labels must be distinct")
    weights = [as_fraction(w) for w in prior_weights]
    if len(weights) != len(labels):
        raise ValidationError("labels and weights must have equal length")
    if any(w < 0 for w in weights):
        raise ValidationError("prior weights must be non-negative")
    total = sum(weights)
    if total == 0:
        raise ValidationError("all prior weights are zero")
    kept, dropped = [], []
    for label, w in zip(labels, weights):
        (kept if w > 0 else dropped).append((label, w))
    return SampleSpace(
        outcomes=tuple(label for label, _ in kept),
        prior_fractions=tuple(w / total for _, w in kept),
        dropped=tuple(dropped),
    )


@dataclass(frozen=True)
class LatticeGeometry:
    """Integer-lattice form of a rational statistic.

    For coordinate j, every value satisfies scaled(x) = offset[j] + s * span[j]
    with s a non-negative integer (the unit); span[j] is maximal by gcd
    construction. ``scale[j]`` maps original values to the scaled integers.
    """

    dim: int
    scale: tuple[int, ...]
    offsets: tuple[int, ...]
    spans: tuple[int, ...]
    units: tuple[tuple[int, ...], ...]

    @cached_property
    def unit_max(self) -> tuple[int, ...]:
        return tuple(max(u[j] for u in self.units) for j in range(self.dim))

    @classmethod
    def from_values(cls, values, allow_constant: bool = False) -> "LatticeGeometry":
        values = [tuple(as_fraction(v) for v in row) for row in values]
        dim = len(values[0])
        if any(len(row) != dim for row in values):
            raise ValidationError("statistic rows must share one dimension")
        scale, offsets, spans = [], [], []
        columns = []
        for j in range(dim):
            col = [row[j] for row in values]
            mult = lcm(*(v.denominator for v in col))
            scaled = [int(v * mult) for v in col]
            b = min(scaled)
            h = 0
            for v in scaled:
                h = gcd(h, v - b)
            if h == 0:
                if not allow_constant:
                    raise DegenerateCoordinateError(
                        f"degenerate constraint coordinate {j}: statistic is constant"
                    )
                h = 1
            scale.append(mult)
            offsets.append(b)
            spans.append(h)
            columns.append([(v - b) // h for v in scaled])
        units = tuple(tuple(columns[j][i] for j in range(dim)) for i in range(len(values)))
        return cls(dim=dim, scale=tuple(scale), offsets=tuple(offsets),
                   spans=tuple(spans), units=units)


def hull_position(values, target) -> str:
    """Classify a target against the convex hull of the statistic values.

    Returns 'interior' (relative interior), 'boundary', or 'outside'. The
    per-coordinate range check is exact; for dim >= 2 the classification runs
    a small LP maximizing the minimum convex weight.
    """
    values = [tuple(as_fraction(v) for v in row) for row in values]
    target = tuple(as_fraction(t) for t in target)
    dim = len(target)
    for j in range(dim):
        col = [row[j] for row in values]
        if target[j] < min(col) or target[j] > max(col):
            return "outside"
    if dim == 1:
        col = [row[0] for row in values]
        return "boundary" if target[0] in (min(col), max(col)) else "interior"

    from scipy.optimize import linprog

    m = len(values)
    # variables: lambda_1..lambda_m, eps; maximize eps
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_eq = np.zeros((dim + 1, m + 1))
    for i, row in enumerate(values):
        for j in range(dim):
            a_eq[j, i] = float(row[j])
    a_eq[dim, :m] = 1.0
    b_eq = np.array([float(t) for t in target] + [1.0])
    a_ub = np.zeros((m, m + 1))
    for i in range(m):
        a_ub[i, i] = -1.0
        a_ub[i, -1] = 1.0
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    if not res.success:
        return "outside"
    return "interior" if res.x[-1] > 1e-9 else "boundary"


@dataclass(frozen=True)
class ConstraintSpec:
    """A rational statistic T, a target for its mean, and the derived lattice."""

    dim: int
    values: tuple[tuple[Fraction, ...], ...]
    target: tuple[Fraction, ...]
    geometry: LatticeGeometry

    @cached_property
    def values_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.values])

    @cached_property
    def target_float(self) -> np.ndarray:
        return np.array([float(t) for t in self.target])

    @property
    def scale(self) -> tuple[int, ...]:
        return self.geometry.scale

    @property
    def offsets(self) -> tuple[int, ...]:
        return self.geometry.offsets

    @property
    def spans(self) -> tuple[int, ...]:
        return self.geometry.spans

    @property
    def units(self) -> tuple[tuple[int, ...], ...]:
        return self.geometry.units

    @property
    def unit_max(self) -> tuple[int, ...]:
        return self.geometry.unit_max

    @cached_property
    def spans_original(self) -> tuple[Fraction, ...]:
        """Spans of T in its original units (scaled span / scale)."""
        return tuple(Fraction(h, s) for h, s in zip(self.spans, self.scale))

    @cached_property
    def center_step(self) -> tuple[Fraction, ...]:
        """Per-step unit drift of the target: center_units(n) = n * center_step."""
        return tuple(
            Fraction(t * s - b, h)
            for t, s, b, h in zip(self.target, self.scale, self.offsets, self.spans)
        )

    def center_units(self, n: int) -> tuple[int, ...] | None:
        """Unit coordinates of the cell where the n-sample average hits the
        target, or None when that cell is off the lattice."""
        out = []
        for sigma, m in zip(self.center_step, self.unit_max):
            c = n * sigma
            if c.denominator != 1 or c < 0 or c > n * m:
                return None
            out.append(int(c))
        return tuple(out)


def derive_lattice(values, target) -> ConstraintSpec:
    """Derive the integer-lattice representation of a rational statistic.

    ``values`` holds one k-vector per outcome (scalars accepted for k = 1),
    ``target`` the desired mean. Constant coordinates and targets outside the
    convex hull are rejected.
    """
    rows = []
    for row in values:
        if isinstance(row, (list, tuple)):
            rows.append(tuple(as_fraction(v) for v in row))
        else:
            rows.append((as_fraction(row),))
    if len(rows) < 2:
        raise ValidationError("need at least two outcomes")
    if not isinstance(target, (list, tuple)):
        target = (target,)
    target = tuple(as_fraction(t) for t in target)
    if len(target) != len(rows[0]):
        raise ValidationError("target dimension does not match statistic dimension")
    geometry = LatticeGeometry.from_values(rows)
    if hull_position(rows, target) == "outside":
        raise TargetOutsideHullError(
            f"target {tuple(str(t) for t in target)} outside the convex hull of statistic values"
        )
    return ConstraintSpec(dim=len(target), values=tuple(rows), target=target,
                          geometry=geometry)


@dataclass(frozen=True)
class FeasibilityTable:
    """Which sample sizes admit at least one constraint-satisfying sequence."""

    n_max: int
    flags: tuple[bool, ...]

    def is_feasible(self, n: int) -> bool:
        if not 1 <= n <= self.n_max:
            raise ValidationError(f"n={n} outside table range 1..{self.n_max}")
        return self.flags[n]

    def sizes(self) -> list[int]:
        return [n for n in range(1, self.n_max + 1) if self.flags[n]]


def _dense_shape(n: int, unit_max: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(n * m + 1 for m in unit_max)


def _check_budget(shape: tuple[int, ...], cell_budget: int, what: str) -> None:
    cells = 1
    for s in shape:
        cells *= s
    if cells > cell_budget:
        raise LatticeBlowupError(
            f"lattice blow-up: {what} needs {cells} cells (budget {cell_budget}); "
            "reduce n or coarsen the statistic"
        )


def _reach_step(reach: np.ndarray, shape_new: tuple[int, ...], unit_cells) -> np.ndarray:
    new = np.zeros(shape_new, dtype=bool)
    for u in unit_cells:
        region = tuple(slice(uj, uj + s) for uj, s in zip(u, reach.shape))
        new[region] |= reach
    return new


def feasible_sizes(space: SampleSpace, constraint: ConstraintSpec, n_max: int,
                   cell_budget: int = DEFAULT_CELL_BUDGET) -> FeasibilityTable:
    """Tabulate, for n = 1..n_max, whether some length-n sequence has its
    statistic average exactly on target.

    Reachability runs as a boolean sweep over unit sums; a size is feasible
    when the target cell is on the lattice and reachable.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    _check_budget(_dense_shape(n_max, constraint.unit_max), cell_budget,
                  f"feasibility table to n={n_max}")
    unit_cells = sorted(set(constraint.units))
    reach = np.ones((1,) * constraint.dim, dtype=bool)
    flags = [False] * (n_max + 1)
    for n in range(1, n_max + 1):
        reach = _reach_step(reach, _dense_shape(n, constraint.unit_max), unit_cells)
        center = constraint.center_units(n)
        flags[n] = center is not None and bool(reach[center])
    return FeasibilityTable(n_max=n_max, flags=tuple(flags))


def first_feasible_sizes(space: SampleSpace, constraint: ConstraintSpec, count: int,
                         n_cap: int = 100_000,
                         cell_budget: int = DEFAULT_CELL_BUDGET) -> list[int]:
    """First ``count`` feasible sizes in increasing order (stops at n_cap)."""
    unit_cells = sorted(set(constraint.units))
    reach = np.ones((1,) * constraint.dim, dtype=bool)
    out: list[int] = []
    n = 0
    while len(out) < count and n < n_cap:
        n += 1
        shape = _dense_shape(n, constraint.unit_max)
        _check_budget(shape, cell_budget, f"feasibility sweep at n={n}")
        reach = _reach_step(reach, shape, unit_cells)
        center = constraint.center_units(n)
        if center is not None and reach[center]:
            out.append(n)
    return out


def exact_mean(space: SampleSpace, values) -> tuple[Fraction, ...]:
    """Exact prior mean of a rational statistic, handy for building targets."""
    rows = [tuple(as_fraction(v) for v in (row if isinstance(row, (list, tuple)) else (row,)))
            for row in values]
    dim = len(rows[0])
    return tuple(
        sum(w * row[j] for w, row in zip(space.prior_fractions, rows))
        for j in range(dim)
    )

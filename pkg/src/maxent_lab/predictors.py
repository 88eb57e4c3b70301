"""Sequential predictors with codelength accounting in bits.

A predictor is a stateful object: it emits a conditional mass function for the
next symbol, is advanced symbol by symbol, and accumulates -log2 of the
conditionals it assigned. Masses may be exact rationals (rational mode) or
floats; a mass of zero yields an infinite codelength and consumers must cope.
Instances are single-threaded; run independent copies for parallel work.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ValidationError
from .lattice import ConstraintSpec, SampleSpace, first_feasible_sizes
from .priors import IntegerPrior
from .solver import MaxEntSolution
from .sumdist import SumTableProvider


def neg_log2(mass) -> float:
    """Codelength in bits of one assigned mass; infinite at mass zero."""
    if mass == 0:
        return math.inf
    if isinstance(mass, Fraction):
        return math.log2(mass.denominator) - math.log2(mass.numerator)
    return -math.log2(mass)


class Predictor:
    """Base class: subclasses implement ``conditionals``, ``_step`` and
    ``fresh``."""

    def __init__(self, space: SampleSpace, tag: str):
        self.space = space
        self.tag = tag
        self.codelength_bits = 0.0
        self.steps = 0

    def conditionals(self) -> list:
        raise NotImplementedError

    def _step(self, idx: int) -> None:
        raise NotImplementedError

    def fresh(self) -> "Predictor":
        raise NotImplementedError

    def push(self, idx: int) -> None:
        """Advance state without touching the codelength."""
        self._step(idx)
        self.steps += 1

    def advance(self, idx: int):
        mass = self.conditionals()[idx]
        self.codelength_bits += neg_log2(mass)
        self.push(idx)
        return mass

    def feed(self, sequence) -> float:
        for idx in sequence:
            self.advance(idx)
        return self.codelength_bits

    def sequence_codelength(self, sequence) -> float:
        return self.fresh().feed(sequence)

    def sequence_mass(self, sequence):
        """Product of conditionals along ``sequence`` from a fresh state;
        exact when the predictor emits rationals."""
        p = self.fresh()
        mass = None
        for idx in sequence:
            c = p.conditionals()[idx]
            mass = c if mass is None else mass * c
            p.push(idx)
        return 1 if mass is None else mass


class IIDPredictor(Predictor):
    """Memoryless predictor emitting one fixed mass function every step."""

    def __init__(self, space: SampleSpace, pmf, tag: str):
        super().__init__(space, tag)
        pmf = list(pmf)
        if len(pmf) != space.size:
            raise ValidationError("pmf length must match the outcome count")
        self.pmf = pmf

    def conditionals(self) -> list:
        return self.pmf

    def _step(self, idx: int) -> None:
        pass

    def fresh(self) -> "IIDPredictor":
        return IIDPredictor(self.space, self.pmf, self.tag)


def maxent_predictor(space: SampleSpace, solution: MaxEntSolution,
                     tag: str = "maxent") -> IIDPredictor:
    """The i.i.d. projection predictor."""
    return IIDPredictor(space, [float(p) for p in solution.pmf], tag)


class ConditionedPriorPredictor(Predictor):
    """The provider measure conditioned on hitting the target at ``horizon``.

    Conditionals before the horizon weight each symbol by the suffix mass that
    still reaches the target cell; prefixes that cannot reach it get mass zero
    and the predictor goes dead (it keeps emitting the base measure so its
    conditionals stay proper). Beyond the horizon it continues i.i.d.
    """

    def __init__(self, space: SampleSpace, constraint: ConstraintSpec,
                 horizon: int, provider: SumTableProvider | None = None,
                 mode: str = "float", tag: str | None = None):
        super().__init__(space, tag or f"conditioned[{horizon}]")
        if provider is None:
            provider = SumTableProvider(space, constraint, measure="q", mode=mode)
        self.constraint = constraint
        self.provider = provider
        self.mode = provider.mode
        self.horizon = horizon
        self.center = constraint.center_units(horizon)
        if self.center is None or \
                provider.table(horizon).mass_units(self.center) == 0:
            raise ValidationError(f"horizon n={horizon} is infeasible")
        self.units = (0,) * constraint.dim
        self.dead = False

    def conditionals(self) -> list:
        base = self.provider.weights
        if self.dead or self.steps >= self.horizon:
            return list(base)
        remaining = self.horizon - self.steps
        needed = tuple(c - u for c, u in zip(self.center, self.units))
        denom = self.provider.mass(remaining, needed)
        if denom == 0:
            self.dead = True
            return list(base)
        suffix = self.provider.table(remaining - 1)
        out = []
        for w, u in zip(base, self.constraint.units):
            rest = tuple(a - b for a, b in zip(needed, u))
            out.append(w * suffix.mass_units(rest) / denom)
        return out

    def _step(self, idx: int) -> None:
        if self.steps < self.horizon:
            self.units = tuple(a + b for a, b in
                               zip(self.units, self.constraint.units[idx]))
            remaining = self.horizon - self.steps - 1
            needed = tuple(c - u for c, u in zip(self.center, self.units))
            if not self.dead and self.provider.mass(remaining, needed) == 0:
                self.dead = True

    def fresh(self) -> "ConditionedPriorPredictor":
        return ConditionedPriorPredictor(self.space, self.constraint,
                                         self.horizon, provider=self.provider,
                                         mode=self.mode, tag=self.tag)


def conditioned_prior_predictor(space: SampleSpace, constraint: ConstraintSpec,
                                horizon: int, provider=None,
                                mode: str = "float") -> ConditionedPriorPredictor:
    return ConditionedPriorPredictor(space, constraint, horizon,
                                     provider=provider, mode=mode)


class MixturePredictor(Predictor):
    """Bayesian mixture of component predictors advanced in lockstep."""

    def __init__(self, space: SampleSpace, components, weights, tag: str,
                 renormalize: bool = True):
        super().__init__(space, tag)
        if len(components) != len(weights) or not components:
            raise ValidationError("need matching nonempty components and weights")
        self._ctor = (list(components), list(weights), renormalize)
        self.components = [c.fresh() for c in components]
        weights = list(weights)
        if renormalize:
            total = sum(weights)
            weights = [w / total for w in weights]
        self.posteriors = list(weights)

    def conditionals(self) -> list:
        total = sum(self.posteriors)
        if total == 0:
            flat = Fraction(1, self.space.size) \
                if any(isinstance(w, Fraction) for w in self._ctor[1]) \
                else 1.0 / self.space.size
            return [flat] * self.space.size
        conds = [c.conditionals() for c in self.components]
        out = []
        for idx in range(self.space.size):
            acc = None
            for post, cond in zip(self.posteriors, conds):
                if post == 0:
                    continue
                term = post * cond[idx]
                acc = term if acc is None else acc + term
            out.append(acc / total)
        return out

    def _step(self, idx: int) -> None:
        for i, comp in enumerate(self.components):
            if self.posteriors[i] != 0:
                self.posteriors[i] = self.posteriors[i] * comp.conditionals()[idx]
            comp.push(idx)

    def fresh(self) -> "MixturePredictor":
        components, weights, renorm = self._ctor
        return MixturePredictor(self.space, components, weights, self.tag,
                                renormalize=renorm)


def mixture_predictor(space: SampleSpace, constraint: ConstraintSpec,
                      prior: IntegerPrior, provider=None, mode: str = "float",
                      n_cap: int = 100_000, tag: str = "mixture"
                      ) -> MixturePredictor:
    """Mixture of conditioned priors at the first feasible sizes.

    Component j (1-based) conditions on the j-th feasible size and carries
    prior mass pi(j), renormalized over the components actually built.
    """
    sizes = first_feasible_sizes(space, constraint, count=prior.j_max,
                                 n_cap=n_cap)
    if not sizes:
        raise ValidationError("no feasible sizes below the cap")
    if provider is None:
        provider = SumTableProvider(space, constraint, measure="q", mode=mode)
    components = [
        ConditionedPriorPredictor(space, constraint, n_j, provider=provider,
                                  mode=mode)
        for n_j in sizes
    ]
    weights = [prior.mass(j) for j in range(1, len(sizes) + 1)]
    if mode == "float":
        weights = [float(w) for w in weights]
    return MixturePredictor(space, components, weights, tag)


class RenewalComposedPredictor(Predictor):
    """Restarts a block predictor at every constraint-hitting time.

    The composed mass of a sequence is the product of the block predictor's
    masses over the segments between consecutive hitting times, which is again
    a proper process measure.
    """

    def __init__(self, space: SampleSpace, constraint: ConstraintSpec,
                 block_factory, tag: str):
        super().__init__(space, tag)
        self.constraint = constraint
        self.block_factory = block_factory
        self.block = block_factory()
        self.units = (0,) * constraint.dim

    def conditionals(self) -> list:
        return self.block.conditionals()

    def _step(self, idx: int) -> None:
        self.block.push(idx)
        self.units = tuple(a + b for a, b in
                           zip(self.units, self.constraint.units[idx]))
        if self.constraint.center_units(self.steps + 1) == self.units:
            self.block = self.block_factory()

    def fresh(self) -> "RenewalComposedPredictor":
        return RenewalComposedPredictor(self.space, self.constraint,
                                        self.block_factory, self.tag)


def renewal_compose(space: SampleSpace, constraint: ConstraintSpec,
                    block_factory, tag: str = "renewal"
                    ) -> RenewalComposedPredictor:
    return RenewalComposedPredictor(space, constraint, block_factory, tag)

"""Experiment configuration: JSON ingestion, validation, and problem building.

A config holds one problem block (outcomes, prior, statistic matrix, target,
all as exact fraction strings) and a list of tagged experiment blocks. Numbers
may be written as "9/2" or "4.5"; both parse exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    BoundaryTargetError,
    DegenerateCoordinateError,
    MaxentLabError,
    SingularCovarianceError,
    TargetOutsideHullError,
    ValidationError,
)
from .events import BigramDeviationEvent, BoxEvent, FrequencyDeviationEvent
from .lattice import build_space, derive_lattice, first_feasible_sizes
from .solver import solve_maxent

EXPERIMENT_KINDS = ("solve", "concentrate", "condlimit", "corollary1",
                    "game", "recur", "hypercomp")


@dataclass
class Diagnostic:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass
class ProblemConfig:
    outcomes: list
    prior: list
    t_matrix: list          # k rows of |X| fraction strings
    target: list

    def build(self):
        space = build_space(self.outcomes, self.prior)
        if space.dropped:
            # statistic columns must follow the surviving outcomes
            keep = [i for i, lab in enumerate(self.outcomes)
                    if lab in set(space.outcomes)]
            rows = [[row[i] for i in keep] for row in self.t_matrix]
        else:
            rows = self.t_matrix
        values = [[row[i] for row in rows] for i in range(space.size)]
        constraint = derive_lattice(values, self.target)
        return space, constraint


@dataclass
class ExperimentConfig:
    problem: ProblemConfig
    experiments: list
    mode: str = "float"
    output_dir: str | None = None
    raw: dict = field(default_factory=dict)


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ValidationError(f"{where}: missing field {key!r}")
    return block[key]


def load_config(source) -> ExperimentConfig:
    """Parse a config from a path, JSON text, or an already-loaded dict.

    Raises ValidationError on structural problems; use ``validate_config`` for
    a non-raising diagnostic pass.
    """
    if isinstance(source, dict):
        raw = source
    else:
        path = Path(source)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
    problem = _require(raw, "problem", "config")
    outcomes = _require(problem, "outcomes", "problem")
    prior = _require(problem, "prior", "problem")
    t_matrix = _require(problem, "T", "problem")
    target = _require(problem, "target", "problem")
    if not isinstance(t_matrix, list) or not t_matrix or \
            any(not isinstance(row, list) for row in t_matrix):
        raise ValidationError("problem.T must be a k x |X| matrix")
    if any(len(row) != len(outcomes) for row in t_matrix):
        raise ValidationError("problem.T rows must have one entry per outcome")
    if len(target) != len(t_matrix):
        raise ValidationError("problem.target must have one entry per T row")
    experiments = raw.get("experiments", [])
    if not isinstance(experiments, list):
        raise ValidationError("experiments must be a list")
    for i, block in enumerate(experiments):
        kind = _require(block, "kind", f"experiments[{i}]")
        if kind not in EXPERIMENT_KINDS:
            raise ValidationError(
                f"experiments[{i}]: unknown kind {kind!r} "
                f"(expected one of {', '.join(EXPERIMENT_KINDS)})"
            )
        _validate_block_shape(block, i)
    mode = raw.get("mode", "float")
    if mode not in ("float", "rational"):
        raise ValidationError("mode must be 'float' or 'rational'")
    return ExperimentConfig(
        problem=ProblemConfig(outcomes=outcomes, prior=prior,
                              t_matrix=t_matrix, target=target),
        experiments=experiments, mode=mode,
        output_dir=raw.get("output_dir"), raw=raw,
    )


def _validate_block_shape(block: dict, i: int) -> None:
    kind = block["kind"]
    where = f"experiments[{i}] ({kind})"
    if kind in ("concentrate", "condlimit", "corollary1"):
        n_list = _require(block, "n_list", where)
        if not n_list or any(not isinstance(n, int) or n < 1 for n in n_list):
            raise ValidationError(f"{where}: n_list must hold integers >= 1")
        if sorted(n_list) != n_list:
            raise ValidationError(f"{where}: n_list must be sorted ascending")
    if kind == "condlimit":
        m = _require(block, "m", where)
        if not isinstance(m, int) or m < 1:
            raise ValidationError(f"{where}: m must be an integer >= 1")
    if kind == "game":
        mode = block.get("mode", "paths")
        if mode not in ("paths", "gaps"):
            raise ValidationError(f"{where}: mode must be 'paths' or 'gaps'")
        if mode == "paths":
            n_list = _require(block, "n_list", where)
            if sorted(n_list) != n_list:
                raise ValidationError(f"{where}: n_list must be sorted ascending")
        else:
            _require(block, "n_max", where)
    if kind == "recur":
        for key in ("steps", "reps", "seed"):
            v = _require(block, key, where)
            if not isinstance(v, int) or (key != "seed" and v < 1):
                raise ValidationError(f"{where}: {key} must be a positive integer")
    if kind == "hypercomp":
        for key in ("n", "samples", "seed"):
            v = _require(block, key, where)
            if not isinstance(v, int):
                raise ValidationError(f"{where}: {key} must be an integer")
        ks = _require(block, "K", where)
        if isinstance(ks, (int, float)):
            ks = [ks]
        if not ks or any(k <= 0 for k in ks):
            raise ValidationError(f"{where}: K values must be positive")


def build_event(spec: dict, space, solution=None):
    """Build an event object from its config block.

    Frequency references may name 'maxent' (the solved projection) or 'prior',
    or list explicit masses.
    """
    etype = _require(spec, "type", "event")
    if etype == "freq_deviation":
        ref = _require(spec, "reference", "event")
        if ref == "maxent":
            if solution is None:
                raise ValidationError("event references 'maxent' but no solve ran")
            ref = list(solution.pmf)
        elif ref == "prior":
            ref = list(space.prior_fractions)
        return FrequencyDeviationEvent.make(_require(spec, "epsilon", "event"), ref)
    if etype == "box":
        statistic = _require(spec, "statistic", "event")
        values = [[row[i] for row in statistic] for i in range(space.size)]
        return BoxEvent.make(values, _require(spec, "lower", "event"),
                             _require(spec, "upper", "event"),
                             inside=spec.get("inside", True))
    if etype == "bigram_deviation":
        return BigramDeviationEvent.make(_require(spec, "j", "event"),
                                         _require(spec, "jprime", "event"),
                                         _require(spec, "epsilon", "event"))
    raise ValidationError(f"unknown event type {etype!r}")


def validate_config(source) -> list[Diagnostic]:
    """Full structural plus semantic validation; returns diagnostics instead of
    raising. An empty list means the config is runnable."""
    diagnostics: list[Diagnostic] = []
    try:
        config = load_config(source)
    except ValidationError as exc:
        return [Diagnostic(field="config", message=str(exc))]

    try:
        space, constraint = config.problem.build()
    except TargetOutsideHullError as exc:
        return diagnostics + [Diagnostic("problem.target",
                                         f"target outside convex hull: {exc}")]
    except DegenerateCoordinateError as exc:
        return diagnostics + [Diagnostic(
            "problem.T",
            f"{exc} (the statistic covariance would be singular; restrict the "
            "sample space or drop the coordinate)")]
    except (ValidationError, MaxentLabError) as exc:
        return diagnostics + [Diagnostic("problem", str(exc))]

    if space.dropped:
        labels = ", ".join(str(lab) for lab, _ in space.dropped)
        diagnostics.append(Diagnostic(
            "problem.prior", f"note: dropped zero-mass outcomes: {labels}"))

    # Condition pre-checks: a trial solve surfaces boundary targets and
    # affinely dependent coordinates before any experiment runs.
    try:
        solve_maxent(space, constraint)
    except BoundaryTargetError:
        diagnostics.append(Diagnostic(
            "problem.target",
            "target on the hull boundary: no exponential-form solution; "
            "restrict the sample space as in the degenerate-coordinate remedy"))
    except SingularCovarianceError as exc:
        diagnostics.append(Diagnostic("problem.T", str(exc)))
    except MaxentLabError as exc:
        diagnostics.append(Diagnostic("problem", f"trial solve failed: {exc}"))

    sizes = first_feasible_sizes(space, constraint, count=3, n_cap=64)
    if not sizes:
        diagnostics.append(Diagnostic(
            "problem.target",
            "no feasible sample sizes up to 64: empirical-constraint "
            "experiments will have nothing to condition on"))

    for i, block in enumerate(config.experiments):
        kind = block.get("kind")
        if kind == "concentrate":
            for j, espec in enumerate(block.get("events", [])):
                if espec.get("reference") == "maxent":
                    continue  # needs the runtime solution; shape checked at run
                try:
                    build_event(espec, space)
                except ValidationError as exc:
                    diagnostics.append(Diagnostic(
                        f"experiments[{i}].events[{j}]", str(exc)))
        if kind in ("recur", "hypercomp") and "seed" not in block:
            diagnostics.append(Diagnostic(
                f"experiments[{i}]", "randomized experiment without a seed"))
    return diagnostics

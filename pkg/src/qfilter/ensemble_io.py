"""JSON ensemble files.

Schema: {"dimension": D, "states": [{"amplitudes": [[re, im], ...],
"prior": eta}, ...], "target_index": i}. Amplitudes are exact [re, im] pairs;
unknown fields are rejected.
"""
from __future__ import annotations

import json
from os import PathLike

from .ensemble import FilteringProblem, StateVector
from .errors import InvalidInputError

_TOP_KEYS = {"dimension", "states", "target_index"}
_STATE_KEYS = {"amplitudes", "prior"}


def problem_to_dict(problem: FilteringProblem) -> dict:
    """Serialize in canonical order (target first, target_index 0)."""
    return {
        "dimension": problem.dimension,
        "states": [
            {"amplitudes": s.to_pairs(), "prior": float(p)}
            for s, p in zip(problem.states, problem.priors)
        ],
        "target_index": 0,
    }


def problem_from_dict(data) -> FilteringProblem:
    if not isinstance(data, dict):
        raise InvalidInputError("ensemble file must contain a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise InvalidInputError(f"unknown ensemble fields: {sorted(unknown)}")
    missing = _TOP_KEYS - set(data)
    if missing:
        raise InvalidInputError(f"missing ensemble fields: {sorted(missing)}")
    dimension = data["dimension"]
    if not isinstance(dimension, int) or dimension < 1:
        raise InvalidInputError("dimension must be a positive integer")
    entries = data["states"]
    if not isinstance(entries, list) or not entries:
        raise InvalidInputError("states must be a nonempty list")
    states: list[StateVector] = []
    priors: list[float] = []
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise InvalidInputError(f"state {pos} must be an object")
        unknown = set(entry) - _STATE_KEYS
        if unknown:
            raise InvalidInputError(f"state {pos} has unknown fields: {sorted(unknown)}")
        missing = _STATE_KEYS - set(entry)
        if missing:
            raise InvalidInputError(f"state {pos} is missing fields: {sorted(missing)}")
        pairs = entry["amplitudes"]
        if not isinstance(pairs, list) or len(pairs) != dimension:
            raise InvalidInputError(
                f"state {pos} must list exactly {dimension} [re, im] amplitude pairs"
            )
        for pair in pairs:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, (int, float)) for x in pair)
            ):
                raise InvalidInputError(f"state {pos} amplitudes must be [re, im] number pairs")
        prior = entry["prior"]
        if not isinstance(prior, (int, float)):
            raise InvalidInputError(f"state {pos} prior must be a number")
        try:
            states.append(StateVector.from_pairs(pairs))
        except InvalidInputError as exc:
            raise InvalidInputError(f"state {pos}: {exc}") from exc
        priors.append(float(prior))
    target = data["target_index"]
    if not isinstance(target, int):
        raise InvalidInputError("target_index must be an integer")
    return FilteringProblem(states=tuple(states), priors=priors, target_index=target)


def load_problem(path: str | PathLike) -> FilteringProblem:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON in {path}: {exc}") from exc
    return problem_from_dict(data)


def save_problem(problem: FilteringProblem, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh, indent=1)
        fh.write("\n")

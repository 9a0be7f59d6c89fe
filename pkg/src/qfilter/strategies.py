"""Closed-form failure probabilities for unambiguous state filtering.

Three strategies are compared: projecting onto the target (selective, SQM1),
projecting onto the component of the target orthogonal to the complement span
(nonselective, SQM2), and the optimal generalized measurement (POVM). The
failure probability of the generalized measurement is eta1*q1 + S/q1 over the
allowed target failure weight q1 in [f, 1]; its interior minimum 2*sqrt(eta1*S)
is valid exactly when eta1*f**2 <= S <= eta1, and outside that window the
optimum clamps to one of the projective boundaries.

Symbols used throughout: eta1 is the target prior, S the prior-weighted squared
overlap between target and complement, f the squared norm of the target's
component inside the complement span.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ensemble import FilteringProblem, decompose_target
from .errors import InvalidInputError

#: Failure probabilities computed from per-state weights must reproduce the
#: closed forms to this tolerance.
CONSISTENCY_TOL = 1e-12


class Regime(str, Enum):
    """Which branch of the piecewise optimum applies."""

    POVM = "POVM"
    SQM1_BOUNDARY = "SQM1_BOUNDARY"
    SQM2_BOUNDARY = "SQM2_BOUNDARY"


def _check_eta1(eta1: float) -> float:
    eta1 = float(eta1)
    if not 0.0 < eta1 < 1.0:
        raise InvalidInputError(f"target prior must lie in (0, 1), got {eta1!r}")
    return eta1


def _check_overlap(s: float) -> float:
    s = float(s)
    if not (np.isfinite(s) and s >= 0.0):
        raise InvalidInputError(f"average overlap must be finite and >= 0, got {s!r}")
    return s


def _check_fraction(f: float) -> float:
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise InvalidInputError(f"parallel squared norm must lie in [0, 1], got {f!r}")
    return f


def average_overlap(problem: FilteringProblem) -> float:
    """Prior-weighted squared overlap S between the target and the complement set."""
    m = problem.state_matrix
    overlaps = m[1:] @ m[0].conj()
    return float(problem.priors[1:] @ np.abs(overlaps) ** 2)


def q_sqm1(eta1: float, overlap: float) -> float:
    """Failure probability of the selective projection: eta1 + S."""
    return _check_eta1(eta1) + _check_overlap(overlap)


def q_sqm2(eta1: float, parallel_norm_sq: float, overlap: float) -> float:
    """Failure probability of the nonselective projection: eta1*f + S/f.

    f = 0 with S = 0 means the target is orthogonal to the complement span and
    filtering is perfect; f = 0 with S > 0 is mathematically impossible and
    signals inconsistent inputs.
    """
    eta1 = _check_eta1(eta1)
    f = _check_fraction(parallel_norm_sq)
    s = _check_overlap(overlap)
    if f == 0.0:
        if s == 0.0:
            return 0.0
        raise InvalidInputError(
            "overlap S > 0 with zero parallel component is inconsistent: "
            "a nonzero overlap forces the target to have weight inside the complement span"
        )
    return eta1 * f + s / f


def q_povm(eta1: float, overlap: float) -> float:
    """Interior-minimum failure probability 2*sqrt(eta1*S).

    Callers must gate by ``povm_window``: the value is only the optimum when
    eta1*f**2 <= S <= eta1.
    """
    return 2.0 * math.sqrt(_check_eta1(eta1) * _check_overlap(overlap))


def povm_window(eta1: float, parallel_norm_sq: float, overlap: float) -> bool:
    """True when the interior optimum is admissible (ties at the edges included)."""
    return eta1 * parallel_norm_sq**2 <= overlap <= eta1


@dataclass(frozen=True, eq=False)
class StrategyReport:
    """Failure probabilities and per-state allocations for one ensemble.

    ``per_state_failure[i]`` is the failure weight q_i of state i (target
    first); ``per_state_success`` is its exact complement 1 - q_i.  ``q_povm``
    is None when the interior optimum is outside its validity window.
    """

    q_sqm1: float
    q_sqm2: float
    q_povm: float | None
    regime: Regime
    optimal_q1: float
    optimal_Q: float
    per_state_failure: np.ndarray
    per_state_success: np.ndarray
    average_success: float
    overlap_S: float
    parallel_norm_f: float

    def __post_init__(self):
        for name in ("per_state_failure", "per_state_success"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "q_sqm1": self.q_sqm1,
            "q_sqm2": self.q_sqm2,
            "q_povm": self.q_povm,
            "regime": self.regime.value,
            "optimal_q1": self.optimal_q1,
            "optimal_Q": self.optimal_Q,
            "average_success": self.average_success,
            "overlap_S": self.overlap_S,
            "parallel_norm_f": self.parallel_norm_f,
            "per_state_failure": [float(q) for q in self.per_state_failure],
            "per_state_success": [float(p) for p in self.per_state_success],
        }


def _select_branch(eta1: float, f: float, s: float) -> tuple[Regime, float]:
    """Pick the optimal branch and its q1; boundary ties resolve to POVM."""
    if povm_window(eta1, f, s):
        return Regime.POVM, math.sqrt(s / eta1) if eta1 > 0 else 0.0
    if s > eta1:
        return Regime.SQM1_BOUNDARY, 1.0
    return Regime.SQM2_BOUNDARY, f


def optimal_filtering(problem: FilteringProblem) -> StrategyReport:
    """Optimal unambiguous filtering of the ensemble's target state.

    Selects the piecewise-optimal branch, allocates per-state failure weights
    via q1*q_i = |<psi_1|psi_i>|^2, and reports all three strategy values.
    """
    eta1 = float(problem.priors[0])
    if not 0.0 < eta1 < 1.0:
        raise InvalidInputError("target prior must lie strictly inside (0, 1)")
    m = problem.state_matrix
    overlaps_sq = np.abs(m[1:] @ m[0].conj()) ** 2
    s = float(problem.priors[1:] @ overlaps_sq)
    f = decompose_target(problem).parallel_norm_sq

    regime, q1 = _select_branch(eta1, f, s)
    q = np.empty(problem.n_states)
    q[0] = q1
    if q1 > 0.0:
        q[1:] = overlaps_sq / q1
    else:
        q[1:] = 0.0  # q1 = 0 only when every overlap vanishes
    q = np.minimum(q, 1.0)
    p = 1.0 - q
    optimal_q = float(problem.priors @ q)

    return StrategyReport(
        q_sqm1=q_sqm1(eta1, s),
        q_sqm2=q_sqm2(eta1, f, s) if f > 0.0 else (0.0 if s == 0.0 else math.inf),
        q_povm=q_povm(eta1, s) if povm_window(eta1, f, s) else None,
        regime=regime,
        optimal_q1=q1,
        optimal_Q=optimal_q,
        per_state_failure=q,
        per_state_success=p,
        average_success=1.0 - optimal_q,
        overlap_S=s,
        parallel_norm_f=f,
    )


@dataclass(frozen=True, eq=False)
class SweepRow:
    """One point of a failure-probability sweep over the average overlap."""

    s: float
    q_sqm1: float
    q_sqm2: float
    q_povm: float | None
    q_opt: float
    regime: Regime


def failure_curve(
    eta1: float, parallel_norm_sq: float, overlap_values
) -> list[SweepRow]:
    """Evaluate all three strategies on a list of overlap values S.

    (eta1, f, S) are treated as free parameters here, matching a parametric
    sweep; the POVM column is reported only inside its validity window, and
    q_opt is the piecewise minimum.
    """
    eta1 = _check_eta1(eta1)
    f = _check_fraction(parallel_norm_sq)
    rows = []
    for s in overlap_values:
        s = _check_overlap(s)
        qs1 = eta1 + s
        if f > 0.0:
            qs2 = eta1 * f + s / f
        else:
            qs2 = 0.0 if s == 0.0 else math.inf
        in_window = povm_window(eta1, f, s)
        qp = 2.0 * math.sqrt(eta1 * s) if in_window else None
        regime, _ = _select_branch(eta1, f, s)
        q_opt = {Regime.POVM: qp, Regime.SQM1_BOUNDARY: qs1, Regime.SQM2_BOUNDARY: qs2}[regime]
        rows.append(
            SweepRow(s=s, q_sqm1=qs1, q_sqm2=qs2, q_povm=qp, q_opt=float(q_opt), regime=regime)
        )
    return rows

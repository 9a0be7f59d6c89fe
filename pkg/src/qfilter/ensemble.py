"""Complex vector-space primitives for state ensembles.

State vectors, priors, Gram matrices, span bases, and the orthogonal
decomposition of a designated target state against the span of the remaining
states. Everything here is a pure function of immutable values, so results
can be shared freely between concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

NORM_TOL = 1e-9
RANK_TOL = 1e-8


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """A unit-norm vector of complex amplitudes over an orthonormal basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=np.complex128)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidInputError("amplitudes must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("amplitudes must be finite")
        norm_sq = float(np.real(arr.conj() @ arr))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise InvalidInputError(
                f"squared norm {norm_sq!r} deviates from 1 beyond tolerance {NORM_TOL:g}"
            )
        object.__setattr__(self, "amplitudes", _freeze(arr))

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "StateVector":
        """Build from a list of [re, im] pairs (the JSON interchange form)."""
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InvalidInputError("amplitudes must be a list of [re, im] pairs")
        return cls(arr[:, 0] + 1j * arr[:, 1])

    def to_pairs(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


def _as_rows(vectors) -> np.ndarray:
    """Stack StateVectors (or raw array-likes) into a (n, D) complex matrix."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return np.asarray(vectors, dtype=np.complex128)
    rows = [
        v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)
        for v in vectors
    ]
    if not rows:
        raise InvalidInputError("at least one vector is required")
    dims = {r.size for r in rows}
    if len(dims) != 1:
        raise InvalidInputError(f"vectors have mixed dimensions {sorted(dims)}")
    return np.vstack(rows)


@dataclass(frozen=True, eq=False)
class FilteringProblem:
    """An ensemble of N candidate states with priors and one designated target.

    The stored order is canonical: the target is always slot 0, regardless of
    the ``target_index`` passed at construction.
    """

    states: tuple[StateVector, ...]
    priors: np.ndarray
    target_index: int = 0

    def __post_init__(self):
        states = tuple(
            s if isinstance(s, StateVector) else StateVector(np.asarray(s)) for s in self.states
        )
        n = len(states)
        if n < 2:
            raise InvalidInputError("an ensemble needs at least 2 states")
        dims = {s.dimension for s in states}
        if len(dims) != 1:
            raise InvalidInputError(f"states have mixed dimensions {sorted(dims)}")
        priors = np.array(self.priors, dtype=float)
        if priors.shape != (n,):
            raise InvalidInputError(f"expected {n} priors, got shape {priors.shape}")
        if np.any(priors <= 0.0) or np.any(priors > 1.0):
            raise InvalidInputError("priors must lie in (0, 1]")
        total = float(priors.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidInputError(
                f"priors sum to {total!r}; they must sum to 1 within {NORM_TOL:g}"
            )
        t = int(self.target_index)
        if not 0 <= t < n:
            raise InvalidInputError(f"target_index {t} out of range for {n} states")
        if t != 0:
            order = [t] + [i for i in range(n) if i != t]
            states = tuple(states[i] for i in order)
            priors = priors[order]
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", _freeze(priors))
        object.__setattr__(self, "target_index", 0)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def dimension(self) -> int:
        return self.states[0].dimension

    @property
    def target(self) -> StateVector:
        return self.states[0]

    @cached_property
    def state_matrix(self) -> np.ndarray:
        """(N, D) matrix whose rows are the state amplitudes, target first."""
        return _freeze(np.vstack([s.amplitudes for s in self.states]))


def gram_matrix(problem: FilteringProblem) -> np.ndarray:
    """Hermitian N x N matrix of pairwise inner products G_ij = <psi_i|psi_j>."""
    m = problem.state_matrix
    g = m.conj() @ m.T
    return (g + g.conj().T) / 2.0


def span_basis(vectors, tol: float = RANK_TOL) -> tuple[np.ndarray, int]:
    """Orthonormal basis for the span of ``vectors`` plus its rank.

    Two-pass (re-orthogonalized) Gram-Schmidt sweep; a candidate whose residual
    norm after projection falls below ``tol`` contributes no basis element.
    Returns (basis, rank) with basis rows orthonormal to ~1e-15.
    """
    rows = _as_rows(vectors)
    n, d = rows.shape
    basis = np.zeros((min(n, d), d), dtype=np.complex128)
    rank = 0
    for v in rows:
        w = v.astype(np.complex128, copy=True)
        for _ in range(2):
            if rank:
                w -= basis[:rank].T @ (basis[:rank].conj() @ w)
        nrm = float(np.linalg.norm(w))
        if nrm > tol:
            basis[rank] = w / nrm
            rank += 1
            if rank == d:
                break  # span is already the full space
    return basis[:rank].copy(), rank


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of the target into components inside/orthogonal to the complement span.

    ``parallel + perpendicular`` reconstructs the target; ``parallel_norm_sq``
    is the squared norm of the parallel component, in [0, 1].
    """

    parallel: np.ndarray
    perpendicular: np.ndarray
    parallel_norm_sq: float

    def __post_init__(self):
        object.__setattr__(self, "parallel", _freeze(np.asarray(self.parallel, np.complex128)))
        object.__setattr__(
            self, "perpendicular", _freeze(np.asarray(self.perpendicular, np.complex128))
        )


def decompose_target(problem: FilteringProblem) -> Decomposition:
    """Project the target onto the span of the complement set.

    The parallel squared norm is accumulated over an orthonormal span basis,
    so it is exactly the Born weight of the target inside that subspace.
    """
    target = problem.state_matrix[0]
    basis, rank = span_basis(problem.state_matrix[1:])
    if rank:
        coef = basis.conj() @ target
        parallel = basis.T @ coef
        norm_sq = float(np.real(coef.conj() @ coef))
    else:
        parallel = np.zeros_like(target)
        norm_sq = 0.0
    norm_sq = min(max(norm_sq, 0.0), 1.0)
    return Decomposition(
        parallel=parallel,
        perpendicular=target - parallel,
        parallel_norm_sq=norm_sq,
    )

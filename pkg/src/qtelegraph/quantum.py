"""Finite-dimensional quantum state algebra over labeled product bases.

States live on an explicit ordered basis of hashable labels; for the
telegraph the labels are ``(pipe, bin)`` pairs, pipe-major. Everything is
dense complex double precision. The tolerance ladder is 1e-15 for algebraic
identities, 1e-12 for composed linear algebra, and 1e-10 for eigenvalue
checks; construction validates against it so invalid states fail loudly at
the boundary instead of corrupting downstream statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

ATOL_ALGEBRA = 1e-15
ATOL_LINALG = 1e-12
ATOL_EIG = 1e-10


class QuantumStateError(ValueError):
    """Raised when a state, density matrix or measurement is malformed."""


def _frozen_complex_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim != ndim:
        raise QuantumStateError(f"expected a {ndim}-d complex array, got ndim={arr.ndim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """Pure state: one complex amplitude per (unique) basis label."""

    labels: tuple[Hashable, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        amps = _frozen_complex_array(self.amplitudes, ndim=1)
        object.__setattr__(self, "amplitudes", amps)
        if len(self.labels) != amps.shape[0]:
            raise QuantumStateError(
                f"{len(self.labels)} labels but {amps.shape[0]} amplitudes"
            )
        if len(set(self.labels)) != len(self.labels):
            raise QuantumStateError("basis labels must be unique")

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def index_of(self, label: Hashable) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise QuantumStateError(f"label {label!r} not in basis") from None


def normalize(state: StateVector) -> StateVector:
    """Scale ``state`` to unit norm; error on the zero vector."""
    norm = state.norm()
    if norm == 0.0:
        raise QuantumStateError("cannot normalize the zero vector")
    return StateVector(state.labels, state.amplitudes / norm)


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one, Hermitian, positive-semidefinite matrix (up to tolerance)."""

    matrix: np.ndarray
    labels: tuple[Hashable, ...] | None = None

    def __post_init__(self) -> None:
        mat = _frozen_complex_array(self.matrix, ndim=2)
        object.__setattr__(self, "matrix", mat)
        n, m = mat.shape
        if n != m:
            raise QuantumStateError(f"density matrix must be square, got {n}x{m}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != n:
                raise QuantumStateError("label count does not match dimension")
        if not np.allclose(mat, mat.conj().T, atol=ATOL_LINALG, rtol=0.0):
            raise QuantumStateError("density matrix is not Hermitian within 1e-12")
        trace = np.trace(mat)
        if abs(trace - 1.0) > ATOL_LINALG:
            raise QuantumStateError(f"trace must be 1 within 1e-12, got {trace}")
        smallest = float(np.linalg.eigvalsh(mat)[0])
        if smallest < -ATOL_EIG:
            raise QuantumStateError(
                f"density matrix has eigenvalue {smallest} below -1e-10"
            )

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def diagonal_probabilities(self) -> np.ndarray:
        """Diagonal as a clamped, renormalized probability vector."""
        return clamp_probabilities(np.real(np.diag(self.matrix)))


def clamp_probabilities(values: np.ndarray, floor: float = -ATOL_EIG) -> np.ndarray:
    """Zero out numerical-noise negatives and renormalize to unit sum.

    Entries below ``floor`` are genuine errors, not noise, and raise.
    """
    arr = np.asarray(values, dtype=float)
    smallest = float(arr.min()) if arr.size else 0.0
    if smallest < floor:
        raise QuantumStateError(f"probability {smallest} below clamp floor {floor}")
    clipped = np.clip(arr, 0.0, None)
    total = clipped.sum()
    if total <= 0.0:
        raise QuantumStateError("probabilities sum to zero")
    return clipped / total


def density_from_state(state: StateVector) -> DensityMatrix:
    """Rank-1 projector onto a normalized state."""
    if abs(state.norm() - 1.0) > ATOL_LINALG:
        raise QuantumStateError(
            f"state must be normalized within 1e-12, norm={state.norm()}"
        )
    amps = state.amplitudes
    return DensityMatrix(np.outer(amps, amps.conj()), labels=state.labels)


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], keep: int) -> DensityMatrix:
    """Reduce a bipartite density matrix to one factor.

    ``dims`` gives the (first, second) factor dimensions of the row-major
    product basis; ``keep`` is 0 or 1.
    """
    d1, d2 = dims
    if d1 * d2 != rho.dimension:
        raise QuantumStateError(
            f"factor structure {d1}x{d2} does not match dimension {rho.dimension}"
        )
    if keep not in (0, 1):
        raise QuantumStateError("keep must be 0 (first factor) or 1 (second factor)")
    blocks = rho.matrix.reshape(d1, d2, d1, d2)
    if keep == 0:
        reduced = np.einsum("ikjk->ij", blocks)
    else:
        reduced = np.einsum("kikj->ij", blocks)
    # Symmetrize away the einsum's last-bit float asymmetry before validation.
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced)


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective measurement given by disjoint label groups on one subsystem.

    ``subsystem`` indexes the component of tuple-valued labels the projectors
    act on (None measures whole labels). Each outcome is ``(name, values)``;
    the groups must be disjoint and, against any state they are applied to,
    jointly cover that subsystem's values.
    """

    outcomes: tuple[tuple[Hashable, frozenset], ...]
    subsystem: int | None = None

    def __post_init__(self) -> None:
        canonical = tuple(
            (name, frozenset(values)) for name, values in self.outcomes
        )
        object.__setattr__(self, "outcomes", canonical)
        if not canonical:
            raise QuantumStateError("measurement needs at least one outcome")
        names = [name for name, _ in canonical]
        if len(set(names)) != len(names):
            raise QuantumStateError("outcome names must be unique")
        seen: set = set()
        for _, values in canonical:
            if seen & values:
                raise QuantumStateError("outcome label groups must be disjoint")
            seen |= values

    def _component(self, label: Hashable) -> Hashable:
        if self.subsystem is None:
            return label
        return label[self.subsystem]

    def outcome_masks(self, state: StateVector) -> dict[Hashable, np.ndarray]:
        """Boolean membership mask per outcome; errors unless masks cover."""
        components = [self._component(label) for label in state.labels]
        masks: dict[Hashable, np.ndarray] = {}
        covered = np.zeros(state.dimension, dtype=bool)
        for name, values in self.outcomes:
            mask = np.array([c in values for c in components], dtype=bool)
            masks[name] = mask
            covered |= mask
        if not covered.all():
            missing = [state.labels[i] for i in np.flatnonzero(~covered)[:3]]
            raise QuantumStateError(
                f"measurement does not cover the basis (e.g. {missing})"
            )
        return masks


def which_subsystem_basis(values: Sequence[Hashable], subsystem: int) -> MeasurementBasis:
    """One projector per distinct subsystem value (a 'which path' readout)."""
    return MeasurementBasis(
        outcomes=tuple((v, frozenset([v])) for v in values), subsystem=subsystem
    )


def born_probabilities(state: StateVector, basis: MeasurementBasis) -> dict[Hashable, float]:
    """Outcome probabilities |P_k psi|^2 for a normalized state."""
    if abs(state.norm() - 1.0) > ATOL_LINALG:
        raise QuantumStateError("born_probabilities requires a normalized state")
    weights = np.abs(state.amplitudes) ** 2
    return {
        name: float(weights[mask].sum())
        for name, mask in basis.outcome_masks(state).items()
    }


def born_measure(
    state: StateVector, basis: MeasurementBasis, rng: np.random.Generator
) -> tuple[Hashable, StateVector]:
    """Sample one outcome with Born probabilities and collapse the state.

    Probability-zero outcomes are never sampled; the collapsed state is the
    renormalized projection onto the sampled outcome's subspace.
    """
    masks = basis.outcome_masks(state)
    names = list(masks.keys())
    probs = born_probabilities(state, basis)
    p = clamp_probabilities(np.array([probs[n] for n in names]))
    outcome = names[int(rng.choice(len(names), p=p))]
    projected = np.where(masks[outcome], state.amplitudes, 0.0)
    collapsed = normalize(StateVector(state.labels, projected))
    return outcome, collapsed


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of |eigenvalues| of (a - b); in [0, 1]."""
    if a.dimension != b.dimension:
        raise QuantumStateError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )
    eigenvalues = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.abs(eigenvalues).sum())

"""Two-pipe interference device: geometry, joint state, screen distributions.

The photon reaching the screen from pipe k carries a far-field two-source
amplitude with a shared Gaussian envelope,

    psi_k(x) = exp(-x^2 / (4 w^2)) * exp(i * s_k * kappa * x + i * delta_k),

with s_1 = +1, s_2 = -1, delta_1 = 0 and delta_2 = relative_phase. The screen
is a finite grid of ``bins`` cells spanning [-x_max*w, +x_max*w]; amplitudes
are sampled at bin centers and renormalized. Everything downstream (the
entangled joint state, the coherent/incoherent/eraser-conditioned screen
statistics) is an exact finite-dimensional computation on that grid.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .quantum import (
    ATOL_LINALG,
    QuantumStateError,
    StateVector,
    clamp_probabilities,
)

PIPES = (1, 2)


@dataclass(frozen=True)
class DeviceConfig:
    """Dimensionless two-pipe interference geometry.

    kappa: fringe wavenumber (radians per screen-position unit), > 0.
    envelope_width: Gaussian envelope width w, > 0.
    x_max: half-width of the screen grid in units of w, > 0.
    bins: number of screen bins, >= 2.
    relative_phase: extra phase on pipe 2, radians.
    """

    kappa: float = math.pi
    envelope_width: float = 2.0
    x_max: float = 5.0
    bins: int = 256
    relative_phase: float = 0.0

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0 (got {self.kappa})")
        if not self.envelope_width > 0:
            raise ValueError(f"envelope_width must be > 0 (got {self.envelope_width})")
        if not self.x_max > 0:
            raise ValueError(f"x_max must be > 0 (got {self.x_max})")
        if not (isinstance(self.bins, int) and self.bins >= 2):
            raise ValueError(f"bins must be an integer >= 2 (got {self.bins})")

    @property
    def half_width(self) -> float:
        """Screen half-width in position units."""
        return self.x_max * self.envelope_width

    @property
    def bin_width(self) -> float:
        return 2.0 * self.half_width / self.bins

    def bin_centers(self) -> np.ndarray:
        j = np.arange(self.bins)
        return -self.half_width + (j + 0.5) * self.bin_width

    def bin_index(self, x: np.ndarray | float) -> np.ndarray:
        """Nearest-bin index for positions inside the grid."""
        idx = np.floor((np.asarray(x, dtype=float) + self.half_width) / self.bin_width)
        return np.clip(idx.astype(int), 0, self.bins - 1)


@dataclass(frozen=True)
class ScreenDistribution:
    """Probability per screen bin, with the bin-center grid it lives on."""

    probabilities: np.ndarray
    bin_centers: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probabilities, dtype=float)
        centers = np.array(self.bin_centers, dtype=float)
        if probs.shape != centers.shape or probs.ndim != 1:
            raise ValueError("probabilities and bin_centers must be equal-length 1-d")
        if probs.size and probs.min() < 0.0:
            raise ValueError(f"negative probability {probs.min()}")
        if abs(probs.sum() - 1.0) > ATOL_LINALG:
            raise ValueError(f"probabilities must sum to 1 within 1e-12, got {probs.sum()}")
        probs.setflags(write=False)
        centers.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "bin_centers", centers)

    @property
    def bins(self) -> int:
        return self.probabilities.size


def pipe_amplitude(cfg: DeviceConfig, pipe: int, x: np.ndarray | float) -> np.ndarray | complex:
    """Unnormalized screen amplitude psi_k(x) for pipe k in {1, 2}."""
    if pipe not in PIPES:
        raise ValueError(f"pipe must be 1 or 2 (got {pipe})")
    sign = 1.0 if pipe == 1 else -1.0
    delta = 0.0 if pipe == 1 else cfg.relative_phase
    xs = np.asarray(x, dtype=float)
    envelope = np.exp(-(xs**2) / (4.0 * cfg.envelope_width**2))
    value = envelope * np.exp(1j * (sign * cfg.kappa * xs + delta))
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return complex(value)
    return value


def _pipe_vectors(cfg: DeviceConfig) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm screen amplitude vectors for both pipes on the bin grid."""
    xs = cfg.bin_centers()
    psi1 = np.asarray(pipe_amplitude(cfg, 1, xs))
    psi2 = np.asarray(pipe_amplitude(cfg, 2, xs))
    # |psi_1| = |psi_2| pointwise, so one norm serves both.
    norm = np.linalg.norm(psi1)
    if norm == 0.0:
        raise QuantumStateError("pipe amplitudes vanish on the whole grid")
    return psi1 / norm, psi2 / norm


def joint_labels(cfg: DeviceConfig) -> tuple[tuple[int, int], ...]:
    """Pipe-major (pipe, bin) product basis of the two-photon state."""
    return tuple((pipe, j) for pipe in PIPES for j in range(cfg.bins))


def build_joint_state(cfg: DeviceConfig) -> StateVector:
    """Entangled pair state (|1>|psi_1> + |2>|psi_2>) / sqrt(2) on the grid."""
    psi1, psi2 = _pipe_vectors(cfg)
    amplitudes = np.concatenate([psi1, psi2]) / math.sqrt(2.0)
    return StateVector(joint_labels(cfg), amplitudes)


def _distribution_from_weights(cfg: DeviceConfig, weights: np.ndarray) -> ScreenDistribution:
    return ScreenDistribution(clamp_probabilities(weights), cfg.bin_centers())


def coherent_distribution(cfg: DeviceConfig) -> ScreenDistribution:
    """Screen statistics with the pipes interfering: p proportional to |psi_1 + psi_2|^2."""
    psi1, psi2 = _pipe_vectors(cfg)
    return _distribution_from_weights(cfg, np.abs(psi1 + psi2) ** 2)


def incoherent_distribution(cfg: DeviceConfig) -> ScreenDistribution:
    """Which-path-marked screen statistics: p proportional to (|psi_1|^2 + |psi_2|^2) / 2.

    Equals the diagonal of the reduced screen density matrix of the joint state.
    """
    psi1, psi2 = _pipe_vectors(cfg)
    return _distribution_from_weights(cfg, 0.5 * (np.abs(psi1) ** 2 + np.abs(psi2) ** 2))


@dataclass(frozen=True)
class EraserConditionals:
    """Screen statistics conditioned on measuring the idler in (|1> ± |2>)/sqrt(2)."""

    p_plus: ScreenDistribution
    p_minus: ScreenDistribution
    prob_plus: float
    prob_minus: float


def eraser_conditionals(cfg: DeviceConfig) -> EraserConditionals:
    """Conditional screen distributions after the eraser-basis idler measurement.

    Projecting the idler on (|1> ± |2>)/sqrt(2) leaves the unnormalized signal
    amplitude (psi_1 ± psi_2)/2; the outcome probability is its squared norm.
    """
    psi1, psi2 = _pipe_vectors(cfg)
    plus = 0.5 * (psi1 + psi2)
    minus = 0.5 * (psi1 - psi2)
    w_plus = float(np.linalg.norm(plus) ** 2)
    w_minus = float(np.linalg.norm(minus) ** 2)
    return EraserConditionals(
        p_plus=_distribution_from_weights(cfg, np.abs(plus) ** 2),
        p_minus=_distribution_from_weights(cfg, np.abs(minus) ** 2),
        prob_plus=w_plus,
        prob_minus=w_minus,
    )


def write_distributions_csv(
    cfg: DeviceConfig, path: str | Path, header_comments: Iterable[str] = ()
) -> None:
    """Write the four reference screen distributions as CSV.

    Columns: x, p_coherent, p_incoherent, p_plus, p_minus. Lines from
    ``header_comments`` are emitted first, prefixed with '# '.
    """
    coherent = coherent_distribution(cfg)
    incoherent = incoherent_distribution(cfg)
    eraser = eraser_conditionals(cfg)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        for line in header_comments:
            handle.write(f"# {line}\n")
        writer = csv.writer(handle)
        writer.writerow(["x", "p_coherent", "p_incoherent", "p_plus", "p_minus"])
        for j, x in enumerate(cfg.bin_centers()):
            writer.writerow(
                [
                    repr(float(x)),
                    repr(float(coherent.probabilities[j])),
                    repr(float(incoherent.probabilities[j])),
                    repr(float(eraser.p_plus.probabilities[j])),
                    repr(float(eraser.p_minus.probabilities[j])),
                ]
            )

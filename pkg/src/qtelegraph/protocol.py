"""Telegraph protocol: detector toggling, hit sampling, and the receiver.

The sender encodes a bit per symbol by switching the idler detectors of all
N telegraphs (on = 1, off = 0). The receiver pools M screen hits and runs an
exact log-likelihood-ratio test of "interference" (coherent pattern) against
"no interference" (incoherent pattern); the fringe statistic |mean e^{2i k x}|
is kept as a secondary diagnostic. Two device models are available:

* NaiveCollapse: detectors off leaves the coherent pattern, detectors on the
  incoherent one, so toggling is remotely visible and the telegraph works.
* UnitaryQM: the receiving-end marginal is the incoherent pattern whatever
  the detectors do, so the telegraph carries nothing.

A sample-size planner searches for the smallest M meeting a target error
probability by Monte Carlo, and the staggered N-telegraph ensemble schedule
realizes the M*T/N symbol time of the many-telegraph construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .device import DeviceConfig, ScreenDistribution, coherent_distribution, incoherent_distribution
from .rng import child_seeds

PROBABILITY_FLOOR = 1e-300
INTERFERENCE = "interference"
NO_INTERFERENCE = "no-interference"


class Detector(Enum):
    """Idler detector setting at the sender's end."""

    ON = "on"
    OFF = "off"

    @classmethod
    def from_string(cls, text: str) -> "Detector":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"detectors must be 'on' or 'off' (got {text!r})")


class ModelMode(Enum):
    """Which physics the simulated device obeys."""

    NAIVE_COLLAPSE = "NaiveCollapse"
    UNITARY_QM = "UnitaryQM"

    @classmethod
    def from_string(cls, text: str) -> "ModelMode":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"mode must be 'NaiveCollapse' or 'UnitaryQM' (got {text!r})")


@dataclass(frozen=True)
class TransmissionPlan:
    """Pairs per symbol M, pair production period T, telegraph count N."""

    M: int = 1000
    T: float = 1.0
    N: int = 1

    def __post_init__(self) -> None:
        if not (isinstance(self.M, int) and self.M >= 1):
            raise ValueError(f"M must be an integer >= 1 (got {self.M})")
        if not self.T > 0:
            raise ValueError(f"T must be > 0 (got {self.T})")
        if not (isinstance(self.N, int) and self.N >= 1):
            raise ValueError(f"N must be an integer >= 1 (got {self.N})")


@dataclass(frozen=True)
class HitRecord:
    """One screen detection: which telegraph, when, where, and (with the
    detectors on) which pipe the idler was found in."""

    telegraph_id: int
    time: float
    x: float
    idler_outcome: int | None = None

    def __post_init__(self) -> None:
        if self.telegraph_id < 0:
            raise ValueError(f"telegraph_id must be >= 0 (got {self.telegraph_id})")
        if self.time < 0:
            raise ValueError(f"time must be >= 0 (got {self.time})")


@dataclass(frozen=True)
class DecisionResult:
    """Receiver verdict for one symbol."""

    log_lr: float
    decided: str
    fringe_statistic: float

    def __post_init__(self) -> None:
        expected = INTERFERENCE if self.log_lr > 0 else NO_INTERFERENCE
        if self.decided != expected:
            raise ValueError(
                f"decided={self.decided!r} inconsistent with log_lr={self.log_lr}"
            )
        if not 0.0 <= self.fringe_statistic <= 1.0 + 1e-12:
            raise ValueError(f"fringe_statistic out of [0,1]: {self.fringe_statistic}")


def screen_marginal(cfg: DeviceConfig, detectors: Detector, mode: ModelMode) -> ScreenDistribution:
    """Screen distribution seen at the receiving end for a detector setting.

    Under UnitaryQM this is the reduced-state diagonal (the incoherent
    pattern) for both settings; under NaiveCollapse the detectors-off setting
    is credited with the coherent pattern.
    """
    if mode is ModelMode.UNITARY_QM:
        return incoherent_distribution(cfg)
    if detectors is Detector.OFF:
        return coherent_distribution(cfg)
    return incoherent_distribution(cfg)


def sample_hits(dist: ScreenDistribution, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. screen positions by inverse CDF over the bins.

    Positions are reported at bin centers.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0 (got {count})")
    indices = _sample_bin_indices(dist.probabilities, count, rng)
    return dist.bin_centers[indices]


def _sample_bin_indices(
    probabilities: np.ndarray, count: int, rng: np.random.Generator
) -> np.ndarray:
    cdf = np.cumsum(probabilities)
    u = rng.random(count)
    return np.minimum(np.searchsorted(cdf, u, side="right"), probabilities.size - 1)


def floored_log_ratio(p_numerator: np.ndarray, p_denominator: np.ndarray) -> np.ndarray:
    """Elementwise log(p_num / p_den) with both sides floored at 1e-300.

    The floor keeps exact-zero bins (idealized interference nulls) from
    producing infinities while preserving the decision direction.
    """
    num = np.maximum(np.asarray(p_numerator, dtype=float), PROBABILITY_FLOOR)
    den = np.maximum(np.asarray(p_denominator, dtype=float), PROBABILITY_FLOOR)
    return np.log(num) - np.log(den)


def log_ratio_table(cfg: DeviceConfig) -> np.ndarray:
    """Per-bin log(p_coherent / p_incoherent) for the receiver's LRT."""
    return floored_log_ratio(
        coherent_distribution(cfg).probabilities,
        incoherent_distribution(cfg).probabilities,
    )


def log_likelihood_ratio(hits: Sequence[float] | np.ndarray, cfg: DeviceConfig) -> float:
    """Sum of per-hit log(p_coherent / p_incoherent) at the hit's bin."""
    xs = np.asarray(hits, dtype=float)
    if xs.size == 0:
        return 0.0
    if xs.min() < -cfg.half_width or xs.max() > cfg.half_width:
        raise ValueError("hits must lie within the screen grid")
    return float(log_ratio_table(cfg)[cfg.bin_index(xs)].sum())


def fringe_statistic(hits: Sequence[float] | np.ndarray, cfg: DeviceConfig) -> float:
    """|mean over hits of exp(2i * kappa * x)|; 0.0 for no hits."""
    xs = np.asarray(hits, dtype=float)
    if xs.size == 0:
        return 0.0
    return float(np.abs(np.exp(2j * cfg.kappa * xs).mean()))


def decide_bit(hits: Sequence[float] | np.ndarray, cfg: DeviceConfig) -> DecisionResult:
    """LRT verdict: interference iff the log-likelihood ratio is > 0."""
    llr = log_likelihood_ratio(hits, cfg)
    decided = INTERFERENCE if llr > 0 else NO_INTERFERENCE
    return DecisionResult(log_lr=llr, decided=decided, fringe_statistic=fringe_statistic(hits, cfg))


@dataclass(frozen=True)
class SampleSizeResult:
    """Planner outcome: the smallest sufficient M, or an explicit failure.

    ``error_interference`` is the Monte Carlo estimate of deciding
    "no-interference" on coherent-pattern data at m_star;
    ``error_no_interference`` the converse error on incoherent-pattern data.
    """

    m_star: int | None
    feasible: bool
    alpha: float
    trials: int
    error_interference: float | None = None
    error_no_interference: float | None = None
    failure_reason: str | None = None


def _mc_error_rates(
    table: np.ndarray,
    p_interference: np.ndarray,
    p_no_interference: np.ndarray,
    m: int,
    trials: int,
    seed_material: tuple[int, int],
) -> tuple[float, float]:
    """Monte Carlo error-rate pair for an M-sample LRT, fixed probe stream."""
    base, m_key = seed_material
    errors = []
    for which, probs in ((0, p_interference), (1, p_no_interference)):
        rng = np.random.default_rng([base, m_key, which])
        wrong = 0
        remaining = trials
        # Chunked so trials*m never allocates more than ~2^22 doubles.
        chunk = max(1, min(trials, (1 << 22) // max(m, 1)))
        while remaining > 0:
            batch = min(chunk, remaining)
            idx = _sample_bin_indices(probs, batch * m, rng).reshape(batch, m)
            llr = table[idx].sum(axis=1)
            decided_interference = llr > 0
            if which == 0:
                wrong += int((~decided_interference).sum())
            else:
                wrong += int(decided_interference.sum())
            remaining -= batch
        errors.append(wrong / trials)
    return errors[0], errors[1]


def required_sample_size(
    cfg: DeviceConfig,
    alpha: float,
    rng: np.random.Generator,
    trials: int = 10_000,
    m_cap: int = 1 << 16,
) -> SampleSizeResult:
    """Smallest M whose Monte-Carlo-estimated error rates are both <= alpha.

    Searches by doubling then bisection, with ``trials`` simulated receptions
    per probed M and per hypothesis; each probe uses a fixed stream keyed by
    its M, so re-probing an M inside the bisection is consistent and the whole
    search is reproducible. When the two patterns are (numerically)
    indistinguishable no finite M exists and an explicit failure is returned.
    alpha >= 1/2 needs no data at all: a fair coin achieves it, so M = 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1) (got {alpha})")
    if alpha >= 0.5:
        return SampleSizeResult(m_star=0, feasible=True, alpha=alpha, trials=trials)

    p_c = coherent_distribution(cfg).probabilities
    p_i = incoherent_distribution(cfg).probabilities
    tv = 0.5 * float(np.abs(p_c - p_i).sum())
    if tv < 1e-6:
        return SampleSizeResult(
            m_star=None,
            feasible=False,
            alpha=alpha,
            trials=trials,
            failure_reason=(
                f"coherent and incoherent patterns are indistinguishable "
                f"(total variation {tv:.3e}); no finite M suffices"
            ),
        )

    table = log_ratio_table(cfg)
    base = int(child_seeds(rng, 1)[0])
    cache: dict[int, tuple[float, float]] = {}

    def feasible_at(m: int) -> bool:
        if m not in cache:
            cache[m] = _mc_error_rates(table, p_c, p_i, m, trials, (base, m))
        err_c, err_i = cache[m]
        return err_c <= alpha and err_i <= alpha

    hi = 1
    while not feasible_at(hi):
        hi *= 2
        if hi > m_cap:
            return SampleSizeResult(
                m_star=None,
                feasible=False,
                alpha=alpha,
                trials=trials,
                failure_reason=f"no sufficient M found up to cap {m_cap}",
            )
    lo = hi // 2  # hi == 1 gives lo == 0, the known-infeasible floor
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible_at(mid):
            hi = mid
        else:
            lo = mid
    err_c, err_i = cache[hi]
    return SampleSizeResult(
        m_star=hi,
        feasible=True,
        alpha=alpha,
        trials=trials,
        error_interference=err_c,
        error_no_interference=err_i,
    )


@dataclass(frozen=True)
class EnsembleSchedule:
    """N telegraphs firing at offset + j*T, offsets i.i.d. uniform on [0, T)."""

    offsets: np.ndarray
    period: float

    def __post_init__(self) -> None:
        offsets = np.array(self.offsets, dtype=float)
        if offsets.ndim != 1 or offsets.size < 1:
            raise ValueError("offsets must be a non-empty 1-d array")
        if not self.period > 0:
            raise ValueError(f"period must be > 0 (got {self.period})")
        if offsets.min() < 0.0 or offsets.max() >= self.period:
            raise ValueError("offsets must lie in [0, period)")
        offsets.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)

    @property
    def telegraphs(self) -> int:
        return self.offsets.size

    def emission_times(self, telegraph_id: int, count: int) -> np.ndarray:
        """First ``count`` emission times of one telegraph."""
        return self.offsets[telegraph_id] + self.period * np.arange(count)

    def emissions_after(self, start: float, count: int) -> tuple[np.ndarray, np.ndarray]:
        """First ``count`` pooled emissions strictly after ``start``.

        Returns (times, telegraph ids), time-ordered with ties broken by id
        so the pooled stream is totally ordered and reproducible. Every
        timestamp is the canonical offset + period*index rounding, so a time
        handed back in as ``start`` excludes exactly its own emission and
        symbol boundaries never double-count the boundary pair.
        """
        n = self.telegraphs
        per = math.ceil(count / n) + 4
        around = np.maximum(
            np.floor((start - self.offsets) / self.period).astype(np.int64), 0
        )
        indices = around[:, None] - 1 + np.arange(per)[None, :]
        times = self.offsets[:, None] + self.period * indices
        ids = np.broadcast_to(np.arange(n)[:, None], times.shape)
        # The first pair of a telegraph is index 0; negative indices are not
        # emissions, and candidates at or before `start` were already pooled.
        keep = ((times > start) & (indices >= 0)).ravel()
        flat_times = times.ravel()[keep]
        flat_ids = ids.ravel()[keep]
        order = np.lexsort((flat_ids, flat_times))[:count]
        return flat_times[order], flat_ids[order]


def ensemble_schedule(n: int, period: float, rng: np.random.Generator) -> EnsembleSchedule:
    """Draw the staggered ensemble: one uniform [0, T) offset per telegraph."""
    if not (isinstance(n, int) and n >= 1):
        raise ValueError(f"telegraph count must be an integer >= 1 (got {n})")
    if not period > 0:
        raise ValueError(f"period must be > 0 (got {period})")
    return EnsembleSchedule(offsets=rng.random(n) * period, period=period)


@dataclass(frozen=True)
class TransmissionResult:
    """Full transcript of one message transmission."""

    sent: tuple[int, ...]
    received: tuple[int, ...]
    symbol_times: tuple[float, ...]
    decisions: tuple[DecisionResult, ...]
    hit_counts: tuple[int, ...]
    hits: tuple[tuple[HitRecord, ...], ...] | None = None

    def symbol_error_rate(self) -> float:
        if not self.sent:
            return 0.0
        wrong = sum(1 for s, r in zip(self.sent, self.received) if s != r)
        return wrong / len(self.sent)


def transmit_message(
    bits: Sequence[int],
    plan: TransmissionPlan,
    mode: ModelMode,
    cfg: DeviceConfig,
    rng: np.random.Generator,
    keep_hits: bool = False,
) -> TransmissionResult:
    """Send ``bits`` through the N-telegraph ensemble and decode each symbol.

    For each symbol every telegraph's detectors are set from the bit
    (on = 1, off = 0), hits are pooled in emission order until M are
    collected, and the LRT decides: interference -> 0, no-interference -> 1.
    The symbol time is the pooled collection time; symbols run back to back
    on one continuous emission timeline.
    """
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    if not bits:
        return TransmissionResult((), (), (), (), (), () if keep_hits else None)

    schedule = ensemble_schedule(plan.N, plan.T, rng)
    seeds = child_seeds(rng, len(bits))
    marginal = {
        Detector.ON: screen_marginal(cfg, Detector.ON, mode),
        Detector.OFF: screen_marginal(cfg, Detector.OFF, mode),
    }

    received: list[int] = []
    symbol_times: list[float] = []
    decisions: list[DecisionResult] = []
    hit_counts: list[int] = []
    all_hits: list[tuple[HitRecord, ...]] = []
    clock = 0.0
    for index, bit in enumerate(bits):
        detectors = Detector.ON if bit == 1 else Detector.OFF
        times, ids = schedule.emissions_after(clock, plan.M)
        symbol_rng = np.random.default_rng(int(seeds[index]))
        xs = sample_hits(marginal[detectors], plan.M, symbol_rng)
        if detectors is Detector.ON:
            # Both pipes share the envelope, so the screen conditional given
            # the pipe outcome is the same and the idler samples independently.
            idlers = symbol_rng.integers(1, 3, size=plan.M)
        else:
            idlers = None
        decision = decide_bit(xs, cfg)
        received.append(0 if decision.decided == INTERFERENCE else 1)
        decisions.append(decision)
        hit_counts.append(plan.M)
        symbol_times.append(float(times[-1] - clock))
        if keep_hits:
            all_hits.append(
                tuple(
                    HitRecord(
                        telegraph_id=int(ids[j]),
                        time=float(times[j]),
                        x=float(xs[j]),
                        idler_outcome=None if idlers is None else int(idlers[j]),
                    )
                    for j in range(plan.M)
                )
            )
        clock = float(times[-1])

    return TransmissionResult(
        sent=tuple(bits),
        received=tuple(received),
        symbol_times=tuple(symbol_times),
        decisions=tuple(decisions),
        hit_counts=tuple(hit_counts),
        hits=tuple(all_hits) if keep_hits else None,
    )


def throughput_check(
    plan: TransmissionPlan, rng: np.random.Generator, symbols: int = 32
) -> float:
    """Mean time to pool M hits across the staggered ensemble.

    Timing only; no screen sampling. The contract is agreement with M*T/N
    within 15% for M >= 1000.
    """
    if symbols < 1:
        raise ValueError(f"symbols must be >= 1 (got {symbols})")
    schedule = ensemble_schedule(plan.N, plan.T, rng)
    clock = 0.0
    elapsed: list[float] = []
    for _ in range(symbols):
        times, _ = schedule.emissions_after(clock, plan.M)
        elapsed.append(float(times[-1] - clock))
        clock = float(times[-1])
    return float(np.mean(elapsed))

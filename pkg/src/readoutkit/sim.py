"""Synthetic dispersive-readout shot generator.

Generates labeled qutrit readout traces at desk scale: a piecewise-constant
state path with exponential relaxation (cascade 2 -> 1 -> 0, optional upward
excitation), a first-order resonator envelope that rings toward the current
state's amplitude/phase target, an intermediate-frequency carrier, additive
white Gaussian ADC noise, and optional phase diffusion.

Every shot owns an independent random stream derived from ``(seed, shot_id)``
so serial and parallel generation produce bit-identical datasets.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, DataError

STATES = (0, 1, 2)

# In-memory dataset size guard for generate_dataset (float32 samples).
MAX_DATASET_BYTES = 4 << 30


@dataclass(frozen=True)
class StatePath:
    """Piecewise-constant state trajectory over the readout window.

    ``segments`` is an ordered tuple of ``(state, start_ns, end_ns)`` tiling
    ``[0, duration]`` with no gaps; consecutive segments differ in state.
    """

    segments: tuple[tuple[int, float, float], ...]

    @property
    def initial_state(self) -> int:
        return self.segments[0][0]

    @property
    def duration(self) -> float:
        return self.segments[-1][2]

    @property
    def has_transition(self) -> bool:
        return len(self.segments) > 1

    def state_at(self, t: float) -> int:
        for state, start, end in self.segments:
            if start <= t < end:
                return state
        return self.segments[-1][0]


@dataclass(frozen=True)
class SimConfig:
    """Knobs of the generative readout model.

    Times are in nanoseconds, frequencies in cycles per nanosecond, and
    amplitudes in arbitrary ADC units.  ``t1`` holds the relaxation times of
    states 1 and 2; ``None`` disables that decay channel entirely (kept as an
    explicit sentinel so serialization stays exact).  ``noise_sigma`` and
    ``t1`` defaults are calibrated so the integration-based Gaussian baseline
    lands in the mid-0.9 fidelity band on the stock benchmark dataset.
    """

    duration: float = 1000.0
    sample_rate: float = 2.0
    t1: tuple[float | None, float | None] = (6000.0, 5000.0)
    gamma_up: float = 0.0
    state_envelopes: tuple[tuple[float, float], ...] = (
        (1.0, 0.0),
        (1.0, 2.0943951023931953),
        (1.0, -2.0943951023931953),
    )
    f_if: float = 0.1
    ring_time: float = 50.0
    noise_sigma: float = 7.0
    phase_noise_sigma: float = 0.0
    herald_error: float = 0.0
    seed: int = 0

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def validate(self) -> None:
        if self.duration <= 0 or self.sample_rate <= 0:
            raise ConfigurationError("duration and sample_rate must be positive")
        if not self.f_if < self.sample_rate / 2:
            raise ConfigurationError(
                f"f_if={self.f_if} must lie strictly below Nyquist "
                f"({self.sample_rate / 2})"
            )
        if len(self.t1) != 2:
            raise ConfigurationError("t1 must hold entries for states 1 and 2")
        for t1 in self.t1:
            if t1 is not None and t1 <= 0:
                raise ConfigurationError("t1 entries must be positive or None")
        if self.gamma_up < 0:
            raise ConfigurationError("gamma_up must be >= 0")
        if len(self.state_envelopes) != 3:
            raise ConfigurationError("state_envelopes must cover states 0, 1, 2")
        if self.noise_sigma < 0 or self.phase_noise_sigma < 0:
            raise ConfigurationError("noise sigmas must be >= 0")
        if not 0 <= self.herald_error < 1:
            raise ConfigurationError("herald_error must lie in [0, 1)")
        if self.ring_time < 0:
            raise ConfigurationError("ring_time must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "sample_rate": self.sample_rate,
            "t1": list(self.t1),
            "gamma_up": self.gamma_up,
            "state_envelopes": [list(e) for e in self.state_envelopes],
            "f_if": self.f_if,
            "ring_time": self.ring_time,
            "noise_sigma": self.noise_sigma,
            "phase_noise_sigma": self.phase_noise_sigma,
            "herald_error": self.herald_error,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        if "t1" in d:
            d["t1"] = tuple(d["t1"])
        if "state_envelopes" in d:
            d["state_envelopes"] = tuple(tuple(e) for e in d["state_envelopes"])
        return cls(**d)


@dataclass
class RawShot:
    """One digitized readout trace plus its provenance.

    ``samples`` are real ADC values at ``sample_rate`` samples per ns,
    stored float32 to match the on-disk format.  ``true_path`` is simulator
    ground truth; it is never a classifier input and is ``None`` for shots
    loaded from disk without regeneration.
    """

    samples: np.ndarray
    label: int
    herald_pass: bool
    true_path: StatePath | None
    shot_id: int
    sample_rate: float = 2.0


@dataclass
class Dataset:
    """An immutable collection of shots plus the config that produced it."""

    shots: list[RawShot]
    config: SimConfig | None = None

    def __len__(self) -> int:
        return len(self.shots)

    def __iter__(self):
        return iter(self.shots)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.shots], dtype=np.int64)

    def counts(self) -> dict[int, int]:
        labels = self.labels
        return {s: int(np.sum(labels == s)) for s in STATES}


def shot_rng(seed: int, shot_id: int) -> np.random.Generator:
    """Independent, reproducible stream for one shot."""
    return np.random.default_rng([seed, shot_id])


def _transition_rates(state: int, cfg: SimConfig) -> tuple[float, float]:
    """(downward rate, upward rate) in 1/ns for the given state."""
    down = 0.0
    if state in (1, 2):
        t1 = cfg.t1[state - 1]
        if t1 is not None:
            down = 1.0 / t1
    up = cfg.gamma_up if state in (0, 1) else 0.0
    return down, up


def sample_state_path(prepared: int, cfg: SimConfig, rng: np.random.Generator) -> StatePath:
    """Draw a stochastic state path starting in ``prepared``.

    Waiting times in each state are exponential with total rate
    ``1/t1[state] + gamma_up``; the direction of each jump is chosen
    proportionally to the two rates.  The path is truncated at
    ``cfg.duration``.
    """
    if prepared not in STATES:
        raise ConfigurationError(f"prepared state must be one of {STATES}, got {prepared}")
    cfg.validate()

    segments = []
    t = 0.0
    state = prepared
    while True:
        down, up = _transition_rates(state, cfg)
        total = down + up
        if total == 0.0:
            segments.append((state, t, cfg.duration))
            break
        wait = rng.exponential(1.0 / total)
        end = t + wait
        if end >= cfg.duration:
            segments.append((state, t, cfg.duration))
            break
        segments.append((state, t, end))
        if up > 0.0 and rng.random() < up / total:
            state += 1
        else:
            state -= 1
        t = end
    return StatePath(tuple(segments))


def _envelope(path: StatePath, cfg: SimConfig, n: int) -> np.ndarray:
    """Complex resonator envelope at the n sample times.

    First-order relaxation toward the current state's target with time
    constant ``ring_time``, integrated exactly over each constant-state
    stretch; the resonator starts empty (e = 0 at t = 0).
    """
    dt = cfg.dt
    targets = np.array(
        [amp * np.exp(1j * phase) for amp, phase in cfg.state_envelopes], dtype=complex
    )
    env = np.empty(n, dtype=complex)
    if cfg.ring_time == 0.0:
        for state, start, end in path.segments:
            lo = int(math.ceil(start / dt - 1e-12))
            hi = min(int(math.ceil(end / dt - 1e-12)), n)
            env[lo:hi] = targets[state]
        return env

    e = 0.0 + 0.0j
    t_prev = 0.0
    for state, start, end in path.segments:
        target = targets[state]
        # advance the envelope from t_prev to the segment start (no-op when
        # equal; only happens for the first segment where start == 0)
        lo = int(math.ceil(start / dt - 1e-12))
        hi = min(int(math.ceil(end / dt - 1e-12)), n)
        if lo < hi:
            times = np.arange(lo, hi) * dt
            decay = np.exp(-(times - t_prev) / cfg.ring_time)
            env[lo:hi] = target + (e - target) * decay
            # carry the envelope value forward to the segment end
            e = target + (e - target) * math.exp(-(end - t_prev) / cfg.ring_time)
            t_prev = end
        else:
            e = target + (e - target) * math.exp(-(end - t_prev) / cfg.ring_time)
            t_prev = end
    return env


def synthesize_shot(
    path: StatePath,
    cfg: SimConfig,
    rng: np.random.Generator,
    shot_id: int = 0,
) -> RawShot:
    """Render a state path into a digitized trace.

    Draw order within the shot's stream is fixed (herald flag, phase noise,
    ADC noise) so that path regeneration can stop early.
    """
    n = cfg.n_samples
    herald_pass = bool(rng.random() >= cfg.herald_error)

    env = _envelope(path, cfg, n)
    t = np.arange(n) * cfg.dt
    phase = 2.0 * np.pi * cfg.f_if * t
    if cfg.phase_noise_sigma > 0.0:
        steps = rng.normal(0.0, cfg.phase_noise_sigma * math.sqrt(cfg.dt), n)
        phase = phase + np.cumsum(steps)
    samples = np.real(env * np.exp(1j * phase))
    if cfg.noise_sigma > 0.0:
        samples = samples + rng.normal(0.0, cfg.noise_sigma, n)

    return RawShot(
        samples=samples.astype(np.float32),
        label=path.initial_state,
        herald_pass=herald_pass,
        true_path=path,
        shot_id=shot_id,
        sample_rate=cfg.sample_rate,
    )


def _retained_attempts(cfg: SimConfig, shots_per_state: int) -> list[tuple[int, int]]:
    """(attempt_id, prepared_state) for every retained shot, in dataset order.

    Scans attempt ids in order per state, drawing only the cheap path and
    herald values, until enough heralded shots are collected.
    """
    out = []
    attempt = 0
    for state in STATES:
        kept = 0
        # herald_error < 1 bounds the expected scan; the cap catches misuse
        limit = attempt + max(1000, 100 * shots_per_state)
        while kept < shots_per_state:
            if attempt >= limit:
                raise DataError("herald rejection rate too high to fill the dataset")
            rng = shot_rng(cfg.seed, attempt)
            sample_state_path(state, cfg, rng)
            if rng.random() >= cfg.herald_error:
                out.append((attempt, state))
                kept += 1
            attempt += 1
    return out


def _materialize_shot(cfg: SimConfig, attempt: int, state: int) -> RawShot:
    rng = shot_rng(cfg.seed, attempt)
    path = sample_state_path(state, cfg, rng)
    return synthesize_shot(path, cfg, rng, shot_id=attempt)


def generate_dataset(cfg: SimConfig, shots_per_state: int, threads: int = 1) -> Dataset:
    """Generate ``shots_per_state`` heralded shots for each of the 3 states.

    Shots failing heralding are discarded and replaced, so the retained count
    is exact.  Identical ``(cfg, shots_per_state)`` always yields a
    bit-identical dataset, regardless of ``threads``.
    """
    if shots_per_state < 1:
        raise ConfigurationError("shots_per_state must be >= 1")
    cfg.validate()
    est_bytes = 3 * shots_per_state * cfg.n_samples * 4
    if est_bytes > MAX_DATASET_BYTES:
        raise DataError(
            f"requested dataset would need ~{est_bytes >> 20} MiB of sample storage"
        )

    retained = _retained_attempts(cfg, shots_per_state)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shots = list(pool.map(lambda it: _materialize_shot(cfg, *it), retained))
    else:
        shots = [_materialize_shot(cfg, attempt, state) for attempt, state in retained]
    return Dataset(shots=shots, config=cfg)


def regenerate_paths(cfg: SimConfig, shots_per_state: int) -> list[StatePath]:
    """Reproduce the ground-truth paths of ``generate_dataset`` without
    synthesizing any samples (used to recover decay attribution for datasets
    loaded from disk)."""
    paths = []
    for attempt, state in _retained_attempts(cfg, shots_per_state):
        rng = shot_rng(cfg.seed, attempt)
        paths.append(sample_state_path(state, cfg, rng))
    return paths


def decay_statistics(dataset: Dataset) -> dict[int, float]:
    """Fraction of shots per prepared state whose path left its initial state."""
    out = {}
    for state in STATES:
        shots = [s for s in dataset.shots if s.label == state]
        if not shots:
            out[state] = 0.0
            continue
        n_dec = sum(1 for s in shots if s.true_path is not None and s.true_path.has_transition)
        out[state] = n_dec / len(shots)
    return out


def easy_config(seed: int = 0) -> SimConfig:
    """Zero-decay, widely separated configuration for sanity checks."""
    return replace(
        SimConfig(),
        t1=(None, None),
        noise_sigma=6.8,
        seed=seed,
    )

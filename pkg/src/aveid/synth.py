"""Seeded synthetic label-stream generator with known ground truth.

Gaze follows a per-frame Markov chain over the three entities; emotions
are drawn per frame; frames are independently masked as undetected. The
generator is the independent oracle for analytics tests: its analytic
expectations (stationary distribution, episode transition probabilities)
are computable from the spec.

Streams are reproducible bit-for-bit across platforms because all
randomness flows through a fully specified 64-bit generator (xorshift64*,
seeded through one splitmix64 step; update equations below), never a
platform default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError, MalformedJsonError, ReducibleChainError
from .model import (
    ANALYTICS_ENTITIES,
    EMOTION_CLASSES,
    POSITIVE_EMOTIONS,
    SUBJECT_PWD,
    VALID_SUBJECTS,
    EmotionLabel,
    FrameRecord,
    GazeEntity,
    GazePointRecord,
    LabelStream,
    RegionConfig,
)

_MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_TWO53 = float(1 << 53)


def _splitmix64(seed: int) -> int:
    z = (seed + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Xorshift64Star:
    """xorshift64* PRNG.

    State update: x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (all mod 2^64);
    output is (x * 0x2545F4914F6CDD1D) mod 2^64. The state is initialized
    by one splitmix64 scramble of the seed, forced nonzero.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * _MULT) & _MASK64

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 output bits."""
        return (self.next_u64() >> 11) / _TWO53

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) by scaling; fine for tiny n."""
        return int(self.next_float() * n)


def _cumulative(probabilities: tuple[float, ...]) -> tuple[float, ...]:
    total = 0.0
    cum = []
    for p in probabilities:
        total += p
        cum.append(total)
    return tuple(cum)


def _pick(cum: tuple[float, ...], u: float) -> int:
    for i, threshold in enumerate(cum):
        if u < threshold:
            return i
    return len(cum) - 1


_UNIFORM_EMOTIONS = {label: 1.0 / 7.0 for label in EMOTION_CLASSES}


@dataclass(frozen=True)
class GeneratorSpec:
    """Ground-truth parameters for one synthetic stream.

    ``gaze_transition_matrix`` is row-stochastic over the entity order
    (tablet, facilitator, elsewhere); ``emotion_distribution`` covers the
    seven detector classes. ``emotion_tablet_coupling`` in [0, 1] shifts
    that much emotion mass onto the positive bucket while gaze rests on
    the tablet (0: emotions independent of gaze).
    """

    seed: int
    fps: float
    duration_s: float
    gaze_transition_matrix: tuple[tuple[float, float, float], ...]
    dwell_min_frames: int = 1
    emotion_distribution: dict[EmotionLabel, float] = field(
        default_factory=lambda: dict(_UNIFORM_EMOTIONS)
    )
    undetected_rate: float = 0.0
    start_entity: GazeEntity | None = None
    subject_id: str = SUBJECT_PWD
    session_id: str = "synthetic"
    emotion_tablet_coupling: float = 0.0

    def __post_init__(self):
        if self.fps <= 0 or not math.isfinite(self.fps):
            raise InvalidSpecError(f"fps must be positive, got {self.fps}")
        if self.duration_s <= 0:
            raise InvalidSpecError(f"duration_s must be positive, got {self.duration_s}")
        if self.dwell_min_frames < 1:
            raise InvalidSpecError(
                f"dwell_min_frames must be >= 1, got {self.dwell_min_frames}"
            )
        matrix = tuple(tuple(float(v) for v in row) for row in self.gaze_transition_matrix)
        object.__setattr__(self, "gaze_transition_matrix", matrix)
        if len(matrix) != 3 or any(len(row) != 3 for row in matrix):
            raise InvalidSpecError("gaze_transition_matrix must be 3x3")
        for i, row in enumerate(matrix):
            if any(not 0.0 <= v <= 1.0 for v in row):
                raise InvalidSpecError(f"matrix row {i} has entries outside [0, 1]")
            if abs(sum(row) - 1.0) > 1e-12:
                raise InvalidSpecError(f"matrix row {i} sums to {sum(row)}, not 1")
        dist = dict(self.emotion_distribution)
        object.__setattr__(self, "emotion_distribution", dist)
        if set(dist) != set(EMOTION_CLASSES):
            raise InvalidSpecError(
                "emotion_distribution must cover exactly the seven detector classes"
            )
        if any(not 0.0 <= p <= 1.0 for p in dist.values()):
            raise InvalidSpecError("emotion probabilities must lie in [0, 1]")
        if abs(sum(dist.values()) - 1.0) > 1e-12:
            raise InvalidSpecError(
                f"emotion_distribution sums to {sum(dist.values())}, not 1"
            )
        if not 0.0 <= self.undetected_rate <= 1.0:
            raise InvalidSpecError(
                f"undetected_rate must be in [0, 1], got {self.undetected_rate}"
            )
        if not 0.0 <= self.emotion_tablet_coupling <= 1.0:
            raise InvalidSpecError(
                f"emotion_tablet_coupling must be in [0, 1], got {self.emotion_tablet_coupling}"
            )
        if self.start_entity is GazeEntity.UNDETECTED:
            raise InvalidSpecError("start_entity must be one of the three entities")
        if self.subject_id not in VALID_SUBJECTS:
            raise InvalidSpecError(f"subject_id must be one of {VALID_SUBJECTS}")

    def n_frames(self) -> int:
        return max(1, int(round(self.duration_s * self.fps)))

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        if not isinstance(data, dict):
            raise InvalidSpecError("generator spec must be a JSON object")
        required = {"seed", "fps", "duration_s", "gaze_transition_matrix"}
        missing = required - set(data)
        if missing:
            raise InvalidSpecError(f"generator spec missing fields: {sorted(missing)}")
        known = required | {
            "dwell_min_frames",
            "emotion_distribution",
            "undetected_rate",
            "start_entity",
            "subject_id",
            "session_id",
            "emotion_tablet_coupling",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidSpecError(f"generator spec has unknown fields: {sorted(unknown)}")
        try:
            kwargs = dict(
                seed=int(data["seed"]),
                fps=float(data["fps"]),
                duration_s=float(data["duration_s"]),
                gaze_transition_matrix=tuple(
                    tuple(row) for row in data["gaze_transition_matrix"]
                ),
            )
        except (TypeError, ValueError) as exc:
            raise InvalidSpecError(f"malformed generator spec field: {exc}") from exc
        if "dwell_min_frames" in data:
            kwargs["dwell_min_frames"] = int(data["dwell_min_frames"])
        if "undetected_rate" in data:
            kwargs["undetected_rate"] = float(data["undetected_rate"])
        if "emotion_tablet_coupling" in data:
            kwargs["emotion_tablet_coupling"] = float(data["emotion_tablet_coupling"])
        if "emotion_distribution" in data:
            raw = data["emotion_distribution"]
            if not isinstance(raw, dict):
                raise InvalidSpecError("emotion_distribution must be an object")
            dist: dict[EmotionLabel, float] = {}
            for token, prob in raw.items():
                try:
                    dist[EmotionLabel(token)] = float(prob)
                except ValueError:
                    raise InvalidSpecError(f"unknown emotion token {token!r}") from None
            kwargs["emotion_distribution"] = dist
        if data.get("start_entity") is not None:
            try:
                kwargs["start_entity"] = GazeEntity(data["start_entity"])
            except ValueError:
                raise InvalidSpecError(
                    f"unknown start_entity {data['start_entity']!r}"
                ) from None
        if "subject_id" in data:
            kwargs["subject_id"] = str(data["subject_id"])
        if "session_id" in data:
            kwargs["session_id"] = str(data["session_id"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "fps": self.fps,
            "duration_s": self.duration_s,
            "gaze_transition_matrix": [list(row) for row in self.gaze_transition_matrix],
            "dwell_min_frames": self.dwell_min_frames,
            "emotion_distribution": {
                label.value: prob for label, prob in self.emotion_distribution.items()
            },
            "undetected_rate": self.undetected_rate,
            "start_entity": self.start_entity.value if self.start_entity else None,
            "subject_id": self.subject_id,
            "session_id": self.session_id,
            "emotion_tablet_coupling": self.emotion_tablet_coupling,
        }


def load_generator_spec(path: str) -> GeneratorSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise MalformedJsonError(str(path), f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(str(path), f"invalid JSON: {exc}") from exc
    return GeneratorSpec.from_dict(data)


def _coupled_emotion_row(spec: GeneratorSpec) -> tuple[float, ...]:
    """Emotion distribution used while gaze rests on the tablet."""
    base = tuple(spec.emotion_distribution[label] for label in EMOTION_CLASSES)
    c = spec.emotion_tablet_coupling
    if c == 0.0:
        return base
    positive_idx = [i for i, label in enumerate(EMOTION_CLASSES) if label in POSITIVE_EMOTIONS]
    positive_mass = sum(base[i] for i in positive_idx)
    boosted = list(v * (1.0 - c) for v in base)
    if positive_mass > 0.0:
        for i in positive_idx:
            boosted[i] += c * base[i] / positive_mass
    else:
        for i in positive_idx:
            boosted[i] += c / len(positive_idx)
    return tuple(boosted)


def generate(spec: GeneratorSpec) -> LabelStream:
    """Generate one deterministic label stream from a spec.

    Per-frame draw order is pinned: gaze-chain draw (skipped while the
    current dwell is below ``dwell_min_frames``), then the emotion draw,
    then the undetected mask draw. Masking replaces both labels with
    UNDETECTED but does not perturb the underlying chain.
    """
    rng = Xorshift64Star(spec.seed)
    rows = tuple(_cumulative(row) for row in spec.gaze_transition_matrix)
    emotion_cum = _cumulative(
        tuple(spec.emotion_distribution[label] for label in EMOTION_CLASSES)
    )
    tablet_emotion_cum = _cumulative(_coupled_emotion_row(spec))
    n = spec.n_frames()
    dwell_min = spec.dwell_min_frames
    rate = spec.undetected_rate

    if spec.start_entity is not None:
        state = ANALYTICS_ENTITIES.index(spec.start_entity)
    else:
        state = rng.next_below(3)
    dwell = 1

    entities = list(ANALYTICS_ENTITIES)
    emotions = list(EMOTION_CLASSES)
    undetected_gaze = GazeEntity.UNDETECTED
    undetected_emotion = EmotionLabel.UNDETECTED
    records: list[FrameRecord] = []
    append = records.append
    subject = spec.subject_id
    for frame in range(n):
        if frame > 0:
            if dwell >= dwell_min:
                nxt = _pick(rows[state], rng.next_float())
                if nxt != state:
                    state = nxt
                    dwell = 1
                else:
                    dwell += 1
            else:
                dwell += 1
        cum = tablet_emotion_cum if state == 0 else emotion_cum
        emotion_idx = _pick(cum, rng.next_float())
        masked = rng.next_float() < rate
        if masked:
            append(
                FrameRecord(
                    frame_index=frame,
                    gaze=undetected_gaze,
                    emotion=undetected_emotion,
                    subject_id=subject,
                )
            )
        else:
            append(
                FrameRecord(
                    frame_index=frame,
                    gaze=entities[state],
                    emotion=emotions[emotion_idx],
                    subject_id=subject,
                )
            )
    return LabelStream(session_id=spec.session_id, fps=spec.fps, records=tuple(records))


@dataclass(frozen=True)
class ExpectedFeatures:
    """Analytic expectations for a spec with dwell_min_frames = 1."""

    stationary: dict[GazeEntity, float]
    episode_transitions: dict[tuple[GazeEntity, GazeEntity], float]


def _is_irreducible(matrix: np.ndarray) -> bool:
    reach = (matrix > 0.0).astype(bool) | np.eye(3, dtype=bool)
    # Two squarings give reachability within <= 4 steps, enough for 3 states.
    reach = reach @ reach
    reach = reach @ reach
    return bool(reach.all())


def expected_features(spec: GeneratorSpec) -> ExpectedFeatures:
    """Stationary gaze distribution and episode-level transition mix.

    Valid for dwell_min_frames = 1: the stationary distribution solves
    pi P = pi, and episode transitions are the off-diagonal frame
    transitions pi_a * P[a][b] renormalized over all ordered pairs.
    """
    matrix = np.array(spec.gaze_transition_matrix, dtype=float)
    if not _is_irreducible(matrix):
        raise ReducibleChainError(
            "gaze transition matrix is reducible; no unique stationary distribution"
        )
    a = np.vstack([matrix.T - np.eye(3), np.ones((1, 3))])
    b = np.array([0.0, 0.0, 0.0, 1.0])
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()

    weights: dict[tuple[GazeEntity, GazeEntity], float] = {}
    total = 0.0
    for i, src in enumerate(ANALYTICS_ENTITIES):
        for j, dst in enumerate(ANALYTICS_ENTITIES):
            if i == j:
                continue
            w = float(pi[i] * matrix[i, j])
            weights[(src, dst)] = w
            total += w
    if total <= 0.0:
        raise ReducibleChainError("chain never transitions between entities")
    transitions = {pair: w / total for pair, w in weights.items()}
    stationary = {entity: float(pi[i]) for i, entity in enumerate(ANALYTICS_ENTITIES)}
    return ExpectedFeatures(stationary=stationary, episode_transitions=transitions)


_ELSEWHERE_CANDIDATE_OFFSETS = (
    (0.25, 0.25),
    (0.75, 0.25),
    (0.25, 0.75),
    (0.75, 0.75),
    (0.5, 0.25),
    (0.5, 0.75),
    (0.25, 0.5),
    (0.75, 0.5),
)


def elsewhere_point(regions: RegionConfig) -> tuple[float, float]:
    """A deterministic frame point outside both gaze regions."""
    for fx, fy in _ELSEWHERE_CANDIDATE_OFFSETS:
        x = fx * regions.frame_width
        y = fy * regions.frame_height
        if not regions.target_activity_space.contains(x, y) and not regions.facilitator.contains(x, y):
            return (x, y)
    raise InvalidSpecError(
        "gaze regions cover every candidate point; cannot place an 'elsewhere' gaze"
    )


def points_from_stream(
    stream: LabelStream,
    regions: RegionConfig,
    subject_id: str = SUBJECT_PWD,
) -> list[GazePointRecord]:
    """Derive gaze points that assign back to the stream's gaze labels.

    Tablet/facilitator frames point at the matching rect center, elsewhere
    frames at a fixed point outside both rects, undetected frames carry no
    point. Useful for exercising the assignment pipeline end to end.
    """
    from .gaze import assign_entity  # local import to keep modules acyclic

    targets = {
        GazeEntity.TABLET: regions.target_activity_space.center(),
        GazeEntity.FACILITATOR: regions.facilitator.center(),
        GazeEntity.ELSEWHERE: elsewhere_point(regions),
    }
    for entity, (x, y) in targets.items():
        probe = GazePointRecord(
            frame_index=0, subject_id=subject_id, gaze_x=x, gaze_y=y, detected=True
        )
        if assign_entity(probe, regions) is not entity:
            raise InvalidSpecError(
                f"regions overlap too much: probe point for '{entity.value}' "
                f"does not assign back to it"
            )
    points: list[GazePointRecord] = []
    for rec in stream.records:
        if rec.subject_id != subject_id:
            continue
        if rec.gaze is GazeEntity.UNDETECTED:
            points.append(
                GazePointRecord(
                    frame_index=rec.frame_index,
                    subject_id=subject_id,
                    gaze_x=None,
                    gaze_y=None,
                    detected=False,
                )
            )
        else:
            x, y = targets[rec.gaze]
            points.append(
                GazePointRecord(
                    frame_index=rec.frame_index,
                    subject_id=subject_id,
                    gaze_x=x,
                    gaze_y=y,
                    detected=True,
                )
            )
    return points

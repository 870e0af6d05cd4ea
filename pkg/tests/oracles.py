"""Independent oracles for the test suite.

Everything here is deliberately written the slow, obvious way (explicit
run scans, pairwise counting, composite Simpson integration) and shares
no code path with the package implementation it checks.
"""

from __future__ import annotations

import math

from aveid.model import GazeEntity

TAB = GazeEntity.TABLET
FAC = GazeEntity.FACILITATOR
ELS = GazeEntity.ELSEWHERE
UND = GazeEntity.UNDETECTED

ENTITIES = (TAB, FAC, ELS)


def runs_of(labels):
    """Explicit left-to-right run enumeration: [(entity, start, end)]."""
    runs = []
    i = 0
    n = len(labels)
    while i < n:
        j = i
        while j + 1 < n and labels[j + 1] == labels[i]:
            j += 1
        runs.append((labels[i], i, j + 1))
        i = j + 1
    return runs


def brute_force_attention(labels, fps, window_frames=None):
    """Recompute the 21 attention features by direct enumeration.

    Returns None when the window has no detected frames. Only supports the
    default analytics configuration (no merging, no gap bridging).
    """
    if window_frames is None:
        window_frames = len(labels)
    detected = [lab for lab in labels if lab != UND]
    if not detected:
        return None

    counts = {e: 0 for e in ENTITIES}
    for lab in detected:
        counts[lab] += 1
    total_detected = len(detected)

    episodes = [(e, s, t) for (e, s, t) in runs_of(labels) if e != UND]
    durations = {e: [] for e in ENTITIES}
    for entity, start, end in episodes:
        durations[entity].append((end - start) / fps)

    pair_counts = {(a, b): 0 for a in ENTITIES for b in ENTITIES if a != b}
    total_pairs = 0
    for (e1, s1, t1), (e2, s2, t2) in zip(episodes, episodes[1:]):
        if t1 == s2:  # adjacent with no undetected gap
            total_pairs += 1
            pair_counts[(e1, e2)] += 1

    out = {}
    for entity in ENTITIES:
        out[f"prop_{entity.value}"] = counts[entity] / total_detected
    for entity in ENTITIES:
        ds = durations[entity]
        if ds:
            mean = sum(ds) / len(ds)
            var = sum((d - mean) ** 2 for d in ds) / len(ds)
        else:
            mean, var = 0.0, 0.0
        out[f"ep_mean_{entity.value}"] = mean
        out[f"ep_std_{entity.value}"] = math.sqrt(var)
        out[f"ep_count_{entity.value}"] = len(ds)
    for (a, b), c in pair_counts.items():
        out[f"trans_{a.value}_{b.value}"] = c / total_pairs if total_pairs else 0.0
    for entity in ENTITIES:
        inbound = sum(
            out[f"trans_{other.value}_{entity.value}"] for other in ENTITIES if other != entity
        )
        outbound = sum(
            out[f"trans_{entity.value}_{other.value}"] for other in ENTITIES if other != entity
        )
        out[f"flux_in_{entity.value}"] = inbound
        out[f"flux_out_{entity.value}"] = outbound
    out["detected_coverage"] = total_detected / window_frames
    return out


def t_density(x: float, df: int) -> float:
    log_norm = (
        math.lgamma((df + 1) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_norm - ((df + 1) / 2.0) * math.log1p(x * x / df))


def _simpson(f, a: float, b: float, n: int) -> float:
    if n % 2 == 1:
        n += 1
    h = (b - a) / n
    total = f(a) + f(b)
    for i in range(1, n):
        total += f(a + i * h) * (4 if i % 2 == 1 else 2)
    return total * h / 3.0


def t_sf_numeric(t: float, df: int) -> float:
    """P(T > t) by composite Simpson over the mapped tail x = t + u/(1-u)."""
    if t < 0:
        return 1.0 - t_sf_numeric(-t, df)

    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        x = t + u / (1.0 - u)
        return t_density(x, df) / (1.0 - u) ** 2

    return _simpson(mapped, 0.0, 1.0 - 1e-12, 20000)


def pearson_p_numeric(r: float, n: int) -> float:
    t = abs(r) * math.sqrt((n - 2) / (1.0 - r * r))
    return 2.0 * t_sf_numeric(t, n - 2)


def ks_d_brute(a, b) -> float:
    """Max ECDF gap scanned at every sample point of both samples."""
    d = 0.0
    for point in list(a) + list(b):
        cdf_a = sum(1 for v in a if v <= point) / len(a)
        cdf_b = sum(1 for v in b if v <= point) / len(b)
        d = max(d, abs(cdf_a - cdf_b))
    return d


def stationary_power_iteration(matrix, iterations: int = 10_000):
    """Row of P^k for large k; converges to the stationary distribution."""
    pi = [1.0 / 3.0] * 3
    for _ in range(iterations):
        nxt = [
            sum(pi[i] * matrix[i][j] for i in range(3))
            for j in range(3)
        ]
        total = sum(nxt)
        pi = [v / total for v in nxt]
    return pi


def majority_smooth_brute(labels, k):
    """Naive re-derivation of the majority-vote smoothing contract."""
    if k == 1:
        return list(labels)
    half = k // 2
    out = []
    for i, lab in enumerate(labels):
        if lab == UND:
            out.append(lab)
            continue
        window = [
            labels[j]
            for j in range(max(0, i - half), min(len(labels), i + half + 1))
            if labels[j] != UND
        ]
        best_count = max(window.count(e) for e in set(window))
        winners = [e for e in set(window) if window.count(e) == best_count]
        out.append(winners[0] if len(winners) == 1 else lab)
    return out

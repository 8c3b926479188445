"""Series length reduction: uniform stride, variability-adaptive allocation, budget fitting."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import ceil, floor
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetError, ConfigError
from .prompt import estimate_tokens, render_values

RESERVE_TOKENS = 256  # withheld from every context budget for template text, exemplar, answer
DEFAULT_WINDOW = 10
DEFAULT_THRESHOLD = 0.0


class Strategy(str, enum.Enum):
    UNIFORM = "uniform"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class DownsampleConfig:
    strategy: Strategy
    factor: int
    window: int = DEFAULT_WINDOW
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.factor < 1:
            raise ConfigError(f"factor must be >= 1, got {self.factor}")
        if self.strategy is Strategy.ADAPTIVE and self.window < 2:
            raise ConfigError(f"window must be >= 2, got {self.window}")
        if self.threshold < 0:
            raise ConfigError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class VariabilityProfile:
    """Population standard deviation per window of size w (last window may be short)."""

    per_window: tuple[float, ...]
    w: int


def uniform_downsample(x: Sequence[float], f: int) -> np.ndarray:
    """Every f-th point of x, starting at index 0; length is ceil(len(x) / f)."""
    if f < 1:
        raise ConfigError(f"factor must be >= 1, got {f}")
    arr = np.asarray(x, dtype=np.float64)
    return arr[::f]


def window_variability(x: Sequence[float], w: int) -> VariabilityProfile:
    """Split x into ceil(n / w) contiguous windows and take each window's population stddev."""
    if w < 2:
        raise ConfigError(f"window must be >= 2, got {w}")
    arr = np.asarray(x, dtype=np.float64)
    n = arr.size
    stds = [float(arr[i * w : min((i + 1) * w, n)].std()) for i in range(ceil(n / w))]
    return VariabilityProfile(per_window=tuple(stds), w=w)


def _window_bounds(n: int, w: int) -> list[tuple[int, int]]:
    return [(i * w, min((i + 1) * w, n)) for i in range(ceil(n / w))]


def adaptive_indices(n: int, f: int, w: int, threshold: float, variability: Sequence[float]) -> list[int]:
    """Indices kept by the adaptive allocation; strictly increasing, length floor(n / f).

    Window quotas are proportional to max(window stddev, threshold), with a
    floor of one point per window, capped at window size (overflow moves to
    the next window in descending-variability order). The leftover after
    flooring is handed out one point at a time in descending-variability
    order (ties broken toward the earlier window). When the target length is
    below the window count, only the highest-variability windows contribute,
    one point each. Within a window, points are taken at uniform stride from
    the window's first element.
    """
    target = n // f
    if target < 1:
        raise ConfigError(f"factor {f} leaves no points for a series of length {n}")
    bounds = _window_bounds(n, w)
    nwin = len(bounds)
    var = [float(v) for v in variability]
    if len(var) != nwin:
        raise ConfigError(f"variability profile has {len(var)} entries, expected {nwin}")

    # descending variability, ties -> lower window index
    rank = sorted(range(nwin), key=lambda i: (-var[i], i))

    if target < nwin:
        chosen = sorted(rank[:target])
        return [bounds[i][0] for i in chosen]

    effective = [max(v, threshold) for v in var]
    total = sum(effective)
    weights = [e / total for e in effective] if total > 0 else [1.0 / nwin] * nwin
    sizes = [hi - lo for lo, hi in bounds]
    quotas = [max(1, floor(target * wt)) for wt in weights]

    # cap at window size; overflow cascades to the next-ranked window
    carry = 0
    for i in rank:
        q = quotas[i] + carry
        quotas[i] = min(q, sizes[i])
        carry = q - quotas[i]
    while carry > 0:
        for i in rank:
            take = min(sizes[i] - quotas[i], carry)
            quotas[i] += take
            carry -= take
            if carry == 0:
                break

    remainder = target - sum(quotas)
    while remainder > 0:
        moved = False
        for i in rank:
            if remainder == 0:
                break
            if quotas[i] < sizes[i]:
                quotas[i] += 1
                remainder -= 1
                moved = True
        if not moved:
            raise ConfigError("target length exceeds series length")
    while remainder < 0:
        for i in reversed(rank):
            if remainder == 0:
                break
            if quotas[i] > 1:
                quotas[i] -= 1
                remainder += 1

    indices: list[int] = []
    for (lo, _), size, quota in zip(bounds, sizes, quotas):
        indices.extend(lo + floor(j * size / quota) for j in range(quota))
    return indices


def adaptive_downsample(x: Sequence[float], cfg: DownsampleConfig) -> np.ndarray:
    """Variability-weighted point selection; output length is floor(len(x) / cfg.factor)."""
    if cfg.strategy is not Strategy.ADAPTIVE:
        raise ConfigError(f"adaptive_downsample called with strategy {cfg.strategy}")
    arr = np.asarray(x, dtype=np.float64)
    profile = window_variability(arr, cfg.window)
    idx = adaptive_indices(arr.size, cfg.factor, cfg.window, cfg.threshold, profile.per_window)
    return arr[idx]


def apply_strategy(
    x: Sequence[float],
    strategy: Strategy,
    f: int,
    w: int = DEFAULT_WINDOW,
    threshold: float = DEFAULT_THRESHOLD,
) -> np.ndarray:
    """Downsample one sequence by factor f with the given strategy."""
    if strategy is Strategy.UNIFORM:
        return uniform_downsample(x, f)
    return adaptive_downsample(
        x, DownsampleConfig(strategy=Strategy.ADAPTIVE, factor=f, window=w, threshold=threshold)
    )


def _serialize_matrix(rows: np.ndarray) -> str:
    return "\n".join(render_values(row) for row in rows)


def fit_to_budget(
    x: Sequence[float] | np.ndarray,
    overhead_tokens: int,
    context_length: int,
    strategy: Strategy,
    w: int = DEFAULT_WINDOW,
    threshold: float = DEFAULT_THRESHOLD,
    estimator: Callable[[str], int] = estimate_tokens,
    reserve: int = RESERVE_TOKENS,
) -> tuple[np.ndarray, int]:
    """Find the smallest factor f whose downsampled serialization fits the budget.

    The budget is ``context_length - reserve - overhead_tokens`` tokens for the
    serialized values (all dimensions, one line each, when x is a matrix).
    Searches by doubling then binary search, then slides down so that f - 1
    (when >= 1) provably violates the budget. A series that fits untouched is
    returned with f = 1.
    """
    arr = np.asarray(x, dtype=np.float64)
    squeeze = arr.ndim == 1
    mat = arr[np.newaxis, :] if squeeze else arr
    n = mat.shape[1]
    budget = context_length - reserve - overhead_tokens
    if budget <= 0:
        raise BudgetError(
            f"context length {context_length} cannot cover overhead {overhead_tokens} "
            f"plus reserve {reserve}"
        )

    def downsampled(f: int) -> np.ndarray:
        return np.stack([apply_strategy(row, strategy, f, w, threshold) for row in mat])

    def fits(f: int) -> bool:
        return estimator(_serialize_matrix(downsampled(f))) <= budget

    if fits(1):
        out = mat if squeeze is False else arr
        return (arr if squeeze else mat), 1

    hi = 2
    while hi < n and not fits(hi):
        hi *= 2
    hi = min(hi, n)
    if not fits(hi):
        raise BudgetError(
            f"series of length {n} cannot fit a budget of {budget} tokens at any factor"
        )
    lo = max(1, hi // 2)
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if fits(mid):
            hi = mid
        else:
            lo = mid
    while hi > 1 and fits(hi - 1):
        hi -= 1

    out = downsampled(hi)
    return (out[0] if squeeze else out), hi

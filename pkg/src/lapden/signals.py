"""Test-signal generators, calibrated Gaussian noise, and quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Field2D, Signal1D

# SplitMix64 mixing constants (Steele et al., public domain reference values).
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = 2.0 ** -53


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded relative-noise description: ||noise|| / ||clean|| == delta_rel."""

    seed: int
    delta_rel: float

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not math.isfinite(self.delta_rel) or self.delta_rel < 0:
            raise ValueError(f"delta_rel must be finite and >= 0, got {self.delta_rel}")


@dataclass(frozen=True)
class Metrics:
    """Reconstruction quality numbers against a clean reference.

    psnr_db is None when the reference has zero range or the error is exactly
    zero.  plateau_fraction is the fraction of first differences below the
    threshold tau (high values flag staircasing); curvature_mass is the sum of
    absolute second differences (1D) or five-point Laplacian values (2D).
    """

    rel_err: float
    rmse: float
    psnr_db: float | None
    plateau_fraction: float
    curvature_mass: float


def _splitmix64(state: np.ndarray) -> np.ndarray:
    z = state.copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def gaussian_noise(count: int, spec: NoiseSpec) -> np.ndarray:
    """Deterministic standard-normal draws.

    A counter-based SplitMix64 stream feeds Box-Muller pairs, so the output
    depends only on (seed, count) and is identical across platforms.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    pairs = (count + 1) // 2
    counters = np.arange(1, 2 * pairs + 1, dtype=np.uint64)
    words = _splitmix64(np.uint64(spec.seed) + counters * _GOLDEN)
    # u1 in (0, 1] so the log is finite; u2 in [0, 1)
    u1 = ((words[0::2] >> np.uint64(11)).astype(float) + 1.0) * _U53
    u2 = (words[1::2] >> np.uint64(11)).astype(float) * _U53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def sample_f_sine(n: int) -> Signal1D:
    """sin(2*pi*x) sampled at x_i = i/n, i = 0..n (grid units, h = 1)."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    x = np.arange(n + 1) / n
    return Signal1D(np.sin(2.0 * np.pi * x))


def sample_g_jumps(n: int) -> Signal1D:
    """Piecewise-smooth test signal: the sine plus four unit sign jumps.

    g(x) = sin(2*pi*x) + sign(x-0.2) - sign(x-0.4) + sign(x-0.6) - sign(x-0.8)
    sampled at x_i = i/n; sign(0) = 0 at nodes that hit a jump exactly.
    """
    if n < 10:
        raise ValueError(f"need n >= 10, got {n}")
    x = np.arange(n + 1) / n
    g = (
        np.sin(2.0 * np.pi * x)
        + np.sign(x - 0.2)
        - np.sign(x - 0.4)
        + np.sign(x - 0.6)
        - np.sign(x - 0.8)
    )
    return Signal1D(g)


def sample_f2d(n: int) -> Field2D:
    """f(x, y) = x*sin(pi*y) on [-1,1]^2, n x n nodes, row index = x index."""
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    # symmetric form: node +x and node -x are exact negations
    coords = (2.0 * np.arange(n) - (n - 1)) / (n - 1)
    values = coords[:, None] * np.sin(np.pi * coords)[None, :]
    return Field2D(values)


def add_noise(clean: Signal1D | Field2D, spec: NoiseSpec):
    """Add seeded Gaussian noise scaled so ||noisy - clean|| / ||clean|| equals
    delta_rel exactly (2-norm over samples)."""
    values = clean.values
    norm = float(np.linalg.norm(values))
    if spec.delta_rel == 0.0:
        return clean
    if norm == 0.0:
        raise ValueError("cannot scale noise relative to a zero-norm signal")
    err = gaussian_noise(values.size, spec).reshape(values.shape)
    noisy = values + spec.delta_rel * (err / np.linalg.norm(err)) * norm
    return clean.with_values(noisy)


def default_plateau_tau(clean: Signal1D | Field2D) -> float:
    """Plateau threshold: 10% of the clean data's mean absolute first difference."""
    return 0.1 * float(np.mean(np.abs(_first_differences(clean.values))))


def _first_differences(values: np.ndarray) -> np.ndarray:
    if values.ndim == 1:
        return np.diff(values)
    return np.concatenate([
        np.diff(values, axis=0).ravel(),
        np.diff(values, axis=1).ravel(),
    ])


def compute_metrics(u: Signal1D | Field2D, ref: Signal1D | Field2D, tau: float) -> Metrics:
    """Quality metrics of ``u`` against the clean reference ``ref``."""
    uv, rv = u.values, ref.values
    if uv.shape != rv.shape:
        raise ValueError(f"shape mismatch: {uv.shape} vs {rv.shape}")
    ref_norm = float(np.linalg.norm(rv))
    if ref_norm == 0.0:
        raise ValueError("reference has zero norm")
    err_norm = float(np.linalg.norm(uv - rv))
    rel_err = err_norm / ref_norm
    rmse = err_norm / math.sqrt(uv.size)
    ref_range = float(rv.max() - rv.min())
    psnr_db = None
    if ref_range > 0.0 and rmse > 0.0:
        psnr_db = 20.0 * math.log10(ref_range / rmse)
    diffs = _first_differences(uv)
    plateau_fraction = float(np.mean(np.abs(diffs) < tau))
    if uv.ndim == 1:
        curvature = uv[:-2] - 2.0 * uv[1:-1] + uv[2:]
    else:
        curvature = (
            uv[:-2, 1:-1] + uv[2:, 1:-1] + uv[1:-1, :-2] + uv[1:-1, 2:]
            - 4.0 * uv[1:-1, 1:-1]
        )
    return Metrics(
        rel_err=rel_err,
        rmse=rmse,
        psnr_db=psnr_db,
        plateau_fraction=plateau_fraction,
        curvature_mass=float(np.sum(np.abs(curvature))),
    )

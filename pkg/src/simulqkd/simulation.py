"""Chunked, seeded Monte Carlo of the full link.

Pulses are split into fixed-size chunks; chunk ``k`` draws all of its
randomness from ``SeedSpec(master_seed, k)``.  Chunk results are reduced in
chunk order, so the outcome depends on the seed and chunk size only, never
on how many workers ran the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .channel import draw_channel, propagate_arrays
from .estimation import FrameStats, FrameTally, end_to_end_key_rate, frame_stats
from .noise_budget import resolve_alpha
from .phase_space import ParameterError, SeedSpec, SystemParams
from .receiver import DetectionFrame, DetectorModel, detect
from .security import KeyRateReport
from .transmitter import PulseFrame, generate_frame

DEFAULT_CHUNK = 1 << 18


@dataclass(frozen=True)
class SimulationResult:
    params: SystemParams
    alpha: float
    stats: FrameStats
    report: KeyRateReport
    master_seed: int
    chunk_size: int
    workers: int


def run_frame(
    params: SystemParams,
    n_pulses: int,
    seed: SeedSpec,
    bits=None,
    model: DetectorModel | None = None,
) -> tuple[PulseFrame, DetectionFrame]:
    """Encode, propagate and detect one frame, keeping every record."""
    pulses = generate_frame(params, n_pulses, seed, bits)
    draw = draw_channel(params, seed, n_pulses)
    x, p = propagate_arrays(pulses.amp_x, pulses.amp_p, params.T_eta, draw)
    detections = detect(x, p, params, pulses.alpha, seed, model)
    return pulses, detections


def chunk_plan(n_pulses: int, master_seed: int, chunk_size: int) -> list[tuple[SeedSpec, int]]:
    sizes = [min(chunk_size, n_pulses - start) for start in range(0, n_pulses, chunk_size)]
    return [(SeedSpec(master_seed, k), size) for k, size in enumerate(sizes)]


def iter_chunks(params: SystemParams, n_pulses: int, master_seed: int, chunk_size: int = DEFAULT_CHUNK):
    """Yield ``(pulses, detections)`` per chunk, identical to what :func:`simulate` sees."""
    params = params.replace(alpha=resolve_alpha(params))
    for seed, size in chunk_plan(n_pulses, master_seed, chunk_size):
        yield run_frame(params, size, seed)


def _chunk_tally(params: SystemParams, seed: SeedSpec, n: int) -> FrameTally:
    return FrameTally.from_frames(*run_frame(params, n, seed))


def simulate_tally(
    params: SystemParams,
    n_pulses: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> FrameTally:
    if n_pulses < 1:
        raise ParameterError(f"n_pulses must be >= 1, got {n_pulses}")
    if workers < 1 or chunk_size < 1:
        raise ParameterError("workers and chunk_size must be >= 1")
    params = params.replace(alpha=resolve_alpha(params))
    plan = chunk_plan(n_pulses, master_seed, chunk_size)
    seeds = [seed for seed, _ in plan]
    sizes = [size for _, size in plan]

    tally = FrameTally()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, keeping the reduction deterministic
        for part in pool.map(_chunk_tally, [params] * len(plan), seeds, sizes):
            tally = tally.merge(part)
    return tally


def simulate(
    params: SystemParams,
    n_pulses: int,
    master_seed: int,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SimulationResult:
    """Run the link Monte Carlo and estimate BER, channel and key rate."""
    tally = simulate_tally(params, n_pulses, master_seed, workers, chunk_size)
    stats = frame_stats(tally, params)
    return SimulationResult(
        params=params,
        alpha=resolve_alpha(params),
        stats=stats,
        report=end_to_end_key_rate(stats, params),
        master_seed=master_seed,
        chunk_size=chunk_size,
        workers=workers,
    )

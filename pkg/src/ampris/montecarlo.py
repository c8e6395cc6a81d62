"""Seeded Monte Carlo engine: SNR samples, BER, mean rate and energy efficiency.

Iterations are grouped into fixed blocks of ``BLOCK_SIZE``. Block ``b``
draws its channels from a stream keyed by ``(seed, CHANNEL, b)`` and its
symbols/noise from ``(seed, SYMBOLS, b)``, always for the full block, so
iteration ``i`` depends only on ``(seed, i)``. Results therefore do not
depend on the number of worker threads, and a shorter run is a prefix of
a longer one.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import awgn_sep_mpsk
from .channel import draw_envelopes
from .config import ConfigError, SystemConfig
from .link import LinkBatch, active_link_from_sums, passive_snr_batch
from .power import energy_efficiency, pa_power_general, ris_power, total_power_passive

log = logging.getLogger(__name__)

BLOCK_SIZE = 1024
CHANNEL, SYMBOLS = 0, 1


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.PCG64(ss))


def _map_blocks(fn, blocks, threads: int):
    blocks = list(blocks)
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


def _n_blocks(count: int) -> int:
    return -(-count // BLOCK_SIZE)


def link_block(config: SystemConfig, seed: int, block: int) -> LinkBatch:
    """Link state for the ``BLOCK_SIZE`` iterations of one block.

    Co-phased links depend on the channels only through |h_i| and |g_i|,
    so envelopes are drawn instead of complex vectors.
    """
    env = draw_envelopes(config, block_rng(seed, CHANNEL, block), BLOCK_SIZE)
    if config.mode == "active":
        A, B = env.mag_h.sum(axis=1), env.mag_g.sum(axis=1)
        return active_link_from_sums(config.P_t, config.N, config.amp, A, B, config.noise)
    return passive_snr_batch(config.P_t, env.mag_h, env.mag_g, config.noise.sigma2_rx)


def simulate_amplitude_sums(config: SystemConfig, count: int | None = None, seed: int | None = None,
                            threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-iteration (sum|h_i|, sum|g_i|) from the same streams as :func:`simulate_link`.

    Lets several amplifier settings be evaluated on one set of channel draws.
    """
    count = config.n_iterations if count is None else count
    seed = config.seed if seed is None else seed

    def sums(block):
        env = draw_envelopes(config, block_rng(seed, CHANNEL, block), BLOCK_SIZE)
        return env.mag_h.sum(axis=1), env.mag_g.sum(axis=1)

    parts = _map_blocks(sums, range(_n_blocks(count)), threads)
    return np.concatenate([p[0] for p in parts])[:count], np.concatenate([p[1] for p in parts])[:count]


def simulate_link(config: SystemConfig, count: int | None = None, seed: int | None = None,
                  threads: int = 1) -> LinkBatch:
    """Per-iteration SNR, output power and gain for ``count`` iterations."""
    count = config.n_iterations if count is None else count
    seed = config.seed if seed is None else seed
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    parts = _map_blocks(lambda b: link_block(config, seed, b), range(_n_blocks(count)), threads)
    return LinkBatch(
        gamma=np.concatenate([p.gamma for p in parts])[:count],
        P_out=np.concatenate([p.P_out for p in parts])[:count],
        G_opt=np.concatenate([p.G_opt for p in parts])[:count],
        clipped=np.concatenate([p.clipped for p in parts])[:count],
    )


def simulate_snr_samples(config: SystemConfig, count: int | None = None, seed: int | None = None,
                         threads: int = 1) -> np.ndarray:
    """``count`` independent draws of the optimized end-to-end SNR (linear)."""
    return simulate_link(config, count, seed, threads).gamma


# -- BER -------------------------------------------------------------------


@dataclass(frozen=True)
class BerEstimate:
    bit_errors: int
    bits_simulated: int
    draws: int = 0

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_simulated

    @property
    def ci95_halfwidth(self) -> float:
        p = self.ber
        return 1.959963984540054 * math.sqrt(p * (1.0 - p) / self.bits_simulated)

    @property
    def stderr(self) -> float:
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bits_simulated)

    @property
    def reliable(self) -> bool:
        return self.bit_errors >= 100


def _gray(u):
    return u ^ (u >> 1)


def count_bit_errors(snr, M: int, symbols_per_draw: int, rng: np.random.Generator) -> int:
    """Gray-mapped M-PSK over unit-gain AWGN at per-symbol SNR ``snr[i]``.

    Each entry of ``snr`` carries ``symbols_per_draw`` symbols. Detection
    picks the nearest constellation angle. Returns the number of bit errors.
    """
    snr = np.asarray(snr, dtype=float)
    shape = (snr.size, symbols_per_draw)
    amp = np.sqrt(snr)[:, None]
    if M == 2:
        # only the in-phase noise component can flip a BPSK decision
        bits = rng.integers(0, 2, size=shape, dtype=np.int8)
        r = amp * (1 - 2 * bits) + rng.standard_normal(shape) * math.sqrt(0.5)
        return int(np.count_nonzero((r < 0) != bits.astype(bool)))
    u = rng.integers(0, M, size=shape)
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * math.sqrt(0.5)
    r = amp * np.exp(2j * np.pi * u / M) + noise
    u_hat = np.rint(np.angle(r) * (M / (2 * np.pi))).astype(np.int64) % M
    popcount = np.array([bin(i).count("1") for i in range(M)])
    return int(popcount[_gray(u) ^ _gray(u_hat)].sum())


def simulate_ber(config: SystemConfig, seed: int | None = None, threads: int = 1) -> BerEstimate:
    """Monte Carlo BER pooled over channel draws.

    Runs at least ``n_iterations`` draws, then keeps adding blocks until
    ``min_bit_errors`` errors are seen or ``max_ber_draws`` is reached.
    Blocks are inspected in index order so the stopping point does not
    depend on ``threads``.
    """
    seed = config.seed if seed is None else seed
    M, S = config.M, config.symbols_per_draw
    bits_per_block = BLOCK_SIZE * S * int(math.log2(M))
    min_blocks = _n_blocks(min(config.n_iterations, config.max_ber_draws))
    max_blocks = max(_n_blocks(config.max_ber_draws), min_blocks)

    def run(block):
        gamma = link_block(config, seed, block).gamma
        return count_bit_errors(gamma, M, S, block_rng(seed, SYMBOLS, block))

    errors = done = 0

    def finished():
        return done >= min_blocks and errors >= config.min_bit_errors

    while done < max_blocks and not finished():
        stop = min_blocks if done < min_blocks else min(done + max(threads, 1), max_blocks)
        # a wave may overshoot the stopping block; surplus results are discarded
        for e in _map_blocks(run, range(done, stop), threads):
            errors += e
            done += 1
            if finished():
                break

    est = BerEstimate(bit_errors=errors, bits_simulated=done * bits_per_block, draws=done * BLOCK_SIZE)
    if not est.reliable:
        log.warning("BER estimate rests on %d bit errors (< 100); treat as unreliable", errors)
    return est


def conditional_ber(snr, M: int) -> np.ndarray:
    """Per-draw BER approximation SEP(snr) / log2(M) on an AWGN channel."""
    return awgn_sep_mpsk(snr, M) / math.log2(M)


def semi_analytic_ber(config: SystemConfig, seed: int | None = None, threads: int = 1) -> float:
    """Mean of the exact conditional SEP over simulated SNRs, divided by log2(M)."""
    gamma = simulate_snr_samples(config, seed=seed, threads=threads)
    return float(np.mean(conditional_ber(gamma, config.M)))


# -- rate, power and EE ----------------------------------------------------


def mean_rate(config: SystemConfig, seed: int | None = None, threads: int = 1) -> float:
    gamma = simulate_snr_samples(config, seed=seed, threads=threads)
    return float(np.mean(np.log2(1.0 + gamma)))


def total_power_samples(config: SystemConfig, P_out) -> np.ndarray:
    """Per-iteration total consumed power for the configured mode."""
    params = config.power
    if config.mode == "passive":
        total = total_power_passive(config.P_t, config.n_passive, params).total
        return np.full(np.shape(P_out), total)
    if not config.output_limited:
        raise ConfigError("output_limited: power model needs a finite P_max")
    static = params.alpha * config.P_t + params.P_Tx + params.P_Rx
    static += params.panels_counted * ris_power(config.N, params)
    return static + pa_power_general(P_out, config.amp.P_max, params.beta, params.epsilon)


def mean_power(config: SystemConfig, seed: int | None = None, threads: int = 1) -> float:
    batch = simulate_link(config, seed=seed, threads=threads)
    return float(np.mean(total_power_samples(config, batch.P_out)))


def mean_ee(config: SystemConfig, seed: int | None = None, threads: int = 1) -> float:
    """Mean over iterations of rate * BW / total power (bit/J)."""
    batch = simulate_link(config, seed=seed, threads=threads)
    totals = total_power_samples(config, batch.P_out)
    return float(np.mean(energy_efficiency(batch.rate, config.BW_Hz, totals)))

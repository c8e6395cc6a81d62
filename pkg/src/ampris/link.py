"""End-to-end SNR of the amplifying RIS link and of the passive benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AmplifierSpec:
    """Inter-RIS amplifier limits, all linear (gain, watts, noise factor)."""

    G_max: float
    P_max: float
    F: float

    def __post_init__(self):
        if not self.G_max >= 1:
            raise ValueError(f"G_max must be >= 1, got {self.G_max}")
        if not self.P_max > 0:
            raise ValueError(f"P_max must be positive, got {self.P_max}")
        if not self.F >= 1:
            raise ValueError(f"noise figure must be >= 1 (linear), got {self.F}")


@dataclass(frozen=True)
class NoiseSpec:
    sigma2_tot: float  # W, amplifier input
    sigma2_rx: float  # W, receiver

    def __post_init__(self):
        if not (self.sigma2_tot > 0 and self.sigma2_rx > 0):
            raise ValueError("noise powers must be positive")


@dataclass(frozen=True)
class LinkSample:
    A: float
    B: float
    P_in: float
    G_opt: float
    P_out: float
    gamma: float
    rate: float
    clipped: bool


def achievable_rate(gamma):
    """Shannon rate log2(1 + gamma) in bit/s/Hz."""
    if np.ndim(gamma):
        return np.log2(1.0 + np.asarray(gamma, dtype=float))
    return math.log2(1.0 + gamma)


def optimal_phases(channel) -> np.ndarray:
    """Co-phasing coefficients exp(-j*angle(c_i)); zero entries get phase 0."""
    c = np.asarray(channel, dtype=complex)
    if c.size == 0:
        raise ValueError("channel vector must be non-empty")
    if not np.all(np.isfinite(c)):
        raise ValueError("channel vector must be finite")
    # np.angle(0) == 0, so zero entries map to a unit coefficient
    return np.exp(-1j * np.angle(c))


def input_power(P_t: float, h) -> float:
    """Amplifier input power P_t * (sum |h_i|)^2 under aligned RIS1 phases."""
    return P_t * float(np.sum(np.abs(h))) ** 2


def optimal_gain(P_in: float, amp: AmplifierSpec) -> tuple[float, bool]:
    """Gain that drives the output to P_max, capped at G_max.

    Returns ``(G_opt, clipped)`` where ``clipped`` means the G_max cap binds.
    With zero input the cap is returned.
    """
    if P_in < 0:
        raise ValueError(f"input power must be non-negative, got {P_in}")
    if P_in == 0:
        return amp.G_max, True
    g_bar = amp.P_max / P_in
    if amp.G_max < g_bar:
        return amp.G_max, True
    return g_bar, False


def active_snr_aligned(P_t, G, N, F, A, B, noise: NoiseSpec):
    """Received SNR with both RIS panels co-phased (|phi^T h| = A, |theta^T g| = B)."""
    B2 = B * B
    signal = P_t * (G / N) * (A * A) * B2
    return signal / ((G * F / N) * B2 * noise.sigma2_tot + noise.sigma2_rx)


def active_snr(P_t, G, N, F, phi, h, theta, g, noise: NoiseSpec) -> float:
    """Received SNR for arbitrary phase vectors ``phi`` (RIS1) and ``theta`` (RIS2)."""
    a = abs(np.dot(phi, h))
    b = abs(np.dot(theta, g))
    return active_snr_aligned(P_t, G, N, F, a, b, noise)


def max_active_snr(P_t: float, N: int, amp: AmplifierSpec, h, g, noise: NoiseSpec) -> LinkSample:
    """Optimize phases and gain for one realization and report the link state."""
    h = np.asarray(h)
    g = np.asarray(g)
    if h.shape != (N,) or g.shape != (N,):
        raise ValueError(f"channel vectors must have length N={N}, got {h.shape} and {g.shape}")
    A = float(np.sum(np.abs(h)))
    B = float(np.sum(np.abs(g)))
    P_in = P_t * A * A
    G, clipped = optimal_gain(P_in, amp)
    gamma = float(active_snr_aligned(P_t, G, N, amp.F, A, B, noise))
    return LinkSample(
        A=A, B=B, P_in=P_in, G_opt=G, P_out=G * P_in, gamma=gamma,
        rate=math.log2(1.0 + gamma), clipped=clipped,
    )


def max_active_snr_closed_form(P_t, N, amp: AmplifierSpec, A, B, noise: NoiseSpec):
    """Maximized SNR when the output-power constraint binds (G = P_max / P_in).

    Only valid outside the G_max-clipped regime.
    """
    A2 = A * A
    B2 = B * B
    num = P_t * (amp.P_max / N) * A2 * B2
    den = (amp.P_max * amp.F / N) * B2 * noise.sigma2_tot + P_t * A2 * noise.sigma2_rx
    return num / den


def passive_snr(P_t: float, h_p, g_p, sigma2_rx: float) -> tuple[float, float]:
    """SNR and rate of the single passive RIS with co-phased elements."""
    h_p = np.asarray(h_p)
    g_p = np.asarray(g_p)
    if h_p.shape != g_p.shape:
        raise ValueError(f"channel lengths differ: {h_p.shape} vs {g_p.shape}")
    if P_t < 0:
        raise ValueError(f"P_t must be non-negative, got {P_t}")
    if not sigma2_rx > 0:
        raise ValueError("sigma2_rx must be positive")
    c = float(np.sum(np.abs(h_p) * np.abs(g_p)))
    gamma = P_t * c * c / sigma2_rx
    return gamma, math.log2(1.0 + gamma)


@dataclass(frozen=True)
class LinkBatch:
    """Vectorized counterpart of :class:`LinkSample` (one entry per realization)."""

    gamma: np.ndarray
    P_out: np.ndarray
    G_opt: np.ndarray
    clipped: np.ndarray

    @property
    def rate(self) -> np.ndarray:
        return np.log2(1.0 + self.gamma)


def max_active_snr_batch(P_t, N, amp: AmplifierSpec, h, g, noise: NoiseSpec) -> LinkBatch:
    """Row-wise :func:`max_active_snr` for ``h``, ``g`` of shape (count, N)."""
    return active_link_from_sums(P_t, N, amp, np.abs(h).sum(axis=-1), np.abs(g).sum(axis=-1), noise)


def active_link_from_sums(P_t, N, amp: AmplifierSpec, A, B, noise: NoiseSpec) -> LinkBatch:
    """Optimized link state from amplitude sums A = sum|h_i|, B = sum|g_i| (arrays)."""
    P_in = P_t * A * A
    with np.errstate(divide="ignore"):
        g_bar = np.where(P_in > 0, amp.P_max / np.where(P_in > 0, P_in, 1.0), np.inf)
    clipped = amp.G_max < g_bar
    G = np.where(clipped, amp.G_max, g_bar)
    gamma = active_snr_aligned(P_t, G, N, amp.F, A, B, noise)
    return LinkBatch(gamma=gamma, P_out=G * P_in, G_opt=G, clipped=clipped)


def passive_snr_batch(P_t, h_p, g_p, sigma2_rx) -> LinkBatch:
    c = (np.abs(h_p) * np.abs(g_p)).sum(axis=-1)
    gamma = P_t * c * c / sigma2_rx
    zeros = np.zeros_like(gamma)
    return LinkBatch(gamma=gamma, P_out=zeros, G_opt=zeros, clipped=np.zeros(gamma.shape, dtype=bool))

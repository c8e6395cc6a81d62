"""Geometry, InH path loss, LOS probability and Rician/Rayleigh fading draws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOS_MODES = ("probabilistic", "forced-LOS", "forced-NLOS")


@dataclass(frozen=True)
class Geometry:
    """Tx/RIS/Rx placement in meters.

    ``d_v`` is the vertical Tx-RIS offset, ``d_h`` the horizontal Tx-RIS
    offset and ``d`` the Tx-Rx distance.
    """

    d_v: float = 5.0
    d_h: float = 5.0
    d: float = 50.0

    def __post_init__(self):
        for name in ("d_v", "d_h", "d"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if self.d_h > self.d:
            raise ValueError(f"d_h ({self.d_h}) must not exceed d ({self.d})")


@dataclass(frozen=True)
class FadingParams:
    """Linear Rician factors, carrier frequency in GHz and per-link LOS modes."""

    K1: float = 5.0
    K2: float = 5.0
    f_c: float = 28.0
    los_mode_h: str = "probabilistic"
    los_mode_g: str = "probabilistic"

    def __post_init__(self):
        if not (self.K1 >= 0 and self.K2 >= 0):
            raise ValueError("Rician factors must be non-negative")
        if not (self.f_c > 0 and math.isfinite(self.f_c)):
            raise ValueError(f"f_c must be positive, got {self.f_c}")
        for mode in (self.los_mode_h, self.los_mode_g):
            if mode not in LOS_MODES:
                raise ValueError(f"unknown LOS mode {mode!r}; expected one of {LOS_MODES}")


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    g: np.ndarray
    los_h: bool
    los_g: bool
    lambda_h: float
    lambda_g: float


def link_distances(geometry: Geometry) -> tuple[float, float]:
    """Return (Tx-RIS1 distance, RIS2-Rx distance) in meters."""
    d_v, d_h, d = geometry.d_v, geometry.d_h, geometry.d
    for v in (d_v, d_h, d):
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"distances must be finite and non-negative, got {v}")
    return math.hypot(d_v, d_h), math.hypot(d_v, d - d_h)


def path_loss_db(d_n: float, f_c: float, los: bool) -> float:
    """3GPP indoor-hotspot path loss in dB (distance in m, carrier in GHz)."""
    if not d_n > 0:
        raise ValueError(f"distance must be positive, got {d_n}")
    if not f_c > 0:
        raise ValueError(f"carrier frequency must be positive, got {f_c}")
    freq_term = 20.0 * math.log10(f_c)
    pl_los = 32.4 + 17.3 * math.log10(d_n) + freq_term
    if los:
        return pl_los
    return max(pl_los, 32.4 + 31.9 * math.log10(d_n) + freq_term)


def los_probability(d_n: float) -> float:
    """InH line-of-sight probability.

    The branches are used exactly as written, including the jump at 49 m.
    """
    if not math.isfinite(d_n):
        raise ValueError(f"distance must be finite, got {d_n}")
    if d_n <= 0:
        raise ValueError(f"distance must be positive, got {d_n}")
    if d_n <= 5.0:
        return 1.0
    if d_n <= 49.0:
        return math.exp(-(d_n - 5.0) / 70.8)
    return 0.54 * math.exp(-(d_n - 49.0) / 211.7)


def draw_fading(shape, K, lambda_db, rng: np.random.Generator) -> np.ndarray:
    """Draw a complex fading array of the given shape.

    ``K`` and ``lambda_db`` broadcast against the leading axes of ``shape``
    (one value per row when drawing a block of realizations). The LOS
    component has unit modulus and an independent uniform phase per entry.
    The NLOS component is CN(0, 1).
    """
    K = np.asarray(K, dtype=float)
    lam_db = np.asarray(lambda_db, dtype=float)
    if np.any(K < 0):
        raise ValueError("Rician factor must be non-negative")
    if not np.all(np.isfinite(lam_db)):
        raise ValueError("path loss must be finite")
    # fixed draw order: LOS phases, then NLOS real, then NLOS imaginary
    omega = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    nlos_re = rng.standard_normal(shape)
    nlos_im = rng.standard_normal(shape)
    if K.ndim:
        K = K[..., np.newaxis]
        lam_db = lam_db[..., np.newaxis]
    scale = np.sqrt(10.0 ** (-lam_db / 10.0))
    los_amp = scale * np.sqrt(K / (K + 1.0))
    nlos_amp = scale * np.sqrt(0.5 / (K + 1.0))
    out = np.empty(np.broadcast_shapes(np.shape(omega), np.shape(los_amp)), dtype=complex)
    out.real = los_amp * np.cos(omega) + nlos_amp * nlos_re
    out.imag = los_amp * np.sin(omega) + nlos_amp * nlos_im
    return out


def draw_channel_vector(n: int, K: float, lambda_db: float, rng: np.random.Generator) -> np.ndarray:
    """One length-``n`` channel vector with Rician factor ``K`` and path loss ``lambda_db``."""
    if int(n) != n or n < 1:
        raise ValueError(f"element count must be a positive integer, got {n}")
    if K < 0:
        raise ValueError(f"Rician factor must be non-negative, got {K}")
    return draw_fading((int(n),), K, lambda_db, rng)


def _los_states(mode: str, p_los: float, count: int, rng: np.random.Generator) -> np.ndarray:
    # one uniform per realization is consumed in every mode so forced and
    # probabilistic runs share the rest of the stream
    u = rng.random(count)
    if mode == "forced-LOS":
        return np.ones(count, dtype=bool)
    if mode == "forced-NLOS":
        return np.zeros(count, dtype=bool)
    return u < p_los


@dataclass(frozen=True)
class RealizationBlock:
    """A block of independent channel realizations, one per row."""

    h: np.ndarray
    g: np.ndarray
    los_h: np.ndarray
    los_g: np.ndarray
    lambda_h_db: np.ndarray
    lambda_g_db: np.ndarray

    def __len__(self):
        return self.h.shape[0]

    def realization(self, i: int) -> ChannelRealization:
        return ChannelRealization(
            h=self.h[i],
            g=self.g[i],
            los_h=bool(self.los_h[i]),
            los_g=bool(self.los_g[i]),
            lambda_h=10.0 ** (self.lambda_h_db[i] / 10.0),
            lambda_g=10.0 ** (self.lambda_g_db[i] / 10.0),
        )


def draw_realizations(config, rng: np.random.Generator, count: int) -> RealizationBlock:
    """Draw ``count`` realizations for ``config`` (a SystemConfig).

    LOS states are drawn once per realization per link. A link in NLOS
    uses K = 0 and the NLOS path loss. Vector length is the active element
    count or the passive benchmark's element count depending on the mode.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    fading = config.fading
    d1, d2 = link_distances(config.geometry)
    if d1 <= 0 or d2 <= 0:
        raise ValueError(f"degenerate geometry: link distances ({d1}, {d2}) must be positive")
    n = config.element_count

    los_h = _los_states(fading.los_mode_h, los_probability(d1), count, rng)
    los_g = _los_states(fading.los_mode_g, los_probability(d2), count, rng)
    pl_h = np.where(los_h, path_loss_db(d1, fading.f_c, True), path_loss_db(d1, fading.f_c, False))
    pl_g = np.where(los_g, path_loss_db(d2, fading.f_c, True), path_loss_db(d2, fading.f_c, False))
    K_h = np.where(los_h, fading.K1, 0.0)
    K_g = np.where(los_g, fading.K2, 0.0)

    h = draw_fading((count, n), K_h, pl_h, rng)
    g = draw_fading((count, n), K_g, pl_g, rng)
    return RealizationBlock(h=h, g=g, los_h=los_h, los_g=los_g, lambda_h_db=pl_h, lambda_g_db=pl_g)


@dataclass(frozen=True)
class EnvelopeBlock:
    """Per-element channel magnitudes |h_i|, |g_i| for a block of realizations."""

    mag_h: np.ndarray
    mag_g: np.ndarray
    los_h: np.ndarray
    los_g: np.ndarray
    lambda_h_db: np.ndarray
    lambda_g_db: np.ndarray


def draw_envelope(shape, K, lambda_db, rng: np.random.Generator) -> np.ndarray:
    """Magnitudes with the same law as ``abs(draw_fading(shape, K, lambda_db, rng))``.

    CN(0, 1) is circularly symmetric, so rotating the unit-modulus LOS term
    onto the real axis leaves the envelope distribution unchanged and the
    phase draw can be skipped. Draws the real then the imaginary NLOS part.
    """
    K = np.asarray(K, dtype=float)
    lam_db = np.asarray(lambda_db, dtype=float)
    if np.any(K < 0):
        raise ValueError("Rician factor must be non-negative")
    if not np.all(np.isfinite(lam_db)):
        raise ValueError("path loss must be finite")
    if K.ndim:
        K = K[..., np.newaxis]
        lam_db = lam_db[..., np.newaxis]
    scale = np.sqrt(10.0 ** (-lam_db / 10.0))
    los_amp = scale * np.sqrt(K / (K + 1.0))
    nlos_amp = scale * np.sqrt(0.5 / (K + 1.0))
    # in-place arithmetic: this is the hot loop of every Monte Carlo run
    re = rng.standard_normal(shape)
    re *= nlos_amp
    re += los_amp
    re *= re
    im = rng.standard_normal(shape)
    im *= nlos_amp
    im *= im
    re += im
    return np.sqrt(re, out=re)


def draw_envelopes(config, rng: np.random.Generator, count: int) -> EnvelopeBlock:
    """Envelope-only counterpart of :func:`draw_realizations`.

    LOS states and path losses are drawn exactly as there. Only the
    magnitudes are produced, which is all co-phased links depend on.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    fading = config.fading
    d1, d2 = link_distances(config.geometry)
    if d1 <= 0 or d2 <= 0:
        raise ValueError(f"degenerate geometry: link distances ({d1}, {d2}) must be positive")
    n = config.element_count

    los_h = _los_states(fading.los_mode_h, los_probability(d1), count, rng)
    los_g = _los_states(fading.los_mode_g, los_probability(d2), count, rng)
    pl_h = np.where(los_h, path_loss_db(d1, fading.f_c, True), path_loss_db(d1, fading.f_c, False))
    pl_g = np.where(los_g, path_loss_db(d2, fading.f_c, True), path_loss_db(d2, fading.f_c, False))
    mag_h = draw_envelope((count, n), np.where(los_h, fading.K1, 0.0), pl_h, rng)
    mag_g = draw_envelope((count, n), np.where(los_g, fading.K2, 0.0), pl_g, rng)
    return EnvelopeBlock(mag_h=mag_h, mag_g=mag_g, los_h=los_h, los_g=los_g, lambda_h_db=pl_h, lambda_g_db=pl_g)


def draw_realization(config, rng: np.random.Generator) -> ChannelRealization:
    """Single-realization form of :func:`draw_realizations`."""
    return draw_realizations(config, rng, 1).realization(0)

"""Power consumption of the active and passive designs, and bit-per-joule efficiency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerParams:
    """Consumption model parameters, linear SI units.

    ``alpha`` and ``beta`` are the inverse peak efficiencies of the transmit
    PA and of the inter-RIS PA. ``panels_counted`` selects whether the
    active design's control power counts one RIS panel (as the model is
    usually written) or both.
    """

    alpha: float = 1.2
    beta: float = 1.2
    P_n_b: float = 7.8e-3
    b: int = 6
    P_Tx: float = 10.0 ** (9 / 10)
    P_Rx: float = 10.0 ** (10 / 10) * 1e-3
    epsilon: float = 0.5
    panels_counted: int = 1

    def __post_init__(self):
        if not (self.alpha >= 1 and self.beta >= 1):
            raise ValueError("alpha and beta are inverse efficiencies and must be >= 1")
        if min(self.P_n_b, self.P_Tx, self.P_Rx) < 0:
            raise ValueError("static powers must be non-negative")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.panels_counted not in (1, 2):
            raise ValueError(f"panels_counted must be 1 or 2, got {self.panels_counted}")


@dataclass(frozen=True)
class PowerBreakdown:
    transmit_pa: float
    static_tx: float
    static_rx: float
    ris_control: float
    inter_ris_pa: float

    @property
    def total(self) -> float:
        return self.transmit_pa + self.static_tx + self.static_rx + self.ris_control + self.inter_ris_pa


def pa_power_general(P_out, P_max, beta, epsilon=0.5):
    """Consumed PA power for efficiency (1/beta) * (P_out/P_max)^epsilon."""
    P_out = np.asarray(P_out, dtype=float)
    if np.any(P_out < 0) or np.any(P_out > P_max * (1 + 1e-12)):
        raise ValueError("P_out must lie in [0, P_max] (linear region)")
    out = beta * P_out ** (1.0 - epsilon) * P_max ** epsilon
    return out if out.ndim else float(out)


def pa_power(P_out, P_max, beta):
    """beta * sqrt(P_out * P_max)."""
    P_out = np.asarray(P_out, dtype=float)
    # relative slack for P_out = (P_max / P_in) * P_in round-off
    if np.any(P_out < 0) or np.any(P_out > P_max * (1 + 1e-12)):
        raise ValueError("P_out must lie in [0, P_max] (linear region)")
    out = beta * np.sqrt(P_out * P_max)
    return out if out.ndim else float(out)


def ris_power(N: int, params: PowerParams) -> float:
    if N < 0:
        raise ValueError(f"element count must be non-negative, got {N}")
    return N * params.P_n_b


def total_power_active(P_t: float, P_out: float, P_max: float, N: int, params: PowerParams) -> PowerBreakdown:
    if params.epsilon == 0.5:
        inter = pa_power(P_out, P_max, params.beta)
    else:
        inter = pa_power_general(P_out, P_max, params.beta, params.epsilon)
    return PowerBreakdown(
        transmit_pa=params.alpha * P_t,
        static_tx=params.P_Tx,
        static_rx=params.P_Rx,
        ris_control=params.panels_counted * ris_power(N, params),
        inter_ris_pa=inter,
    )


def total_power_passive(P_t: float, n_elements: int, params: PowerParams) -> PowerBreakdown:
    return PowerBreakdown(
        transmit_pa=params.alpha * P_t,
        static_tx=params.P_Tx,
        static_rx=params.P_Rx,
        ris_control=ris_power(n_elements, params),
        inter_ris_pa=0.0,
    )


def energy_efficiency(rate, BW: float, total):
    """Bits per joule: rate [bit/s/Hz] * BW [Hz] / total power [W]."""
    total = np.asarray(total, dtype=float)
    if np.any(total <= 0):
        raise ValueError("total power must be positive")
    out = np.asarray(rate, dtype=float) * BW / total
    return out if out.ndim else float(out)

"""Gamma fitting of SNR samples and MGF-based M-PSK error probabilities."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

_QUAD_ABS_TOL = 1e-12
_QUAD_MAX_INTERVALS = 10_000


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class GammaFit:
    k: float  # shape
    nu: float  # scale
    n_samples: int
    log_likelihood: float

    @property
    def mean(self) -> float:
        return self.k * self.nu


def fit_gamma_mle(samples, *, rtol: float = 1e-10, max_iter: int = 100, min_samples: int = 100) -> GammaFit:
    """Maximum-likelihood Gamma fit.

    Newton iteration on log(k) - digamma(k) = log(mean) - mean(log x),
    started from the moment estimate mean^2 / var. The scale follows as
    mean / k, so k * nu reproduces the sample mean.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < max(min_samples, 2):
        raise ValueError(f"need at least {max(min_samples, 2)} samples, got {x.size}")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("Gamma fit requires finite, strictly positive samples")
    mean = x.mean()
    var = x.var()
    # normalizing by the mean keeps the log statistic well conditioned for large k
    s = -np.mean(np.log(x / mean))
    if var == 0 or s <= 0:
        raise ValueError("samples have zero spread; Gamma shape is undefined")

    k = mean * mean / var
    for _ in range(max_iter):
        f = math.log(k) - special.digamma(k) - s
        df = 1.0 / k - special.polygamma(1, k)
        step = f / df
        k_new = k - step
        if k_new <= 0:
            # Newton overshoot; fall back to halving towards zero
            k_new = k / 2.0
        converged = abs(k_new - k) < rtol * k_new
        k = k_new
        if converged:
            break
    else:
        raise RuntimeError(f"Gamma shape iteration did not converge (k={k})")

    nu = mean / k
    n = x.size
    ll = (k - 1.0) * np.sum(np.log(x)) - np.sum(x) / nu - n * (k * math.log(nu) + special.gammaln(k))
    return GammaFit(k=float(k), nu=float(nu), n_samples=n, log_likelihood=float(ll))


def gamma_pdf(x, k: float, nu: float):
    """Gamma density with shape ``k`` and scale ``nu``, evaluated in log space."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logp = special.xlogy(k - 1.0, x) - x / nu - k * math.log(nu) - special.gammaln(k)
    out = np.exp(logp)
    return out if out.ndim else float(out)


def gamma_mgf(s: float, k: float, nu: float) -> float:
    """(1 - nu*s)^(-k), defined for s < 1/nu."""
    if not nu * s < 1.0:
        raise ValueError(f"MGF diverges for s >= 1/nu (s={s}, nu={nu})")
    return math.exp(-k * math.log1p(-nu * s))


def _check_order(M: int) -> None:
    if int(M) != M or M < 2 or (int(M) & (int(M) - 1)):
        raise ValueError(f"constellation order must be a power of two >= 2, got {M}")


def _quad(f, a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, info, *msg = integrate.quad(
            f, a, b, epsabs=_QUAD_ABS_TOL, epsrel=0.0, limit=_QUAD_MAX_INTERVALS, full_output=1
        )
    if msg or abserr > _QUAD_ABS_TOL:
        detail = msg[0] if msg else "error estimate above tolerance"
        raise QuadratureError(f"quadrature failed (error estimate {abserr:.3g}): {detail}")
    return value


def sep_mpsk(k: float, nu: float, M: int) -> float:
    """Average M-PSK symbol error probability for Gamma(k, nu) distributed SNR.

    Evaluates (1/pi) * int_0^{(M-1)pi/M} MGF(-sin^2(pi/M) / sin^2 x) dx by
    adaptive Gauss-Kronrod quadrature.
    """
    _check_order(M)
    if not (k > 0 and nu > 0):
        raise ValueError(f"Gamma parameters must be positive, got k={k}, nu={nu}")
    c = nu * math.sin(math.pi / M) ** 2

    def integrand(x):
        sx = math.sin(x)
        if sx == 0.0:
            return 0.0
        return math.exp(-k * math.log1p(c / (sx * sx)))

    upper = (M - 1) * math.pi / M
    if M > 2:
        # the integrand peaks at pi/2; splitting there keeps both halves smooth
        p = _quad(integrand, 0.0, math.pi / 2) + _quad(integrand, math.pi / 2, upper)
    else:
        p = _quad(integrand, 0.0, upper)
    return min(max(p / math.pi, 0.0), (M - 1) / M)


def bep_bpsk(k: float, nu: float) -> float:
    """BPSK bit error probability (1/pi) int_0^{pi/2} (1 + nu / sin^2 x)^(-k) dx."""
    if not (k > 0 and nu > 0):
        raise ValueError(f"Gamma parameters must be positive, got k={k}, nu={nu}")

    def integrand(x):
        s2 = math.sin(x) ** 2
        return (s2 / (s2 + nu)) ** k

    return _quad(integrand, 0.0, math.pi / 2) / math.pi


def bep(k: float, nu: float, M: int) -> float:
    """Bit error probability approximated as SEP / log2(M) (exact for BPSK)."""
    return sep_mpsk(k, nu, M) / math.log2(M)


def _gauss_legendre(breaks, order):
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


# Near x = 0 the integrand switches from 0 to ~1 over a width of about
# sqrt(snr); geometric panels resolve that edge at every SNR scale.
_LOW_NODES, _LOW_WEIGHTS = _gauss_legendre(np.r_[0.0, (math.pi / 2) * 0.5 ** np.arange(40, -1, -1)], 20)


def awgn_sep_mpsk(snr, M: int):
    """Conditional M-PSK symbol error probability at instantaneous SNR ``snr``.

    Uses closed forms for M = 2 and 4 and fixed-order composite
    Gauss-Legendre quadrature of
    (1/pi) int_0^{(M-1)pi/M} exp(-snr sin^2(pi/M) / sin^2 x) dx
    otherwise. Vectorized over ``snr``.
    """
    _check_order(M)
    snr = np.asarray(snr, dtype=float)
    if M == 2:
        return 0.5 * special.erfc(np.sqrt(snr))
    if M == 4:
        q = 0.5 * special.erfc(np.sqrt(snr / 2.0))
        return 2.0 * q - q * q
    c = math.sin(math.pi / M) ** 2
    # the integrand peaks at pi/2; above it sin(x) stays >= sin(pi/M) and one panel suffices
    hi_nodes, hi_weights = _gauss_legendre([math.pi / 2, (M - 1) * math.pi / M], 48)
    out = np.exp(-np.multiply.outer(snr, c / np.sin(_LOW_NODES) ** 2)) @ _LOW_WEIGHTS
    out = out + np.exp(-np.multiply.outer(snr, c / np.sin(hi_nodes) ** 2)) @ hi_weights
    return out / math.pi

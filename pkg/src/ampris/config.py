"""Scenario configuration and the sectioned key-value config file format.

Config files look like::

    # comments start with '#' or ';'
    P_t_dBm = 20

    [amplifier]
    P_max_dBm = 10
    G_max_dB = 30

Keys may appear before any section header or under the section they
belong to. Every absent key takes the default listed in ``FIELDS``.
dB/dBm values are converted to linear SI units by the properties of
:class:`SystemConfig` and nowhere else.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .channel import LOS_MODES, FadingParams, Geometry
from .link import AmplifierSpec, NoiseSpec
from .power import PowerParams

MODES = ("active", "passive")


class ConfigError(ValueError):
    """Invalid configuration; the message names the key (and line, for files)."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    # geometry [m]
    d_v_m: float = 5.0
    d_h_m: float = 5.0
    d_m: float = 50.0
    # fading
    K1: float = 5.0
    K2: float = 5.0
    f_c_GHz: float = 28.0
    los_mode_h: str = "probabilistic"
    los_mode_g: str = "probabilistic"
    # system
    N: int = 128
    passive_elements: int | None = None
    mode: str = "active"
    P_t_dBm: float = 30.0
    BW_Hz: float = 180e3
    M: int = 2
    n_iterations: int = 100_000
    seed: int = 0
    # amplifier
    P_max_dBm: float = 30.0
    G_max_dB: float = 30.0
    F_dB: float = 5.0
    output_limited: bool = True
    # noise
    sigma2_tot_dBm: float = -100.0
    sigma2_rx_dBm: float = -100.0
    # power model
    alpha: float = 1.2
    beta: float = 1.2
    P_n_mW: float = 7.8
    phase_bits: int = 6
    P_Tx_dBW: float = 9.0
    P_Rx_dBm: float = 10.0
    epsilon: float = 0.5
    panels_counted: int = 1
    # BER simulation
    symbols_per_draw: int = 100
    min_bit_errors: int = 200
    max_ber_draws: int = 200_000

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name}: value must be finite, got {v}")
        _require(self.N >= 1, "N", "element count must be >= 1")
        _require(self.passive_elements is None or self.passive_elements >= 1,
                 "passive_elements", "element count must be >= 1")
        _require(self.mode in MODES, "mode", f"expected one of {MODES}")
        _require(self.los_mode_h in LOS_MODES, "los_mode_h", f"expected one of {LOS_MODES}")
        _require(self.los_mode_g in LOS_MODES, "los_mode_g", f"expected one of {LOS_MODES}")
        _require(self.n_iterations >= 1, "n_iterations", "must be >= 1")
        _require(self.M >= 2 and self.M & (self.M - 1) == 0, "M", "must be a power of two >= 2")
        _require(self.BW_Hz > 0, "BW_Hz", "must be positive")
        _require(self.G_max_dB >= 0, "G_max_dB", "must be >= 0 dB")
        _require(self.F_dB >= 0, "F_dB", "must be >= 0 dB")
        _require(self.K1 >= 0, "K1", "must be non-negative")
        _require(self.K2 >= 0, "K2", "must be non-negative")
        _require(self.f_c_GHz > 0, "f_c_GHz", "must be positive")
        _require(self.symbols_per_draw >= 1, "symbols_per_draw", "must be >= 1")
        _require(self.min_bit_errors >= 0, "min_bit_errors", "must be >= 0")
        _require(self.max_ber_draws >= 1, "max_ber_draws", "must be >= 1")
        _require(0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        try:
            self.geometry, self.fading, self.power
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    # linear views ---------------------------------------------------------

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.d_v_m, self.d_h_m, self.d_m)

    @property
    def fading(self) -> FadingParams:
        return FadingParams(self.K1, self.K2, self.f_c_GHz, self.los_mode_h, self.los_mode_g)

    @property
    def P_t(self) -> float:
        return dbm_to_watt(self.P_t_dBm)

    @property
    def amp(self) -> AmplifierSpec:
        P_max = dbm_to_watt(self.P_max_dBm) if self.output_limited else math.inf
        return AmplifierSpec(G_max=db_to_linear(self.G_max_dB), P_max=P_max, F=db_to_linear(self.F_dB))

    @property
    def noise(self) -> NoiseSpec:
        return NoiseSpec(dbm_to_watt(self.sigma2_tot_dBm), dbm_to_watt(self.sigma2_rx_dBm))

    @property
    def power(self) -> PowerParams:
        return PowerParams(
            alpha=self.alpha,
            beta=self.beta,
            P_n_b=self.P_n_mW * 1e-3,
            b=self.phase_bits,
            P_Tx=db_to_linear(self.P_Tx_dBW),
            P_Rx=dbm_to_watt(self.P_Rx_dBm),
            epsilon=self.epsilon,
            panels_counted=self.panels_counted,
        )

    @property
    def n_passive(self) -> int:
        return self.passive_elements if self.passive_elements is not None else 2 * self.N

    @property
    def element_count(self) -> int:
        """Channel vector length for the configured mode."""
        return self.N if self.mode == "active" else self.n_passive

    def replace(self, **changes) -> SystemConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _require(ok: bool, key: str, message: str) -> None:
    if not ok:
        raise ConfigError(f"{key}: {message}")


SECTIONS = {
    "geometry": ("d_v_m", "d_h_m", "d_m"),
    "fading": ("K1", "K2", "f_c_GHz", "los_mode", "los_mode_h", "los_mode_g"),
    "system": ("N", "passive_elements", "mode", "P_t_dBm", "BW_Hz", "M", "n_iterations", "seed"),
    "amplifier": ("P_max_dBm", "G_max_dB", "F_dB", "output_limited"),
    "noise": ("sigma2_tot_dBm", "sigma2_rx_dBm", "noise_dBm"),
    "power": ("alpha", "beta", "P_n_mW", "phase_bits", "P_Tx_dBW", "P_Rx_dBm", "epsilon", "panels_counted"),
    "ber": ("symbols_per_draw", "min_bit_errors", "max_ber_draws"),
}
_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SystemConfig)}
# shorthand keys that set two fields at once
_ALIASES = {"los_mode": ("los_mode_h", "los_mode_g"), "noise_dBm": ("sigma2_tot_dBm", "sigma2_rx_dBm")}


def _convert(key: str, raw: str):
    target = _ALIASES.get(key, (key,))[0]
    kind = _FIELD_TYPES[target]
    if "int" in kind:
        if kind.endswith("None") and raw.lower() in ("none", ""):
            return None
        value = float(raw)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    return raw.strip("\"'")


def parse_config_text(text: str, source: str = "<string>") -> SystemConfig:
    """Parse config text into a validated :class:`SystemConfig`."""
    values: dict = {}
    where: dict = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].split(";", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"{source}:{lineno}: malformed section header {stripped!r}")
            section = stripped[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        allowed = SECTIONS[section] if section else tuple(k for keys in SECTIONS.values() for k in keys)
        if key not in allowed:
            scope = f"section [{section}]" if section else "config"
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in {scope}")
        try:
            value = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
        for field in _ALIASES.get(key, (key,)):
            values[field] = value
            where[field] = lineno
    try:
        return SystemConfig(**values)
    except ConfigError as exc:
        key = str(exc).split(":", 1)[0]
        if key in where:
            raise ConfigError(f"{source}:{where[key]}: {exc}") from None
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from None
    return parse_config_text(text, source=str(path))

"""Parameter sweeps, figure/table presets, result tables and their writers."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import montecarlo as mc
from .analysis import bep, fit_gamma_mle
from .config import SystemConfig
from .link import active_link_from_sums

log = logging.getLogger(__name__)

SWEEP_VARIABLES = {"P_t_dBm": "P_t_dBm", "P_max_dBm": "P_max_dBm", "N": "N", "d_h_m": "d_h_m"}
METRICS = ("rate", "ber", "ee", "ptot", "gamma_fit")
ROW_STREAM = 2

# fixed LOS states under which the fitted Gamma parameters are tabulated:
# Tx-RIS1 in LOS (Rician), RIS2-Rx in NLOS (Rayleigh)
GAMMA_TABLE_SCENARIO = {"los_mode_h": "forced-LOS", "los_mode_g": "forced-NLOS"}


class SweepError(RuntimeError):
    pass


def row_seed(seed: int, row: int) -> int:
    """Seed for sweep row ``row``, derived from ``(seed, row)``."""
    ss = np.random.SeedSequence(seed, spawn_key=(ROW_STREAM, row))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def add(self, **row):
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append(row)

    def column(self, name):
        return [r.get(name) for r in self.rows]


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    metrics: tuple
    base: SystemConfig

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"cannot sweep {self.variable!r}; choose from {sorted(SWEEP_VARIABLES)}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if not self.metrics:
            raise ValueError("sweep needs at least one metric")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad:
            raise ValueError(f"unknown metrics {bad}; choose from {METRICS}")


def _cast(variable, value):
    return int(value) if variable == "N" else float(value)


def evaluate_metric(config: SystemConfig, metric: str, seed: int, threads: int = 1) -> dict:
    """One metric at one configuration, as result-row fields."""
    if metric == "rate":
        return {"estimate": mc.mean_rate(config, seed, threads)}
    if metric == "ee":
        return {"estimate": mc.mean_ee(config, seed, threads)}
    if metric == "ptot":
        return {"estimate": mc.mean_power(config, seed, threads)}
    if metric == "ber":
        est = mc.simulate_ber(config, seed, threads)
        return {"estimate": est.ber, "ci95": est.ci95_halfwidth, "iterations": est.draws}
    if metric == "gamma_fit":
        fit = fit_gamma_mle(mc.simulate_snr_samples(config, seed=seed, threads=threads))
        return {"estimate": fit.mean, "k": fit.k, "nu": fit.nu}
    raise ValueError(f"unknown metric {metric!r}")


def _manifest(base: SystemConfig, seed: int, threads: int, **extra) -> dict:
    return {
        "tool": "ampris",
        "version": __version__,
        "config": base.to_dict(),
        "seed": seed,
        "block_size": mc.BLOCK_SIZE,
        "threads": threads,
        "iterations": {
            "rate": base.n_iterations,
            "ee": base.n_iterations,
            "ptot": base.n_iterations,
            "gamma_fit": base.n_iterations,
            "ber": {"min_draws": base.n_iterations, "max_draws": base.max_ber_draws,
                    "min_bit_errors": base.min_bit_errors, "symbols_per_draw": base.symbols_per_draw},
        },
        **extra,
    }


def run_sweep(spec: SweepSpec, seed: int | None = None, threads: int = 1) -> ResultTable:
    """One row per swept value per metric; value ``i`` uses the stream of (seed, i)."""
    seed = spec.base.seed if seed is None else seed
    var = spec.variable
    table = ResultTable(columns=[var, "metric", "estimate", "ci95", "k", "nu", "iterations"])
    t0 = time.perf_counter()
    for i, raw in enumerate(spec.values):
        value = _cast(var, raw)
        try:
            cfg = spec.base.replace(**{SWEEP_VARIABLES[var]: value})
            s = row_seed(seed, i)
            for metric in spec.metrics:
                fields = {"iterations": cfg.n_iterations, **evaluate_metric(cfg, metric, s, threads)}
                table.add(**{var: value, "metric": metric, **fields})
        except Exception as exc:
            raise SweepError(f"sweep point {var}={value} failed: {exc}") from exc
        log.info("%s=%s done", var, value)
    table.manifest = _manifest(spec.base, seed, threads, sweep={"variable": var, "values": list(spec.values),
                                                                "metrics": list(spec.metrics)},
                               wall_clock_s=time.perf_counter() - t0)
    return table


def evaluate_point(config: SystemConfig, metrics, seed: int | None = None, threads: int = 1) -> ResultTable:
    """Single evaluation: one row per metric at the given configuration."""
    seed = config.seed if seed is None else seed
    table = ResultTable(columns=["metric", "estimate", "ci95", "k", "nu", "iterations"])
    t0 = time.perf_counter()
    for metric in metrics:
        fields = {"iterations": config.n_iterations, **evaluate_metric(config, metric, seed, threads)}
        table.add(metric=metric, **fields)
    table.manifest = _manifest(config, seed, threads, wall_clock_s=time.perf_counter() - t0)
    return table


# -- presets ---------------------------------------------------------------
# Every point on one curve reuses the stream of (seed, curve index), so the
# curves compare configurations under common random numbers.


def _steps(start, stop, step):
    n = int(round((stop - start) / step))
    return [start + i * step for i in range(n + 1)]


P_T_GRID = _steps(-10, 30, 5)


def _fig3(base, seed, threads, P_max_dBm):
    table = ResultTable(columns=["N", "P_t_dBm", "ber_sim", "ber_theory", "ci95", "k", "nu"])
    for curve, N in enumerate((32, 64, 256)):
        s = row_seed(seed, curve)
        for P_t in P_T_GRID:
            cfg = base.replace(N=N, P_t_dBm=P_t, P_max_dBm=P_max_dBm, mode="active", **GAMMA_TABLE_SCENARIO)
            est = mc.simulate_ber(cfg, s, threads)
            fit = fit_gamma_mle(mc.simulate_snr_samples(cfg, seed=s, threads=threads))
            table.add(N=N, P_t_dBm=P_t, ber_sim=est.ber, ber_theory=bep(fit.k, fit.nu, cfg.M),
                      ci95=est.ci95_halfwidth, k=fit.k, nu=fit.nu)
            log.info("N=%d P_t=%s dBm: BER %.3e", N, P_t, est.ber)
    return table


def _fig4(base, seed, threads, d_m, d_h_values):
    table = ResultTable(columns=["d_h_m", "N", "rate_active", "rate_active_unlimited",
                                 "passive_elements", "rate_passive"])
    for curve, N in enumerate((128, 256, 512)):
        s = row_seed(seed, curve)
        for d_h in d_h_values:
            cfg = base.replace(N=N, d_m=d_m, d_h_m=d_h, mode="active", passive_elements=None)
            A, B = mc.simulate_amplitude_sums(cfg, seed=s, threads=threads)
            limited = active_link_from_sums(cfg.P_t, N, cfg.amp, A, B, cfg.noise)
            unlimited = active_link_from_sums(cfg.P_t, N, cfg.replace(output_limited=False).amp, A, B, cfg.noise)
            table.add(
                d_h_m=d_h, N=N,
                rate_active=float(np.mean(limited.rate)),
                rate_active_unlimited=float(np.mean(unlimited.rate)),
                passive_elements=2 * N,
                rate_passive=mc.mean_rate(cfg.replace(mode="passive"), s, threads),
            )
            log.info("N=%d d_h=%s m done", N, d_h)
    return table


N_GRID = _steps(20, 400, 20)


def _fig5(base, seed, threads, P_t_dBm):
    table = ResultTable(columns=["P_max_dBm", "N", "rate", "mean_G_opt_dB", "clipped_fraction"])
    for curve, P_max in enumerate((10, 20, 30)):
        for N in N_GRID:
            cfg = base.replace(N=N, P_t_dBm=P_t_dBm, P_max_dBm=P_max, mode="active")
            batch = mc.simulate_link(cfg, seed=row_seed(seed, curve), threads=threads)
            table.add(P_max_dBm=P_max, N=N, rate=float(np.mean(batch.rate)),
                      mean_G_opt_dB=float(np.mean(10 * np.log10(batch.G_opt))),
                      clipped_fraction=float(np.mean(batch.clipped)))
        log.info("P_max=%s dBm done", P_max)
    return table


def _fig6(base, seed, threads):
    table = ResultTable(columns=["P_max_dBm", "P_t_dBm", "N", "rate"])
    curve = 0
    for P_max in (10, 20):
        for P_t in (10, 20, 30):
            for N in N_GRID:
                cfg = base.replace(N=N, P_t_dBm=P_t, P_max_dBm=P_max, mode="active")
                table.add(P_max_dBm=P_max, P_t_dBm=P_t, N=N, rate=mc.mean_rate(cfg, row_seed(seed, curve), threads))
            curve += 1
            log.info("P_max=%s dBm P_t=%s dBm done", P_max, P_t)
    return table


def _ee_row(cfg, s, threads):
    act = mc.simulate_link(cfg, seed=s, threads=threads)
    p_act = mc.total_power_samples(cfg, act.P_out)
    pas_cfg = cfg.replace(mode="passive")
    pas = mc.simulate_link(pas_cfg, seed=s, threads=threads)
    p_pas = mc.total_power_samples(pas_cfg, pas.P_out)
    return {
        "ee_active": float(np.mean(act.rate * cfg.BW_Hz / p_act)),
        "rate_active": float(np.mean(act.rate)),
        "ptot_active": float(np.mean(p_act)),
        "ee_passive": float(np.mean(pas.rate * cfg.BW_Hz / p_pas)),
        "rate_passive": float(np.mean(pas.rate)),
        "ptot_passive": float(np.mean(p_pas)),
    }


_EE_COLUMNS = ["ee_active", "rate_active", "ptot_active", "ee_passive", "rate_passive", "ptot_passive"]


def _fig7(base, seed, threads):
    table = ResultTable(columns=["P_max_dBm", "N"] + _EE_COLUMNS)
    for curve, P_max in enumerate((10, 20, 50)):
        for N in (16, 32, 64, 128, 256, 512, 1024):
            cfg = base.replace(N=N, P_max_dBm=P_max, mode="active", passive_elements=None)
            table.add(P_max_dBm=P_max, N=N, **_ee_row(cfg, row_seed(seed, curve), threads))
        log.info("P_max=%s dBm done", P_max)
    return table


def _fig8(base, seed, threads):
    table = ResultTable(columns=["P_max_dBm", "P_t_dBm"] + _EE_COLUMNS)
    for curve, P_max in enumerate((10, 20, 50)):
        for P_t in _steps(-10, 40, 5):
            cfg = base.replace(P_t_dBm=P_t, P_max_dBm=P_max, mode="active")
            table.add(P_max_dBm=P_max, P_t_dBm=P_t, **_ee_row(cfg, row_seed(seed, curve), threads))
        log.info("P_max=%s dBm done", P_max)
    return table


def _fig9(base, seed, threads):
    table = ResultTable(columns=["P_t_dBm", "P_max_dBm", "ee_active", "rate_active", "ptot_active"])
    for curve, P_t in enumerate((10, 20, 30)):
        for P_max in _steps(0, 50, 5):
            cfg = base.replace(P_t_dBm=P_t, P_max_dBm=P_max, mode="active")
            vals = _ee_row(cfg, row_seed(seed, curve), threads)
            table.add(P_t_dBm=P_t, P_max_dBm=P_max, ee_active=vals["ee_active"],
                      rate_active=vals["rate_active"], ptot_active=vals["ptot_active"])
        log.info("P_t=%s dBm done", P_t)
    return table


def _table2(base, seed, threads):
    cols = ["P_max_dBm", "N", "parameter"] + [f"P_t={p}dBm" for p in P_T_GRID]
    table = ResultTable(columns=cols)
    row = 0
    for P_max in (10, 20):
        for N in (64, 256):
            ks, nus = {}, {}
            s = row_seed(seed, row)
            for P_t in P_T_GRID:
                cfg = base.replace(N=N, P_t_dBm=P_t, P_max_dBm=P_max, mode="active", **GAMMA_TABLE_SCENARIO)
                fit = fit_gamma_mle(mc.simulate_snr_samples(cfg, seed=s, threads=threads))
                ks[f"P_t={P_t}dBm"] = fit.k
                nus[f"P_t={P_t}dBm"] = fit.nu
            row += 1
            table.add(P_max_dBm=P_max, N=N, parameter="k", **ks)
            table.add(P_max_dBm=P_max, N=N, parameter="nu", **nus)
            log.info("P_max=%s dBm N=%d done", P_max, N)
    return table


PRESETS = {
    "fig3a": lambda b, s, t: _fig3(b, s, t, 10.0),
    "fig3b": lambda b, s, t: _fig3(b, s, t, 20.0),
    "fig4a": lambda b, s, t: _fig4(b, s, t, 50.0, _steps(1, 49, 2)),
    "fig4b": lambda b, s, t: _fig4(b, s, t, 100.0, _steps(1, 99, 4)),
    "fig5a": lambda b, s, t: _fig5(b, s, t, 20.0),
    "fig5b": lambda b, s, t: _fig5(b, s, t, 10.0),
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "table2": _table2,
}


def run_preset(name: str, base: SystemConfig, seed: int | None = None, threads: int = 1) -> ResultTable:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    seed = base.seed if seed is None else seed
    t0 = time.perf_counter()
    table = PRESETS[name](base, seed, threads)
    table.manifest = _manifest(base, seed, threads, preset=name, wall_clock_s=time.perf_counter() - t0)
    return table


# -- output ----------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if value.is_integer() and abs(value) < 1e16:
            return str(int(value))
        return format(value, ".17g")
    return str(value)


def to_csv(table: ResultTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row.get(c)) for c in table.columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_json(table: ResultTable) -> str:
    manifest = dict(table.manifest)
    manifest.setdefault("created_utc", datetime.now(timezone.utc).isoformat())
    doc = {
        "manifest": manifest,
        "columns": table.columns,
        "rows": [{c: _jsonable(r.get(c)) for c in table.columns} for r in table.rows],
    }
    return json.dumps(doc, indent=2)


def emit(table: ResultTable, format: str = "csv", path=None) -> str:
    """Serialize ``table`` as CSV or JSON; write to ``path`` when given."""
    if not table.rows:
        raise ValueError("nothing to emit: result table is empty")
    if format == "csv":
        text = to_csv(table)
    elif format == "json":
        text = to_json(table)
    else:
        raise ValueError(f"unknown format {format!r}; expected 'csv' or 'json'")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write results to {path}: {exc}") from exc
    return text


def load_json(path) -> ResultTable:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return ResultTable(columns=doc["columns"], rows=doc["rows"], manifest=doc["manifest"])

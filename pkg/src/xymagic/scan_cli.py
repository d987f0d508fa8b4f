"""Command-line driver for parameter scans and analysis pipelines.

Usage:  xymagic-scan --mode <mode> [flags] --output results.csv

Modes
-----
single_site_sweep   one-qubit robustness along a lam grid
two_site_thermal    symmetric-sector two-qubit robustness on (lam, T, r) grids
two_site_broken_ed  two-site global magic in the finite broken chain
mpp                 magic pseudocritical point for one gamma
fss                 finite-size collapse of the robustness derivative
sudden_death        sudden-death temperatures over an r grid
crossover_map       (lam, T) map with derivative and crossover-line fits
polytope_dump       JSON dump of the stabilizer polytope

Grids are given as start:stop:step (inclusive stop within half a step) or
start:stop:xN for N log-spaced points.  Flags override values from a JSON
--config file; the effective configuration is echoed to <output>.meta.json.
Scan rows stream to the CSV as they complete (deterministic grid order,
worker count set by --threads or XYMAGIC_THREADS) and end with a
`scan_complete` marker row.  Exit codes: 0 success, 1 numerical failure,
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import critical_analysis as ca
from .finite_chain import DEFAULT_EIG_TOL
from .quantum_state import StateValidationError
from .rom_solver import RomSolverError
from .stabilizer_polytope import enumerate_polytope
from .xy_correlators import DEFAULT_QUAD_TOL, QuadratureError

CSV_HEADER = "lambda,gamma,temperature,r,N,quantity,value,err_estimate"

MODES = (
    "single_site_sweep",
    "two_site_thermal",
    "two_site_broken_ed",
    "mpp",
    "fss",
    "sudden_death",
    "crossover_map",
    "polytope_dump",
)


class ConfigError(ValueError):
    pass


@dataclass
class ScanConfig:
    mode: str
    lam: list = field(default_factory=lambda: [1.0])
    gamma: float = 1.0
    temperature: list = field(default_factory=lambda: [0.0])
    r: list = field(default_factory=lambda: [1])
    n_sites: list = field(default_factory=lambda: [12])
    n_qubits: int = 2
    sb_field: float = 0.02
    quad_tol: float = DEFAULT_QUAD_TOL
    eig_tol: float = DEFAULT_EIG_TOL
    resolution: float = 1e-6
    output: str = "scan.csv"
    threads: int = 0
    seed: int = 0

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in ("lam", "temperature", "r", "n_sites"):
            vals = getattr(self, name)
            if len(vals) == 0:
                raise ConfigError(f"empty grid for {name}")
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ConfigError(f"grid for {name} must be monotone nondecreasing")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.n_qubits not in (1, 2):
            raise ConfigError("n_qubits must be 1 or 2")


def parse_grid(text: str, integer=False):
    """start:stop:step (linear, inclusive) or start:stop:xN (log-spaced),
    or a single number."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            vals = [float(parts[0])]
        elif len(parts) == 3 and parts[2].startswith("x"):
            n = int(parts[2][1:])
            lo, hi = float(parts[0]), float(parts[1])
            if lo <= 0 or hi <= 0 or n < 2:
                raise ValueError("log grid needs positive bounds and N >= 2")
            vals = list(np.geomspace(lo, hi, n))
        elif len(parts) == 3:
            lo, hi, step = (float(p) for p in parts)
            if step <= 0 or hi < lo:
                raise ValueError("need stop >= start and step > 0")
            count = int(np.floor((hi - lo) / step + 0.5)) + 1
            vals = list(lo + step * np.arange(count))
        else:
            raise ValueError("expected start:stop:step or start:stop:xN")
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None
    if integer:
        ints = [int(round(v)) for v in vals]
        if any(abs(i - v) > 1e-9 for i, v in zip(ints, vals)):
            raise ConfigError(f"grid {text!r} must contain integers")
        return ints
    return vals


def build_parser():
    p = argparse.ArgumentParser(
        prog="xymagic-scan",
        description="Parameter scans of magic in the transverse-field XY chain",
    )
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--lambda", dest="lam", help="lam grid (start:stop:step or start:stop:xN)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--temperature", help="temperature grid")
    p.add_argument("--r", help="distance grid (integers)")
    p.add_argument("--n-sites", dest="n_sites", help="chain-length grid (integers)")
    p.add_argument("--n", dest="n_qubits", type=int, help="qubit count for polytope_dump")
    p.add_argument("--sb-field", dest="sb_field", type=float)
    p.add_argument("--quad-tol", dest="quad_tol", type=float)
    p.add_argument("--eig-tol", dest="eig_tol", type=float)
    p.add_argument("--resolution", type=float, help="bisection resolution for locators")
    p.add_argument("--output", "-o")
    p.add_argument("--threads", type=int,
                   help="worker threads (default XYMAGIC_THREADS or cpu count)")
    p.add_argument("--seed", type=int)
    return p


def load_config(argv):
    args = build_parser().parse_args(argv)
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    merged = dict(base)
    for key in ("mode", "gamma", "n_qubits", "sb_field", "quad_tol", "eig_tol",
                "resolution", "output", "threads", "seed"):
        val = getattr(args, key)
        if val is not None:
            merged[key] = val
    for key, integer in (("lam", False), ("temperature", False),
                         ("r", True), ("n_sites", True)):
        val = getattr(args, key)
        if val is not None:
            merged[key] = parse_grid(val, integer=integer)
        elif key in merged and not isinstance(merged[key], list):
            merged[key] = parse_grid(merged[key], integer=integer)
    if "mode" not in merged or merged["mode"] is None:
        raise ConfigError("--mode is required")
    known = set(ScanConfig.__dataclass_fields__)
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    config = ScanConfig(**merged)
    config.validate()
    return config


class _RowWriter:
    """Serialized CSV sink; rows carry the full parameter tuple and are
    flushed as they arrive (deterministic grid order)."""

    def __init__(self, path):
        self.fh = open(path, "w")
        self.fh.write(CSV_HEADER + "\n")
        self.count = 0

    def row(self, lam="", gamma="", temperature="", r="", n="",
            quantity="", value="", err=""):
        self.fh.write(f"{lam},{gamma},{temperature},{r},{n},{quantity},{value},{err}\n")
        self.fh.flush()
        self.count += 1

    def close_complete(self):
        self.row(quantity="scan_complete", value=self.count)
        self.fh.close()


def _thread_count(config):
    if config.threads > 0:
        return config.threads
    env = os.environ.get("XYMAGIC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_cells(cells, func, threads):
    """Evaluate func over cells preserving input order."""
    if threads <= 1:
        return [func(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, cells))


def _mode_single_site_sweep(config, writer, summary):
    from .xy_correlators import ChainParams, order_parameter, transverse_magnetization

    def cell(lam):
        rom = ca.single_site_rom(lam, config.gamma, quad_tol=config.quad_tol)
        params = ChainParams(lam=lam, gamma=config.gamma, quad_tol=config.quad_tol)
        return lam, order_parameter(params), transverse_magnetization(params), rom

    results = _run_cells(config.lam, cell, _thread_count(config))
    for lam, sx, sz, rom in results:
        writer.row(lam, config.gamma, 0.0, "", "", "sx", repr(sx), config.quad_tol)
        writer.row(lam, config.gamma, 0.0, "", "", "sz", repr(sz), config.quad_tol)
        writer.row(lam, config.gamma, 0.0, "", "", "rom", repr(rom), 1e-9)
    best = max(results, key=lambda c: c[3])
    summary["max_rom"] = best[3]
    summary["argmax_lambda"] = best[0]


def _mode_two_site_thermal(config, writer, summary):
    cells = [(lam, t, r) for lam in config.lam for t in config.temperature
             for r in config.r]

    def cell(c):
        lam, t, r = c
        return ca.two_site_rom(lam, config.gamma, r, temperature=t,
                               quad_tol=config.quad_tol)

    for (lam, t, r), rom in zip(cells, _run_cells(cells, cell, _thread_count(config))):
        writer.row(lam, config.gamma, t, r, "", "rom", repr(rom), 1e-9)


def _mode_two_site_broken_ed(config, writer, summary):
    for n in config.n_sites:
        for r in config.r:
            prof = ca.global_magic_profile(n, config.gamma, r, config.lam,
                                           sb_field=config.sb_field,
                                           eig_tol=config.eig_tol)
            for k, lam in enumerate(config.lam):
                writer.row(lam, config.gamma, 0.0, r, n, "rom_joint",
                           repr(float(prof["rom_joint"][k])), config.eig_tol)
                writer.row(lam, config.gamma, 0.0, r, n, "global_magic",
                           repr(float(prof["global_magic"][k])), config.eig_tol)


def _mode_mpp(config, writer, summary):
    mpp = ca.mpp_locate(config.gamma, resolution=config.resolution,
                        quad_tol=config.quad_tol)
    writer.row("", config.gamma, 0.0, "", "", "mpp", repr(mpp), config.resolution)
    summary["mpp"] = mpp


def _mode_fss(config, writer, summary):
    study = ca.fss_study(config.gamma, tuple(config.n_sites),
                         sb_field=config.sb_field, eig_tol=max(config.eig_tol, 1e-7))
    for n in study.sizes:
        writer.row("", config.gamma, 0.0, "", n, "lam_c_finite",
                   repr(study.lam_c[n]), "")
    res = study.collapse
    summary.update({"mu": res.mu, "nu": res.nu, "collapse_cost": res.collapse_cost,
                    "unrescaled_cost": res.unrescaled_cost,
                    "sizes": list(res.sizes)})
    writer.row("", config.gamma, 0.0, "", "", "fss_mu", repr(res.mu), "")
    writer.row("", config.gamma, 0.0, "", "", "fss_nu", repr(res.nu), "")


def _mode_sudden_death(config, writer, summary):
    tcs = {}
    for r in config.r:
        tc = ca.sudden_death_temperature(config.gamma, r, lam=config.lam[0],
                                         quad_tol=max(config.quad_tol, 1e-9),
                                         resolution=config.resolution)
        tcs[r] = tc
        writer.row(config.lam[0], config.gamma, "", r, "", "sudden_death_t",
                   repr(tc), config.resolution)
    if len(config.r) >= 5:
        fit = ca.kappa_fit(config.gamma, config.r, lam=config.lam[0],
                           quad_tol=max(config.quad_tol, 1e-9),
                           resolution=max(config.resolution, 1e-5))
        summary["kappa"] = fit.exponent
        writer.row(config.lam[0], config.gamma, "", "", "", "kappa",
                   repr(fit.exponent), "")
    summary["sudden_death"] = {str(k): v for k, v in tcs.items()}


def _mode_crossover_map(config, writer, summary):
    cmap = ca.crossover_map(config.gamma, config.lam, config.temperature,
                            config.r[0], quad_tol=max(config.quad_tol, 1e-9))
    for i, lam in enumerate(cmap.lam_values):
        for j, t in enumerate(cmap.t_values):
            writer.row(lam, config.gamma, t, config.r[0], "", "rom",
                       repr(float(cmap.rom[i, j])), 1e-9)
    summary.update({
        "t_star_slope": cmap.t_star_slope,
        "t_m_slope": cmap.t_m_slope,
        "consistency": cmap.consistency,
    })


def _mode_polytope_dump(config, writer, summary):
    poly = enumerate_polytope(config.n_qubits)
    path = config.output
    with open(path, "w") as fh:
        fh.write(poly.to_json())
    summary["n_states"] = poly.n_states
    return True  # wrote JSON itself; no CSV


def run(config: ScanConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    summary = {}
    handlers = {
        "single_site_sweep": _mode_single_site_sweep,
        "two_site_thermal": _mode_two_site_thermal,
        "two_site_broken_ed": _mode_two_site_broken_ed,
        "mpp": _mode_mpp,
        "fss": _mode_fss,
        "sudden_death": _mode_sudden_death,
        "crossover_map": _mode_crossover_map,
        "polytope_dump": _mode_polytope_dump,
    }
    meta = {"effective_config": asdict(config)}
    try:
        if config.mode == "polytope_dump":
            handlers[config.mode](config, None, summary)
        else:
            writer = _RowWriter(config.output)
            try:
                handlers[config.mode](config, writer, summary)
            finally:
                writer.close_complete()
    except (QuadratureError, StateValidationError, RomSolverError,
            ca.BracketError, ca.FitError, ca.MapResolutionError,
            ca.DegenerateCollapseError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    meta["summary"] = summary
    with open(config.output + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, default=float)
    return 0


def main(argv=None) -> int:
    try:
        config = load_config(argv if argv is not None else sys.argv[1:])
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse error or --help
        return int(exc.code or 0) and 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

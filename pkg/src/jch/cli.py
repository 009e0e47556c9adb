"""Command-line front end: ``python -m jch`` or the ``jch`` script.

Parameters come from an optional ``key = value`` config file and from
``--key value`` flags, which override the file. Every output file starts
with ``#`` lines echoing the resolved configuration, then a CSV header row.
Energies are written in units of beta and chemical potentials as
``(mu - omega) / beta``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .bloch import UnitCellSpec, band_energies, k_grid
from .errors import JCHError
from .exact_diag import plateau_boundaries
from .jc_core import SiteParams, atomic_limit_filling
from .meanfield import mf_boundary
from .phase_map import doped_background, gap_map

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

COMMANDS = ("band", "phase", "mf", "ed", "doped", "verify")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = ""
    beta: float = 1.0
    omega: float = 0.0
    delta: float = 0.0
    delta0: float = 0.0
    delta1: float = 1.0
    lattice: str = "uniform"
    kappa: float = 0.01
    kappa_min: float = 0.0
    kappa_max: float = 0.15
    kappa_points: int = 200
    mu_minus_omega: float = -0.5
    mu_min: float = -1.2
    mu_max: float = -0.2
    mu_points: int = 200
    k_points: int = 101
    sector: str = "particle"
    filling: int = -1
    n_max: int = 20
    mf_n_max: int = 25
    z: int = 2
    bc: str = "ring"
    cavities: str = "2,3,4,5"
    target: int = 1
    workers: int = 0
    output: str = "-"
    format: str = "csv"

    def validate(self):
        def bad(key, msg):
            raise ConfigError(f"{key}: {msg}")

        if self.command not in COMMANDS:
            bad("command", f"must be one of {', '.join(COMMANDS)}, got {self.command!r}")
        if self.beta <= 0:
            bad("beta", "must be positive")
        for key in ("kappa", "kappa_min", "kappa_max"):
            if getattr(self, key) < 0:
                bad(key, "must be non-negative")
        if self.kappa_max <= self.kappa_min:
            bad("kappa_max", "kappa range must be strictly increasing")
        if self.mu_max <= self.mu_min:
            bad("mu_max", "mu range must be strictly increasing")
        for key in ("kappa_points", "mu_points", "k_points"):
            if getattr(self, key) < 2:
                bad(key, "needs at least 2 points")
        if self.sector not in ("particle", "hole"):
            bad("sector", "must be particle or hole")
        if self.lattice not in ("uniform", "doped"):
            bad("lattice", "must be uniform or doped")
        if self.bc not in ("ring", "open", "both"):
            bad("bc", "must be ring, open or both")
        if self.format not in ("csv", "json"):
            bad("format", "must be csv or json")
        if self.z < 1:
            bad("z", "must be >= 1")
        if self.n_max < 2 or self.mf_n_max < 2:
            bad("n_max", "must be >= 2")
        if self.target < 1:
            bad("target", "must be >= 1")
        if self.workers < 0:
            bad("workers", "must be >= 0 (0 = all cores)")
        try:
            cav = self.cavity_list()
        except ValueError:
            bad("cavities", f"expected comma-separated integers, got {self.cavities!r}")
        if not cav or min(cav) < 2:
            bad("cavities", "each cavity count must be >= 2")
        return self

    def cavity_list(self):
        return [int(x) for x in str(self.cavities).split(",") if x.strip()]

    def site(self, delta):
        return SiteParams.from_detuning(delta * self.beta, self.beta, self.omega)

    def mu(self):
        return self.omega + self.mu_minus_omega * self.beta

    def kappa_axis(self):
        return np.linspace(self.kappa_min, self.kappa_max, self.kappa_points) * self.beta

    def mu_axis(self):
        return self.omega + np.linspace(self.mu_min, self.mu_max, self.mu_points) * self.beta


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_PACKED = re.compile(r"[A-Za-z_]\w*=\S+")


def _coerce(key, raw, where):
    if key not in _TYPES:
        raise ConfigError(f"{where}: unknown key {key!r}")
    kind = _TYPES[key]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: malformed number for {key}: {raw!r}") from None
    return str(raw).strip()


def parse_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        # "a=1 b=2" packs several assignments on one line; "key = value" is one
        tokens = line.split()
        if len(tokens) > 1 and all(_PACKED.fullmatch(t) for t in tokens):
            pairs = [t.split("=", 1) for t in tokens]
        else:
            pairs = [line.split("=", 1)]
        for key, raw in pairs:
            key = key.strip()
            values[key] = _coerce(key, raw.strip(), f"{source}:{lineno}")
    return values


def parse_config(text: str | None = None, flags: dict | None = None, source: str = "<config>") -> RunConfig:
    """Resolve a RunConfig from config text and flag values (flags win)."""
    values = parse_text(text, source) if text else {}
    for key, raw in (flags or {}).items():
        values[key] = _coerce(key, raw, f"--{key}")
    return RunConfig(**values).validate()


def _parser():
    p = argparse.ArgumentParser(prog="jch", description="Jaynes-Cummings-Hubbard band and phase engine")
    p.add_argument("items", nargs="*", metavar="COMMAND | key=value",
                   help="command name and/or key=value assignments (flags take precedence)")
    p.add_argument("--config", help="key = value config file")
    for f in fields(RunConfig):
        p.add_argument(f"--{f.name}", dest=f.name, default=None)
    return p


# -- output -------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _echo(cfg: RunConfig) -> dict:
    # the output path is left out so that reruns into different files match byte for byte
    return {k: v for k, v in dataclasses.asdict(cfg).items() if k != "output"}


def write_table(cfg: RunConfig, columns, rows, stream):
    if cfg.format == "json":
        doc = {"version": __version__, "config": _echo(cfg), "columns": list(columns),
               "rows": [[float(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]}
        stream.write(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        return
    stream.write(f"# jch {__version__}\n")
    for key, val in sorted(_echo(cfg).items()):
        stream.write(f"# {key} = {val}\n")
    stream.write(",".join(columns) + "\n")
    for r in rows:
        stream.write(",".join(_fmt(v) for v in r) + "\n")


# -- commands -----------------------------------------------------------------

def _band_rows(cfg, cell):
    ks = k_grid(cfg.k_points)
    e = band_energies(cell, cfg.sector, ks) / cfg.beta
    return [(k, b, e[i, b]) for i, k in enumerate(ks) for b in range(e.shape[1])]


def cmd_band(cfg):
    site = cfg.site(cfg.delta)
    n = cfg.filling if cfg.filling >= 0 else atomic_limit_filling(site, cfg.mu(), cfg.n_max)
    cell = UnitCellSpec.uniform(site, n, cfg.kappa * cfg.beta, cfg.mu())
    return ("k", "branch_index", "energy_over_beta"), _band_rows(cfg, cell)


def cmd_doped(cfg):
    sites = (cfg.site(cfg.delta0), cfg.site(cfg.delta1))
    fillings = doped_background(sites, cfg.mu(), cfg.n_max)
    cell = UnitCellSpec(sites, fillings, cfg.kappa * cfg.beta, cfg.mu())
    return ("k", "branch_index", "energy_over_beta"), _band_rows(cfg, cell)


def _workers(cfg):
    return cfg.workers or os.cpu_count() or 1


def cmd_phase(cfg):
    if cfg.lattice == "doped":
        sites = (cfg.site(cfg.delta0), cfg.site(cfg.delta1))
    else:
        sites = (cfg.site(cfg.delta),)
    grid = gap_map(sites, cfg.kappa_axis(), cfg.mu_axis(), n_max=cfg.n_max, workers=_workers(cfg))
    rows = []
    for i, kap in enumerate(grid.kappa):
        for j, mu in enumerate(grid.mu):
            rows.append((kap / cfg.beta, (mu - cfg.omega) / cfg.beta, grid.gap[i, j] / cfg.beta, grid.label[i, j]))
    return ("kappa_over_beta", "mu_minus_omega_over_beta", "gap_over_beta", "label"), rows


def cmd_mf(cfg):
    site = cfg.site(cfg.delta)
    mus = cfg.mu_axis()
    kc = mf_boundary(site, cfg.z, mus, n_max=cfg.mf_n_max)
    rows = [((m - cfg.omega) / cfg.beta, k / cfg.beta) for m, k in zip(mus, kc)]
    return ("mu_minus_omega_over_beta", "kappa_c_over_beta"), rows


def cmd_ed(cfg):
    site = cfg.site(cfg.delta)
    kaps = cfg.kappa_axis()
    rows = []
    boundaries = ("ring", "open") if cfg.bc == "both" else (cfg.bc,)
    for bc in boundaries:
        for M in cfg.cavity_list():
            lo, hi = plateau_boundaries(M, site, kaps, cfg.target, bc)
            for k, a, b in zip(kaps, lo, hi):
                rows.append((bc, M, k / cfg.beta, (a - cfg.omega) / cfg.beta, (b - cfg.omega) / cfg.beta))
    return ("bc", "cavities", "kappa_over_beta", "mu_lower_minus_omega_over_beta",
            "mu_upper_minus_omega_over_beta"), rows


def cmd_verify(cfg, stream):
    from .acceptance import run_all

    results = run_all(echo=lambda line: stream.write(line + "\n"))
    failed = [r for r in results if not r.passed]
    stream.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return EXIT_OK if not failed else EXIT_VERIFY


HANDLERS = {"band": cmd_band, "doped": cmd_doped, "phase": cmd_phase, "mf": cmd_mf, "ed": cmd_ed}


def run(cfg: RunConfig) -> int:
    out = sys.stdout if cfg.output == "-" else open(cfg.output, "w", newline="\n", encoding="utf-8")
    try:
        if cfg.command == "verify":
            return cmd_verify(cfg, out)
        try:
            columns, rows = HANDLERS[cfg.command](cfg)
        except (JCHError, np.linalg.LinAlgError) as exc:
            sys.stderr.write(f"numerical failure: {exc}\n")
            return EXIT_NUMERICAL
        except ValueError as exc:
            sys.stderr.write(f"config error: {exc}\n")
            return EXIT_CONFIG
        write_table(cfg, columns, rows, out)
        return EXIT_OK
    finally:
        if out is not sys.stdout:
            out.close()


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig) if getattr(args, f.name) is not None}
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        inline = {}
        for item in args.items:
            if "=" in item:
                inline.update(parse_text(item, "<arguments>"))
            elif item in COMMANDS:
                inline["command"] = item
            else:
                raise ConfigError(f"<arguments>: unknown command {item!r}")
        values = parse_text(text, args.config) if text else {}
        values.update(inline)
        for key, raw in flags.items():
            values[key] = _coerce(key, raw, f"--{key}")
        cfg = RunConfig(**values).validate()
    except (ConfigError, OSError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

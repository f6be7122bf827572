"""Command-line front end.

    rydnet [--config FILE] [flags] {levels,lp-params,heatmap,sweetspot,route,bench}

A config file holds ``key = value`` lines, optionally grouped under
``[section]`` headers; section names are only organizational.  Flags override
file values.  ``RYDNET_DATA`` points at an alternative atomic table.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import re
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import analysis, bench, physics, router, svg

SECTIONS = {"run", "lattice", "atoms", "drive", "noise", "bench", "sweetspot", "route"}
R_MAX_DEFAULT = (1.0, math.sqrt(2), 2.0, math.sqrt(5), 3.0)
TAU_SWEEP_DEFAULT = (20.0, 50.0, 200.0, 1e3, 5e3, 2e4, 1e5)  # us


class ConfigError(ValueError):
    pass


def parse_radius(tok: str) -> float:
    """Radius in lattice units: a float or ``sqrt(k)`` / ``sqrtk``."""
    tok = tok.strip()
    m = re.fullmatch(r"sqrt\(?\s*([0-9.]+)\s*\)?", tok)
    if m:
        return math.sqrt(float(m.group(1)))
    return float(tok)


def _floats(text: str, conv=float) -> tuple:
    return tuple(conv(t) for t in text.replace(";", ",").split(",") if t.strip())


def _strings(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _coord(text: str) -> tuple[int, int]:
    x, y = _floats(text, int)
    return (x, y)


def _widths(text: str) -> tuple[tuple[str, int], ...]:
    out = []
    for item in _strings(text):
        fam, w = item.split(":")
        out.append((fam.strip(), int(w)))
    return tuple(out)


@dataclass
class RunConfig:
    width: int = 10
    height: int = 10
    spacing: float = 4.0
    table: str | None = None
    model: str = "table"  # or "powerlaw" (calibrated to the table at n_ref)
    n_ref: int = 70
    omega: float = physics.DEFAULT_OMEGA
    e_field: float = 0.01
    tau_scat: float = 50.0
    k_margin: float = 10.0
    delta_mode: str = "deterministic"
    sigma: float = 0.0
    strategy: str = "graded"
    r_max: tuple[float, ...] = R_MAX_DEFAULT
    out: str = "out"
    seed: int = 0
    hops: float = 14.0
    tau_sweep: tuple[float, ...] = TAU_SWEEP_DEFAULT
    points: int = 60
    source: tuple[int, int] = (0, 0)
    target: tuple[int, int] = (9, 9)
    benchmarks: tuple[tuple[str, int], ...] = (("qft", 6), ("qft", 9), ("qpe", 6), ("qpe", 8), ("adder", 6), ("adder", 10))
    inputs: int = 30
    shots: int = 2000

    def lattice(self) -> router.LatticeSpec:
        return router.LatticeSpec(self.width, self.height, self.spacing)

    def atomic_model(self) -> physics.AtomicModel:
        table = physics.load_table(self.table)
        if self.model == "powerlaw":
            return physics.PowerLawModel.calibrated(table, self.n_ref)
        return table

    def context(self, **noise_overrides) -> physics.PhysicsContext:
        noise = physics.NoiseConfig(
            e_field=self.e_field, tau_scat=self.tau_scat, k_margin=self.k_margin,
            delta_mode=self.delta_mode, sigma=self.sigma,
        )  # fmt: skip
        return physics.PhysicsContext(
            self.atomic_model(), physics.GateDrive(self.omega), replace(noise, **noise_overrides)
        )


_CONVERTERS = {
    "width": int, "height": int, "spacing": float, "table": str, "model": str, "n_ref": int,
    "omega": float, "e_field": float, "tau_scat": float, "k_margin": float,
    "delta_mode": str, "sigma": float, "strategy": str,
    "r_max": lambda s: _floats(s, parse_radius), "out": str, "seed": int, "hops": float,
    "tau_sweep": _floats, "points": int, "source": _coord, "target": _coord,
    "benchmarks": _widths, "inputs": int, "shots": int,
}  # fmt: skip


def _validate(cfg: RunConfig) -> RunConfig:
    if not cfg.r_max:
        raise ConfigError("r_max list is empty")
    if cfg.model not in ("table", "powerlaw"):
        raise ConfigError(f"model must be 'table' or 'powerlaw', got {cfg.model!r}")
    if cfg.strategy not in ("graded", "fixed"):
        raise ConfigError(f"strategy must be 'graded' or 'fixed', got {cfg.strategy!r}")
    table = cfg.table or physics.default_table_path()
    if not Path(table).is_file():
        raise ConfigError(f"atomic table not found: {table}")
    try:
        cfg.lattice()
        cfg.context()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), start=1):
        if re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return 0


def parse_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the config file, then non-None ``overrides``."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = p.read_text(encoding="utf-8")
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            parser.read_string("[run]\n" + text, source=str(p))
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, raw in parser.items(section):
                line = max(_line_of(text, key), 1)
                if key not in _CONVERTERS:
                    raise ConfigError(f"{path}:{line}: unknown key {key!r}")
                try:
                    values[key] = _CONVERTERS[key](raw)
                except (ValueError, TypeError) as exc:
                    raise ConfigError(f"{path}:{line}: cannot parse {key} = {raw!r}") from exc
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in _CONVERTERS:
            raise ConfigError(f"unknown option --{key}")
        try:
            values[key] = _CONVERTERS[key](raw) if isinstance(raw, str) else raw
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"--{key.replace('_', '-')}: cannot parse {raw!r}") from exc
    return _validate(RunConfig(**values))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _outdir(cfg: RunConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_levels(cfg: RunConfig) -> int:
    ctx = cfg.context()
    header = ["n", "c6_rad_us_um6", "alpha_rad_us_per_Vcm2", "r_b_um", "r_max_um", "delta_rad_us", "p11_loss"]
    rows = []
    for n in ctx.model.available_n:
        c6 = ctx.model.c6(n)
        rows.append(
            [n, c6, ctx.model.alpha(n), physics.blockade_radius(c6, ctx.drive.omega),
             ctx.r_max_of(n), ctx.detuning_error(n), 1.0 - ctx.channel(n).p11]
        )  # fmt: skip
    _write_csv(_outdir(cfg) / "levels.csv", header, rows)
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    return 0


def cmd_lp_params(cfg: RunConfig) -> int:
    p = physics.solve_lp_params(physics.GateDrive(cfg.omega))
    print(f"omega = {cfg.omega:.12g} rad/us")
    print(f"delta = {p.delta:.12g} rad/us  (delta/omega = {p.delta / cfg.omega:.10f})")
    print(f"tau   = {p.tau:.12g} us  (omega*tau = {p.tau * cfg.omega:.10f})")
    print(f"xi    = {p.xi:.12g} rad")
    print(f"phi   = {p.phi:.12g} rad")
    return 0


def _r_tag(r: float) -> str:
    return f"{r:.4f}".replace(".", "p")


def cmd_heatmap(cfg: RunConfig) -> int:
    ctx = cfg.context()
    lat = cfg.lattice()
    strat = router.strategy_from_name(cfg.strategy)
    out = _outdir(cfg)
    # report the far corner when the configured target lies off this lattice
    tx, ty = cfg.target if lat.contains(cfg.target) else (lat.width - 1, lat.height - 1)
    for r in cfg.r_max:
        grid = router.loss_heatmap(lat, r * lat.spacing, strat, ctx, cfg.source)
        stem = out / f"heatmap_{cfg.strategy}_r{_r_tag(r)}"
        rows = ([x, y, float(grid[y, x])] for y in range(lat.height) for x in range(lat.width))
        _write_csv(stem.with_suffix(".csv"), ["x", "y", "p_loss_overall"], rows)
        stem.with_suffix(".svg").write_text(
            svg.heatmap_svg(grid, f"{cfg.strategy}, r_max = {r:.4g} a"), encoding="utf-8"
        )
        print(f"{stem}.csv  r_max={r:.4g}a  loss at {(tx, ty)}: {grid[ty, tx]:.6e}")
    return 0


def cmd_sweetspot(cfg: RunConfig) -> int:
    ctx = cfg.context()
    out = _outdir(cfg)
    locus, curves = analysis.sweep_scattering_times(cfg.hops, cfg.tau_sweep, ctx, cfg.spacing, cfg.points)
    for pt, curve in zip(locus, curves):
        _write_csv(
            out / f"curve_tau{pt.tau_scat_us:.6g}us.csv",
            ["r_over_a", "p_overall"],
            zip(curve.r.tolist(), curve.p_overall.tolist()),
        )
    _write_csv(
        out / "locus.csv",
        ["tau_scat_us", "p_scat", "r_star", "loss_star"],
        ([p.tau_scat_us, p.p_scat, p.r_star, p.loss_star] for p in locus),
    )
    (out / "sweetspot.svg").write_text(
        svg.lines_svg(
            [(c.r, c.p_overall) for c in curves],
            f"overall loss, D = {cfg.hops:g}",
            "r / a",
            "p_overall",
            marks=[(p.r_star, p.loss_star) for p in locus],
        ),
        encoding="utf-8",
    )
    (out / "locus.svg").write_text(
        svg.lines_svg([([p.p_scat for p in locus], [p.r_star for p in locus])], "optimum radius", "p_scat", "r*/a", logy=False),
        encoding="utf-8",
    )
    for p in locus:
        print(f"tau_scat={p.tau_scat_us:.6g}us p_scat={p.p_scat:.4e} r*={p.r_star:.4f}a loss*={p.loss_star:.4e}")
    return 0


def cmd_route(cfg: RunConfig) -> int:
    ctx = cfg.context()
    lat = cfg.lattice()
    strat = router.strategy_from_name(cfg.strategy)
    for r in cfg.r_max:
        graph = router.build_graph(lat, r * lat.spacing, strat, ctx)
        plan = router.synthesize_cz(graph, lat.index(cfg.source), lat.index(cfg.target))
        route = " -> ".join(str(lat.coord(u)) for u in plan.route)
        kind = "direct CZ" if plan.hops == 1 else "swap-based CZ"
        print(f"r_max={r:.4g}a: {kind}, D={plan.hops}, route {route} => {cfg.target}, "
              f"final r={plan.cz_radius:.4g}um n={plan.cz_level}, p_loss_overall={plan.p_loss(ctx):.6e}")  # fmt: skip
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    results = []
    for tau in sorted({math.inf, cfg.tau_scat}, reverse=True):
        ctx = cfg.context(tau_scat=tau)
        for fam, width in cfg.benchmarks:
            for r in cfg.r_max:
                res = bench.run_benchmark(
                    fam, width, r, ctx, cfg.strategy, inputs=cfg.inputs, shots=cfg.shots, seed=cfg.seed
                )
                results.append(res)
                print(f"{fam}-{width} tau_scat={tau:g} r_max={r:.4g}a  P_success={res.p_success:.4%} "
                      f"[{res.ci_low:.4%}, {res.ci_high:.4%}] cz {res.cz_pre}->{res.cz_post}")  # fmt: skip
    with open(out / "bench_results.csv", "w", newline="", encoding="utf-8") as fh:
        bench.write_results(results, fh)
    return 0


COMMANDS = {
    "levels": cmd_levels,
    "lp-params": cmd_lp_params,
    "heatmap": cmd_heatmap,
    "sweetspot": cmd_sweetspot,
    "route": cmd_route,
    "bench": cmd_bench,
}


def run_subcommand(name: str, cfg: RunConfig) -> int:
    if name not in COMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}")
    return COMMANDS[name](cfg)


def create_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rydnet", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value config file")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        ap.add_argument(flag, dest=f.name, default=None, metavar=f.name.upper())
    return ap


def main(argv=None) -> int:
    args = create_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = parse_config(args.config, overrides)
        return run_subcommand(args.command, cfg)
    except (ConfigError, ValueError, LookupError, RuntimeError) as exc:
        print(f"rydnet {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

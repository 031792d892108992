"""Command-line entry point: config parsing, experiment runs, CSV emission.

Subcommands: solve | pdf-compare | convergence | mass | kernel, all driven
by a flat key=value config file plus repeatable --override key=value flags.
Exit codes: 0 success, 1 config error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .analytic import ProfileKind, SimilarityProfile, monomial_solution, profile_cell_averages
from .core import GridSpec, SolverParams, stability_mesh_bound
from .diagnostics import NormKind, discrete_norm, estimate_order, write_convergence_csv
from .kernel import KernelQuery, eval_G1, expected_kernel_mass, kernel_mass
from .scheme import (
    NumericalBlowupError,
    SchemeVariant,
    SolveConfig,
    mass_series,
    solve,
    write_solution_csv,
)
from .sources import DeltaSpec, SourceKind, SourceTerm, discretize_delta

__all__ = ["RunConfig", "parse_config", "format_config", "main"]


class ConfigError(ValueError):
    """Invalid or missing configuration key; the message names the key."""


def parse_number(text: str) -> float:
    """Float literal, optionally in the power notation ``2^-9``."""
    text = text.strip()
    if "^" in text:
        base, _, exp = text.partition("^")
        return float(base) ** float(exp)
    return float(text)


@dataclass(frozen=True)
class RunConfig:
    """Flat experiment configuration; one file drives any subcommand.

    Keys in the file use dotted names where noted (``source.kind``,
    ``source.mu``, ``delta.K``); lists are comma-separated.
    """

    alpha: float = 0.5
    p: float = 0.5
    h: float = 2.0**-9
    T: float = 1.0
    x_min: float = -2.25
    x_max: float = 2.25
    variant: str = "advanced_source"
    source_kind: str = "wait_first"  # key: source.kind
    source_mu: float = 0.0  # key: source.mu
    delta_K: int = 2  # key: delta.K
    initial: str = "delta"  # delta | zero
    output: str = "out.csv"
    times: tuple[float, ...] = ()  # stored times for solve; empty = all
    norms: tuple[str, ...] = ("l1", "l2", "linf")
    window: tuple[float, float] | None = None  # error window; default: light-cone inset
    h_values: tuple[float, ...] = (2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7)
    kernel_x_max: float = 3.0  # key: kernel.x_max
    kernel_points: int = 601  # key: kernel.points
    threads: int = 1


_KEY_TO_FIELD = {
    "source.kind": "source_kind",
    "source.mu": "source_mu",
    "delta.K": "delta_K",
    "kernel.x_max": "kernel_x_max",
    "kernel.points": "kernel_points",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


def _coerce(name: str, raw: str, kind):
    raw = raw.strip()
    try:
        if kind is float:
            return parse_number(raw)
        if kind is int:
            return int(raw)
        if kind is str:
            return raw
        if kind == tuple[float, ...]:
            return tuple(parse_number(v) for v in raw.split(",") if v.strip())
        if kind == tuple[str, ...]:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if kind == tuple[float, float] | None:
            vals = [parse_number(v) for v in raw.split(",") if v.strip()]
            if not vals:
                return None
            if len(vals) != 2:
                raise ValueError("expected two comma-separated numbers")
            return (vals[0], vals[1])
    except ValueError as exc:
        raise ConfigError(f"config key '{name}': cannot parse {raw!r} ({exc})") from None
    raise ConfigError(f"config key '{name}': unsupported type")


def parse_config(lines, base: RunConfig | None = None) -> RunConfig:
    """Parse key=value lines ('#' comments, blank lines ignored) over a base."""
    cfg = base if base is not None else RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    # dataclass field types arrive as strings under `from __future__ import annotations`
    resolved = {
        "alpha": float, "p": float, "h": float, "T": float,
        "x_min": float, "x_max": float, "variant": str,
        "source_kind": str, "source_mu": float, "delta_K": int,
        "initial": str, "output": str,
        "times": tuple[float, ...], "norms": tuple[str, ...],
        "window": tuple[float, float] | None,
        "h_values": tuple[float, ...],
        "kernel_x_max": float, "kernel_points": int, "threads": int,
    }
    assert set(types) == set(resolved)
    updates = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        field_name = _KEY_TO_FIELD.get(key, key)
        if field_name not in resolved:
            raise ConfigError(f"config key '{key}' is not recognized")
        updates[field_name] = _coerce(key, raw, resolved[field_name])
    return replace(cfg, **updates)


def format_config(cfg: RunConfig) -> str:
    """Serialize a config so that parse_config round-trips it exactly."""
    out = []
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        key = _FIELD_TO_KEY.get(f.name, f.name)
        if value is None:
            rendered = ""
        elif isinstance(value, tuple):
            rendered = ",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            rendered = f"{value:.17g}"
        else:
            rendered = str(value)
        out.append(f"{key}={rendered}")
    return "\n".join(out) + "\n"


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = parse_config(fh, cfg)
    for item in args.override or []:
        cfg = parse_config([item], cfg)
    return cfg


def _build_problem(cfg: RunConfig, h: float | None = None) -> SolveConfig:
    h = cfg.h if h is None else h
    params = SolverParams(alpha=cfg.alpha, p=cfg.p)
    grid = GridSpec(h=h, T=cfg.T, x_min=cfg.x_min, x_max=cfg.x_max)
    try:
        kind = SourceKind(cfg.source_kind)
    except ValueError:
        raise ConfigError(f"config key 'source.kind': unknown kind {cfg.source_kind!r}") from None
    try:
        variant = SchemeVariant(cfg.variant)
    except ValueError:
        raise ConfigError(f"config key 'variant': unknown variant {cfg.variant!r}") from None
    spec = DeltaSpec(K=cfg.delta_K)
    source = SourceTerm(kind=kind, params=params, mu=cfg.source_mu)
    if cfg.initial == "delta":
        initial = discretize_delta(0.0, spec, grid)
    elif cfg.initial == "zero":
        initial = np.zeros(grid.n_space)
    else:
        raise ConfigError(f"config key 'initial': expected 'delta' or 'zero', got {cfg.initial!r}")
    return SolveConfig(
        params=params, grid=grid, source=source, initial=initial,
        variant=variant, delta_spec=spec,
    )


def _warn_stability(problem: SolveConfig) -> None:
    bound = stability_mesh_bound(problem.params)
    if problem.grid.h > bound:
        print(
            f"warning: h={problem.grid.h:g} violates the stability condition "
            f"h <= (1-alpha)^(1/(2 alpha)) = {bound:.6g}; the L2 bound is not guaranteed",
            file=sys.stderr,
        )


def _default_window(grid: GridSpec) -> tuple[float, float]:
    inset = grid.T + 2.0 * grid.h
    return (grid.x_min + inset, grid.x_max - inset)


def cmd_solve(cfg: RunConfig) -> int:
    problem = _build_problem(cfg)
    _warn_stability(problem)
    history = solve(problem)
    write_solution_csv(cfg.output, problem, history, times=cfg.times or None)
    print(f"wrote {cfg.output}: {problem.grid.n_space} cells, horizon T={cfg.T:g}")
    return 0


_PROFILE_OF_SOURCE = {
    SourceKind.WAIT_FIRST: ProfileKind.WAIT_FIRST,
    SourceKind.JUMP_FIRST: ProfileKind.JUMP_FIRST,
    SourceKind.STANDARD_WALK: ProfileKind.STANDARD_WALK,
}


def cmd_pdf_compare(cfg: RunConfig) -> int:
    problem = _build_problem(cfg)
    kind = problem.source.kind
    if kind not in _PROFILE_OF_SOURCE:
        raise ConfigError(f"config key 'source.kind': no closed-form density for {kind.value}")
    _warn_stability(problem)
    history = solve(problem)
    grid = problem.grid
    profile = SimilarityProfile(_PROFILE_OF_SOURCE[kind], cfg.alpha, cfg.p, check=False)
    analytic = profile_cell_averages(profile, cfg.T, grid)

    lo, hi = cfg.window if cfg.window is not None else _default_window(grid)
    x = grid.x
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    numeric = history.row(grid.n_time)
    diff = numeric[mask] - analytic[mask]
    for name in cfg.norms:
        err = discrete_norm(diff, grid.h, NormKind(name))
        print(f"{name} error at T={cfg.T:g}: {err:.6e}")

    with open(cfg.output, "w", newline="") as fh:
        fh.write(f"#alpha={cfg.alpha!r}\n#p={cfg.p!r}\n#h={grid.h!r}\n#T={cfg.T!r}\n")
        fh.write(f"#kind={kind.value}\n")
        fh.write("x,numeric,analytic\n")
        for xi, u, v in zip(x[mask], numeric[mask], analytic[mask]):
            fh.write(f"{xi:.17g},{u:.17g},{v:.17g}\n")
    print(f"wrote {cfg.output}")
    return 0


def _sweep_error(cfg: RunConfig, h: float) -> float:
    problem = _build_problem(cfg, h=h)
    history = solve(problem)
    grid = problem.grid
    numeric = history.row(grid.n_time)
    kind = problem.source.kind
    if kind is SourceKind.MONOMIAL:
        exact = monomial_solution(cfg.source_mu, cfg.alpha, cfg.T)
        width = grid.x_max - grid.x_min
        lo, hi = grid.x_min + width / 3.0, grid.x_max - width / 3.0
        expected = np.full(grid.n_space, exact)
    elif kind in _PROFILE_OF_SOURCE:
        profile = SimilarityProfile(_PROFILE_OF_SOURCE[kind], cfg.alpha, cfg.p, check=False)
        expected = profile_cell_averages(profile, cfg.T, grid)
        lo, hi = cfg.window if cfg.window is not None else _default_window(grid)
    else:
        raise ConfigError(f"config key 'source.kind': no oracle for {kind.value}")
    x = grid.x
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    return discrete_norm(numeric[mask] - expected[mask], h, NormKind(cfg.norms[0]))


def cmd_convergence(cfg: RunConfig) -> int:
    hs = tuple(sorted(cfg.h_values, reverse=True))
    if len(hs) < 3:
        raise ConfigError("config key 'h_values': need at least 3 mesh sizes for a slope")
    norm = NormKind(cfg.norms[0])
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            errors = list(pool.map(lambda h: _sweep_error(cfg, h), hs))
    else:
        errors = [_sweep_error(cfg, h) for h in hs]
    slope, _, r2 = estimate_order(list(zip(hs, errors)))
    print(f"alpha={cfg.alpha:g} {norm.value} slope: {slope:.4f} (r^2={r2:.5f})")
    write_convergence_csv(cfg.output, [(cfg.alpha, h, norm, e, slope) for h, e in zip(hs, errors)])
    print(f"wrote {cfg.output}")
    return 0


def cmd_mass(cfg: RunConfig) -> int:
    traces = {}
    problem = None
    for variant in (SchemeVariant.STANDARD, SchemeVariant.ADVANCED_SOURCE):
        problem = _build_problem(replace(cfg, variant=variant.value))
        _warn_stability(problem)
        history = solve(problem)
        traces[variant.value] = mass_series(history, problem.grid)
    t = problem.grid.t
    with open(cfg.output, "w", newline="") as fh:
        fh.write(f"#alpha={cfg.alpha!r}\n#p={cfg.p!r}\n#h={problem.grid.h!r}\n#T={cfg.T!r}\n")
        fh.write("t,standard,advanced_source\n")
        for n in range(len(t)):
            fh.write(
                f"{t[n]:.17g},{traces['standard'][n]:.17g},"
                f"{traces['advanced_source'][n]:.17g}\n"
            )
    for name, m in traces.items():
        print(f"{name}: final mass {m[-1]:.8f}, max {m.max():.8f}")
    print(f"wrote {cfg.output}")
    return 0


def cmd_kernel(cfg: RunConfig) -> int:
    if cfg.kernel_points < 3:
        raise ConfigError("config key 'kernel.points': need at least 3 points")
    query = KernelQuery(alpha=cfg.alpha, p=cfg.p)
    x = np.linspace(-cfg.kernel_x_max, cfg.kernel_x_max, cfg.kernel_points)
    # nudge samples off the light-cone singularities at x = +-1
    near_cone = np.abs(np.abs(x) - 1.0) < 5e-3
    x[near_cone] += np.where(np.abs(x[near_cone]) >= 1.0, 5e-3, -5e-3) * np.sign(x[near_cone])
    g = eval_G1(x, query)
    mass = kernel_mass(1.0, query)
    expected = expected_kernel_mass(1.0, cfg.alpha)
    residual = mass - expected
    with open(cfg.output, "w", newline="") as fh:
        fh.write(f"#alpha={cfg.alpha!r}\n#p={cfg.p!r}\n")
        fh.write(f"#mass={mass!r}\n#expected_mass={expected!r}\n")
        fh.write("x,G1\n")
        for xi, gi in zip(x, g):
            fh.write(f"{xi:.17g},{gi:.17g}\n")
    print(f"mass identity residual: {residual:.3e} (mass={mass:.8f}, expected={expected:.8f})")
    print(f"wrote {cfg.output}")
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "pdf-compare": cmd_pdf_compare,
    "convergence": cmd_convergence,
    "mass": cmd_mass,
    "kernel": cmd_kernel,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractransport",
        description="Finite-volume experiments for fractional-material-derivative transport",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cp = sub.add_parser(name)
        cp.add_argument("--config", help="flat key=value config file")
        cp.add_argument(
            "--override", action="append", metavar="KEY=VALUE",
            help="override a config key (repeatable)",
        )
        cp.add_argument("--threads", type=int, default=None, help="parallel sweep workers")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.threads is not None:
            cfg = replace(cfg, threads=args.threads)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalBlowupError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

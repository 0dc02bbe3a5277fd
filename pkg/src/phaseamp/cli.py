"""Command-line driver.

    phaseamp run --objective normal --sigma 10 --n 2^20 --k 0.002 --iters 3000 --seed 7 --out trace.csv
    phaseamp snapshot --objective quadratic --n 16 --k pi/225 --iters 1 --out snap.csv

Exit status: 0 on success, 2 on a configuration error (the message names the
offending flag), 1 on a runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analysis, schedule
from .errors import DomainError
from .objective import (
    DistributionSpec,
    InjectiveSpec,
    ObjectiveTable,
    load_table,
    make_injective,
    sample_distribution,
)
from .state import apply_diffusion, apply_phase_oracle, mean_amplitude, uniform_state, write_snapshot

OUTPUT_DIR_ENV = "PHASEAMP_OUTPUT_DIR"
DENSE_LIMIT = 2**22

DISTRIBUTIONS = {"normal": "normal", "skew-normal": "skew_normal", "skew_normal": "skew_normal",
                 "exponential": "exponential"}
INJECTIVE = ("linear", "quadratic", "cubic", "exp10")
COMMANDS = ("run", "scan-k", "greedy", "alternate", "study-size", "snapshot", "report")


class ConfigError(Exception):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


_DEC = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_K_RE = re.compile(rf"^(?:(?P<coef>{_DEC})\s*\*\s*)?(?P<pi>[+-]?pi)(?:\s*/\s*(?P<den>{_DEC}))?$|^(?P<plain>{_DEC})$")


def parse_k_expression(text: str) -> float:
    """Evaluate ``<decimal>``, ``pi/<decimal>`` or ``<decimal>*pi/<decimal>``."""
    s = text.strip().lower()
    m = _K_RE.match(s)
    if not m:
        raise ValueError(f"malformed k expression {text!r}")
    if m.group("plain") is not None:
        value = float(m.group("plain"))
    else:
        value = math.pi * (-1.0 if m.group("pi").startswith("-") else 1.0)
        if m.group("coef") is not None:
            value *= float(m.group("coef"))
        if m.group("den") is not None:
            den = float(m.group("den"))
            if den == 0:
                raise ValueError(f"division by zero in {text!r}")
            value /= den
    if not math.isfinite(value):
        raise ValueError(f"k expression {text!r} is not finite")
    return value


def parse_size(text: str) -> int:
    """Accept ``2^k``, ``2**k``, ``10^k`` or a plain integer."""
    s = text.strip()
    m = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", s)
    n = int(m.group(1)) ** int(m.group(2)) if m else int(s)
    if n < 2:
        raise ValueError(f"size must be >= 2, got {n}")
    return n


@dataclass
class ExperimentConfig:
    command: str
    objective: str | None = None
    objective_file: str | None = None
    n: int | None = None
    mu: float = 0.0
    sigma: float = 10.0
    alpha: float = 5.0
    lam: float = 1.0
    seed: int = 0
    sampling: str = "random"
    scale_divisor: int | None = None
    k: float | None = None
    k_min: float | None = None
    k_max: float | None = None
    grid_points: int = 21
    k_grid: list[float] | None = None
    tune: bool = False
    iters: int | None = None
    sizes: list[int] | None = None
    k_scale: float | None = None
    stage: str = "oracle"
    trace: str | None = None
    out: str | None = None
    descriptor: str | None = None
    report: str | None = None
    representation: str = "auto"
    threads: int | None = field(default=None, metadata={"resolved": False})

    def resolved(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        return d


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaseamp", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"phaseamp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, objective=True):
        if objective:
            sp.add_argument("--objective", help="normal | skew-normal | exponential | linear | quadratic | cubic | exp10")
            sp.add_argument("--objective-file", help="text file, one value per line")
            sp.add_argument("--n", help="state count: integer or 2^k")
            sp.add_argument("--n-exponent", type=int, help="state count as a power of two")
            sp.add_argument("--mu", type=float, default=0.0)
            sp.add_argument("--sigma", type=float, default=10.0)
            sp.add_argument("--alpha", type=float, default=5.0)
            sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--sampling", choices=("random", "quantile"), default="random")
            sp.add_argument("--scale-divisor", type=int)
            sp.add_argument("--representation", choices=("auto", "dense", "compressed"), default="auto")
        sp.add_argument("--out", help="primary output file")
        sp.add_argument("--threads", type=int, help="cap on worker threads (results do not depend on it)")

    sp = sub.add_parser("run", help="fixed-k run")
    common(sp)
    sp.add_argument("--k", required=True)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--descriptor")
    sp.add_argument("--report")

    sp = sub.add_parser("scan-k", help="grid search over k")
    common(sp)
    sp.add_argument("--k-min")
    sp.add_argument("--k-max")
    sp.add_argument("--grid-points", type=int, default=21)
    sp.add_argument("--tune", action="store_true", help="locate the optimum on a reduced table first, then scan a narrow window")
    sp.add_argument("--iters", type=int)
    sp.add_argument("--descriptor")
    sp.add_argument("--report")

    sp = sub.add_parser("greedy", help="per-iteration greedy k")
    common(sp)
    sp.add_argument("--k-grid", help="comma-separated k expressions (default: 64 log-spaced + 0)")
    sp.add_argument("--iters", type=int)
    sp.add_argument("--descriptor")
    sp.add_argument("--report")

    sp = sub.add_parser("alternate", help="alternating +k/-k schedule")
    common(sp)
    sp.add_argument("--k", required=True)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--descriptor")

    sp = sub.add_parser("study-size", help="P_solution/P_initial curves over sizes (injective objectives)")
    common(sp)
    sp.add_argument("--sizes", required=True, help="comma-separated sizes, e.g. 2^14,2^16")
    sp.add_argument("--k-scale", required=True, help="k = scale * pi / f_max(N), as a k expression")
    sp.add_argument("--iters", type=int, help="common iteration horizon (default: 3 sqrt(N) of the smallest size)")

    sp = sub.add_parser("snapshot", help="complex-plane amplitude table")
    common(sp)
    sp.add_argument("--k", required=True)
    sp.add_argument("--iters", type=int, default=1)
    sp.add_argument("--stage", choices=("oracle", "final"), default="oracle",
                    help="oracle: after the last oracle, before its diffusion; final: after the last diffusion")

    sp = sub.add_parser("report", help="query analysis of a trace file")
    common(sp, objective=False)
    sp.add_argument("--trace", required=True)
    return p


def _to_config(ns: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=ns.command)
    for name in ("objective", "objective_file", "mu", "sigma", "alpha", "lam", "seed", "sampling", "scale_divisor",
                 "grid_points", "tune", "iters", "stage", "trace", "out", "descriptor", "report", "representation",
                 "threads"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))

    def k_flag(flag, text):
        try:
            return parse_k_expression(text)
        except ValueError as e:
            raise ConfigError(flag, str(e)) from None

    if getattr(ns, "k", None) is not None:
        cfg.k = k_flag("--k", ns.k)
    if getattr(ns, "k_min", None) is not None:
        cfg.k_min = k_flag("--k-min", ns.k_min)
    if getattr(ns, "k_max", None) is not None:
        cfg.k_max = k_flag("--k-max", ns.k_max)
    if getattr(ns, "k_grid", None):
        cfg.k_grid = [k_flag("--k-grid", t) for t in ns.k_grid.split(",")]
    if getattr(ns, "k_scale", None) is not None:
        cfg.k_scale = k_flag("--k-scale", ns.k_scale)
    if getattr(ns, "sizes", None):
        try:
            cfg.sizes = [parse_size(t) for t in ns.sizes.split(",")]
        except ValueError as e:
            raise ConfigError("--sizes", str(e)) from None
    if getattr(ns, "n", None) is not None and getattr(ns, "n_exponent", None) is not None:
        raise ConfigError("--n", "give either --n or --n-exponent, not both")
    if getattr(ns, "n", None) is not None:
        try:
            cfg.n = parse_size(ns.n)
        except ValueError as e:
            raise ConfigError("--n", str(e)) from None
    elif getattr(ns, "n_exponent", None) is not None:
        if not 1 <= ns.n_exponent <= 40:
            raise ConfigError("--n-exponent", "must lie in [1, 40]")
        cfg.n = 2 ** ns.n_exponent
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("--threads", "must be >= 1")
    if cfg.iters is not None and cfg.iters < 1:
        raise ConfigError("--iters", "must be >= 1")
    if cfg.command == "report":
        return
    if (cfg.objective is None) == (cfg.objective_file is None):
        raise ConfigError("--objective", "give exactly one of --objective or --objective-file")
    if cfg.objective is not None:
        if cfg.objective not in DISTRIBUTIONS and cfg.objective not in INJECTIVE:
            raise ConfigError("--objective", f"unknown objective {cfg.objective!r}")
        if cfg.command == "study-size":
            if cfg.objective not in INJECTIVE:
                raise ConfigError("--objective", "study-size needs an injective objective")
        elif cfg.n is None:
            raise ConfigError("--n", "a generated objective needs a size")
        if cfg.objective in DISTRIBUTIONS:
            kind = DISTRIBUTIONS[cfg.objective]
            if kind in ("normal", "skew_normal") and not (math.isfinite(cfg.sigma) and cfg.sigma > 0):
                raise ConfigError("--sigma", f"must be > 0, got {cfg.sigma}")
            if kind == "skew_normal" and not math.isfinite(cfg.alpha):
                raise ConfigError("--alpha", "must be finite")
            if kind == "exponential" and not (math.isfinite(cfg.lam) and cfg.lam > 0):
                raise ConfigError("--lambda", f"must be > 0, got {cfg.lam}")
            if not 0 <= cfg.seed < 2**64:
                raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        if cfg.scale_divisor is not None and cfg.scale_divisor < 1:
            raise ConfigError("--scale-divisor", "must be a positive integer")
        if cfg.objective == "cubic" and max(cfg.sizes or [cfg.n or 2]) > 2**26:
            raise ConfigError("--n", "cubic objective overflows for N > 2^26")
    elif cfg.command == "study-size":
        raise ConfigError("--objective", "study-size needs an injective objective")
    if cfg.command == "scan-k":
        if not cfg.tune and (cfg.k_min is None or cfg.k_max is None):
            raise ConfigError("--k-min", "scan-k needs --k-min and --k-max (or --tune)")
        if cfg.k_min is not None and cfg.k_max is not None and not cfg.k_min < cfg.k_max:
            raise ConfigError("--k-max", "must exceed --k-min")
        if cfg.grid_points < 2:
            raise ConfigError("--grid-points", "must be >= 2")
    if cfg.command == "alternate" and cfg.iters is not None and cfg.iters < 2:
        raise ConfigError("--iters", "alternating schedule needs >= 2 iterations")
    if cfg.command == "study-size" and cfg.sizes and any(b <= a for a, b in zip(cfg.sizes, cfg.sizes[1:])):
        raise ConfigError("--sizes", "must be strictly ascending")


def build_table(cfg: ExperimentConfig, n: int | None = None) -> ObjectiveTable:
    n = n or cfg.n
    if cfg.objective_file is not None:
        return load_table(cfg.objective_file)
    if cfg.objective in DISTRIBUTIONS:
        spec = DistributionSpec(DISTRIBUTIONS[cfg.objective], mu=cfg.mu, sigma=cfg.sigma, alpha=cfg.alpha,
                                lam=cfg.lam, seed=cfg.seed, method=cfg.sampling)
        return sample_distribution(spec, n)
    return make_injective(InjectiveSpec(cfg.objective, n, cfg.scale_divisor))


def _compressed(cfg: ExperimentConfig, table: ObjectiveTable) -> bool:
    if cfg.representation == "auto":
        return table.n_states > DENSE_LIMIT
    return cfg.representation == "compressed"


def _output(path: str | None, default: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    p = Path(path) if path else Path(default)
    return p if p.is_absolute() else base / p


def _header(cfg: ExperimentConfig) -> str:
    return f"phaseamp {__version__}\nconfig: {json.dumps(cfg.resolved(), sort_keys=True)}"


def _finish_trace(cfg: ExperimentConfig, trace: schedule.RunTrace, default_name: str) -> str:
    out = _output(cfg.out, default_name)
    header = _header(cfg)
    schedule.write_trace(out, trace, header)
    desc = _output(cfg.descriptor, str(out.with_suffix(".json")))
    descriptor = schedule.run_descriptor(trace, cfg.resolved())
    descriptor["header"] = header
    schedule.write_descriptor(desc, descriptor)
    j, p = trace.peak()
    parts = [f"peak p_solution={p:.6g} at iter {j}"]
    try:
        rep = analysis.advantage_report(trace)
        parts.append(f"t_star={rep['t_star']}")
        parts.append(f"speedup={rep['speedup']:.6g}")
        if cfg.report:
            analysis.write_report(_output(cfg.report, cfg.report), rep, header)
    except ValueError:
        parts.append("t_star=undefined")
    return "; ".join(parts) + f" -> {out}"


def execute(cfg: ExperimentConfig) -> str:
    """Run one command; returns the one-line summary."""
    validate(cfg)
    if cfg.threads is not None:
        import numba

        numba.set_num_threads(min(cfg.threads, numba.config.NUMBA_NUM_THREADS))

    if cfg.command == "report":
        trace = schedule.read_trace(cfg.trace)
        rep = analysis.advantage_report(trace)
        out = _output(cfg.out, str(Path(cfg.trace).with_suffix(".report.json")))
        analysis.write_report(out, rep, _header(cfg))
        return f"t_star={rep['t_star']}; e_q={rep['e_q_star']:.6g}; speedup={rep['speedup']:.6g} -> {out}"

    if cfg.command == "study-size":
        sizes = cfg.sizes
        horizon = cfg.iters or schedule.default_iterations(sizes[0])
        spec = InjectiveSpec(cfg.objective, sizes[0], cfg.scale_divisor)

        def k_rule(n):
            return cfg.k_scale * math.pi / make_injective(InjectiveSpec(cfg.objective, n, cfg.scale_divisor)).f_max

        curves = schedule.size_scaling_study(spec, sizes, k_rule, lambda n: horizon)
        out = _output(cfg.out, "study_size.csv")
        with out.open("w") as fh:
            for line in _header(cfg).splitlines():
                fh.write(f"# {line}\n")
            fh.write("iter," + ",".join(f"ratio_{n}" for n, _ in curves) + "\n")
            for j in range(horizon + 1):
                fh.write(f"{j}," + ",".join(f"{c[j]:.17g}" for _, c in curves) + "\n")
        peaks = ", ".join(f"N={n}: {c.max():.6g}" for n, c in curves)
        return f"peak P_solution/P_initial {peaks} -> {out}"

    table = build_table(cfg)
    compressed = _compressed(cfg, table)
    iters = cfg.iters or schedule.default_iterations(table.n_states)

    if cfg.command == "run":
        trace = schedule.run_fixed_k(table, cfg.k, iters, compressed)
        return _finish_trace(cfg, trace, "run.csv")

    if cfg.command == "alternate":
        trace = schedule.alternating_k(table, cfg.k, iters, compressed)
        return _finish_trace(cfg, trace, "alternate.csv")

    if cfg.command == "greedy":
        trace = schedule.greedy_dynamic_k(table, iters, cfg.k_grid, compressed)
        return _finish_trace(cfg, trace, "greedy.csv")

    if cfg.command == "scan-k":
        f_max = table.f_max or 1.0
        k_min = cfg.k_min if cfg.k_min is not None else 0.2 * math.pi / f_max
        k_max = cfg.k_max if cfg.k_max is not None else 3.0 * math.pi / f_max
        if cfg.tune:
            res, _ = schedule.tune_k(table, k_min, k_max, iters, cfg.grid_points, compressed=compressed)
        else:
            res = schedule.scan_k(table, k_min, k_max, cfg.grid_points, iters, compressed)
        summary = _finish_trace(cfg, res.trace_best, "scan_k.csv")
        curve_path = _output(cfg.out, "scan_k.csv").with_suffix(".curve.csv")
        with curve_path.open("w") as fh:
            for line in _header(cfg).splitlines():
                fh.write(f"# {line}\n")
            fh.write("k,peak_p_solution\n")
            for k, p in res.curve:
                fh.write(f"{k:.17g},{p:.17g}\n")
        return f"k_best={res.k_best:.17g}; " + summary

    if cfg.command == "snapshot":
        trace_sched = schedule.OracleSchedule.constant(cfg.k, cfg.iters)
        state = uniform_state(table, compressed)
        for j, k in enumerate(trace_sched.entries, start=1):
            state = apply_phase_oracle(state, table, k)
            if j < len(trace_sched) or cfg.stage == "final":
                state = apply_diffusion(state)
        mean = mean_amplitude(state)
        out = _output(cfg.out, "snapshot.csv")
        header = _header(cfg) + f"\nmean: {mean.real:.17g},{mean.imag:.17g}"
        write_snapshot(out, state, table, header)
        best = state.amplitudes[-1]
        return f"state {table.n_states - 1} phase={np.angle(best):.6g} rad; |mean|={abs(mean):.6g} -> {out}"

    raise ConfigError("command", f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _to_config(ns)
        summary = execute(cfg)
    except ConfigError as e:
        print(f"phaseamp: error: {e}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as e:
        print(f"phaseamp: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())

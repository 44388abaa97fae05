"""Command-line front end: ``spinchannel <subcommand> [options]``.

Every subcommand writes a table of records (comma-separated with a header by
default, or a JSON list) to ``--output`` or standard output. Floats are printed
with 17 significant digits so identical runs are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import analysis, channel, oracle
from .echo import loschmidt_echo
from .errors import ConfigError, SpinChannelError
from .model import BasisString, ModelParams, broken_link_preset

SUBCOMMANDS = (
    "echo", "fidelity", "purity", "entropy", "scan-lambda", "scan-size",
    "generalized", "revival", "haar-check", "oracle-verify", "figure",
)


@dataclass
class SweepRecord:
    """One output row; ``std_error`` and ``n_samples`` are 0 for exact values."""

    n: int
    m: int
    gamma: float
    lam: float
    J: float
    epsilon: float
    t: float
    quantity: str
    value: float
    std_error: float = 0.0
    n_samples: int = 0
    seed: int = 0
    note: str = ""

    @classmethod
    def of(cls, params: ModelParams, t, quantity, value, std_error=0.0, n_samples=0, seed=0, note=""):
        return cls(params.n_qubits, params.spacing, params.gamma, params.lam, params.coupling,
                   params.epsilon, float(t), quantity, float(value), float(std_error), int(n_samples),
                   int(seed), note)


@dataclass
class RunConfig:
    """Model, grids, sampling and output settings of one CLI run."""

    model: ModelParams
    t_max: float = 10.0
    time_steps: int = 51
    lambda_grid: list = None
    n_samples: int = None
    seed: int = 42
    threads: int = 1
    output: str = None
    format: str = "csv"
    preset: str = "desk"
    x: str = None
    y: str = None
    n_values: list = None
    m_values: list = None
    t_star: float = 10.0
    quantity: str = "fidelity"
    threshold: float = analysis.FIT_THRESHOLD
    dim: int = None
    measure: str = "sphere"
    figure_id: int = None
    broken: bool = False
    cases: int = 200

    def __post_init__(self):
        if self.time_steps < 1:
            raise ConfigError("time grid must have at least one point")
        if self.lambda_grid is not None and len(self.lambda_grid) == 0:
            raise ConfigError("lambda grid must not be empty")
        if self.n_samples is not None and self.n_samples < 1:
            raise ConfigError("N_av must be at least 1 when sampling")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.time_steps) if self.time_steps > 1 else np.array([self.t_max])

    @property
    def lambdas(self) -> list:
        return list(self.lambda_grid) if self.lambda_grid is not None else [self.model.lam]

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "model"}
        d["model"] = self.model.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        if "model" not in data:
            raise ConfigError("config needs a 'model' section")
        model = ModelParams.from_dict(data.pop("model"))
        try:
            return cls(model=model, **data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


# formatting


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render(rows, fmt: str = "csv") -> str:
    rows = [asdict(r) if hasattr(r, "__dataclass_fields__") else dict(r) for r in rows]
    if fmt == "json":
        def clean(v):
            if isinstance(v, (np.floating, float)):
                v = float(v)
                return v if np.isfinite(v) else _fmt(v)
            if isinstance(v, np.integer):
                return int(v)
            return v
        return json.dumps([{k: clean(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


# subcommands


def _echo(cfg: RunConfig):
    p = cfg.model
    if cfg.x is None or cfg.y is None:
        raise ConfigError("echo needs --x and --y basis strings")
    rows = []
    for t in cfg.times:
        L = loschmidt_echo(p, cfg.x, cfg.y, t)
        rows.append({"n": p.n_qubits, "m": p.spacing, "gamma": p.gamma, "lam": p.lam, "J": p.coupling,
                     "epsilon": p.epsilon, "x": str(BasisString.parse(cfg.x)), "y": str(BasisString.parse(cfg.y)),
                     "t": float(t), "re": L.real, "im": L.imag})
    return rows


def _series_rows(cfg: RunConfig, params: ModelParams, quantity: str):
    times = cfg.times
    if cfg.n_samples is None:
        F, P = channel.exact_series(params, times, cfg.threads)
        vals = F if quantity == "fidelity" else P
        return [SweepRecord.of(params, t, quantity, v) for t, v in zip(times, vals)]
    s = channel.sampled_series(params, times, cfg.n_samples, cfg.seed, cfg.threads)
    vals, errs = (s.fidelity, s.fidelity_error) if quantity == "fidelity" else (s.purity, s.purity_error)
    return [SweepRecord.of(params, t, quantity, v, e, cfg.n_samples, cfg.seed) for t, v, e in zip(times, vals, errs)]


def _fidelity(cfg):
    return [r for lam in cfg.lambdas for r in _series_rows(cfg, cfg.model.replace(lam=lam), "fidelity")]


def _purity(cfg):
    return [r for lam in cfg.lambdas for r in _series_rows(cfg, cfg.model.replace(lam=lam), "purity")]


def _entropy(cfg):
    rows = []
    for lam in cfg.lambdas:
        p = cfg.model.replace(lam=lam)
        F, P = channel.exact_series(p, cfg.times, cfg.threads)
        for t, f, pur in zip(cfg.times, F, P):
            H = channel.channel_entropy(p, t)
            n = p.n_qubits
            rows += [
                SweepRecord.of(p, t, "channel_entropy", H),
                SweepRecord.of(p, t, "renyi_lower_bound", channel.renyi_lower_bound(pur)),
                SweepRecord.of(p, t, "fano_upper_bound", channel.fano_upper_bound(f, n)),
                SweepRecord.of(p, t, "hashing_bound", n - H),
                SweepRecord.of(p, t, "capacity_rate_estimate", 1.0 - H / n, note="unregularized"),
                SweepRecord.of(p, t, "loose_rate_display", channel.loose_rate_display(f), note="loose"),
            ]
    return rows


def _rate_name(quantity):
    return "alpha" if quantity == "fidelity" else "beta"


def _scan_rows(cfg: RunConfig, template: ModelParams, lambdas, note=""):
    scan = analysis.rate_scan(template, lambdas, cfg.times, cfg.n_samples, cfg.seed, cfg.quantity,
                              cfg.threshold, cfg.threads)
    name = _rate_name(cfg.quantity)
    n_s = cfg.n_samples or 0
    seed = cfg.seed if cfg.n_samples else 0
    rows = []
    for lam, rate, d in zip(scan.lambda_grid, scan.rates, scan.derivative):
        p = template.replace(lam=float(lam))
        err = scan.errors.get(float(lam), "")
        rows.append(SweepRecord.of(p, 0.0, name, rate, 0.0, n_s, seed, "; ".join(x for x in (note, err) if x)))
        rows.append(SweepRecord.of(p, 0.0, f"d{name}_dlambda", d, 0.0, n_s, seed, note))
    flag = "flat" if scan.flat else f"prominence={_fmt(scan.prominence)}"
    rows.append(SweepRecord.of(template.replace(lam=scan.peak_location) if np.isfinite(scan.peak_location)
                               else template, 0.0, f"d{name}_peak", scan.peak_location, 0.0, n_s, seed,
                               "; ".join(x for x in (note, flag) if x)))
    return rows


def _template(cfg: RunConfig) -> ModelParams:
    if cfg.broken:
        base = cfg.model
        return broken_link_preset(base.n_qubits, base.spacing, gamma=base.gamma, lam=base.lam,
                                  coupling=base.coupling, epsilon=base.epsilon, zero_modes=base.zero_modes)
    return cfg.model


def _scan_lambda(cfg):
    return _scan_rows(cfg, _template(cfg), cfg.lambdas, "broken" if cfg.broken else "")


def _scan_size(cfg):
    rows = []
    name = _rate_name(cfg.quantity)
    for n in cfg.n_values or [cfg.model.n_qubits]:
        p = cfg.model.replace(n_qubits=int(n), broken_bonds=frozenset())
        try:
            s = analysis.series_for(p, cfg.times, cfg.n_samples, cfg.seed, cfg.quantity, cfg.threads)
            fit = analysis.gaussian_rate(cfg.times, s, cfg.threshold)
            rows.append(SweepRecord.of(p, fit.window[1], name, fit.rate, 0.0, cfg.n_samples or 0,
                                       cfg.seed if cfg.n_samples else 0, f"points={fit.n_points}"))
        except SpinChannelError as exc:
            rows.append(SweepRecord.of(p, 0.0, name, float("nan"), note=f"{type(exc).__name__}: {exc}"))
    return rows


def _generalized(cfg):
    ms = cfg.m_values or [0, 1]
    scan = analysis.fidelity_difference_scan(cfg.model, ms, cfg.lambdas, cfg.t_star, cfg.n_samples, cfg.seed,
                                             cfg.threads)
    rows = []
    n_s, seed = cfg.n_samples or 0, (cfg.seed if cfg.n_samples else 0)
    for m, vals in scan.fidelities.items():
        for lam, v in zip(scan.lambda_grid, vals):
            p = cfg.model.replace(spacing=m, lam=float(lam), broken_bonds=frozenset())
            rows.append(SweepRecord.of(p, cfg.t_star, "fidelity", v, 0.0, n_s, seed))
    for (a, b), vals in scan.differences.items():
        for lam, v in zip(scan.lambda_grid, vals):
            p = cfg.model.replace(spacing=a, lam=float(lam), broken_bonds=frozenset())
            rows.append(SweepRecord.of(p, cfg.t_star, "fidelity_difference", v, 0.0, n_s, seed, f"m={a} vs m={b}"))
        rows.append(SweepRecord.of(cfg.model.replace(spacing=a, lam=scan.peaks[(a, b)], broken_bonds=frozenset()),
                                   cfg.t_star, "difference_peak", scan.peaks[(a, b)], 0.0, n_s, seed,
                                   f"m={a} vs m={b}"))
    return rows


def _revival(cfg):
    rows = []
    for lam in cfg.lambdas:
        p = cfg.model.replace(lam=lam)
        s = analysis.series_for(p, cfg.times, cfg.n_samples, cfg.seed, "fidelity", cfg.threads)
        n_s, seed = cfg.n_samples or 0, (cfg.seed if cfg.n_samples else 0)
        try:
            rv = analysis.revival_period(cfg.times, s)
            note = "perfect" if rv.perfect else "imperfect"
            rows.append(SweepRecord.of(p, rv.period, "revival_period", rv.period, 0.0, n_s, seed, note))
            rows.append(SweepRecord.of(p, rv.period, "revival_height", rv.height, 0.0, n_s, seed, note))
        except SpinChannelError as exc:
            rows.append(SweepRecord.of(p, 0.0, "revival_period", float("nan"), 0.0, n_s, seed,
                                       f"{type(exc).__name__}: {exc}"))
    return rows


def _haar_check(cfg):
    N = cfg.dim or cfg.model.n_states
    states = cfg.n_samples or 10**6
    rows = []
    for r in channel.haar_probability_check(N, states, cfg.seed, cfg.measure):
        rows.append({"N": N, "measure": cfg.measure, "pair_class": r.pair_class, "count": r.count,
                     "estimate": r.estimate, "std_error": r.std_error, "exact": r.exact,
                     "z_score": r.z_score, "pass": bool(r.z_score <= 3.0), "n_states": states, "seed": cfg.seed})
    return rows


def _oracle_verify(cfg):
    report = oracle.verify(count=cfg.cases, seed=cfg.seed)
    groups = {}
    for c in report.cases:
        key = (c.params.n_qubits, c.params.spacing)
        groups[key] = max(groups.get(key, 0.0), c.deviation)
    rows = [{"n": n, "m": m, "cases": sum(1 for c in report.cases if (c.params.n_qubits, c.params.spacing) == (n, m)),
             "max_deviation": d, "status": "PASS" if d <= report.tolerance else "FAIL"}
            for (n, m), d in sorted(groups.items())]
    rows.append({"n": "all", "m": "all", "cases": len(report.cases), "max_deviation": report.max_deviation,
                 "status": "PASS" if report.passed else "FAIL"})
    return rows


# figures

FIG_LAMBDAS = (0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0)


def figure_config(figure_id: int, preset: str = "desk", seed: int = 42, threads: int = 1):
    """Subcommand and run configs reproducing one figure's data.

    ``full`` runs the reference sizes (up to n = 50); ``desk`` keeps ``n <= 16`` and
    ``N_av <= 10**4``.
    """
    if preset not in ("desk", "full"):
        raise ConfigError(f"unknown preset {preset!r}")
    full = preset == "full"
    eps = 0.05
    common = dict(seed=seed, threads=threads)
    if figure_id == 3:
        n = 50 if full else 16
        model = ModelParams(n_qubits=n, epsilon=eps, zero_modes="empty")
        return [("fidelity", RunConfig(model, t_max=40.0, time_steps=81, lambda_grid=list(FIG_LAMBDAS),
                                       n_samples=50_000 if full else 10_000, **common))]
    if figure_id == 4:
        ns = (4, 6, 8, 10, 16, 30, 50) if full else (4, 6, 8, 10, 16)
        return [("fidelity", RunConfig(ModelParams(n_qubits=n, epsilon=eps), t_max=20.0, time_steps=81,
                                       n_samples=50_000 if full else 10_000, **common)) for n in ns]
    if figure_id == 5:
        n = 30 if full else 12
        model = ModelParams(n_qubits=n, epsilon=eps, zero_modes="empty")
        return [("purity", RunConfig(model, t_max=40.0, time_steps=81, lambda_grid=list(FIG_LAMBDAS),
                                     n_samples=50_000 if full else 10_000, **common))]
    if figure_id == 6:
        model = ModelParams(n_qubits=12, epsilon=eps, zero_modes="empty")
        lam = [round(v, 4) for v in np.arange(0.25, 2.0001, 0.05 if full else 0.125)]
        runs = []
        for m in range(0, 5 if full else 3):
            runs.append(("fidelity", RunConfig(model.replace(spacing=m), t_max=20.0, time_steps=41,
                                               lambda_grid=[0.25, 1.0, 2.0], n_samples=10_000 if full else 2_000,
                                               **common)))
        runs.append(("generalized", RunConfig(model, lambda_grid=lam, m_values=list(range(0, 5 if full else 3)),
                                              t_star=10.0, n_samples=10_000 if full else 2_000, **common)))
        return runs
    if figure_id == 7:
        model = ModelParams(n_qubits=12, epsilon=eps, zero_modes="empty")
        lam = [round(v, 4) for v in np.arange(0.5, 1.5001, 0.025 if full else 0.05)]
        n_av = 10_000 if full else 1_000
        runs = [("scan-lambda", RunConfig(model.replace(spacing=m), t_max=16.0, time_steps=41, lambda_grid=lam,
                                          n_samples=n_av, **common)) for m in range(5)]
        runs.append(("scan-lambda", RunConfig(model.replace(spacing=4), t_max=16.0, time_steps=41, lambda_grid=lam,
                                              n_samples=None, broken=True, **common)))
        return runs
    raise ConfigError(f"figure id must be one of 3, 4, 5, 6, 7 (got {figure_id})")


def reproduce_figure(figure_id: int, preset: str = "desk", seed: int = 42, threads: int = 1, fmt: str = "csv"):
    """Rows behind one figure, concatenated over its runs."""
    rows = []
    for sub, cfg in figure_config(figure_id, preset, seed, threads):
        rows += DISPATCH[sub](cfg)
    return rows


def _figure(cfg):
    if cfg.figure_id is None:
        raise ConfigError("figure needs --figure-id")
    return reproduce_figure(cfg.figure_id, cfg.preset, cfg.seed, cfg.threads)


DISPATCH = {
    "echo": _echo,
    "fidelity": _fidelity,
    "purity": _purity,
    "entropy": _entropy,
    "scan-lambda": _scan_lambda,
    "scan-size": _scan_size,
    "generalized": _generalized,
    "revival": _revival,
    "haar-check": _haar_check,
    "oracle-verify": _oracle_verify,
    "figure": _figure,
}


def run(subcommand: str, cfg: RunConfig) -> str:
    """Execute one subcommand and return the rendered table."""
    if subcommand not in DISPATCH:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    return render(DISPATCH[subcommand](cfg), cfg.format)


# argument parsing


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _grid(text):
    """``a:b:step`` range (inclusive) or a comma list."""
    if ":" in text:
        a, b, s = (float(v) for v in text.split(":"))
        count = int(round((b - a) / s)) + 1
        return [round(a + i * s, 12) for i in range(count)]
    return _floats(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinchannel", description="Spin-chain memory channel simulator")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    g = parser.add_argument_group("model")
    g.add_argument("--config", help="JSON run configuration; flags override it")
    g.add_argument("--n", type=int, dest="n_qubits")
    g.add_argument("--m", type=int, dest="spacing")
    g.add_argument("--gamma", type=float)
    g.add_argument("--lambda", type=float, dest="lam")
    g.add_argument("--lambda-grid", type=_grid)
    g.add_argument("--J", type=float, dest="coupling")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--broken-bonds", type=_ints)
    g.add_argument("--broken", action="store_true", default=None, help="use the broken-link layout")
    g.add_argument("--zero-modes", choices=("raise", "empty"))
    r = parser.add_argument_group("run")
    r.add_argument("--time-max", type=float, dest="t_max")
    r.add_argument("--time-steps", type=int)
    r.add_argument("--samples", type=int, dest="n_samples", help="N_av; omit for exact averages")
    r.add_argument("--seed", type=int)
    r.add_argument("--threads", type=int)
    r.add_argument("--output")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--preset", choices=("desk", "full"))
    r.add_argument("--x")
    r.add_argument("--y")
    r.add_argument("--n-values", type=_ints)
    r.add_argument("--m-values", type=_ints)
    r.add_argument("--t-star", type=float)
    r.add_argument("--quantity", choices=("fidelity", "purity"))
    r.add_argument("--threshold", type=float)
    r.add_argument("--dim", type=int, help="Hilbert-space dimension for haar-check")
    r.add_argument("--measure", choices=channel.MEASURES)
    r.add_argument("--figure-id", type=int)
    r.add_argument("--cases", type=int)
    r.add_argument("--dump-config", action="store_true", help="print the effective config as JSON and exit")
    return parser


MODEL_FLAGS = ("n_qubits", "spacing", "gamma", "lam", "coupling", "epsilon", "zero_modes")
RUN_FLAGS = ("t_max", "time_steps", "lambda_grid", "n_samples", "seed", "threads", "output", "format", "preset",
             "x", "y", "n_values", "m_values", "t_star", "quantity", "threshold", "dim", "measure", "figure_id",
             "broken", "cases")


def config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    model = dict(base.get("model", {}))
    for k in MODEL_FLAGS:
        v = getattr(args, k)
        if v is not None:
            model[k] = v
    if args.broken_bonds is not None:
        model["broken_bonds"] = args.broken_bonds
    model.setdefault("n_qubits", 4)
    run_cfg = {k: v for k, v in base.items() if k != "model"}
    for k in RUN_FLAGS:
        v = getattr(args, k)
        if v is not None:
            run_cfg[k] = v
    run_cfg["model"] = model
    return RunConfig.from_dict(run_cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.dump_config:
            sys.stdout.write(json.dumps(cfg.to_dict(), indent=1, sort_keys=True) + "\n")
            return 0
        text = run(args.subcommand, cfg)
    except (SpinChannelError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.subcommand == "oracle-verify" and "FAIL" in text:
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())

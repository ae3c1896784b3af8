"""Command-line experiment runner writing CSV tables.

Subcommands: ``local-probs``, ``sweep``, ``optimize`` and ``validate``.
Settings come from built-in defaults, then an optional ``key=value`` config
file (``--config``), then explicit flags. The seed falls back to the
``CENSORSENSE_SEED`` environment variable.

Exit codes: 0 success, 2 configuration error, 3 runtime failure,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields

from . import __version__, analytics
from .consensus import NetworkConfig
from .montecarlo import simulate
from .optimizer import GridSpec, optimized_comparison
from .sensing import DetectorParams, Thresholds, local_probs
from .validation import (
    check_brute_force_vs_mc,
    check_closed_form_at_full_connectivity,
    check_closed_form_vs_mc,
    check_sampler,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VALIDATION = 0, 2, 3, 4

SCENARIOS = {"worst": (0.2, 2.0), "best": (0.8, 4.0), "normal": (0.8, 2.0)}

# Thresholds used for the simulation-versus-analysis figures (p = 0.8, 2 dB).
DEFAULT_ETA = 10.3
DEFAULT_ETA0 = 7.0
DEFAULT_ETA1 = 14.6

LOCAL_PROBS_HEADER = ["threshold_lo", "threshold_hi", "pi_1_h1", "pi_0_h1", "pi_m1_h1", "pi_1_h0", "pi_0_h0", "pi_m1_h0"]
SWEEP_HEADER = ["k", "system", "source", "p_d", "p_fa", "p_e", "energy", "overhead", "se_pd", "se_pfa", "seed"]
OPTIMIZE_HEADER = [
    "scenario", "k", "system", "eta", "eta0", "eta1", "p_d", "p_fa", "p_e", "energy", "overhead",
    "gain_error_pct", "gain_energy_pct", "gain_overhead_pct",
]  # fmt: skip


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "normal"
    m: int = 51
    p: float = 0.8
    k_max: int = 10
    tb: int = 5
    gbar_db: float = 2.0
    prior_h0: float = 0.5
    trials: int = 20_000
    seed: int = 0
    tie_policy: str = "one_on_tie"
    mode: str = "decision_level"
    eta: float | None = None
    eta0: float | None = None
    eta1: float | None = None
    grid_lo: float = 0.0
    grid_hi: float = 60.0
    grid_step: float = 0.1
    out: str | None = None

    def network(self, k: int = 1, p: float | None = None) -> NetworkConfig:
        return NetworkConfig(self.m, self.p if p is None else p, k, self.tie_policy, self.prior_h0, 1.0 - self.prior_h0)

    def detector(self, gbar_db: float | None = None) -> DetectorParams:
        return DetectorParams(self.tb, self.gbar_db if gbar_db is None else gbar_db)

    def grid(self) -> GridSpec:
        return GridSpec(self.grid_lo, self.grid_hi, self.grid_step)

    def conventional_thresholds(self) -> Thresholds:
        return Thresholds.conventional(DEFAULT_ETA if self.eta is None else self.eta)

    def censoring_thresholds(self) -> Thresholds:
        return Thresholds.censoring(
            DEFAULT_ETA0 if self.eta0 is None else self.eta0,
            DEFAULT_ETA1 if self.eta1 is None else self.eta1,
        )

    def scenario_points(self) -> list[tuple[str, float, float]]:
        if self.scenario == "all":
            return [(name, *SCENARIOS[name]) for name in ("worst", "best", "normal")]
        return [(self.scenario, self.p, self.gbar_db)]


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_CASTS = {"int": int, "float": float, "str": str, "float | None": float, "str | None": str}


def _cast(key: str, raw):
    if raw is None:
        return None
    try:
        return _CASTS[_FIELD_TYPES[key]](raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment, dashes in keys are allowed."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _cast(key, value)
    return values


def build_config(args: argparse.Namespace, command: str) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {}
    for name in _FIELD_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if "seed" not in values and os.environ.get("CENSORSENSE_SEED"):
        values["seed"] = _cast("seed", os.environ["CENSORSENSE_SEED"])
    if "scenario" not in values:
        values["scenario"] = "all" if command == "optimize" else "normal"

    scenario = values["scenario"]
    if scenario == "all" and command != "optimize":
        raise ConfigError("scenario 'all' is only available for optimize")
    if scenario in SCENARIOS:
        preset_p, preset_db = SCENARIOS[scenario]
        for key, preset in (("p", preset_p), ("gbar_db", preset_db)):
            if key in values and values[key] != preset:
                raise ConfigError(f"scenario {scenario!r} fixes {key}={preset}, got {values[key]}")
            values[key] = preset
    elif scenario not in ("custom", "all"):
        raise ConfigError(f"unknown scenario {scenario!r}")

    cfg = ExperimentConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    try:
        cfg.network()
        cfg.detector()
        cfg.grid()
        cfg.conventional_thresholds()
        cfg.censoring_thresholds()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.k_max < 1:
        raise ConfigError("k_max must be >= 1")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.mode not in ("decision_level", "signal_level"):
        raise ConfigError(f"unknown simulation mode {cfg.mode!r}")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(command: str, cfg: ExperimentConfig, header: list[str], rows: list[list], extra=()) -> str:
    """CSV text with a ``#`` comment preamble recording version and full configuration."""
    buf = io.StringIO()
    buf.write(f"# censorsense {__version__} {command}\n")
    for key, value in asdict(cfg).items():
        if key != "out":
            buf.write(f"# {key}={_fmt(value)}\n")
    for line in extra:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, cfg: ExperimentConfig):
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_local_probs(cfg: ExperimentConfig) -> str:
    det = cfg.detector()
    explicit = []
    if cfg.eta is not None:
        explicit.append(cfg.conventional_thresholds())
    if cfg.eta0 is not None or cfg.eta1 is not None:
        explicit.append(cfg.censoring_thresholds())
    thresholds = explicit or [Thresholds.conventional(float(e)) for e in cfg.grid().axis()]
    rows = []
    for thr in thresholds:
        probs = local_probs(thr, det)
        rows.append([thr.lower, thr.upper, *probs.row("H1"), *probs.row("H0")])
    return render_csv("local-probs", cfg, LOCAL_PROBS_HEADER, rows)


def cmd_sweep(cfg: ExperimentConfig, workers: int = 1) -> str:
    det = cfg.detector()
    systems = (("conventional", cfg.conventional_thresholds()), ("censoring", cfg.censoring_thresholds()))
    rows = []
    for k in range(1, cfg.k_max + 1):
        net = cfg.network(k)
        for system, thr in systems:
            probs = local_probs(thr, det)
            rep = analytics.metric_report(net, probs, system)
            rows.append([k, system, "analytic", rep.p_d, rep.p_fa, rep.p_e, rep.avg_energy, rep.avg_overhead, None, None, cfg.seed])
            est = simulate(
                net, probs, trials=cfg.trials, seed=cfg.seed, mode=cfg.mode, det=det, thr=thr, workers=workers
            )
            rows.append([
                k, system, "simulated", est.p_d_hat, est.p_fa_hat, est.p_e_hat, est.avg_energy_hat,
                est.avg_overhead_hat, est.se_pd, est.se_pfa, cfg.seed,
            ])  # fmt: skip
    conv, cens = systems[0][1], systems[1][1]
    extra = [f"effective_thresholds=eta:{conv.eta!r} eta0:{cens.eta0!r} eta1:{cens.eta1!r}"]
    return render_csv("sweep", cfg, SWEEP_HEADER, rows, extra)


def cmd_optimize(cfg: ExperimentConfig, summary=None) -> str:
    summary = summary if summary is not None else sys.stderr
    rows = []
    for name, p, gbar_db in cfg.scenario_points():
        det = cfg.detector(gbar_db)
        summary.write(f"== scenario {name}: p={p} gbar={gbar_db} dB M={cfg.m} TB={cfg.tb}\n")
        for k in range(1, cfg.k_max + 1):
            conv, cens, conv_m, cens_m, gains = optimized_comparison(cfg.network(k, p), det, cfg.grid())
            th_c, th_s = conv.thresholds, cens.thresholds
            rows.append([name, k, "conventional", th_c.eta, None, None, conv.p_d, conv.p_fa, conv.p_e,
                         conv_m.avg_energy, conv_m.avg_overhead, None, None, None])  # fmt: skip
            rows.append([name, k, "censoring", None, th_s.eta0, th_s.eta1, cens.p_d, cens.p_fa, cens.p_e,
                         cens_m.avg_energy, cens_m.avg_overhead, gains.error, gains.energy, gains.overhead])  # fmt: skip
            summary.write(
                f"  K={k:2d} eta={th_c.eta:g} P_e={conv.p_e:.4f} | eta0={th_s.eta0:g} eta1={th_s.eta1:g} "
                f"P_e={cens.p_e:.4f} | gains: error {gains.error:.1f}% energy {gains.energy:.1f}% "
                f"overhead {gains.overhead:.1f}%\n"
            )
    points = " ".join(f"{name}:p={p!r},gbar_db={g!r}" for name, p, g in cfg.scenario_points())
    return render_csv("optimize", cfg, OPTIMIZE_HEADER, rows, [f"scenario_points={points}"])


def cmd_validate(cfg: ExperimentConfig, variance_scale: float = 1.0, report=None) -> int:
    """Run the oracle checks; returns the exit code."""
    report = report if report is not None else sys.stdout
    det = cfg.detector()
    checks = []
    checks += check_sampler(det, cfg.censoring_thresholds(), seed=cfg.seed)
    checks += check_sampler(det, cfg.conventional_thresholds(), seed=cfg.seed)
    checks += check_brute_force_vs_mc(trials=10**5, seed=cfg.seed)
    checks += check_closed_form_at_full_connectivity()
    checks += check_closed_form_vs_mc(
        cfg.network(),
        det,
        cfg.censoring_thresholds(),
        cfg.conventional_thresholds(),
        range(1, cfg.k_max + 1),
        trials=cfg.trials,
        seed=cfg.seed,
        variance_scale=variance_scale,
    )
    failed = [c for c in checks if not c.passed]
    for c in checks:
        report.write(c.line() + "\n")
    report.write(f"{len(checks) - len(failed)}/{len(checks)} checks passed\n")
    if failed:
        report.write("failed checks:\n")
        for c in failed:
            report.write("  " + c.line() + "\n")
        return EXIT_VALIDATION
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file (flags override it)")
    common.add_argument("--scenario", choices=["worst", "best", "normal", "custom", "all"])
    common.add_argument("--m", type=int, help="number of secondary users")
    common.add_argument("--p", type=float, help="link probability")
    common.add_argument("--k-max", dest="k_max", type=int, help="largest horizon K")
    common.add_argument("--tb", type=int, help="time-bandwidth product")
    common.add_argument("--gbar-db", dest="gbar_db", type=float, help="average SNR in dB")
    common.add_argument("--prior-h0", dest="prior_h0", type=float)
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point and hypothesis")
    common.add_argument("--seed", type=int, help="defaults to $CENSORSENSE_SEED, then 0")
    common.add_argument("--tie-policy", dest="tie_policy", choices=["one_on_tie", "zero_on_tie"])
    common.add_argument("--mode", choices=["decision_level", "signal_level"])
    common.add_argument("--eta", type=float)
    common.add_argument("--eta0", type=float)
    common.add_argument("--eta1", type=float)
    common.add_argument("--grid-lo", dest="grid_lo", type=float)
    common.add_argument("--grid-hi", dest="grid_hi", type=float)
    common.add_argument("--grid-step", dest="grid_step", type=float)
    common.add_argument("--out", help="output path, '-' for stdout")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo blocks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="censorsense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("local-probs", parents=[common], help="local decision probabilities")
    sub.add_parser("sweep", parents=[common], help="analytic and simulated metrics for K = 1..k_max")
    sub.add_parser("optimize", parents=[common], help="optimized thresholds and gains per scenario")
    validate = sub.add_parser("validate", parents=[common], help="run oracle checks")
    validate.add_argument("--inject-variance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = build_config(args, args.command)
        if args.workers < 1:
            raise ConfigError("workers must be >= 1")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %s with %s", args.command, cfg)
    try:
        if args.command == "validate":
            buf = io.StringIO()
            code = cmd_validate(cfg, args.inject_variance_scale, report=buf)
            _emit(buf.getvalue(), cfg)
            return code
        if args.command == "local-probs":
            text = cmd_local_probs(cfg)
        elif args.command == "sweep":
            text = cmd_sweep(cfg, workers=args.workers)
        else:
            text = cmd_optimize(cfg)
    except (ArithmeticError, ValueError, MemoryError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _emit(text, cfg)
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

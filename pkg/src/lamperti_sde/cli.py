"""Configuration-driven entry point writing experiment results as CSV files.

Config files are flat ``key = value`` text.  Lists use bracket syntax, e.g.
``lambdas = [6, 7, 8]``.  One experiment per invocation.  Recognized keys:

    experiment   boundary | convergence | path-comparison   (required)
    model        sis | nagumo | allen-cahn                   (required)
    lambdas      list of noise scales                        (required)
    schemes      list of scheme ids (default: all)
    T            time horizon
    dt           step size (boundary)
    dt_list      step-size ladder (convergence)
    ref_refinement  fine-grid factor for the reference run (convergence)
    N            sample count
    p            moment order (convergence)
    seed         base seed
    init         "uniform" or "fixed:<x0>"
    steps        grid steps (path-comparison)

Outputs land in the directory given by --out (default: current directory),
together with a manifest.txt recording the resolved configuration.  All
numeric CSV fields use 17 significant digits so values round-trip exactly.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import __version__
from .experiments import (
    InitialCondition,
    boundary_experiment,
    path_comparison,
    strong_error_experiment,
)
from .integrators import SCHEME_IDS
from .models import MODEL_IDS

_EXPERIMENTS = ("boundary", "convergence", "path-comparison")

_DEFAULT_DT_LIST = [2.0 ** -k for k in range(4, 9)]


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input."""


@dataclass
class ExperimentConfig:
    experiment: str
    model: str
    lambdas: List[float]
    schemes: List[str] = field(default_factory=list)
    horizon: float = 1.0
    dt: float = 1e-3
    dt_list: List[float] = field(default_factory=lambda: list(_DEFAULT_DT_LIST))
    ref_refinement: int = 64
    n_samples: int = 100
    p: float = 2.0
    seed: int = 0
    init: InitialCondition = field(default_factory=InitialCondition.uniform)
    steps: int = 50


def _parse_scalar(raw: str):
    raw = raw.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError(f"unterminated list: {raw!r}")
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(item) for item in inner.split(",")]
    return _parse_scalar(raw)


def _parse_init(raw) -> InitialCondition:
    if not isinstance(raw, str):
        raise ConfigError("init: expected 'uniform' or 'fixed:<x0>'")
    if raw == "uniform":
        return InitialCondition.uniform()
    if raw.startswith("fixed:"):
        try:
            return InitialCondition.fixed(float(raw[len("fixed:"):]))
        except ValueError as exc:
            raise ConfigError(f"init: bad fixed value in {raw!r}") from exc
    raise ConfigError(f"init: expected 'uniform' or 'fixed:<x0>', got {raw!r}")


def _require_number(entries: dict, key: str, default, *, integer: bool = False):
    if key not in entries:
        return default
    v = entries[key]
    if integer:
        if not isinstance(v, int):
            raise ConfigError(f"{key}: expected an integer, got {v!r}")
        return v
    if not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    return float(v)


def _check_dt(dt: float, horizon: float, key: str) -> None:
    if dt <= 0:
        raise ConfigError(f"{key}: step size must be positive, got {dt}")
    ratio = horizon / dt
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
        raise ConfigError(f"{key}: dt must divide T (got dt={dt}, T={horizon})")


def parse_config(text: str) -> ExperimentConfig:
    entries: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = _parse_value(raw)

    known = {
        "experiment", "model", "lambdas", "schemes", "T", "dt", "dt_list",
        "ref_refinement", "N", "p", "seed", "init", "steps",
    }
    unknown = sorted(set(entries) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")

    for key in ("experiment", "model", "lambdas"):
        if key not in entries:
            raise ConfigError(f"missing required key: {key}")

    experiment = entries["experiment"]
    if experiment not in _EXPERIMENTS:
        raise ConfigError(
            f"experiment: unknown kind {experiment!r}; valid kinds: {', '.join(_EXPERIMENTS)}"
        )
    model = entries["model"]
    if model not in MODEL_IDS:
        raise ConfigError(
            f"model: unknown id {model!r}; valid ids: {', '.join(MODEL_IDS)}"
        )
    lambdas = entries["lambdas"]
    if not isinstance(lambdas, list) or not lambdas:
        raise ConfigError("lambdas: expected a non-empty list")
    if not all(isinstance(v, (int, float)) and v > 0 for v in lambdas):
        raise ConfigError("lambdas: entries must be positive numbers")
    lambdas = [float(v) for v in lambdas]

    schemes = entries.get("schemes", ["ls-exact", "em", "sem", "te"])
    if not isinstance(schemes, list) or not schemes:
        raise ConfigError("schemes: expected a non-empty list")
    for s in schemes:
        if s not in SCHEME_IDS:
            raise ConfigError(
                f"schemes: unknown scheme {s!r}; valid ids: {', '.join(SCHEME_IDS)}"
            )

    default_t = 0.4 if experiment == "path-comparison" else 1.0
    horizon = _require_number(entries, "T", default_t)
    if horizon <= 0:
        raise ConfigError(f"T: horizon must be positive, got {horizon}")

    default_n = 300 if experiment == "convergence" else 100
    n_samples = _require_number(entries, "N", default_n, integer=True)
    if n_samples < 1:
        raise ConfigError(f"N: sample count must be at least 1, got {n_samples}")

    dt = _require_number(entries, "dt", 1e-3)
    if experiment == "boundary":
        _check_dt(dt, horizon, "dt")

    dt_list = entries.get("dt_list", list(_DEFAULT_DT_LIST))
    if experiment == "convergence":
        if not isinstance(dt_list, list) or len(dt_list) < 3:
            raise ConfigError("dt_list: expected a list of at least 3 step sizes")
        dt_list = [float(d) for d in dt_list]
        for d in dt_list:
            _check_dt(d, horizon, "dt_list")
        if sorted(dt_list, reverse=True) != dt_list or len(set(dt_list)) != len(dt_list):
            raise ConfigError("dt_list: step sizes must be strictly decreasing")

    ref_refinement = _require_number(entries, "ref_refinement", 64, integer=True)
    if ref_refinement < 16:
        raise ConfigError(f"ref_refinement: must be at least 16, got {ref_refinement}")

    p = _require_number(entries, "p", 2.0)
    if p < 1.0:
        raise ConfigError(f"p: moment order must be at least 1, got {p}")

    seed = _require_number(entries, "seed", 0, integer=True)

    default_init = "fixed:0.9" if experiment == "path-comparison" else "uniform"
    init = _parse_init(entries.get("init", default_init))

    steps = _require_number(entries, "steps", 50, integer=True)
    if steps < 1:
        raise ConfigError(f"steps: must be at least 1, got {steps}")

    return ExperimentConfig(
        experiment=experiment,
        model=model,
        lambdas=lambdas,
        schemes=list(schemes),
        horizon=horizon,
        dt=dt,
        dt_list=list(dt_list),
        ref_refinement=ref_refinement,
        n_samples=n_samples,
        p=p,
        seed=seed,
        init=init,
        steps=steps,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_lines(path: Path, lines: List[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def _manifest_lines(config: ExperimentConfig) -> List[str]:
    init = "uniform" if config.init.kind == "uniform" else f"fixed:{_fmt(config.init.value)}"
    lines = [
        f"build={__version__}",
        f"experiment={config.experiment}",
        f"model={config.model}",
        f"lambdas={','.join(_fmt(v) for v in config.lambdas)}",
        f"schemes={','.join(config.schemes)}",
        f"T={_fmt(config.horizon)}",
        f"seed={config.seed}",
        f"N={config.n_samples}",
        f"init={init}",
    ]
    if config.experiment == "boundary":
        lines.append(f"dt={_fmt(config.dt)}")
    elif config.experiment == "convergence":
        lines.append(f"dt_list={','.join(_fmt(d) for d in config.dt_list)}")
        lines.append(f"ref_refinement={config.ref_refinement}")
        lines.append(f"p={_fmt(config.p)}")
    else:
        lines.append(f"steps={config.steps}")
    return lines


def run(config: ExperimentConfig, out_dir: Path) -> List[Path]:
    """Execute one experiment and write its CSV artifacts plus a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    if config.experiment == "boundary":
        stats = boundary_experiment(
            config.model,
            config.schemes,
            config.lambdas,
            config.horizon,
            config.dt,
            config.n_samples,
            config.seed,
            config.init,
        )
        lines = ["lambda,scheme,preserved,total"]
        for s in stats:
            lines.append(f"{_fmt(s.noise_scale)},{s.scheme},{s.preserved},{s.samples}")
        target = out_dir / f"boundary_{config.model}.csv"
        _write_lines(target, lines)
        written.append(target)

    elif config.experiment == "convergence":
        for scheme in config.schemes:
            lines = ["lambda,dt,error,stderr,samples"]
            for lam in config.lambdas:
                report = strong_error_experiment(
                    config.model,
                    scheme,
                    lam,
                    config.horizon,
                    config.dt_list,
                    ref_refinement=config.ref_refinement,
                    n_samples=config.n_samples,
                    p=config.p,
                    seed=config.seed,
                    init=config.init,
                )
                for dt, err, se in zip(report.dt_list, report.errors, report.stderrs):
                    lines.append(
                        f"{_fmt(lam)},{_fmt(dt)},{_fmt(err)},{_fmt(se)},{report.samples}"
                    )
            target = out_dir / f"convergence_{config.model}_{scheme}.csv"
            _write_lines(target, lines)
            written.append(target)

    else:
        if config.init.kind != "fixed":
            raise ConfigError("init: path-comparison requires a fixed x0")
        t, columns = path_comparison(
            config.model,
            config.lambdas[0],
            config.init.value,
            config.horizon,
            config.steps,
            config.seed,
        )
        lines = ["t,ls,em,sem,te"]
        for m in range(len(t)):
            row = [_fmt(t[m])] + [_fmt(columns[k][m]) for k in ("ls", "em", "sem", "te")]
            lines.append(",".join(row))
        target = out_dir / f"paths_{config.model}.csv"
        _write_lines(target, lines)
        written.append(target)

    manifest = out_dir / "manifest.txt"
    _write_lines(manifest, _manifest_lines(config))
    written.append(manifest)
    return written


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lamperti-sde",
        description="Run boundary-preservation and strong-convergence experiments.",
    )
    parser.add_argument("--config", required=True, help="path to a key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=".", help="output directory for CSV artifacts")
    parser.add_argument(
        "--threads", type=int, default=1,
        help="worker cap; results are identical for any value",
    )
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text)
        if args.seed is not None:
            config.seed = args.seed
        written = run(config, Path(args.out))
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

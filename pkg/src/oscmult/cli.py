"""Command-line entry point: ``oscmult <experiment> [options]`` or ``oscmult run config.json``.

Each experiment writes ``<prefix>.csv`` (columns experiment, keys, value,
tolerance, pass), ``<prefix>.json`` (experiment, params, metrics, pass) and
``<prefix>.manifest.json`` (the resolved configuration) into the output
directory, plus any binary artifacts.  The exit status is 1 when an asserted
check fails, 2 on a bad configuration.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any, Optional, get_args, get_origin

import click
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import __version__
from .multiplier import spec_from_dict
from .suite import EXPERIMENTS, dumps, rows_to_csv


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dir: str = "."
    prefix: Optional[str] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    experiment: str
    seed: int
    multiplier: Optional[dict[str, Any]] = None
    params: dict[str, Any] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("experiment")
    @classmethod
    def _known(cls, v: str) -> str:
        if v not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {v!r}; choose from {', '.join(EXPERIMENTS)}")
        return v

    @field_validator("multiplier")
    @classmethod
    def _multiplier(cls, v):
        if v is not None:
            try:
                spec_from_dict(v)
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"invalid multiplier: {exc}") from exc
        return v


def execute(cfg: ExperimentConfig) -> bool:
    """Run one validated configuration, write its outputs, return whether it passed."""
    exp = EXPERIMENTS[cfg.experiment]
    params = exp.params(**cfg.params)
    spec = spec_from_dict(cfg.multiplier) if cfg.multiplier else None
    out = exp.run(params, spec, cfg.seed, cfg.tolerances)

    outdir = Path(cfg.output.dir)
    outdir.mkdir(parents=True, exist_ok=True)
    prefix = cfg.output.prefix or cfg.experiment
    resolved = {**cfg.model_dump(), "params": params.model_dump(), "version": __version__}
    (outdir / f"{prefix}.csv").write_text(rows_to_csv(cfg.experiment, out.rows))
    (outdir / f"{prefix}.json").write_text(dumps({
        "experiment": cfg.experiment, "params": params.model_dump(), "metrics": out.metrics, "pass": out.passed,
    }))
    (outdir / f"{prefix}.manifest.json").write_text(dumps(resolved))
    for name, blob in out.artifacts.items():
        (outdir / f"{prefix}.{name}").write_bytes(blob)

    for r in out.rows:
        if r.passed is False:
            click.echo(f"FAIL {cfg.experiment} {r.keys} value={r.value} tolerance={r.tolerance}", err=True)
    click.echo(f"{cfg.experiment}: {'pass' if out.passed else 'FAIL'} -> {outdir / prefix}.csv")
    return out.passed


def _validation_message(exc: ValidationError, scope: str = "") -> str:
    lines = []
    for e in exc.errors():
        loc = ".".join([scope] * bool(scope) + [str(p) for p in e["loc"]]) or "<root>"
        lines.append(f"  {loc}: {e['msg']}")
    return "invalid configuration:\n" + "\n".join(lines)


def _list(ctx: click.Context, _param, value: bool) -> None:
    if not value or ctx.resilient_parsing:
        return
    width = max(len(n) for n in EXPERIMENTS)
    for name, exp in EXPERIMENTS.items():
        click.echo(f"{name:<{width}}  {exp.topic}")
    ctx.exit(0)


@click.group()
@click.version_option(__version__)
@click.option("--list", "list_", is_flag=True, callback=_list, expose_value=False, is_eager=True,
              help="List every experiment and exit.")
def main() -> None:
    """Numerical experiments on oscillating spectral multipliers."""


@main.command("run")
@click.argument("config", type=click.Path(dir_okay=False))
def run_config(config: str) -> None:
    """Run the experiment described by a JSON configuration file."""
    path = Path(config)
    if not path.is_file():
        click.echo(f"invalid configuration: {config} does not exist", err=True)
        sys.exit(2)
    try:
        doc = json.loads(path.read_text())
        cfg = ExperimentConfig.model_validate(doc)
    except json.JSONDecodeError as exc:
        click.echo(f"invalid configuration: not JSON ({exc})", err=True)
        sys.exit(2)
    except ValidationError as exc:
        click.echo(_validation_message(exc), err=True)
        sys.exit(2)
    _check_params(cfg)
    sys.exit(0 if execute(cfg) else 1)


def _check_params(cfg: ExperimentConfig) -> None:
    try:
        EXPERIMENTS[cfg.experiment].params(**cfg.params)
    except ValidationError as exc:
        click.echo(_validation_message(exc, "params"), err=True)
        sys.exit(2)


def _multiplier_doc(theta, beta, cutoff, multiplier) -> Optional[dict]:
    if multiplier:
        return json.loads(multiplier)
    if theta is None and beta is None:
        return None
    if theta is None or beta is None:
        raise click.UsageError("--theta and --beta go together")
    return {"kind": "oscillating", "theta": theta, "beta": beta, "cutoff": cutoff}


def _scalar_type(annotation):
    """click type for a scalar parameter field, or None for structured fields."""
    args = [a for a in get_args(annotation) if a is not type(None)] if get_origin(annotation) else []
    base = args[0] if len(args) == 1 else annotation
    return {int: int, float: float, str: str, bool: bool}.get(base)


def _param_options(exp) -> list[click.Option]:
    opts = []
    for field, info in exp.params.model_fields.items():
        kind = _scalar_type(info.annotation)
        dest, flag = f"p__{field}", field.replace("_", "-")
        if kind is bool:
            opts.append(click.Option([f"--{flag}/--no-{flag}", dest], default=None))
        elif kind is not None:
            opts.append(click.Option([f"--{flag}", dest], type=kind, default=None))
        else:
            opts.append(click.Option([f"--{flag}", dest], default=None, metavar="JSON",
                                     help=f"{field} as a JSON list."))
    return opts


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        click.echo(f"invalid configuration: {path} does not exist", err=True)
        sys.exit(2)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        click.echo(f"invalid configuration: not JSON ({exc})", err=True)
        sys.exit(2)
    if not isinstance(doc, dict):
        click.echo("invalid configuration: top level must be an object", err=True)
        sys.exit(2)
    return doc


def _make_command(name: str):
    exp = EXPERIMENTS[name]

    def callback(config, seed, out, prefix, set_, tol, theta=None, beta=None, cutoff=None, multiplier=None, **kw):
        doc = _load_config(config)
        doc.setdefault("experiment", name)
        if doc["experiment"] != name:
            click.echo(f"invalid configuration: experiment is {doc['experiment']!r}, expected {name!r}", err=True)
            sys.exit(2)
        params = dict(doc.get("params") or {})
        for key, raw in kw.items():
            if raw is None:
                continue
            field = key[len("p__"):]
            if _scalar_type(exp.params.model_fields[field].annotation) is None:
                try:
                    raw = json.loads(raw)
                except json.JSONDecodeError:
                    raise click.BadParameter(f"--{field.replace('_', '-')} expects a JSON value")
            params[field] = raw
        for item in set_:
            key, _, raw = item.partition("=")
            try:
                params[key] = json.loads(raw)
            except json.JSONDecodeError:
                params[key] = raw
        doc["params"] = params
        tolerances = dict(doc.get("tolerances") or {})
        for item in tol:
            key, _, raw = item.partition("=")
            tolerances[key] = float(raw)
        doc["tolerances"] = tolerances
        if seed is not None:
            doc["seed"] = seed
        doc.setdefault("seed", 0)
        output = dict(doc.get("output") or {})
        if out is not None:
            output["dir"] = out
        if prefix is not None:
            output["prefix"] = prefix
        doc["output"] = output
        if exp.uses_multiplier:
            flagged = _multiplier_doc(theta, beta, cutoff or "auto", multiplier)
            if flagged is not None:
                doc["multiplier"] = flagged
        try:
            cfg = ExperimentConfig.model_validate(doc)
        except ValidationError as exc:
            click.echo(_validation_message(exc), err=True)
            sys.exit(2)
        _check_params(cfg)
        sys.exit(0 if execute(cfg) else 1)

    params = [
        click.Option(["--config"], default=None, help="JSON configuration; flags given here override it."),
        click.Option(["--seed"], type=int, default=None, help="RNG seed (default 0)."),
        click.Option(["--out"], default=None, help="Output directory (default: current directory)."),
        click.Option(["--prefix"], default=None, help="File name stem (defaults to the experiment name)."),
        click.Option(["--set", "set_"], multiple=True, metavar="KEY=VALUE",
                     help="Experiment parameter; VALUE is parsed as JSON when possible."),
        click.Option(["--tol"], multiple=True, metavar="NAME=VALUE", help="Override a tolerance."),
    ]
    if exp.uses_multiplier:
        params += [
            click.Option(["--theta"], type=float, default=None),
            click.Option(["--beta"], type=float, default=None),
            click.Option(["--cutoff"], type=click.Choice(["auto", "plus", "minus", "none"]), default=None),
            click.Option(["--multiplier"], default=None, help="Multiplier as a JSON object."),
        ]
    params += _param_options(exp)
    help_text = f"{exp.topic[0].upper()}{exp.topic[1:]}."
    return click.Command(name, callback=callback, params=params, help=help_text)


for _name in EXPERIMENTS:
    main.add_command(_make_command(_name))


if __name__ == "__main__":
    main()

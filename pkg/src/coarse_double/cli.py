"""Command-line front end.

    coarse-double generate <generator> [--param k=v]... [--out PATH]
    coarse-double compose --outer A.json --inner B.json [--out PATH]
    coarse-double adjoint --in A.json [--out PATH]
    coarse-double classify --in A.json [--levels 25,50,100] [--out PATH]
    coarse-double compare --in A.json --in B.json [--out PATH]
    coarse-double run <experiment> [--param k=v]... [--format json|csv|text] [--out PATH]
    coarse-double list

Exit codes: 0 success, 1 failed experiment check, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors, io, zoo
from .coarse import classify, coarse_equal
from .experiments import emit_report, list_experiments, run_experiment
from .metric import DoubleMetric, ScaleFamily
from .semigroup import adjoint, compose, unit_rep, zero_rep

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


@dataclass
class CliConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    seed: int = 0
    exhaustive: bool = False


    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        return cls(
            args.command, list(getattr(args, "inputs", [])), getattr(args, "out", None),
            getattr(args, "format", "json"), getattr(args, "seed", 0),
            getattr(args, "exhaustive", False),
        )


class UsageError(Exception):
    pass


def _param(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected k=v, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def _ray_double(rays=20, t_max=100, t_step=1.0, which="d", exhaustive=None):
    B = zoo.ray_bouquet(rays, np.arange(t_step, t_max + t_step / 2, t_step), exhaustive=exhaustive)
    return {"d": B.d, "e": B.e, "f": B.f}[which]


def _exp_double(N=25, which="involution", exhaustive=None):
    return getattr(zoo.exp_spaces(N), which)


def _log_double(N=64, exhaustive=None):
    return zoo.log_sequence_space(N)


def _f2(radius=3, exhaustive=None):
    return zoo.f2_ball(radius)[0]


def _zn(dim=2, p=1, radius=3, exhaustive=None):
    return zoo.zn_ball(dim, float("inf") if p == "inf" else p, radius)


def _interval(lo=-10, hi=10, exhaustive=None):
    return zoo.integer_interval(lo, hi)


def _spiral(kind="log", phi_max=6.0, step=0.5, phi_min=0.0, exhaustive=None):
    return zoo.spiral_sample(kind, phi_max, step, phi_min)


def _squares(N=20, exhaustive=None):
    return zoo.squares_space(N)


GENERATE = {
    "f2-ball": _f2, "zn-ball": _zn, "interval": _interval, "spiral": _spiral,
    "squares": _squares, "rays": _ray_double, "log-sequence": _log_double,
    "exp": _exp_double,
}
FROM_SPACE = {"unit": unit_rep, "zero": zero_rep}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coarse-double", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, inputs=False):
        p.add_argument("--out", help="write the result here (atomically) instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--exhaustive", action="store_true",
                       help="validate every triple when loading or building")
        if inputs:
            p.add_argument("--in", dest="inputs", action="append", default=[], metavar="PATH")

    g = sub.add_parser("generate", help="build a zoo space or double as JSON")
    g.add_argument("generator", choices=sorted([*GENERATE, *FROM_SPACE]))
    g.add_argument("--param", action="append", type=_param, default=[], metavar="K=V")
    common(g, inputs=True)

    c = sub.add_parser("compose", help="outer . inner (inner applied first)")
    c.add_argument("--outer", required=True)
    c.add_argument("--inner", required=True)
    common(c)

    a = sub.add_parser("adjoint", help="swap the two copies")
    common(a, inputs=True)

    k = sub.add_parser("classify", help="coarse class of a double")
    k.add_argument("--levels", help="comma-separated nested prefix sizes (default n/4,n/2,n)")
    common(k, inputs=True)

    q = sub.add_parser("compare", help="coarse equality of two doubles on one base")
    q.add_argument("--levels")
    common(q, inputs=True)

    r = sub.add_parser("run", help="run a named experiment")
    r.add_argument("experiment")
    r.add_argument("--param", action="append", type=_param, default=[], metavar="K=V")
    r.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common(r)

    sub.add_parser("list", help="list experiments")
    return ap


def _load(path: str, exhaustive: bool):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return io.load(p, exhaustive=True if exhaustive else None)


def _load_double(path: str, exhaustive: bool) -> DoubleMetric:
    d = _load(path, exhaustive)
    if not isinstance(d, DoubleMetric):
        raise UsageError(f"{path} holds a space, not a double")
    return d


def _family(d: DoubleMetric, levels: str | None) -> ScaleFamily:
    n = len(d)
    sizes = [int(s) for s in levels.split(",")] if levels else [max(1, n // 4), max(1, n // 2), n]
    if any(not 1 <= s <= n for s in sizes) or sizes != sorted(sizes):
        raise UsageError(f"levels must be increasing prefix sizes in 1..{n}")
    return ScaleFamily.from_windows(d, [np.arange(s) for s in sizes], sizes, d.name)


def _emit(text: str, out: str | None):
    if out:
        io.write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _compact(doc) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def _n_inputs(cfg: CliConfig, n: int) -> list[str]:
    if len(cfg.inputs) != n:
        raise UsageError(f"{cfg.command} needs exactly {n} --in argument(s)")
    return cfg.inputs


def dispatch(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = CliConfig.from_args(args)
    cmd = cfg.command
    if cmd == "list":
        for name, anchor in list_experiments():
            print(f"{name}\t{anchor}")
        return EXIT_OK
    if cmd == "run":
        report = run_experiment(args.experiment, dict(args.param))
        _emit(emit_report(report, cfg.format), cfg.out)
        return EXIT_OK if report.passed else EXIT_CHECK
    if cmd == "generate":
        params = dict(args.param)
        if args.generator in FROM_SPACE:
            (path,) = _n_inputs(cfg, 1)
            X = _load(path, cfg.exhaustive)
            if isinstance(X, DoubleMetric):
                X = X.base
            obj = FROM_SPACE[args.generator](X, **params)
        else:
            try:
                obj = GENERATE[args.generator](exhaustive=cfg.exhaustive or None, **params)
            except TypeError as exc:
                raise UsageError(str(exc)) from None
        _emit(io.dumps(obj), cfg.out)
        return EXIT_OK
    if cmd == "compose":
        outer = _load_double(args.outer, cfg.exhaustive)
        inner = _load_double(args.inner, cfg.exhaustive)
        _emit(io.dumps(compose(outer, inner, threads=None)), cfg.out)
        return EXIT_OK
    if cmd == "adjoint":
        (path,) = _n_inputs(cfg, 1)
        _emit(io.dumps(adjoint(_load_double(path, cfg.exhaustive))), cfg.out)
        return EXIT_OK
    if cmd == "classify":
        (path,) = _n_inputs(cfg, 1)
        d = _load_double(path, cfg.exhaustive)
        label = classify(d, _family(d, args.levels))
        if cfg.out:
            io.write_atomic(cfg.out, json.dumps(label.to_json(), indent=2) + "\n")
        print(_compact({"label": label.label.value}), end="")
        return EXIT_OK
    if cmd == "compare":
        a, b = (_load_double(p, cfg.exhaustive) for p in _n_inputs(cfg, 2))
        v = coarse_equal(a, b, _family(a, args.levels))
        _emit(_compact(v.to_json()), cfg.out)
        return EXIT_OK
    raise UsageError(f"unknown command {cmd}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    try:
        return dispatch(argv)
    except SystemExit as exc:  # argparse
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (errors.CoarseDoubleError, UsageError, FileNotFoundError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"coarse-double: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

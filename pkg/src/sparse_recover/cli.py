"""Command-line front end: ``sparse-recover {grid,count,apply,study,baseline,verify}``.

Exit codes: 0 success, 1 invalid arguments or config, 2 numerical failure
(overflow, validity window, oversized objects).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .errors import SparseRecoverError, TooLarge, ValidityWindow
from .index_sets import IndexSet, SmoothnessParams, dyadic_count_sum, energy_set, energy_set_eps, smolyak_set
from .sampling_operator import apply_Q, grid_csv, sampling_grid, smolyak_grid_count
from .spectral import NormKind, SpectralFunction

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _set_flags(p: argparse.ArgumentParser, with_function: bool = False) -> None:
    p.add_argument("--family", choices=["energy", "energy_eps", "smolyak"], help="index set family")
    p.add_argument("--d", type=int, help="torus dimension")
    p.add_argument("--alpha", type=float, help="dominating mixed smoothness")
    p.add_argument("--beta", type=float, help="isotropic part of the source smoothness")
    p.add_argument("--gamma", type=float, help="target smoothness")
    p.add_argument("--eps", type=float, help="epsilon of the modified energy set")
    p.add_argument("--xi", help="energy level xi (study: comma-separated list)")
    p.add_argument("--m", help="Smolyak level m (study: comma-separated list)")
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--out", help="output file (default: stdout)")
    if with_function:
        p.add_argument("--function", help="test family string or SpectralFunction JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparse-recover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grid", help="build an index set and dump it")
    _set_flags(g)
    g.add_argument("--format", choices=["json", "csv"], default="json")

    c = sub.add_parser("count", help="count sampling points of Q_Delta")
    _set_flags(c)
    c.add_argument("--format", choices=["json", "csv"], default="json")

    a = sub.add_parser("apply", help="apply Q_Delta to a test function")
    _set_flags(a, with_function=True)
    a.add_argument("--seed", type=int, help="seed for seedless family strings")
    a.add_argument("--format", choices=["json"], default="json")

    s = sub.add_parser("study", help="run a convergence study")
    _set_flags(s, with_function=True)
    s.add_argument("--target", help='target norm, e.g. "hgamma:gamma=1", "l2", "linf"')
    s.add_argument("--dof-mode", choices=["distinct", "multiset"])
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int, help="worker cap (0 = auto)")
    s.add_argument("--format", choices=["csv", "json"], default="csv")

    b = sub.add_parser("baseline", help="exact approximation numbers of the diagonal embedding")
    b.add_argument("--d", type=int)
    b.add_argument("--alpha", type=float)
    b.add_argument("--beta", type=float)
    b.add_argument("--gamma", type=float)
    b.add_argument("--target", choices=["isotropic", "mixed"])
    b.add_argument("--config", help='JSON config file (key "Kc" sets the cube radius)')
    b.add_argument("--out")
    b.add_argument("--format", choices=["csv", "json"], default="csv")

    v = sub.add_parser("verify", help="run the property verification suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.add_argument("--format", choices=["json"], default="json")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def _merged(args: argparse.Namespace) -> dict:
    """Config keys overridden by any flag that was given."""
    cfg = _load_config(getattr(args, "config", None))
    for key, val in vars(args).items():
        if key in ("command", "config", "out", "format") or val is None:
            continue
        cfg[key] = val
    return cfg


def _need(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise UsageError(f"missing required setting --{key.replace('_', '-')}")
    return cfg[key]


def _num_list(val, conv=float) -> list:
    if isinstance(val, (list, tuple)):
        items = list(val)
    else:
        items = [v for v in str(val).split(",") if v.strip()]
    try:
        return [conv(v) for v in items]
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad numeric list {val!r}") from exc


def _params(cfg: dict) -> SmoothnessParams:
    return SmoothnessParams(
        d=int(_need(cfg, "d")),
        alpha=float(_need(cfg, "alpha")),
        beta=float(cfg.get("beta", 0.0) or 0.0),
        gamma=float(cfg.get("gamma", 0.0) or 0.0),
        eps=float(cfg.get("eps", 0.0) or 0.0),
    )


def _single(val, conv):
    vals = _num_list(val, conv)
    if len(vals) != 1:
        raise UsageError(f"expected a single value, got {val!r}")
    return vals[0]


def _index_set(cfg: dict) -> IndexSet:
    family = _need(cfg, "family")
    if family == "smolyak":
        return smolyak_set(int(_need(cfg, "d")), _single(_need(cfg, "m"), int))
    p = _params(cfg)
    xi = _single(_need(cfg, "xi"), float)
    return energy_set(p, xi) if family == "energy" else energy_set_eps(p, xi)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_grid(args, cfg) -> str:
    s = _index_set(cfg)
    return _dump(s.to_json()) if args.format == "json" else grid_csv(s)


def cmd_count(args, cfg) -> str:
    s = _index_set(cfg)
    rep = sampling_grid(s)
    row = {
        "members": len(s),
        "multiset_count": rep.multiset_count,
        "distinct_count": rep.distinct_count,
        "dyadic_count_sum": dyadic_count_sum(s),
    }
    if s.provenance.value == "Smolyak":
        row["smolyak_grid_count"] = smolyak_grid_count(s.d, int(s.params["m"]))
    if args.format == "json":
        return _dump(row)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(row))
    w.writerow(list(row.values()))
    return buf.getvalue()


def _function(cfg: dict, d: int) -> SpectralFunction:
    from .testbed import materialize, parse_family

    spec = str(_need(cfg, "function"))
    if spec.endswith(".json") and os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            f = SpectralFunction.from_json(json.load(fh))
        if f.d != d:
            raise UsageError(f"function file has d={f.d}, expected {d}")
        return f
    fam = parse_family(spec)
    if hasattr(fam, "seed") and "seed=" not in spec and cfg.get("seed") is not None:
        import dataclasses

        fam = dataclasses.replace(fam, seed=int(cfg["seed"]))
    return materialize(fam, d)


def cmd_apply(args, cfg) -> str:
    s = _index_set(cfg)
    f = _function(cfg, s.d)
    return _dump(apply_Q(f, s).to_json())


def study_config(cfg: dict):
    from .convergence import StudyConfig

    family = _need(cfg, "family")
    key = "m" if family == "smolyak" else "xi"
    values = _num_list(_need(cfg, key), int if key == "m" else float)
    return StudyConfig(
        params=_params(cfg),
        set_family=family,
        values=tuple(values),
        target=NormKind.parse(str(_need(cfg, "target"))),
        function=str(_need(cfg, "function")),
        dof_mode=str(cfg.get("dof_mode", "distinct")),
        seed=int(cfg.get("seed", 0)),
        threads=int(cfg.get("threads", 0)),
        allow_reproduction=bool(cfg.get("allow_reproduction", False)),
    )


def cmd_study(args, cfg) -> str:
    from .convergence import records_csv, records_json, run_study

    sc = study_config(cfg)
    records = run_study(sc)
    return records_csv(records) if args.format == "csv" else records_json(sc, records)


def cmd_baseline(args, cfg) -> str:
    from .baselines import approx_numbers

    p = SmoothnessParams(
        d=int(_need(cfg, "d")),
        alpha=float(_need(cfg, "alpha")),
        beta=float(cfg.get("beta", 0.0) or 0.0),
        gamma=float(cfg.get("gamma", 0.0) or 0.0),
    )
    spec = approx_numbers(p, str(cfg.get("target", "isotropic")), int(cfg.get("Kc", 64)))
    if args.format == "csv":
        return spec.to_csv()
    return _dump(
        {
            "version": __version__,
            "params": p.to_dict(),
            "target": spec.target,
            "Kc": spec.Kc,
            "n_max": spec.n_max,
            "sigma_boundary_max": spec.boundary_max,
            "a_n": [float(v) for v in spec.sigma],
        }
    )


def cmd_verify(args, cfg) -> str:
    from .convergence import verify_suite

    return _dump(verify_suite(int(cfg.get("seed", 0))))


COMMANDS = {
    "grid": cmd_grid,
    "count": cmd_count,
    "apply": cmd_apply,
    "study": cmd_study,
    "baseline": cmd_baseline,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merged(args)
        text = COMMANDS[args.command](args, cfg)
        _emit(text, args.out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OverflowError, ValidityWindow, TooLarge) as exc:
        print(f"sparse-recover: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SparseRecoverError, ValueError, TypeError, KeyError) as exc:
        print(f"sparse-recover: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"sparse-recover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Configuration-driven batch driver.

    sov6v {verify,spectrum,bethe,tq-inhom,formfactors,all} [--config PATH] [--seed U64]
          [--out DIR] [--tol FLOAT] [--kappa RE,IM ...]

Exit codes: 0 when every selected check passes, 1 when some check fails,
2 for an invalid configuration or model, 3 when the report cannot be written.
"""
import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, InvalidModel
from .repspace import DEFAULT_ETA, ModelParams, _xi_violation, seeded_xi
from .suites import DEFAULT_KAPPAS, DEFAULT_TOLERANCES, SUITE_ORDER, Context, run_named, thread_count

SUBCOMMANDS = {
    "verify": ("elliptic", "repspace", "sovbasis", "spectrum"),
    "spectrum": ("spectrum",),
    "bethe": ("tq",),
    "tq-inhom": ("tqinhom",),
    "formfactors": ("formfactors",),
    "all": None,
}

_FIELDS = ("N", "x", "y", "omega", "eta", "xi", "kappa", "seed", "suites", "tol", "tolerances", "out")


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class RunConfig:
    N: int = 2
    x: int = 0
    y: int = 1
    omega: complex = 1j
    eta: complex = DEFAULT_ETA
    xi: object = "seeded"          # "seeded" or a tuple of complex
    kappa: tuple = DEFAULT_KAPPAS  # first entry is the model twist
    seed: int = 7
    suites: tuple = SUITE_ORDER
    tol: float = 1e-12
    tolerances: dict = field(default_factory=dict)
    out: str = "sov6v-out"

    def as_dict(self):
        return {
            "N": self.N, "x": self.x, "y": self.y,
            "omega": _pair(self.omega), "eta": _pair(self.eta),
            "xi": self.xi if self.xi == "seeded" else [_pair(v) for v in self.xi],
            "kappa": [_pair(k) for k in self.kappa],
            "seed": self.seed, "suites": list(self.suites), "tol": self.tol,
            "tolerances": dict(sorted(self.tolerances.items())), "out": self.out,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def xi_values(self):
        if self.xi == "seeded":
            return seeded_xi(self.N, self.seed, self.eta, self.omega, self.tol)
        return tuple(self.xi)

    def params(self):
        return ModelParams(self.N, self.x, self.y, self.omega, self.eta, self.xi_values(),
                           self.kappa[0], self.tol)


# ---------------------------------------------------------------------------
# parsing

def _complex(value, path):
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigError(f"{path}: expected a number or a [re, im] pair, got {value!r}")


def _int(value, path, lo=None, hi=None):
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(f"{path}: {value} outside [{lo}, {hi}]")
    return value


def parse_config(text):
    """Validated RunConfig from a JSON document; model invariants are checked eagerly."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(raw, dict):
        raise ConfigError("<root>: expected a JSON object")
    unknown = sorted(set(raw) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown field")
    cfg = RunConfig()
    if "N" in raw:
        cfg.N = _int(raw["N"], "N", 1, 8)
    for name in ("x", "y"):
        if name in raw:
            setattr(cfg, name, _int(raw[name], name, 0, 1))
    for name in ("omega", "eta"):
        if name in raw:
            setattr(cfg, name, _complex(raw[name], name))
    if cfg.omega.imag <= 0:
        raise ConfigError("omega: imaginary part must be positive")
    if "seed" in raw:
        cfg.seed = _int(raw["seed"], "seed", 0, 2**64 - 1)
    if "tol" in raw:
        if not isinstance(raw["tol"], (int, float)) or isinstance(raw["tol"], bool) or raw["tol"] <= 0:
            raise ConfigError(f"tol: expected a positive number, got {raw['tol']!r}")
        cfg.tol = float(raw["tol"])
    if "kappa" in raw:
        ks = raw["kappa"]
        if not isinstance(ks, list) or not ks:
            raise ConfigError("kappa: expected a non-empty list of [re, im] pairs")
        cfg.kappa = tuple(_complex(k, f"kappa[{i}]") for i, k in enumerate(ks))
        for i, k in enumerate(cfg.kappa):
            if k == 0:
                raise ConfigError(f"kappa[{i}]: must be nonzero")
    if "suites" in raw:
        s = raw["suites"]
        if not isinstance(s, list):
            raise ConfigError("suites: expected a list")
        for i, name in enumerate(s):
            if name not in SUITE_ORDER:
                raise ConfigError(f"suites[{i}]: unknown suite {name!r}")
        cfg.suites = tuple(n for n in SUITE_ORDER if n in s)
    if "tolerances" in raw:
        t = raw["tolerances"]
        if not isinstance(t, dict):
            raise ConfigError("tolerances: expected an object")
        for key, val in t.items():
            if key not in DEFAULT_TOLERANCES:
                raise ConfigError(f"tolerances.{key}: unknown check id")
            if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
                raise ConfigError(f"tolerances.{key}: expected a positive number")
        cfg.tolerances = {k: float(v) for k, v in t.items()}
    if "out" in raw:
        if not isinstance(raw["out"], str) or not raw["out"]:
            raise ConfigError("out: expected a non-empty path string")
        cfg.out = raw["out"]
    if "xi" in raw:
        xi = raw["xi"]
        if xi == "seeded":
            cfg.xi = "seeded"
        elif isinstance(xi, list):
            if len(xi) != cfg.N:
                raise ConfigError(f"xi: expected {cfg.N} entries, got {len(xi)}")
            cfg.xi = tuple(_complex(v, f"xi[{i}]") for i, v in enumerate(xi))
            bad = _xi_violation(cfg.xi, cfg.eta, cfg.omega, 1e3 * cfg.tol)
            if bad is not None:
                a, b, eps = bad
                raise ConfigError(f"xi: pair (a={a + 1}, b={b + 1}, eps={eps}) violates the "
                                  f"inhomogeneity condition (xi_a - xi_b + eps*eta on the lattice)")
        else:
            raise ConfigError("xi: expected \"seeded\" or a list of [re, im] pairs")
    cfg.params()  # InvalidModel for structural violations
    return cfg


# ---------------------------------------------------------------------------
# running and reporting

def run_suite(cfg, suites=None, threads=1):
    """Run the selected suites in dependency order and assemble the report dictionary."""
    selected = cfg.suites if suites is None else tuple(n for n in SUITE_ORDER if n in suites)
    ctx = Context(cfg.params(), cfg.seed, cfg.kappa, dict(cfg.tolerances), threads)
    results = [run_named(name, ctx) for name in selected]
    tables = {}
    for r in results:
        tables.update(r.tables)
    status = "PASS" if all(r.passed for r in results) else "FAIL"
    return {
        "config": cfg.as_dict(),
        "status": status,
        "suites": [{"name": r.name, "status": "PASS" if r.passed else "FAIL",
                    "checks": r.checks, "notes": r.notes} for r in results],
        "tables": tables,
    }


def report_json(report):
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=True) + "\n"


def emit_report(report, out_dir, formats=("json", "csv")):
    """Write report.json and one CSV per table; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = out / "report.json"
        path.write_text(report_json(report))
        written.append(path)
    if "csv" in formats:
        for name, table in sorted(report["tables"].items()):
            path = out / f"{name}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(table["columns"])
                for row in table["rows"]:
                    w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
            written.append(path)
    return written


def _kappa_arg(text):
    try:
        re_, im = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None
    if re_ == 0 and im == 0:
        raise argparse.ArgumentTypeError("kappa must be nonzero")
    return complex(re_, im)


def _seed_arg(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=_seed_arg, help="override the configuration seed")
    common.add_argument("--out", help="output directory (report.json and CSV tables)")
    common.add_argument("--tol", type=float, help="numerical zero tolerance of the model")
    common.add_argument("--kappa", type=_kappa_arg, action="append",
                        help="twist RE,IM; repeat for several (the first is the model twist)")
    parser = argparse.ArgumentParser(prog="sov6v", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else "{}"
        raw = json.loads(text) if text.strip() else {}
        if not isinstance(raw, dict):
            raise ConfigError("<root>: expected a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.out is not None:
            raw["out"] = args.out
        if args.tol is not None:
            raw["tol"] = args.tol
        if args.kappa:
            raw["kappa"] = [_pair(k) for k in args.kappa]
        cfg = parse_config(json.dumps(raw))
    except (ConfigError, InvalidModel) as exc:
        print(f"sov6v: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"sov6v: ConfigError: cannot read configuration ({exc})", file=sys.stderr)
        return 2
    suites = SUBCOMMANDS[args.command]
    report = run_suite(cfg, suites, threads=thread_count())
    for s in report["suites"]:
        for c in s["checks"]:
            res = "-" if c["residual"] is None else f"{c['residual']:.2e}"
            print(f"{c['status']}  {c['id']:<28} {res}")
    try:
        paths = emit_report(report, cfg.out)
    except OSError as exc:
        print(f"sov6v: cannot write report ({exc})", file=sys.stderr)
        return 3
    print(f"{report['status']}: wrote {len(paths)} file(s) to {cfg.out}")
    return 0 if report["status"] == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())

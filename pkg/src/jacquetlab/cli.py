"""``jacquetlab {compute|nearby|verify|catalog}``: reports as canonical JSON or tables.

Exit codes: 0 success, 1 verification failure, 2 window stabilization
failure, 3 input error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import numbers
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, jacquet, vfilt
from .exactlinalg import as_rational, format_rational
from .hcmod import DescriptorError, ModuleDescriptor, catalog_flags, catalog_modules
from .jacquet import NoStabilization, jacquet_module, structure_report
from .scalar import Rational
from .suites import DEFAULT_LAMBDAS, SUITES, Check, run_suite

EXIT_OK, EXIT_FAIL, EXIT_STAB, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3, 4
GOLDEN_DIR = Path(__file__).with_name("golden")
GOLDEN_LAMBDAS = ("1/2", "3/5", "1")


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization

def jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, (Rational, numbers.Rational)):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(jsonable(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical_json(data) -> str:
    return json.dumps(jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / name


def read_golden(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def catalog_golden_name(lam) -> str:
    return f"catalog_{format_rational(as_rational(lam)).replace('/', '_')}.json"


# ---------------------------------------------------------------------------
# configuration and reports

@dataclass
class RunConfig:
    command: str
    module: ModuleDescriptor | None = None
    lam: Rational | None = None
    depth: int = 6
    window: str = "auto"
    convention: str = "auto"
    fmt: str = "json"
    out: str | None = None
    lambda_set: list = field(default_factory=lambda: list(DEFAULT_LAMBDAS))
    suite: str = "all"

    def __post_init__(self):
        if self.depth < 1:
            raise InputError("depth must be >= 1")
        if self.window != "auto":
            try:
                size = int(self.window)
            except ValueError:
                raise InputError("--window must be 'auto' or an integer") from None
            if size < 8:
                raise InputError("--window must be at least 8")
        if self.convention != "auto" and self.convention not in vfilt.CONVENTIONS:
            raise InputError(f"unknown convention {self.convention!r}")
        if self.fmt not in ("json", "table"):
            raise InputError("--format must be json or table")

    def echo(self) -> dict:
        """Everything needed to rerun the command (output location excluded)."""
        out = {"command": self.command, "depth": self.depth, "window": self.window,
               "convention": self.convention}
        if self.module is not None:
            out["module"] = self.module.to_json()
        if self.lam is not None:
            out["lambda"] = format_rational(self.lam)
        if self.command == "verify":
            out["suite"] = self.suite
            out["lambda_set"] = [format_rational(as_rational(v)) for v in self.lambda_set]
        return out


@dataclass
class Report:
    config: dict
    convention: str | None = None
    module: dict | None = None
    eigenvalues: list = field(default_factory=list)
    blocks: dict = field(default_factory=lambda: {"e": [], "f": []})
    checks: list = field(default_factory=list)
    timing_ms: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        out = {
            "config": self.config,
            "version": __version__,
            "convention": self.convention,
            "module": self.module,
            "eigenvalues": self.eigenvalues,
            "blocks": self.blocks,
            "checks": [c.to_json() for c in self.checks],
            "timing_ms": self.timing_ms,
        }
        out.update(self.extra)
        return jsonable(out)


def _table_rows(eigenvalues) -> list[str]:
    head = f"{'value':>10} {'dim':>5} {'nilpotency':>11} {'stab_depth':>11}"
    rows = [head]
    for e in eigenvalues:
        rows.append(f"{e['value']:>10} {e['dim']:>5} {e['nilpotency']:>11} {e.get('stab_depth', '-'):>11}")
    return rows


def format_table(report: Report) -> str:
    data = report.to_json()
    lines = [f"version {data['version']}  convention {data['convention'] or '-'}"]
    if data["module"]:
        lines.append(f"module {json.dumps(data['module'], sort_keys=True)}")
    if data["eigenvalues"]:
        lines += _table_rows(data["eigenvalues"])
    for entry in data.get("entries", []):
        lines.append("")
        lines.append(f"[{entry['label']}]")
        lines += _table_rows(entry["eigenvalues"])
    if data["checks"]:
        lines.append("")
        width = max(len(c["name"]) for c in data["checks"])
        for c in data["checks"]:
            lines.append(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']:<{width}}  {c['details']}".rstrip())
    return "\n".join(lines) + "\n"


def write_report(report: Report, path: str | None, fmt: str = "json") -> None:
    """Write to ``path`` (stdout when None) with LF line endings; OSError propagates."""
    text = canonical_json(report) if fmt == "json" else format_table(report)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# payloads

def module_payload(M, depth: int) -> dict:
    J = jacquet_module(M, depth)
    r = structure_report(J)
    return {
        "label": M.label,
        "module": M.descriptor.to_json() if M.descriptor else None,
        "eigenvalues": r["eigenvalues"],
        "blocks": r["blocks"],
        "structure": {k: r[k] for k in ("chains", "chain_count", "max_nilpotency",
                                        "verma_pattern", "n_finite", "floor", "truncated", "seed")},
    }


def diagnostic_payload(depth: int = 6) -> dict:
    """The non-semisimplicity diagnostic on the irreducible principal series at lambda = 1."""
    p = module_payload(ModuleDescriptor("ps", lam=Rational(1), parity=1).build(), depth)
    jordan = [e["value"] for e in p["eigenvalues"] if e["nilpotency"] > 1]
    mx = p["structure"]["max_nilpotency"]
    return jsonable({"module": p["label"], "depth": depth, "max_nilpotency": mx,
                     "nonsemisimple_eigenvalues": jordan, "fires": mx >= 2})


def _designated(lam: Rational) -> int | None:
    """Parity of the irreducible principal series at a positive integer lambda."""
    if lam.denominator == 1 and lam >= 1:
        return int(lam) % 2
    return None


def catalog_entries(lam: Rational, depth: int) -> tuple[list, list]:
    entries, checks = [], []
    flags = catalog_flags(lam)
    if not flags["regular"] or not flags["dominant"]:
        checks.append(Check("degenerate regime", True,
                            f"regular={flags['regular']} dominant={flags['dominant']}"))
    for M in catalog_modules(lam):
        p = module_payload(M, depth)
        d = M.descriptor
        notes = {}
        st = p["structure"]
        if d.kind == "ds":
            notes["orientation"] = "holomorphic" if d.lowest_type > 0 else "antiholomorphic"
            single = st["chain_count"] == 1 and all(e["dim"] <= 1 for e in p["eigenvalues"])
            checks.append(Check(f"single chain {p['label']}", single, f"chains {st['chain_count']}"))
        if d.kind == "ps":
            if not flags["integral"]:
                checks.append(Check(f"semisimple h {p['label']}", st["max_nilpotency"] == 1,
                                    f"max nilpotency {st['max_nilpotency']}"))
            elif d.parity == _designated(lam):
                notes["designated"] = True
                checks.append(Check(f"non-semisimple diagnostic {p['label']}",
                                    st["max_nilpotency"] >= 2,
                                    f"max nilpotency {st['max_nilpotency']}"))
        p["annotations"] = notes
        entries.append(p)
    return entries, checks


def catalog_payload(lam, depth: int = 6) -> dict:
    """The golden-file content for one lambda (a catalog report without timing noise)."""
    lam = as_rational(lam)
    entries, checks = catalog_entries(lam, depth)
    return jsonable({"lambda": lam, "depth": depth, "flags": catalog_flags(lam),
                     "entries": entries, "checks": [c.to_json() for c in checks]})


# ---------------------------------------------------------------------------
# commands

def _convention_key() -> str:
    sigma, o = vfilt.pin_convention()
    return {v: k for k, v in vfilt.CONVENTIONS.items()}[(sigma, o)]


def cmd_compute(config: RunConfig) -> tuple[Report, int]:
    M = config.module.build()
    J = jacquet_module(M, config.depth)
    p = module_payload(M, config.depth)
    checks = [
        Check("eigenvalue tower", not jacquet.tower_defects(jacquet.eigen_tower(M, config.depth)), ""),
        Check("n-finite", J.n_finite, ""),
    ]
    rep = Report(config.echo(), None, p["module"], p["eigenvalues"], p["blocks"], checks,
                 extra={"structure": p["structure"]})
    return rep, EXIT_OK if rep.ok else EXIT_FAIL


def cmd_nearby(config: RunConfig) -> tuple[Report, int]:
    M = config.module.build()
    conv = config.convention
    N = vfilt.nearby_cycles(M, config.depth, conv)
    R = vfilt.theorem1_compare(M, config.depth, conv)
    J = jacquet_module(M, config.depth)
    stab = {s.eigenvalue: s.stabilization_depth for s in J.spaces}
    eig = [{"value": g, "dim": d, "nilpotency": n, "stab_depth": stab.get(g, 0)}
           for g, (d, n) in N.table.items()]
    ranks = N.block_ranks()
    blocks = {kind: [{"from": a, "to": b, "rank": r} for (a, b), r in sorted(ranks[kind].items(), reverse=True)]
              for kind in ("e", "f")}
    checks = [Check(f"(V2) coset {format_rational(a)}", ok, "") for a, ok in sorted(N.v2.items())]
    checks.append(Check("jacquet and nearby tables agree", R.ok, "" if R.ok else "tables differ"))
    rep = Report(config.echo(), N.convention, M.descriptor.to_json(), eig, blocks, checks,
                 extra={"nearby": {"representatives": N.representatives,
                                   "comparison": R.to_json()}})
    return rep, EXIT_OK if rep.ok else EXIT_FAIL


def cmd_verify(config: RunConfig) -> tuple[Report, int]:
    checks = run_suite(config.suite, config.lambda_set, config.depth)
    try:
        conv = _convention_key()
    except vfilt.ConventionError:
        conv = None
    rep = Report(config.echo(), conv, None, checks=checks)
    return rep, EXIT_OK if rep.ok else EXIT_FAIL


def cmd_catalog(config: RunConfig) -> tuple[Report, int]:
    lam = config.lam
    entries, checks = catalog_entries(lam, config.depth)
    rep = Report(config.echo(), None, None, checks=checks,
                 extra={"entries": entries, "flags": catalog_flags(lam)})
    return rep, EXIT_OK if rep.ok else EXIT_FAIL


COMMANDS = {"compute": cmd_compute, "nearby": cmd_nearby, "verify": cmd_verify, "catalog": cmd_catalog}


# ---------------------------------------------------------------------------
# argument handling

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacquetlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"jacquetlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--module", help="module descriptor as JSON")
        p.add_argument("--lambda", dest="lam", help="parameter p/q")
        p.add_argument("--parity", type=int, choices=(0, 1))
        p.add_argument("--depth", type=int, default=6)
        p.add_argument("--window", default="auto")
        p.add_argument("--convention", default="auto", choices=("auto", *vfilt.CONVENTIONS))
        p.add_argument("--format", dest="fmt", default="json", choices=("json", "table"))
        p.add_argument("--out")
        p.add_argument("--lambda-set", dest="lambda_set", default=",".join(DEFAULT_LAMBDAS))
        p.add_argument("--suite", default="all", choices=(*SUITES, "all"))
    return parser


def config_from_args(ns) -> RunConfig:
    module = None
    lam = None
    if ns.lam is not None:
        try:
            lam = as_rational(ns.lam)
        except (TypeError, ValueError, ZeroDivisionError):
            raise InputError(f"--lambda is not a rational: {ns.lam!r}") from None
    if ns.command in ("compute", "nearby"):
        if ns.module is not None:
            module = ModuleDescriptor.from_json(ns.module)
        elif lam is not None and ns.parity is not None:
            module = ModuleDescriptor("ps", lam=lam, parity=ns.parity)
        else:
            raise InputError("give --module, or --lambda with --parity")
    if ns.command == "catalog" and lam is None:
        raise InputError("catalog needs --lambda")
    lambda_set = [v.strip() for v in ns.lambda_set.split(",") if v.strip()]
    try:
        for v in lambda_set:
            as_rational(v)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"--lambda-set is not a list of rationals: {ns.lambda_set!r}") from None
    return RunConfig(ns.command, module, lam, ns.depth, ns.window, ns.convention, ns.fmt,
                     ns.out, lambda_set, ns.suite)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        config = config_from_args(ns)
        jacquet.set_start_window(None if config.window == "auto" else int(config.window))
        jacquet.max_window()
    except (InputError, DescriptorError, ValueError) as exc:
        print(f"jacquetlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    started = time.perf_counter()
    try:
        report, code = COMMANDS[config.command](config)
    except NoStabilization as exc:
        print(f"jacquetlab: no stabilization: {exc}", file=sys.stderr)
        return EXIT_STAB
    except (DescriptorError, jacquet.NotInCandidateSet) as exc:
        print(f"jacquetlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if os.environ.get("JACQUETLAB_TIMING") == "1":
        report.timing_ms = int((time.perf_counter() - started) * 1000)
    try:
        write_report(report, config.out, config.fmt)
    except OSError as exc:
        print(f"jacquetlab: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_FAIL:
        failed = [c.name for c in report.checks if not c.passed]
        print(f"jacquetlab: {len(failed)} check(s) failed: {', '.join(failed[:8])}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""``ndn-hns`` command line.

Exit codes: 0 success, 1 usage error, 2 validation or parse failure,
3 verification failure, 4 simulation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import codec, registry
from .errors import ConfigError, DisconnectedTopology, HnsError, NameParseError, TruncatedDigest
from .name import (
    AttributesComponent,
    Encoding,
    FreshnessKind,
    FreshnessSpec,
    HierarchicalComponent,
    Name,
    RootPrefix,
    TaskSpec,
    TaskType,
    build_name,
)
from .scenario import load_scenario
from .security import FIELDS, verify_fc, with_fc
from .sim import report, run

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY, EXIT_SIM = 0, 1, 2, 3, 4

HC_FLAGS = (
    ("campus", "campus_name"),
    ("campus_sub", "campus_sub_name"),
    ("location", "campus_location"),
    ("sub_location", "campus_sub_location"),
    ("originator", "originator_id"),
    ("super_type", "content_super_type"),
    ("sub_type", "content_sub_type"),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


# name subcommands

def _parse_freshness(text: str) -> FreshnessSpec:
    if text in ("latest", "0"):
        return FreshnessSpec.latest()
    if text in ("oldest", "1"):
        return FreshnessSpec.oldest()
    if text.startswith("ts:") and text[3:].isdigit():
        return FreshnessSpec.generated_at(int(text[3:]))
    raise ValueError("--freshness must be latest, oldest or ts:<seconds>")


def _name_from_flags(args) -> Name:
    missing = [f"--{flag.replace('_', '-')}" for flag, _ in HC_FLAGS if not getattr(args, flag)]
    if missing:
        raise ValueError(f"missing required hierarchical field(s): {', '.join(missing)}")
    hc = HierarchicalComponent(**{field: getattr(args, flag) for flag, field in HC_FLAGS})
    pairs = []
    for item in args.attr or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--attr expects key=value, got {item!r}")
        pairs.append((key, value))
    freshness = _parse_freshness(args.freshness) if args.freshness else None
    task = None
    if args.task:
        kind, sep, sub = args.task.partition("/")
        if not sep or kind not in ("sense", "action"):
            raise ValueError("--task expects sense/<sub-type> or action/<sub-type>")
        task = TaskSpec(TaskType(kind), sub)
    ac = None
    if pairs or freshness or args.popularity is not None or task:
        ac = AttributesComponent(tuple(pairs), freshness, args.popularity, task)
    name = build_name(RootPrefix(args.app), hc, ac)
    if args.with_fc:
        name = with_fc(name, Encoding(args.encoding))
    return name


def name_to_dict(name: Name) -> dict:
    out: dict = {
        "root": {"scheme": name.root.scheme, "app_code": name.root.app_code},
        "hc": {field: value for (_, field), value in zip(HC_FLAGS, name.hc.portions)},
        "ac": None,
        "fc": None,
    }
    if name.ac is not None:
        fresh = name.ac.freshness
        if fresh is None:
            fresh_out = None
        elif fresh.kind is FreshnessKind.GENERATED_AT:
            fresh_out = {"generated_at": fresh.timestamp}
        else:
            fresh_out = fresh.kind.value
        task = name.ac.task
        out["ac"] = {
            "attributes": [[k, v] for k, v in name.ac.attributes],
            "freshness": fresh_out,
            "popularity": name.ac.popularity,
            "task": None if task is None else {"type": task.task_type.value, "sub_type": task.task_sub_type},
        }
    if name.fc is not None:
        out["fc"] = {
            "encoding": name.fc.encoding.value,
            "truncated": name.fc.truncated,
            **{f: codec.render_digest(d, name.fc.encoding).replace("%2F", "/") for f, d in zip(FIELDS, name.fc.digests)},
        }
    return out


def cmd_name_build(args) -> int:
    try:
        name = _name_from_flags(args)
    except (ValueError, HnsError) as exc:
        return _fail(EXIT_INVALID, f"invalid name: {exc}")
    print(codec.serialize(name))
    return EXIT_OK


def cmd_name_parse(args) -> int:
    try:
        name = codec.parse(args.text, lenient=args.lenient)
    except NameParseError as exc:
        return _fail(EXIT_INVALID, f"{type(exc).__name__}: {exc.reason} at offset {exc.offset}")
    print(json.dumps(name_to_dict(name), indent=2, ensure_ascii=False))
    return EXIT_OK


def cmd_name_verify(args) -> int:
    try:
        name = codec.parse(args.text, lenient=args.lenient)
    except NameParseError as exc:
        return _fail(EXIT_INVALID, f"{type(exc).__name__}: {exc.reason} at offset {exc.offset}")
    if name.fc is None:
        return _fail(EXIT_INVALID, "no flat component")
    try:
        result = verify_fc(name, lenient=args.lenient)
    except TruncatedDigest as exc:
        return _fail(EXIT_INVALID, str(exc))
    print(json.dumps(result.as_dict(), indent=2))
    if result.prefix_only:
        return _fail(EXIT_INVALID, "truncated digests: prefix consistency only, verification refused")
    return EXIT_OK if result.verified else EXIT_VERIFY


def cmd_name_hash(args) -> int:
    try:
        name = codec.parse(args.text)
    except NameParseError as exc:
        return _fail(EXIT_INVALID, f"{type(exc).__name__}: {exc.reason} at offset {exc.offset}")
    print(codec.serialize(with_fc(name, Encoding(args.encoding))))
    return EXIT_OK


def cmd_registry_list(args) -> int:
    try:
        reg = registry.load_registry(args.file) if args.file else registry.default_registry()
    except (OSError, HnsError) as exc:
        return _fail(EXIT_INVALID, f"cannot load registry: {exc}")
    sys.stdout.write(reg.to_tsv())
    return EXIT_OK


# simulation

def _seed_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep or not lo.isdigit() or not hi.isdigit() or int(hi) < int(lo):
        raise UsageError("--seeds expects a..b with a <= b")
    return list(range(int(lo), int(hi) + 1))


def _suffixed(path: str | None, seed: int, many: bool) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p.with_name(f"{p.stem}.seed{seed}{p.suffix}") if many else p


def _run_one(config, seed: int, fmt: str, trace_path, metrics_path) -> tuple[int, float, float]:
    result = run(config.with_seed(seed))
    if trace_path is not None:
        Path(trace_path).write_text(result.trace_text, encoding="utf-8")
    if metrics_path is not None:
        Path(metrics_path).write_text(report(result.metrics, fmt), encoding="utf-8")
    return seed, result.metrics.satisfaction_rate, result.metrics.aggregation_ratio


def cmd_sim_run(args) -> int:
    try:
        config = load_scenario(args.scenario)
    except OSError as exc:
        return _fail(EXIT_INVALID, f"cannot read scenario: {exc}")
    except ConfigError as exc:
        return _fail(EXIT_INVALID, f"invalid scenario: {exc}")
    if args.seeds:
        seeds = _seed_range(args.seeds)
    else:
        seeds = [config.seed if args.seed is None else args.seed]
    many = len(seeds) > 1
    jobs = [
        (config, s, args.format, _suffixed(args.trace, s, many), _suffixed(args.metrics, s, many)) for s in seeds
    ]
    try:
        if many:
            with ProcessPoolExecutor() as pool:
                results = list(pool.map(_run_one, *zip(*jobs)))
        else:
            results = [_run_one(*jobs[0])]
    except (ConfigError, DisconnectedTopology) as exc:
        return _fail(EXIT_INVALID, f"invalid scenario: {exc}")
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 4
        return _fail(EXIT_SIM, f"simulation failed: {exc}")
    for seed, sat, agg in results:
        print(f"seed={seed} satisfaction_rate={sat:.6f} aggregation_ratio={agg:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ndn-hns", description="Hybrid IoT naming for NDN: name tools and campus simulator.")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    reg = sub.add_parser("registry", help="application category registry")
    reg_sub = reg.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = reg_sub.add_parser("list", help="print the registry as CODE<TAB>Title<TAB>Description")
    p.add_argument("--file", help="registry TSV file (default: built-in 14 categories)")
    p.set_defaults(func=cmd_registry_list)

    name = sub.add_parser("name", help="build, parse, verify and hash names")
    name_sub = name.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = name_sub.add_parser("build", help="assemble a canonical name from fields")
    p.add_argument("--app", default="SBC", help="application code (default SBC)")
    for flag, field in HC_FLAGS:
        p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, help=f"hierarchical {field} (required)")
    p.add_argument("--attr", action="append", metavar="KEY=VALUE", help="attribute pair, repeatable")
    p.add_argument("--freshness", help="latest, oldest or ts:<seconds>")
    p.add_argument("--popularity", type=int)
    p.add_argument("--task", help="sense/<sub-type> or action/<sub-type>")
    p.add_argument("--with-fc", action="store_true", help="append the SHA-256 flat component")
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default="hex")
    p.set_defaults(func=cmd_name_build)

    p = name_sub.add_parser("parse", help="decode a name to JSON")
    p.add_argument("text")
    p.add_argument("--lenient", action="store_true", help="accept abbreviated digests like 968cbab1de...")
    p.set_defaults(func=cmd_name_parse)

    p = name_sub.add_parser("verify", help="check the flat component against the hierarchical fields")
    p.add_argument("text")
    p.add_argument("--lenient", action="store_true", help="report prefix consistency of abbreviated digests")
    p.set_defaults(func=cmd_name_verify)

    p = name_sub.add_parser("hash", help="print the name with a freshly computed flat component")
    p.add_argument("text")
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default="hex")
    p.set_defaults(func=cmd_name_hash)

    sim = sub.add_parser("sim", help="campus network simulation")
    sim_sub = sim.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sim_sub.add_parser("run", help="run a scenario file")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--seeds", help="seed sweep a..b, run in parallel; output files get a .seedN suffix")
    p.add_argument("--trace", help="trace output file")
    p.add_argument("--metrics", help="metrics output file")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_sim_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, str(exc))


if __name__ == "__main__":
    sys.exit(main())

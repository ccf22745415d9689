"""``dpvkit`` command line.

JSON goes to stdout, human-readable messages to stderr. Exit status: 0 on
success, 1 when diagnostics are reported (any diagnostic under ``--strict``,
otherwise only error-severity ones), 2 on errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .build import build, changelog, read_sheet, write_outputs, VocabSnapshot
from .io import load_vocab_dir, read_graph
from .query import ancestors, in_range, is_a
from .rdf import IRI, RDFError, serialize_turtle
from .records import RecordPolicy, extract_record, validate_record, validation_report
from .registry import default_registry, load_manifest, resolve
from .semantics import convert, diagnose_usage
from .vocab import SemanticsMode, detect_mode, load_vocabulary, validate_wellformed

ENV_VOCAB = "DPVKIT_VOCAB"

# option defaults applied after the config file
_DEFAULTS = {"level": "complete", "strict": False, "version": None, "extension": "", "out": "."}


class CLIError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpvkit", description="DPV vocabulary and consent-record toolkit")
    p.add_argument("--version", action="version", version=f"dpvkit {__version__}")
    p.add_argument("--config", help="JSON file of option defaults; flags override it")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="syntax-check a Turtle file and count its triples")
    sp.add_argument("file")

    sp = sub.add_parser("convert", help="rewrite a vocabulary in the other serialization")
    sp.add_argument("file")
    sp.add_argument("--to", required=True, choices=["skos", "owl"])
    sp.add_argument("--out", dest="output", help="output file (default: stdout)")

    sp = sub.add_parser("query", help="taxonomy queries against a vocabulary")
    qsub = sp.add_subparsers(dest="query", required=True)
    q = qsub.add_parser("ancestors")
    q.add_argument("concept")
    q.add_argument("--vocab")
    q = qsub.add_parser("is-a")
    q.add_argument("concept")
    q.add_argument("family")
    q.add_argument("--vocab")
    q = qsub.add_parser("in-range")
    q.add_argument("property")
    q.add_argument("value")
    q.add_argument("--vocab")

    sp = sub.add_parser("validate", help="validate records, vocabularies or usage graphs")
    vsub = sp.add_subparsers(dest="target", required=True)
    v = vsub.add_parser("record")
    v.add_argument("file")
    v.add_argument("--vocab")
    v.add_argument("--level", choices=["structural", "complete"])
    v.add_argument("--policy")
    v.add_argument("--strict", action="store_true", default=None)
    v = vsub.add_parser("vocab")
    v.add_argument("path", nargs="?")
    v.add_argument("--strict", action="store_true", default=None)
    v = vsub.add_parser("usage")
    v.add_argument("file")
    v.add_argument("--vocab")
    v.add_argument("--strict", action="store_true", default=None)

    sp = sub.add_parser("diff", help="changelog between two vocabulary releases")
    sp.add_argument("old")
    sp.add_argument("new")

    sp = sub.add_parser("build", help="build a vocabulary from a CSV sheet")
    sp.add_argument("sheet")
    sp.add_argument("--manifest")
    sp.add_argument("--version", dest="version")
    sp.add_argument("--extension")
    sp.add_argument("--out")
    sp.add_argument("--previous", help="earlier release (.ttl) to diff against")

    sp = sub.add_parser("resolve", help="split an IRI into extension, version and local name")
    sp.add_argument("iri")
    sp.add_argument("--manifest")
    return p


def _apply_config(args: argparse.Namespace) -> None:
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise CLIError("config file must hold a JSON object")
    for key, value in vars(args).items():
        if value is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in _DEFAULTS:
                setattr(args, key, _DEFAULTS[key])
    if getattr(args, "vocab", "absent") is None:
        args.vocab = os.environ.get(ENV_VOCAB) or None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _expand(cg, name: str) -> IRI:
    if "://" in name:
        return IRI(name.strip("<>"))
    try:
        return cg.expand(name)
    except RDFError:
        prefix = name.partition(":")[0]
        base = default_registry().prefixes().get(prefix)
        if base is None:
            raise CLIError(f"cannot expand {name!r}: unknown prefix {prefix!r}") from None
        return IRI(base + name.partition(":")[2])


def _exit_for(diags: list, strict: bool) -> int:
    if strict and diags:
        return 1
    return 1 if any(d.severity == "error" for d in diags) else 0


def _report(diags: list) -> None:
    for d in diags:
        print(f"{d.severity}: {d.code} at {d.path or '-'}: {d.message}", file=sys.stderr)


def _load_snapshot(path: str) -> VocabSnapshot:
    g = read_graph(path)
    return VocabSnapshot("", "", load_vocabulary(g, detect_mode(g)))


def _cmd_parse(args) -> int:
    g = read_graph(args.file)
    _emit({"file": args.file, "triples": len(g)})
    return 0


def _cmd_convert(args) -> int:
    g = read_graph(args.file)
    cg = load_vocabulary(g, detect_mode(g))
    target = SemanticsMode.parse(args.to)
    text = serialize_turtle(convert(cg, target).source)
    if args.output:
        Path(args.output).write_text(text, "utf-8")
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_query(args) -> int:
    cg = load_vocab_dir(args.vocab)
    if args.query == "ancestors":
        _emit([a.value for a in ancestors(cg, _expand(cg, args.concept))])
    elif args.query == "is-a":
        _emit(is_a(cg, _expand(cg, args.concept), _expand(cg, args.family)))
    else:
        _emit(in_range(cg, _expand(cg, args.property), _expand(cg, args.value)))
    return 0


def _cmd_validate(args) -> int:
    if args.target == "record":
        cg = load_vocab_dir(args.vocab)
        record = extract_record(read_graph(args.file), cg)
        policy = RecordPolicy.load(args.policy) if args.policy else RecordPolicy.load()
        diags = validate_record(record, cg, args.level, policy)
        _emit(validation_report(record, args.level, diags))
    elif args.target == "vocab":
        cg = load_vocab_dir(args.path)
        diags = validate_wellformed(cg)
        _emit({"mode": cg.mode.value, "concepts": len(cg.concepts), "diagnostics": [d.to_json() for d in diags]})
    else:
        cg = load_vocab_dir(args.vocab)
        diags = diagnose_usage(cg, read_graph(args.file))
        _emit({"mode": cg.mode.value, "diagnostics": [d.to_json() for d in diags]})
    _report(diags)
    return _exit_for(diags, bool(args.strict))


def _cmd_diff(args) -> int:
    _emit(changelog(_load_snapshot(args.old), _load_snapshot(args.new)))
    return 0


def _cmd_build(args) -> int:
    registry = load_manifest(args.manifest) if args.manifest else default_registry()
    ext = registry.extension(args.extension)
    version = args.version or registry.latest
    result = build(read_sheet(args.sheet), ext, version, registry)
    previous = None
    if args.previous:
        g = read_graph(args.previous)
        previous = VocabSnapshot(ext.short_name, "previous", load_vocabulary(g, detect_mode(g)))
    paths = write_outputs(result, args.out, previous)
    cg = result.snapshot.concept_graph
    _emit({"outputs": paths, "concepts": len(cg.concepts), "properties": len(cg.properties)})
    return 0


def _cmd_resolve(args) -> int:
    registry = load_manifest(args.manifest) if args.manifest else default_registry()
    r = resolve(registry, args.iri)
    _emit(
        {
            "extension": r.extension.short_name,
            "version": r.version,
            "local_name": r.local_name,
            "versioned": r.versioned,
            "namespace": registry.namespace(r.extension.short_name, r.version),
            "jurisdiction": r.extension.jurisdiction,
        }
    )
    return 0


_COMMANDS = {
    "parse": _cmd_parse,
    "convert": _cmd_convert,
    "query": _cmd_query,
    "validate": _cmd_validate,
    "diff": _cmd_diff,
    "build": _cmd_build,
    "resolve": _cmd_resolve,
}


def main(argv: Optional[list] = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except (CLIError, RDFError, OSError, KeyError, ValueError) as exc:
        print(f"dpvkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

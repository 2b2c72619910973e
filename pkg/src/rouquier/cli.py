"""Command line front end.

Exit codes: 0 when everything passes, 2 for usage or configuration
errors, 3 when a verification fails.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path
from typing import Callable, Sequence

from .bimodule import relation_suite
from .chain import Complex, check_differential, complex_to_dot, complex_to_json
from .complexes import (
    build_cube,
    build_mixed,
    build_projection,
    build_reduced,
    build_reduced_negative,
    reduce_pipeline,
)
from .coxeter import (
    ConfigError,
    Realization,
    bits_to_str,
    builtin_names,
    builtin_realization,
    load_realization,
    validate_realization,
)
from .hecke import CapExceeded, class_of_complex, enumerate_group, format_hecke, standard_braid
from .poly import DivisionError, RingCtx

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 2, 3


class UsageError(Exception):
    pass


def _realization(arg: str) -> Realization:
    if Path(arg).is_file():
        real = load_realization(arg)
    elif arg in builtin_names():
        real = builtin_realization(arg)
    else:
        raise ConfigError(f"{arg!r} is neither a file nor a shipped realization ({', '.join(builtin_names())})")
    problems = validate_realization(real)
    if problems:
        raise ConfigError("invalid realization:\n  " + "\n  ".join(problems))
    return real


def _label_formatter(real: Realization, kind: str) -> Callable:
    fmt = real.system.format_word

    def label(lab) -> str:
        if kind == "cube":
            return bits_to_str(lab) or "∅"
        if kind == "refined":
            bits, mu = lab
            return f"{bits_to_str(bits) or '∅'}/{real.system.format_multiword(mu) or '∅'}"
        if lab and isinstance(lab[0], tuple):
            return "|".join(fmt(p) for p in lab)
        return fmt(lab)

    return label


def _parse_braid(real: Realization, text: str, negative: bool):
    omega = real.system.parse_braid(text, negative=negative) if text.strip() else ()
    return omega


def _census(C: Complex) -> str:
    return " ".join(f"{q}:{n}" for q, n in C.census().items()) or "(empty)"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cap(omega, max_cells: int) -> None:
    if 2 ** len(omega) > max_cells:
        raise UsageError(f"cube would have {2 ** len(omega)} summands, above --max-cells {max_cells}")


def _build_complexes(ctx: RingCtx, omega, emit: str):
    out = {}
    if emit in ("cube", "both"):
        out["cube"] = build_cube(ctx, omega)
    if emit in ("reduced", "both"):
        word = tuple(s for s, _ in omega)
        signs = {sg for _, sg in omega}
        if not omega:
            out["reduced"] = build_reduced(ctx, ())
        elif signs == {1}:
            out["reduced"] = build_reduced(ctx, word)
        elif signs == {-1}:
            out["reduced"] = build_reduced_negative(ctx, word)
        else:
            out["reduced"] = build_mixed(ctx, omega)
    return out


def cmd_build(args) -> int:
    real = _realization(args.realization)
    ctx = RingCtx(real)
    omega = _parse_braid(real, args.word, args.negative)
    _cap(omega, args.max_cells)
    payload = {"realization": real.name, "word": real.system.format_braid(omega)}
    for kind, C in _build_complexes(ctx, omega, args.emit).items():
        print(f"{kind}: {len(C)} summands; per degree {_census(C)}")
        payload[kind] = complex_to_json(ctx, C, _label_formatter(real, kind))
    text = json.dumps(payload, indent=1, sort_keys=False) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    real = _realization(args.realization)
    ctx = RingCtx(real)
    omega = _parse_braid(real, args.word, args.negative)
    _cap(omega, args.max_cells)
    emit = args.emit if args.emit != "both" else "reduced"
    C = _build_complexes(ctx, omega, emit)[emit]
    dot = complex_to_dot(ctx, C, _label_formatter(real, emit), name=emit)
    _write(args.dot, dot)
    print(f"{emit}: {len(C)} nodes, {C.nblocks()} edges", file=sys.stderr)
    return EXIT_OK


def _default_words(real: Realization, max_len: int = 3) -> list[tuple[int, ...]]:
    gens = range(real.system.rank)
    return [w for n in range(1, max_len + 1) for w in itertools.product(gens, repeat=n)]


def cmd_verify(args) -> int:
    real = _realization(args.realization)
    ctx = RingCtx(real)
    suites = ["relations", "dsq", "chainmap", "pipeline", "euler"] if args.suite == "all" else [args.suite]
    if args.word is not None:
        omegas = [_parse_braid(real, args.word, args.negative)]
    else:
        omegas = [tuple((s, -1 if args.negative else 1) for s in w) for w in _default_words(real)]
    for om in omegas:
        _cap(om, args.max_cells)
    lines: list[dict] = []
    fw = real.system.format_braid

    def emit(suite: str, check: str, ok: bool | None, word=None, **extra) -> None:
        status = "unsupported" if ok is None else ("pass" if ok else "fail")
        rec = {"suite": suite, "check": check, "status": status, "realization": real.name}
        if word is not None:
            rec["word"] = fw(word)
        rec.update(extra)
        lines.append(rec)

    table = None
    if "euler" in suites:
        try:
            table = enumerate_group(real, cap=5000)
            if not table.faithful:
                table = None
        except CapExceeded:
            table = None
    for suite in suites:
        if suite == "relations":
            for r in relation_suite(ctx):
                ok = None if r["status"] == "not implemented" else r["status"] == "pass"
                tag = "one-colour-relations" if r["generator"] else "two-colour-relations"
                emit("relations", r["relation"] + (f":{r['generator']}" if r["generator"] else ""), ok, tag=tag)
            continue
        for om in omegas:
            word = tuple(s for s, _ in om)
            signs = {sg for _, sg in om}
            if suite == "dsq":
                cube = build_cube(ctx, om)
                emit("dsq", "cube", check_differential(cube)["ok"], om, tag="d2-zero")
                red = _build_complexes(ctx, om, "reduced")["reduced"]
                emit("dsq", "reduced", check_differential(red)["ok"], om, tag="d2-zero")
            elif suite == "chainmap":
                if signs - {1}:
                    emit("chainmap", "projection", None, om, note="positive words only")
                    continue
                try:
                    build_projection(ctx, word)
                    emit("chainmap", "projection", True, om, tag="projection-chain-map")
                except Exception as exc:
                    emit("chainmap", "projection", False, om, error=str(exc))
            elif suite == "pipeline":
                if signs - {1}:
                    emit("pipeline", "certificate", None, om, note="positive words only")
                    continue
                res = reduce_pipeline(ctx, word)
                cert = {k: v for k, v in res.certificate.items() if isinstance(v, bool)}
                emit("pipeline", "certificate", all(cert.values()), om, tag="gaussian-summand",
                     steps=res.certificate["steps"], summands=len(res.survivor), details=cert)
            elif suite == "euler":
                if table is None:
                    emit("euler", "class", None, om, note="no finite faithful group model")
                    continue
                expected = standard_braid(table, om)
                cube = class_of_complex(table, build_cube(ctx, om))
                red = class_of_complex(table, _build_complexes(ctx, om, "reduced")["reduced"])
                emit("euler", "class", cube == expected == red, om, tag="euler-characteristic",
                     value=format_hecke(table, red))
    text = "".join(json.dumps(rec) + "\n" for rec in lines)
    _write(args.out, text)
    failed = [r for r in lines if r["status"] == "fail"]
    summary = f"{len(lines)} checks, {len(failed)} failed"
    print(summary, file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_reduce(args) -> int:
    real = _realization(args.realization)
    ctx = RingCtx(real)
    omega = _parse_braid(real, args.word, args.negative)
    _cap(omega, args.max_cells)
    if any(sg < 0 for _, sg in omega):
        raise UsageError("reduce handles positive words only")
    word = tuple(s for s, _ in omega)
    res = reduce_pipeline(ctx, word)
    cert = {k: v for k, v in res.certificate.items() if not isinstance(v, dict)}
    print(f"refined cube: {len(res.refined)} summands; survivor: {len(res.survivor)}; "
          f"eliminations: {cert['steps']}")
    for k, v in cert.items():
        print(f"  {k}: {v}")
    if args.out:
        text = json.dumps({"certificate": cert,
                           "survivor": complex_to_json(ctx, res.survivor, _label_formatter(real, "refined"))},
                          indent=1)
        Path(args.out).write_text(text + "\n")
    ok = all(v for v in cert.values() if isinstance(v, bool))
    return EXIT_OK if ok else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rouquier", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, word_required: bool = True) -> None:
        sp.add_argument("--realization", default="A2", help="config file or shipped name")
        sp.add_argument("--word", default=None if not word_required else "",
                        help='braid word, e.g. "s s t^-1"')
        sp.add_argument("--negative", action="store_true", help="use the negative lift")
        sp.add_argument("--max-cells", type=int, default=1 << 12, help="cap on cube summands")

    b = sub.add_parser("build", help="write cube and/or reduced complex JSON")
    common(b)
    b.add_argument("--emit", choices=["cube", "reduced", "both"], default="both")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run verification suites")
    common(v, word_required=False)
    v.add_argument("--suite", choices=["relations", "dsq", "chainmap", "pipeline", "euler", "all"],
                   default="all")
    v.add_argument("--out", default=None, help="JSON-lines report (default stdout)")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="run the reduction pipeline")
    common(r)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_reduce)

    d = sub.add_parser("export-dot", help="write a DOT digraph of a complex")
    common(d)
    d.add_argument("--emit", choices=["cube", "reduced", "both"], default="reduced")
    d.add_argument("--dot", default=None, help="output path (default stdout)")
    d.set_defaults(func=cmd_export_dot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, UsageError, DivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AssertionError, RuntimeError, ValueError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

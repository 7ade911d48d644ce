"""Command-line entry points: generate corpora, run extractions, verify suites.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
failure.  Reports are written atomically and are self-describing (the full
run configuration is echoed into the output).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .extract import DEFAULT_EPS, PipelineConfig, PipelineError, run_pipeline
from .generate import GapSpec, RPlusHSpec, gen_gap, gen_r_plus_h, gen_random, gen_subspace
from .groups import F2n, Fpn, GroupError, parse_group
from .setfiles import atomic_write_text, format_set, read_set_file
from .transform import TransformError
from .verify import SUITES

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_ERROR = 3


def _parse_ints(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise GroupError(f"expected comma-separated integers, got {text!r}") from None


def _parse_genspec(text: str):
    """Generator mini-grammar: '<name> key=value ...', e.g. 'r-plus-h n=20 dh=8 r=32 seed=7'."""
    parts = text.strip().split()
    if not parts:
        raise GroupError("empty generator spec")
    name, kv = parts[0], {}
    for part in parts[1:]:
        if "=" not in part:
            raise GroupError(f"bad generator parameter {part!r}")
        key, val = part.split("=", 1)
        kv[key] = val
    try:
        if name == "subspace":
            if "p" in kv:
                group = Fpn(int(kv["p"]), int(kv["n"]))
            else:
                group = F2n(int(kv["n"]))
            return gen_subspace(group, int(kv["d"]))
        if name == "r-plus-h":
            spec = RPlusHSpec(
                n=int(kv["n"]), dh=int(kv["dh"]), r_count=int(kv["r"]), seed=int(kv["seed"])
            )
            return gen_r_plus_h(spec)
        if name == "gap":
            spec = GapSpec(
                base=int(kv.get("base", "0")),
                steps=_parse_ints(kv["steps"]),
                lengths=_parse_ints(kv["lens"]),
            )
            return gen_gap(spec)[0]
        if name == "random":
            desc = [kv["kind"].replace(":", " ")]
            desc.extend(f"{key}={kv[key]}" for key in ("n", "p", "m") if key in kv)
            group = parse_group(" ".join(desc))
            return gen_random(group, int(kv["size"]), int(kv["seed"]))
    except KeyError as exc:
        raise GroupError(f"generator {name!r} missing parameter {exc}") from None
    except ValueError as exc:
        raise GroupError(f"bad generator parameter: {exc}") from None
    raise GroupError(f"unknown generator {name!r}")


def cmd_generate(args) -> int:
    if args.family == "subspace":
        group = Fpn(args.p, args.n) if args.p else F2n(args.n)
        fs = gen_subspace(group, args.d)
    elif args.family == "r-plus-h":
        fs = gen_r_plus_h(RPlusHSpec(n=args.n, dh=args.dh, r_count=args.r, seed=args.seed))
    elif args.family == "gap":
        fs, proper = gen_gap(
            GapSpec(base=args.base, steps=_parse_ints(args.steps), lengths=_parse_ints(args.lens))
        )
        if not proper:
            print(f"note: progression is improper (size {fs.size})", file=sys.stderr)
    elif args.family == "random":
        fs = gen_random(parse_group(args.group), args.size, args.seed)
    else:
        raise GroupError(f"unknown family {args.family}")
    text = format_set(fs)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _csv_summary(report_dict: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "size", "energy", "e_size", "e_energy", "meets_theorem"])
    for cert in report_dict["certificates"]:
        writer.writerow(
            [
                cert["label"],
                cert["size"],
                repr(cert["energy"]["value"]),
                repr(cert["e_size"]),
                repr(cert["e_energy"]),
                cert["meets_theorem"],
            ]
        )
    return buf.getvalue()


def cmd_extract(args) -> int:
    if bool(args.infile) == bool(args.gen):
        raise GroupError("exactly one of --in or --gen is required")
    fs = read_set_file(args.infile) if args.infile else _parse_genspec(args.gen)
    eps = Fraction(args.eps)
    vectorized = {"auto": None, "on": True, "off": False}[args.vectorized]
    config = PipelineConfig(
        c_max=args.cmax,
        slice_cap=args.slice_cap,
        pair_cap=args.pair_cap,
        seed=args.seed,
        vectorized=vectorized,
        report_elements_cap=args.elements_cap,
    )
    report = run_pipeline(fs, eps=eps, config=config)
    report_dict = report.as_dict()
    report_dict["run"] = {
        "input": args.infile or args.gen,
        "input_kind": "file" if args.infile else "generator",
        "out": args.out,
        "format": args.format,
    }
    if args.format == "json":
        text = json.dumps(report_dict, indent=2) + "\n"
    else:
        text = _csv_summary(report_dict)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    chosen = report.chosen
    print(
        f"chosen {chosen.label}: size {chosen.size}, energy {float(chosen.energy):.6g}, "
        f"meets_theorem={chosen.meets_theorem}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    if args.suite == "oracle":
        result = suite(trials=args.trials, seed=args.seed)
    elif args.suite == "lemmas":
        result = suite(trials=args.trials, seed=args.seed)
    else:
        result = suite(seed=args.seed)
    print(result.summary())
    for failure in result.failures[:20]:
        print(f"  counterexample: {failure}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_VERIFY_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addenergy",
        description="Additive-set statistics and high-energy candidate extraction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a set file for a structured family")
    gen_sub = gen.add_subparsers(dest="family", required=True)
    g_sub = gen_sub.add_parser("subspace", help="coordinate subspace of F2n or Fpn")
    g_sub.add_argument("--n", type=int, required=True)
    g_sub.add_argument("--d", type=int, required=True)
    g_sub.add_argument("--p", type=int, default=None, help="odd prime (Fpn instead of F2n)")
    g_rh = gen_sub.add_parser("r-plus-h", help="random coset representatives plus a subspace")
    g_rh.add_argument("--n", type=int, required=True)
    g_rh.add_argument("--dh", type=int, required=True)
    g_rh.add_argument("--r", type=int, required=True)
    g_rh.add_argument("--seed", type=int, default=0)
    g_gap = gen_sub.add_parser("gap", help="generalized arithmetic progression over Z")
    g_gap.add_argument("--base", type=int, default=0)
    g_gap.add_argument("--steps", type=str, required=True)
    g_gap.add_argument("--lens", type=str, required=True)
    g_rand = gen_sub.add_parser("random", help="uniform random subset of a finite group")
    g_rand.add_argument("--group", type=str, required=True, help="e.g. 'f2 n=10'")
    g_rand.add_argument("--size", type=int, required=True)
    g_rand.add_argument("--seed", type=int, default=0)
    for sp in (g_sub, g_rh, g_gap, g_rand):
        sp.add_argument("--out", type=str, default=None)

    ext = sub.add_parser("extract", help="run the candidate extraction pipeline")
    ext.add_argument("--in", dest="infile", type=str, default=None)
    ext.add_argument("--gen", type=str, default=None, help="generator spec, e.g. 'r-plus-h n=20 dh=8 r=32 seed=7'")
    ext.add_argument("--out", type=str, default=None)
    ext.add_argument("--eps", type=str, default=str(DEFAULT_EPS))
    ext.add_argument("--cmax", type=int, default=8)
    ext.add_argument("--slice-cap", dest="slice_cap", type=int, default=4096)
    ext.add_argument("--pair-cap", dest="pair_cap", type=int, default=10 ** 6)
    ext.add_argument("--seed", type=int, default=0)
    ext.add_argument("--format", choices=["json", "csv-summary"], default="json")
    ext.add_argument("--elements-cap", dest="elements_cap", type=int, default=4096)
    ext.add_argument("--vectorized", choices=["auto", "on", "off"], default="auto")

    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--trials", type=int, default=200)
    ver.add_argument("--seed", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "extract":
            return cmd_extract(args)
        return cmd_verify(args)
    except (PipelineError, TransformError, MemoryError) as exc:
        print(f"resource failure: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_ERROR
    except (GroupError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

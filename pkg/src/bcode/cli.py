"""Command-line front end: construct, verify, search, decode, simulate.

Exit statuses are stable and disjoint:

* 0: success,
* 1: a valid negative answer (verifier says no, or the decoder found the
  observation impossible under every hypothesis),
* 2: usage error (bad flags, malformed input files, invalid parameters),
* 3: resource limit or construction budget exhausted.

Every subcommand is pure with respect to (flags, input files, seed):
repeated invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import construct, formats, search, simulate
from .bitmatrix import BitMatrix, min_row_weight
from .decoder import (
    DecoderConfig,
    decode,
    identity_confusions,
    uniform_count_prior,
)
from .errors import ConstructionError, DegenerateEvidenceError, ResourceLimitError
from .properties import CodeKind, CodeParams, find_violation

_VERIFY_KINDS = {
    "bdc": CodeKind.BDC,
    "bcc": CodeKind.BCC,
    "btc": CodeKind.BTC,
    "separable": CodeKind.SEPARABLE,
}

_FILE_KIND_FOR_RECIPE = {
    construct.RecipeKind.MINIMAL_BDC: "BDC",
    construct.RecipeKind.MINIMAL_BCC: "BCC",
    construct.RecipeKind.GENERAL_BCC: "BCC",
    construct.RecipeKind.BTC: "BTC",
    construct.RecipeKind.PARTITION: "RAW",
    construct.RecipeKind.RANDOM: "RAW",
}


def _write_report(path: str | None, payload: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _parse_count_prior(spec: str) -> dict[int, float]:
    parts = spec.split(":")
    if len(parts) != 3 or parts[0] != "uniform":
        raise ValueError(f"count prior must look like uniform:<lo>:<hi>, got {spec!r}")
    lo, hi = int(parts[1]), int(parts[2])
    return uniform_count_prior(lo, hi)


def _parse_outputs(spec: str) -> list[int]:
    try:
        return [int(p) for p in spec.split(",") if p != ""]
    except ValueError as exc:
        raise ValueError(f"outputs must be comma-separated class indices: {spec!r}") from exc


def cmd_construct(args: argparse.Namespace) -> int:
    kind = construct.RecipeKind(args.kind)
    randomized = kind in (construct.RecipeKind.BTC, construct.RecipeKind.RANDOM)
    recipe = construct.ConstructionRecipe(
        kind=kind,
        k=args.k,
        r=args.r,
        n=args.n,
        m=args.m,
        row_weight=args.row_weight,
        seed=args.seed if randomized else None,
        max_rows=args.max_rows,
        attempts=args.attempts,
    )
    matrix = construct.build(recipe)
    if randomized:
        print(f"seed: {args.seed}")

    file_kind = _FILE_KIND_FOR_RECIPE[kind]
    header_k = args.k if file_kind != "RAW" else 0
    header_r = args.r if file_kind != "RAW" else min_row_weight(matrix)
    text = formats.dumps(matrix, file_kind, header_k or 0, header_r or 0)
    if args.output:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)

    weight = min_row_weight(matrix)
    print(f"rows: {matrix.m}  columns: {matrix.n}  min row weight: {weight}")
    verified = None
    if file_kind in ("BDC", "BCC", "BTC"):
        params = CodeParams(CodeKind(file_kind), args.k, args.r, matrix.n)
        verified = find_violation(matrix, params) is None
        print(f"verifier {file_kind}(k={args.k}, r={args.r}): {'PASS' if verified else 'FAIL'}")
    _write_report(
        args.out,
        {
            "kind": file_kind,
            "m": matrix.m,
            "n": matrix.n,
            "minRowWeight": weight,
            "verified": verified,
            "seed": args.seed if randomized else None,
        },
    )
    return 0 if verified in (None, True) else 1


def cmd_verify(args: argparse.Namespace) -> int:
    doc = formats.load(args.file)
    kind = _VERIFY_KINDS[args.kind]
    if kind is CodeKind.SEPARABLE:
        if args.k < 1:
            raise ValueError("k must be positive")
        params = CodeParams(kind, args.k, max(args.r, 1), doc.matrix.n)
    else:
        params = CodeParams(kind, args.k, args.r, doc.matrix.n)
    violation = find_violation(doc.matrix, params)
    if violation is None:
        print(f"PASS: {args.file} is {args.kind}(k={args.k}, r={args.r})")
        _write_report(args.out, {"result": "pass", "kind": args.kind, "k": args.k, "r": args.r})
        return 0
    print(f"FAIL: {violation}")
    _write_report(
        args.out,
        {
            "result": "fail",
            "kind": args.kind,
            "witness": {
                "reason": violation.reason,
                "columnSets": [list(s) for s in violation.column_sets],
            },
        },
    )
    return 1


def cmd_search(args: argparse.Namespace) -> int:
    kind = _VERIFY_KINDS[args.kind]
    result = search.exhaustive_min(kind, args.k, args.r, args.n, args.max_m)
    if result.min_rows is None:
        print(f"minRows=not-found (searched up to m={args.max_m}), explored={result.explored}")
    else:
        print(f"minRows={result.min_rows}, classes={len(result.codes)}, explored={result.explored}")
    blocks = []
    for i, code in enumerate(result.codes):
        block = formats.dumps(code, "RAW", 0, 0)
        blocks.append(block)
        print(f"-- witness {i} --")
        sys.stdout.write(block)
    _write_report(
        args.out,
        {
            "kind": args.kind,
            "k": args.k,
            "r": args.r,
            "n": args.n,
            "maxM": args.max_m,
            "minRows": result.min_rows,
            "classes": len(result.codes),
            "explored": result.explored,
            "codes": blocks,
        },
    )
    return 0


def _confusions_from_flag(spec: str, code: BitMatrix, classes: int, seed: int) -> np.ndarray:
    if spec == "id":
        return identity_confusions(code.m, classes)
    if spec.startswith("synth:"):
        alpha_part = spec.split(":", 1)[1]
        if alpha_part == "iid":
            profile = simulate.uniform_profile(code.n, classes)
        else:
            profile = simulate.dirichlet_profiles(float(alpha_part), code.n, classes, seed)
        return simulate.synth_confusion(code, profile)
    return formats.load_confusions(spec)


def cmd_decode(args: argparse.Namespace) -> int:
    doc = formats.load(args.code)
    outputs = _parse_outputs(args.outputs)
    confusions = _confusions_from_flag(args.confusion, doc.matrix, args.classes, args.seed)
    if args.confusion.startswith("synth:"):
        print(f"seed: {args.seed}")
    cfg = DecoderConfig(
        code=doc.matrix,
        confusions=confusions,
        attack_prior=args.attack_rate,
        success_rate=args.success_rate,
        count_prior=_parse_count_prior(args.q),
        num_classes=args.classes,
    )
    result = decode(outputs, cfg, args.threshold)
    print(f"attack posterior: {result.attack_posterior:.6f}")
    print(f"decoded label: {result.decoded_label}")
    print("label posterior: " + ", ".join(f"{p:.6f}" for p in result.label_posterior))
    if result.decoded_attackers:
        print("decoded attackers: {" + ",".join(map(str, result.decoded_attackers)) + "}")
    else:
        print("decoded attackers: {}")
    _write_report(
        args.out,
        {
            "attackPosterior": result.attack_posterior,
            "decodedLabel": result.decoded_label,
            "labelPosterior": [float(p) for p in result.label_posterior],
            "decodedAttackers": list(result.decoded_attackers),
            "attackerPosterior": {
                "".join(map(str, key)): prob
                for key, prob in sorted(result.attacker_posterior.items())
            },
        },
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    doc = formats.load(args.code)
    code = doc.matrix
    classes = args.classes
    if args.alpha == "iid":
        profile = simulate.uniform_profile(code.n, classes)
    else:
        profile = simulate.dirichlet_profiles(float(args.alpha), code.n, classes, args.seed)
    confusions = simulate.synth_confusion(code, profile, args.a_max, args.kappa)
    cfg = DecoderConfig(
        code=code,
        confusions=confusions,
        attack_prior=args.attack_rate,
        success_rate=args.success_rate,
        count_prior=_parse_count_prior(args.q),
        num_classes=classes,
    )
    counts = [int(c) for c in args.attackers.split(",") if c != ""]
    print(f"seed: {args.seed}")
    points = simulate.sweep(
        code,
        cfg,
        counts,
        trials=args.trials,
        runs=args.runs,
        seed=args.seed,
        workers=args.threads,
    )
    header = (
        f"{'attackers':>9}  {'decode':>14}  {'majority':>14}  "
        f"{'TP':>12}  {'FP':>12}  {'degen':>5}"
    )
    print(header)
    for p in points:
        print(
            f"{p.attacker_count:>9}  "
            f"{p.decode_acc_mean:.4f}+-{p.decode_acc_sd:.4f}  "
            f"{p.majority_acc_mean:.4f}+-{p.majority_acc_sd:.4f}  "
            f"{p.tp_mean:.3f}+-{p.tp_sd:.3f}  "
            f"{p.fp_mean:.3f}+-{p.fp_sd:.3f}  "
            f"{p.degenerate:>5}"
        )
    if args.out:
        payload = {
            "code": args.code,
            "alpha": args.alpha,
            "classes": classes,
            "trials": args.trials,
            "runs": args.runs,
            "seed": args.seed,
            "attackRate": args.attack_rate,
            "successRate": args.success_rate,
            "points": [p.to_dict() for p in points],
        }
        _write_report(args.out + ".json", payload)
        with open(args.out + ".csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [
                    "code",
                    "alpha",
                    "attackerCount",
                    "decodeAccuracy",
                    "majorityAccuracy",
                    "tpMean",
                    "tpSd",
                    "fpMean",
                    "fpSd",
                ]
            )
            for p in points:
                writer.writerow(
                    [
                        args.code,
                        args.alpha,
                        p.attacker_count,
                        f"{p.decode_acc_mean:.6f}",
                        f"{p.majority_acc_mean:.6f}",
                        f"{p.tp_mean:.6f}",
                        f"{p.tp_sd:.6f}",
                        f"{p.fp_mean:.6f}",
                        f"{p.fp_sd:.6f}",
                    ]
                )
        print(f"wrote {args.out}.json and {args.out}.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcode",
        description="Binary subset-selection codes for backdoor-robust ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code matrix and write it as .bcode")
    p.add_argument("--kind", required=True, choices=[k.value for k in construct.RecipeKind])
    p.add_argument("--k", type=int, help="max cooperating attackers")
    p.add_argument("--r", type=int, help="row weight")
    p.add_argument("--n", type=int, help="number of users")
    p.add_argument("--m", type=int, help="number of models (partition/random)")
    p.add_argument("--row-weight", type=int, dest="row_weight", help="ones per row (random)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for randomized kinds")
    p.add_argument("--max-rows", type=int, dest="max_rows", default=64,
                   help="row budget for the separable-matrix search (btc)")
    p.add_argument("--attempts", type=int, default=200,
                   help="candidate draws per height in the separable search (btc)")
    p.add_argument("-o", "--output", help="output .bcode path (default: stdout)")
    p.add_argument("--out", help="machine-readable JSON report path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check a .bcode file against a code property")
    p.add_argument("--kind", required=True, choices=sorted(_VERIFY_KINDS))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("file")
    p.add_argument("--out", help="machine-readable JSON report path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="exhaustive minimum-row code search")
    p.add_argument("--kind", required=True, choices=sorted(_VERIFY_KINDS))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-m", type=int, dest="max_m", required=True)
    p.add_argument("--out", help="machine-readable JSON report path")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("decode", help="decode one ensemble output vector")
    p.add_argument("--code", required=True, help=".bcode file")
    p.add_argument("--outputs", required=True, help="comma-separated class indices, one per model")
    p.add_argument("--confusion", default="id",
                   help="'id', 'synth:<alpha|iid>', or a confusion JSON path")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--attack-rate", type=float, dest="attack_rate", default=0.5)
    p.add_argument("--success-rate", type=float, dest="success_rate", default=0.99)
    p.add_argument("--q", default="uniform:0:3", help="attacker-count prior, uniform:<lo>:<hi>")
    p.add_argument("--threshold", type=float, default=0.5, help="attack decision threshold")
    p.add_argument("--seed", type=int, default=0, help="seed for synth confusions")
    p.add_argument("--out", help="machine-readable JSON report path")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte-Carlo evaluation with synthetic models")
    p.add_argument("--code", required=True, help=".bcode file")
    p.add_argument("--alpha", default="iid", help="Dirichlet concentration, or 'iid'")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--attackers", default="0,1,2,3", help="comma-separated attacker counts")
    p.add_argument("--attack-rate", type=float, dest="attack_rate", default=0.5)
    p.add_argument("--success-rate", type=float, dest="success_rate", default=0.99)
    p.add_argument("--q", default="uniform:0:3", help="decoder attacker-count prior")
    p.add_argument("--a-max", type=float, dest="a_max", default=0.99,
                   help="saturating accuracy ceiling of synthetic models")
    p.add_argument("--kappa", type=float, default=0.05,
                   help="data mass at which synthetic accuracy reaches half its ceiling")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker processes for repeated runs (results are identical)")
    p.add_argument("--out", help="report path prefix; writes <out>.json and <out>.csv")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (formats.BcodeFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimitError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DegenerateEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()

"""``structprompt`` command line.

Subcommands mirror the pipeline stages: gen-dataset, parse, augment, render,
judge, metrics, is, run.  ``STRUCTPROMPT_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from structprompt.dataset import DatasetConfig, dumps_jsonl, generate_dataset, iter_json_lines, read_jsonl, write_jsonl
from structprompt.errors import CountMismatch, ParseError, SchemaError, StructPromptError
from structprompt.judge import aggregate_reports, evaluate_alignment
from structprompt.layout import Canvas, dumps_layout, layout_from_json, scramble_layout, solve_layout
from structprompt.metrics import (
    DistributionSequence,
    corpus_bleu,
    inception_score,
    rouge_l,
    token_cross_entropy,
)
from structprompt.parser import parse_prompt
from structprompt.pipeline import RunConfig, derive_seed, run_pipeline
from structprompt.render import encode_ppm, read_ppm, render
from structprompt.tuples import Prompt, augment, serialize

log = logging.getLogger("structprompt")


def _canvas_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None


def _seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_gen_dataset(args) -> int:
    samples = generate_dataset(DatasetConfig(args.train, args.val, args.test, args.seed))
    write_jsonl(samples, args.out)
    log.info("wrote %d samples to %s", len(samples), args.out)
    return 0


def _prompts(args):
    if args.dataset:
        return [(s.id, s.prompt) for s in read_jsonl(args.dataset)]
    if args.text is None:
        raise SystemExit("give a prompt text or --dataset")
    return [(None, Prompt(args.text))]


def cmd_parse(args) -> int:
    rows = []
    for sid, prompt in _prompts(args):
        info = parse_prompt(prompt)
        if sid is None:
            _emit(serialize(info) + "\n", args.out)
            return 0
        rows.append({"id": sid, "serialized": serialize(info)})
    _emit(dumps_jsonl(rows), args.out)
    return 0


def cmd_augment(args) -> int:
    rows = []
    for sid, prompt in _prompts(args):
        aug = augment(prompt, parse_prompt(prompt))
        if sid is None:
            _emit(aug.combined + "\n", args.out)
            return 0
        rows.append({"id": sid, "prompt": aug.plain.text, "augmented": aug.combined})
    _emit(dumps_jsonl(rows), args.out)
    return 0


def cmd_render(args) -> int:
    w, h = args.canvas
    canvas = Canvas(w, h, args.margin)
    if args.layout:
        lay = layout_from_json(json.loads(Path(args.layout).read_text(encoding="utf-8")))
        Path(args.out).write_bytes(encode_ppm(render(lay)))
        return 0
    if args.prompt:
        lay = solve_layout(parse_prompt(args.prompt), canvas, seed=args.seed)
        if args.scramble:
            lay = scramble_layout(lay, seed=args.seed)
        Path(args.out).write_bytes(encode_ppm(render(lay)))
        if args.emit_layout:
            Path(args.emit_layout).write_text(dumps_layout(lay) + "\n", encoding="utf-8")
        return 0
    if args.dataset:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        rows = []
        for s in read_jsonl(args.dataset):
            if args.split and s.split != args.split:
                continue
            lay = solve_layout(s.reference, canvas, seed=derive_seed(args.seed, s.id, "faithful"))
            if args.scramble:
                lay = scramble_layout(lay, seed=derive_seed(args.seed, s.id, "scrambled"))
            (out / f"{s.id}.ppm").write_bytes(encode_ppm(render(lay)))
            rows.append(json.dumps({"id": s.id, "layout": json.loads(dumps_layout(lay))}))
        if args.emit_layout:
            Path(args.emit_layout).write_text("".join(r + "\n" for r in rows), encoding="utf-8")
        return 0
    raise SystemExit("give --layout, --prompt, or --dataset")


def cmd_judge(args) -> int:
    if len(args.dataset) != len(args.images):
        raise SystemExit("pass one --images directory per --dataset")
    reports = []
    for dataset, images in zip(args.dataset, args.images):
        samples = [s for s in read_jsonl(dataset) if not args.split or s.split == args.split]
        missing = [s.id for s in samples if not (Path(images) / f"{s.id}.ppm").exists()]
        if missing:
            raise CountMismatch(f"{len(missing)} samples have no image in {images} (first: {missing[0]})")
        imgs = [read_ppm(Path(images) / f"{s.id}.ppm") for s in samples]
        reports.append(evaluate_alignment(samples, imgs, args.margin))
    agg = aggregate_reports(reports)
    text = json.dumps(agg.to_json(), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    log.info("spatial | color | shape: %s", agg.row())
    return 0


def _by_id(path):
    out = {}
    for n, rec in iter_json_lines(path):
        if not isinstance(rec, dict) or not isinstance(rec.get("id"), str):
            raise SchemaError("record without a string 'id'", n)
        out[rec["id"]] = (n, rec)
    return out


def cmd_metrics(args) -> int:
    pred, ref = _by_id(args.pred), _by_id(args.ref)
    ids = [i for i in ref if i in pred]
    if len(ids) != len(ref):
        raise CountMismatch(f"{len(ref) - len(ids)} reference ids have no prediction")
    refs = [ref[i][1]["serialized"] for i in ids]
    result = {"metric": args.metric, "n": len(ids)}
    if args.metric == "bleu":
        result["value"] = corpus_bleu([pred[i][1]["serialized"] for i in ids], refs)
    elif args.metric == "rouge":
        scores = [rouge_l(pred[i][1]["serialized"], r) for i, r in zip(ids, refs)]
        result["precision"] = sum(s[0] for s in scores) / len(scores)
        result["recall"] = sum(s[1] for s in scores) / len(scores)
        result["value"] = sum(s[2] for s in scores) / len(scores)
    else:
        totals = []
        for i, r in zip(ids, refs):
            n, rec = pred[i]
            try:
                dist = DistributionSequence(rec["vocab"], rec["probs"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad vocab/probs: {exc}", n) from None
            totals.append(token_cross_entropy(r, dist))
        result["total"] = sum(totals)
        result["value"] = result["total"] / len(totals)
    sys.stdout.write(json.dumps(result, sort_keys=True) + "\n")
    return 0


def cmd_is(args) -> int:
    with open(args.probs, newline="", encoding="utf-8") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    value = inception_score(rows, args.splits)
    out = value.to_json()
    out["formatted"] = value.format(2)
    sys.stdout.write(json.dumps(out, sort_keys=True) + "\n")
    return 0


def cmd_run(args) -> int:
    w, h = args.canvas
    cfg = RunConfig(
        out=Path(args.out),
        seeds=args.seeds,
        train=args.train,
        val=args.val,
        test=args.test,
        width=w,
        height=h,
        margin=args.margin,
        max_images=None if args.max_images < 0 else args.max_images,
    )
    result = run_pipeline(cfg)
    sys.stdout.write(result.table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="structprompt", description="Parse, lay out, render and judge tuple-structured spatial prompts."
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="synthesize a seeded prompt/tuple corpus")
    p.add_argument("--train", type=int, default=500)
    p.add_argument("--val", type=int, default=100)
    p.add_argument("--test", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    for name, func, help_ in (
        ("parse", cmd_parse, "prompt -> canonical tuples"),
        ("augment", cmd_augment, "prompt -> prompt + structured information"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("text", nargs="?")
        p.add_argument("--dataset", help="JSONL corpus; emits one JSON line per sample")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("render", help="solve and rasterize scenes to PPM")
    p.add_argument("--layout", help="layout JSON to rasterize")
    p.add_argument("--prompt", help="prompt text to solve and rasterize")
    p.add_argument("--dataset", help="JSONL corpus; --out is then a directory")
    p.add_argument("--split", default="test", help="dataset split to render (empty for all)")
    p.add_argument("--out", required=True)
    p.add_argument("--emit-layout", help="also write the solved layout(s) here")
    p.add_argument("--canvas", type=_canvas_size, default=(512, 512))
    p.add_argument("--margin", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scramble", action="store_true", help="random placement ignoring relations")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("judge", help="score images against their tuples")
    p.add_argument("--dataset", action="append", required=True, help="repeat once per seed")
    p.add_argument("--images", action="append", required=True, help="directory of <id>.ppm, one per --dataset")
    p.add_argument("--split", default="test")
    p.add_argument("--margin", type=float, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_judge)

    p = sub.add_parser("metrics", help="BLEU / ROUGE-L / cross-entropy of predicted tuples")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--metric", choices=("bleu", "rouge", "ce"), required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("is", help="Inception Score from a class-probability CSV")
    p.add_argument("--probs", required=True)
    p.add_argument("--splits", type=int, default=1)
    p.set_defaults(func=cmd_is)

    p = sub.add_parser("run", help="full pipeline over several seeds")
    p.add_argument("--train", type=int, default=500)
    p.add_argument("--val", type=int, default=100)
    p.add_argument("--test", type=int, default=1000)
    p.add_argument("--seeds", type=_seed_list, default=(40, 41, 42))
    p.add_argument("--canvas", type=_canvas_size, default=(512, 512))
    p.add_argument("--margin", type=int, default=10)
    p.add_argument("--max-images", type=int, default=-1, help="PPMs kept per seed and mode (-1: all)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    level = os.environ.get("STRUCTPROMPT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"error: {d.describe()}", file=sys.stderr)
        return 1
    except (StructPromptError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

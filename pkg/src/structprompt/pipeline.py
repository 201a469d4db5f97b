"""End-to-end run: dataset -> parse -> augment -> lay out -> render -> judge.

Every intermediate result is written under the output directory so any stage
can be re-run from files alone::

    <out>/seed-<s>/dataset.jsonl        generated samples, all splits
    <out>/seed-<s>/parsed.jsonl         parser output per sample
    <out>/seed-<s>/augmented.jsonl      plain + structured prompts
    <out>/seed-<s>/layouts-<mode>.jsonl solved (faithful) / random (scrambled) layouts, test split
    <out>/seed-<s>/images/<mode>/*.ppm  renders of those layouts
    <out>/seed-<s>/report.json          per-seed numbers
    <out>/report.json, report.txt       mean ± std over seeds
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from structprompt.dataset import DatasetConfig, dumps_jsonl, generate_dataset, write_jsonl
from structprompt.errors import PipelineError, StructPromptError
from structprompt.judge import AlignmentReport, SeedReport, aggregate_reports, evaluate_alignment
from structprompt.layout import Canvas, layout_to_json, scramble_layout, solve_layout
from structprompt.metrics import MetricValue, aggregate_seeds, corpus_bleu, corpus_rouge_l, exact_match
from structprompt.parser import parse_prompt
from structprompt.render import Palette, encode_ppm, render
from structprompt.tuples import augment, serialize

log = logging.getLogger(__name__)

MODES = ("faithful", "scrambled")


@dataclass(frozen=True)
class RunConfig:
    out: Path
    seeds: tuple[int, ...] = (40, 41, 42)
    train: int = 500
    val: int = 100
    test: int = 1000
    width: int = 512
    height: int = 512
    margin: int = 10
    max_images: int | None = None  # PPMs written per seed and mode; None writes all

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        object.__setattr__(self, "out", Path(self.out))

    @property
    def canvas(self) -> Canvas:
        return Canvas(self.width, self.height, self.margin)

    def dataset(self, seed: int) -> DatasetConfig:
        return DatasetConfig(self.train, self.val, self.test, seed)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256("/".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class SeedResult:
    seed: int
    parser: dict[str, float]
    alignment: dict[str, AlignmentReport] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "parser": self.parser,
            **{
                mode: {**{k: float(r.proportion(k)) for k in ("spatial", "color", "shape")}, "n": r.n}
                for mode, r in self.alignment.items()
            },
        }


@dataclass
class RunResult:
    seeds: list[SeedResult]
    parser: dict[str, MetricValue]
    alignment: dict[str, SeedReport]

    def to_json(self) -> dict:
        return {
            "seeds": [s.seed for s in self.seeds],
            "parser": {k: v.to_json() for k, v in self.parser.items()},
            **{mode: rep.to_json() for mode, rep in self.alignment.items()},
        }

    def table(self) -> str:
        lines = ["Input | Spatial | Color | Shape"]
        for mode, rep in self.alignment.items():
            lines.append(f"{mode} | {rep.row()}")
        lines.append("")
        lines.append("Parser | " + " | ".join(f"{k} {v.format(4)}" for k, v in self.parser.items()))
        return "\n".join(lines) + "\n"


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        log.info("stage %s", self.name)

    def __exit__(self, typ, exc, tb):
        if (
            exc is not None
            and isinstance(exc, (StructPromptError, ValueError, OSError))
            and not isinstance(exc, PipelineError)
        ):
            raise PipelineError(self.name, exc) from exc
        return False


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def run_seed(cfg: RunConfig, seed: int, palette: Palette | None = None) -> SeedResult:
    palette = palette or Palette()
    root = cfg.out / f"seed-{seed}"
    root.mkdir(parents=True, exist_ok=True)

    with _Stage("gen-dataset"):
        samples = generate_dataset(cfg.dataset(seed))
        write_jsonl(samples, root / "dataset.jsonl")

    with _Stage("parse"):
        parsed = [parse_prompt(s.prompt) for s in samples]
        predicted = [serialize(p) for p in parsed]
        _write(root / "parsed.jsonl", dumps_jsonl({"id": s.id, "serialized": p} for s, p in zip(samples, predicted)))
        refs = [s.serialized for s in samples]
        parser_scores = {
            "exact_match": exact_match(predicted, refs),
            "bleu": corpus_bleu(predicted, refs),
            "rouge_l": corpus_rouge_l(predicted, refs),
        }

    with _Stage("augment"):
        records = []
        for s, info in zip(samples, parsed):
            aug = augment(s.prompt, info)
            records.append({"id": s.id, "prompt": aug.plain.text, "augmented": aug.combined})
        _write(root / "augmented.jsonl", dumps_jsonl(records))

    result = SeedResult(seed, parser_scores)
    test = [s for s in samples if s.split == "test"]
    for mode in MODES:
        with _Stage(f"layout-{mode}"):
            layouts = []
            for s in test:
                lay = solve_layout(s.reference, cfg.canvas, seed=derive_seed(seed, s.id, "faithful"))
                if mode == "scrambled":
                    lay = scramble_layout(lay, seed=derive_seed(seed, s.id, "scrambled"))
                layouts.append(lay)
            _write(
                root / f"layouts-{mode}.jsonl",
                dumps_jsonl({"id": s.id, "layout": layout_to_json(lay)} for s, lay in zip(test, layouts)),
            )
        with _Stage(f"render-{mode}"):
            images = [render(lay, palette) for lay in layouts]
            img_dir = root / "images" / mode
            img_dir.mkdir(parents=True, exist_ok=True)
            limit = len(images) if cfg.max_images is None else cfg.max_images
            for s, img in zip(test[:limit], images):
                (img_dir / f"{s.id}.ppm").write_bytes(encode_ppm(img))
        with _Stage(f"judge-{mode}"):
            result.alignment[mode] = evaluate_alignment(test, images, cfg.margin, palette)
        log.info("seed %d %s spatial=%.3f", seed, mode, result.alignment[mode].spatial)

    _write(root / "report.json", json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n")
    return result


def run_pipeline(cfg: RunConfig) -> RunResult:
    per_seed = [run_seed(cfg, seed) for seed in cfg.seeds]
    parser = {k: aggregate_seeds([r.parser[k] for r in per_seed]) for k in per_seed[0].parser}
    alignment = {mode: aggregate_reports([r.alignment[mode] for r in per_seed]) for mode in MODES}
    result = RunResult(per_seed, parser, alignment)
    _write(cfg.out / "report.json", json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n")
    _write(cfg.out / "report.txt", result.table())
    return result

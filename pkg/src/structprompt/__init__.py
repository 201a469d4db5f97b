"""Tuple-structured spatial prompts and a closed-loop alignment testbed."""

from structprompt.judge import detect_scene, evaluate_alignment
from structprompt.layout import Canvas, scramble_layout, solve_layout
from structprompt.metrics import aggregate_seeds, bleu, inception_score, rouge_l, token_cross_entropy
from structprompt.parser import parse_prompt
from structprompt.render import render
from structprompt.tuples import (
    ObjectTuple,
    Prompt,
    RelationTuple,
    StructuredInfo,
    augment,
    parse_serialized,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "Canvas",
    "ObjectTuple",
    "Prompt",
    "RelationTuple",
    "StructuredInfo",
    "aggregate_seeds",
    "augment",
    "bleu",
    "detect_scene",
    "evaluate_alignment",
    "inception_score",
    "parse_prompt",
    "parse_serialized",
    "render",
    "rouge_l",
    "scramble_layout",
    "serialize",
    "solve_layout",
    "token_cross_entropy",
]

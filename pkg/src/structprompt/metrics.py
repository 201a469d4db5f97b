"""Scoring functions: token cross-entropy, BLEU-4, ROUGE-L, Inception Score.

All logarithms are natural.  Token sequences may be given as lists of tokens
or as strings, which are split on whitespace.
"""

from __future__ import annotations

import math
import re
import statistics
import warnings
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from structprompt.errors import DegenerateRow, EmptyInput, LengthMismatch

ROW_TOLERANCE = 1e-9


def tokens(seq) -> list[str]:
    return seq.split() if isinstance(seq, str) else list(seq)


@dataclass(frozen=True)
class MetricValue:
    mean: float
    std: float
    per_seed: tuple[float, ...] = field(default=())
    single: bool = False  # std is undefined for one value and reported as 0

    def format(self, digits: int = 3) -> str:
        return f"{self.mean:.{digits}f} ± {self.std:.{digits}f}"

    def to_json(self) -> dict:
        return {"mean": self.mean, "std": self.std, "per_seed": list(self.per_seed)}

    def __str__(self) -> str:
        return self.format()


_MEAN_STD = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*±\s*(\d+(?:\.\d+)?)\s*$")


def parse_mean_std(text: str) -> tuple[float, float]:
    """Read back a ``0.473 ± 0.004`` string."""
    m = _MEAN_STD.match(text)
    if not m:
        raise ValueError(f"not a mean ± std string: {text!r}")
    return float(m.group(1)), float(m.group(2))


def aggregate_seeds(values: Sequence[float]) -> MetricValue:
    """Arithmetic mean and sample (n-1) standard deviation."""
    values = [float(v) for v in values]
    if not values:
        raise EmptyInput("no values to aggregate")
    if len(values) == 1:
        return MetricValue(values[0], 0.0, tuple(values), single=True)
    return MetricValue(statistics.fmean(values), statistics.stdev(values), tuple(values))


class ZeroProbabilityWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class DistributionSequence:
    vocab: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(self.vocab))
        object.__setattr__(self, "rows", tuple(tuple(float(p) for p in r) for r in self.rows))
        if len(set(self.vocab)) != len(self.vocab):
            raise ValueError("vocabulary has duplicate tokens")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.vocab):
                raise ValueError(f"row {i} has {len(row)} entries for a vocabulary of {len(self.vocab)}")
            if min(row) < 0 or abs(math.fsum(row) - 1.0) > ROW_TOLERANCE:
                raise ValueError(f"row {i} is not a probability distribution")

    def __len__(self) -> int:
        return len(self.rows)


def token_cross_entropy(ref, pred: DistributionSequence) -> float:
    """Sum over positions of -log p(reference token).

    A zero probability on a reference token yields ``inf`` and a
    :class:`ZeroProbabilityWarning`.
    """
    ref = tokens(ref)
    if len(ref) != len(pred):
        raise LengthMismatch(f"{len(ref)} reference tokens but {len(pred)} predicted distributions")
    index = {t: i for i, t in enumerate(pred.vocab)}
    total = []
    for pos, (tok, row) in enumerate(zip(ref, pred.rows)):
        if tok not in index:
            raise KeyError(f"reference token {tok!r} at position {pos} is not in the vocabulary")
        p = row[index[tok]]
        if p == 0.0:
            warnings.warn(f"zero probability for {tok!r} at position {pos}", ZeroProbabilityWarning, stacklevel=2)
            return math.inf
        total.append(-math.log(p))
    return math.fsum(total)


def _ngrams(seq: list[str], n: int) -> Counter:
    return Counter(tuple(seq[i : i + n]) for i in range(len(seq) - n + 1))


def _bleu_from_counts(matches, possible, cand_len, ref_len, max_n) -> float:
    if cand_len == 0 or max_n == 0:
        return 0.0
    log_p = 0.0
    for n in range(max_n):
        if matches[n] == 0:
            return 0.0
        log_p += math.log(matches[n] / possible[n])
    bp = 1.0 if cand_len >= ref_len else math.exp(1 - ref_len / cand_len)
    return bp * math.exp(log_p / max_n)


def bleu(candidate, reference, max_order: int = 4) -> float:
    """Cumulative BLEU with uniform weights and no smoothing.

    Candidates shorter than ``max_order`` use orders up to their length.
    """
    cand, ref = tokens(candidate), tokens(reference)
    max_n = min(max_order, len(cand))
    matches, possible = [], []
    for n in range(1, max_n + 1):
        c, r = _ngrams(cand, n), _ngrams(ref, n)
        matches.append(sum(min(k, r[g]) for g, k in c.items()))
        possible.append(len(cand) - n + 1)
    return _bleu_from_counts(matches, possible, len(cand), len(ref), max_n)


def corpus_bleu(candidates, references, max_order: int = 4) -> float:
    """Corpus BLEU: clipped counts and lengths pooled over all pairs."""
    pairs = [(tokens(c), tokens(r)) for c, r in zip(candidates, references, strict=True)]
    if not pairs:
        raise EmptyInput("empty corpus")
    max_n = min(max_order, max(len(c) for c, _ in pairs))
    matches, possible = [0] * max_n, [0] * max_n
    for cand, ref in pairs:
        for n in range(1, max_n + 1):
            c, r = _ngrams(cand, n), _ngrams(ref, n)
            matches[n - 1] += sum(min(k, r[g]) for g, k in c.items())
            possible[n - 1] += max(len(cand) - n + 1, 0)
    cand_len = sum(len(c) for c, _ in pairs)
    ref_len = sum(len(r) for _, r in pairs)
    return _bleu_from_counts(matches, possible, cand_len, ref_len, max_n)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference) -> tuple[float, float, float]:
    """ROUGE-L (precision, recall, F1) from the longest common subsequence."""
    cand, ref = tokens(candidate), tokens(reference)
    lcs = lcs_length(cand, ref)
    if lcs == 0:
        return 0.0, 0.0, 0.0
    p, r = lcs / len(cand), lcs / len(ref)
    return p, r, 2 * p * r / (p + r)


def corpus_rouge_l(candidates, references) -> float:
    """Mean ROUGE-L F1 over pairs."""
    scores = [rouge_l(c, r)[2] for c, r in zip(candidates, references, strict=True)]
    if not scores:
        raise EmptyInput("empty corpus")
    return math.fsum(scores) / len(scores)


def exact_match(candidates, references) -> float:
    pairs = list(zip(candidates, references, strict=True))
    if not pairs:
        raise EmptyInput("empty corpus")
    return sum(c == r for c, r in pairs) / len(pairs)


def _check_prob_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DegenerateRow(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        bad = int(np.argwhere(~np.isfinite(m) | (m < 0))[0, 0])
        raise DegenerateRow(f"row {bad} has negative or non-finite entries")
    sums = m.sum(axis=1)
    off = np.abs(sums - 1.0) > ROW_TOLERANCE
    if np.any(off):
        raise DegenerateRow(f"row {int(np.argmax(off))} sums to {sums[np.argmax(off)]!r}, not 1")
    return m


def inception_score(m, splits: int = 1) -> MetricValue:
    """exp(mean KL(p(y|x) || p(y))) per split, aggregated over splits.

    Rows are cut into ``splits`` equal consecutive chunks (a remainder of
    ``len(m) % splits`` trailing rows is dropped).  Zero entries contribute
    nothing to the KL sum.
    """
    m = _check_prob_matrix(m)
    rows = m.shape[0]
    if not 1 <= splits <= rows:
        raise ValueError(f"need 1 <= splits <= rows, got splits={splits}, rows={rows}")
    chunk = rows // splits
    scores = []
    for k in range(splits):
        part = m[k * chunk : (k + 1) * chunk]
        marginal = part.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(part > 0, part * (np.log(part) - np.log(marginal)), 0.0)
        scores.append(float(np.exp(terms.sum(axis=1).mean())))
    return aggregate_seeds(scores)

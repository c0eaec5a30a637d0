"""Word Recognition Rate with a location constraint.

A prediction matches a ground-truth word when the strings are identical and
the boxes overlap with strictly positive area. Per document
``WRR = N_m / (N_m + N_u + N_g)``; a corpus averages documents weighted by
their ground-truth word counts.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .geometry import intersection_area


@dataclass(frozen=True)
class MatchResult:
    n_matched: int
    n_unmatched_pred: int
    n_unmatched_gt: int
    pairs: tuple[tuple[int, int], ...] = ()

    @property
    def n_gt(self) -> int:
        return self.n_matched + self.n_unmatched_gt

    @property
    def n_pred(self) -> int:
        return self.n_matched + self.n_unmatched_pred


@dataclass
class CorpusReport:
    per_document: list = field(default_factory=list)  # (doc_id, MatchResult, wrr)
    corpus_wrr: float = 1.0

    def to_json(self) -> dict:
        return {
            "corpus_wrr": self.corpus_wrr,
            "n_documents": len(self.per_document),
            "documents": [
                {
                    "doc_id": doc_id,
                    "n_matched": m.n_matched,
                    "n_unmatched_pred": m.n_unmatched_pred,
                    "n_unmatched_gt": m.n_unmatched_gt,
                    "wrr": wrr,
                }
                for doc_id, m, wrr in self.per_document
            ],
        }


def normalize_text(text: str, ignore_case: bool = False) -> str:
    text = unicodedata.normalize("NFC", text)
    return text.casefold() if ignore_case else text


def match_words(pred, gt, ignore_case: bool = False) -> MatchResult:
    """Greedy one-to-one matching by descending intersection area.

    ``pred`` and ``gt`` are sequences of objects with ``.text`` and ``.rect``.
    Ties in area go to the smaller prediction index, then the smaller
    ground-truth index.
    """
    by_text: dict[str, list[int]] = {}
    for g, word in enumerate(gt):
        by_text.setdefault(normalize_text(word.text, ignore_case), []).append(g)

    candidates = []
    for p, word in enumerate(pred):
        for g in by_text.get(normalize_text(word.text, ignore_case), ()):
            area = intersection_area(word.rect, gt[g].rect)
            if area > 0:
                candidates.append((-area, p, g))
    candidates.sort()

    used_p, used_g, pairs = set(), set(), []
    for _, p, g in candidates:
        if p in used_p or g in used_g:
            continue
        used_p.add(p)
        used_g.add(g)
        pairs.append((p, g))
    n = len(pairs)
    return MatchResult(n, len(pred) - n, len(gt) - n, tuple(pairs))


def wrr_document(m: MatchResult) -> float:
    denom = m.n_matched + m.n_unmatched_pred + m.n_unmatched_gt
    if denom == 0:
        return 1.0
    return m.n_matched / denom


def wrr_corpus(docs) -> float:
    """Weighted mean of per-document WRR; weight = ground-truth word count.

    ``docs`` holds ``(MatchResult, gt_word_count)`` pairs. A corpus without
    any ground-truth words scores 1.0.
    """
    num = 0.0
    den = 0
    for m, n_gt in docs:
        if m.n_matched + m.n_unmatched_gt != n_gt:
            raise ValueError(
                f"inconsistent counts: N_m={m.n_matched} + N_g={m.n_unmatched_gt} != {n_gt} ground-truth words"
            )
        num += n_gt * wrr_document(m)
        den += n_gt
    if den == 0:
        return 1.0
    return num / den


def evaluate_corpus(pred_by_doc: dict, gt_by_doc: dict, ignore_case: bool = False) -> CorpusReport:
    """Match every ground-truth document against its predictions (missing -> none).

    Prediction documents without ground truth are ignored. Documents are
    reported in sorted doc_id order.
    """
    rows = []
    for doc_id in sorted(gt_by_doc):
        m = match_words(pred_by_doc.get(doc_id, []), gt_by_doc[doc_id], ignore_case)
        rows.append((doc_id, m, wrr_document(m)))
    corpus = wrr_corpus((m, m.n_gt) for _, m, _ in rows)
    return CorpusReport(rows, corpus)

"""Recruiter vote aggregation and the candidate-level 80/10/10 split."""
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pydantic

from ..errors import CorpusValidationError, DegenerateInputError
from .interview_models import Annotation, Interview, Label, int_to_label

logger = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
MIN_CANDIDATES = 10


def aggregate_annotations(annotations: Sequence[Annotation]) -> Label:
    """
    Majority vote of recruiters, where liking or shortlisting a candidate is a hirable vote.

    A draw counts as hirable.
    """
    if not annotations:
        raise DegenerateInputError("cannot aggregate an empty list of annotations")
    hirable = sum(1 for a in annotations if a.votes_hirable)
    return int_to_label(int(2 * hirable >= len(annotations)))


class SplitManifest(pydantic.BaseModel):
    """
    Candidate ids of every split.

    Attributes:
        seed: Seed of the stratified shuffle.
        train: Candidate ids of the training split.
        val: Candidate ids of the validation split.
        test: Candidate ids of the test split.
    """
    seed: int
    train: List[str]
    val: List[str]
    test: List[str]

    @pydantic.model_validator(mode="after")
    def _disjoint(self) -> "SplitManifest":
        seen = set()
        for name in SPLITS:
            ids = set(getattr(self, name))
            overlap = seen & ids
            if overlap:
                raise ValueError(f"candidates {sorted(overlap)[:5]} appear in more than one split")
            seen |= ids
        return self

    def split_of(self) -> Dict[str, str]:
        return {cid: name for name in SPLITS for cid in getattr(self, name)}


def candidate_labels(corpus: Sequence[Interview]) -> Dict[str, int]:
    """Label per candidate id; records of one candidate must agree."""
    labels: Dict[str, int] = {}
    for record in corpus:
        known = labels.setdefault(record.candidate_id, record.y)
        if known != record.y:
            raise CorpusValidationError("records of different modalities disagree on the label", record.candidate_id)
    return labels


def _stratified_order(labels: Dict[str, int], seed: int) -> List[str]:
    """Candidates of both classes interleaved by their fractional rank within their class."""
    rng = np.random.default_rng(seed)
    keyed = []
    for y in (1, 0):
        ids = sorted(cid for cid, label in labels.items() if label == y)
        ids = [ids[i] for i in rng.permutation(len(ids))]
        keyed.extend(((rank + 0.5) / len(ids), y, cid) for rank, cid in enumerate(ids))
    keyed.sort(key=lambda item: (item[0], -item[1]))
    return [cid for _, _, cid in keyed]


def split_ids(corpus: Sequence[Interview], seed: int = 0) -> SplitManifest:
    """
    Assigns every candidate to train, validation or test.

    Sizes are ``⌊0.8 N⌋``, ``⌊0.1 N⌋`` and the remainder. The candidates are ordered by a
    seeded class-stratified interleaving first, so each split keeps the global label balance.
    """
    labels = candidate_labels(corpus)
    total = len(labels)
    if total < MIN_CANDIDATES:
        raise DegenerateInputError(f"splitting needs at least {MIN_CANDIDATES} candidates; got {total}")
    order = _stratified_order(labels, seed)
    n_train, n_val = (8 * total) // 10, total // 10
    manifest = SplitManifest(seed=seed,
                             train=order[:n_train],
                             val=order[n_train:n_train + n_val],
                             test=order[n_train + n_val:])
    logger.info(f"Split {total} candidates into {len(manifest.train)}/{len(manifest.val)}/{len(manifest.test)}")
    return manifest


def apply_split(corpus: Sequence[Interview], manifest: SplitManifest) -> Tuple[List[Interview], List[Interview], List[Interview]]:
    """Partitions records (every modality) by the split of their candidate."""
    where = manifest.split_of()
    parts: Dict[str, List[Interview]] = {name: [] for name in SPLITS}
    for record in corpus:
        if record.candidate_id not in where:
            raise CorpusValidationError("candidate is missing from the split manifest", record.candidate_id)
        parts[where[record.candidate_id]].append(record)
    return parts["train"], parts["val"], parts["test"]


def split_corpus(corpus: Sequence[Interview], seed: int = 0) -> Tuple[List[Interview], List[Interview], List[Interview]]:
    """``(train, validation, test)`` records of a stratified candidate-level split."""
    return apply_split(corpus, split_ids(corpus, seed))


def select_modality(corpus: Sequence[Interview], modality: str) -> List[Interview]:
    return [record for record in corpus if record.modality == modality]

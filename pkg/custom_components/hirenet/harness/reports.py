"""CSV and JSON report files; every file is written atomically."""
import csv
import io
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import pydantic

from ..interview_data.corpus_io import write_atomic
from .evaluation import Evaluation
from .metrics import Metrics

PathLike = Union[str, Path]

METRICS_COLUMNS = ("model", "modality", "split", "precision", "recall", "f1")
SCORE_COLUMNS = ("candidate_id", "label", "score", "prediction")


class MetricsRow(pydantic.BaseModel):
    model: str
    modality: str
    split: str
    precision: float
    recall: float
    f1: float

    @classmethod
    def of(cls, model: str, modality: str, split: str, metrics: Metrics) -> "MetricsRow":
        return cls(model=model, modality=modality, split=split,
                   precision=metrics.precision, recall=metrics.recall, f1=metrics.f1)


def _csv(columns: Sequence[str], rows: Iterable[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: row[column] for column in columns})
    return buffer.getvalue()


def write_metrics_csv(path: PathLike, rows: Sequence[MetricsRow]) -> Path:
    return write_atomic(path, _csv(METRICS_COLUMNS, (r.model_dump() for r in rows)))


def read_metrics_csv(path: PathLike) -> List[MetricsRow]:
    with open(path, newline="", encoding="utf-8") as handle:
        return [MetricsRow.model_validate(row) for row in csv.DictReader(handle)]


def write_scores_csv(path: PathLike, evaluation: Evaluation) -> Path:
    return write_atomic(path, _csv(SCORE_COLUMNS, (s.model_dump() for s in evaluation.scores)))


def write_json(path: PathLike, model: pydantic.BaseModel) -> Path:
    return write_atomic(path, model.model_dump_json(indent=2))

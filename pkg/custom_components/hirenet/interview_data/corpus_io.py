"""
JSON Lines corpora, split manifests and generator specs on disk.

A data directory holds ``corpus.jsonl`` (one interview record per line),
``split.json`` and, for generated corpora, ``generator_spec.json``.
"""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import pydantic

from ..errors import CorpusParseError, CorpusValidationError
from .interview_models import GeneratorSpec, Interview
from .protocol import SplitManifest, apply_split

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CORPUS_FILE = "corpus.jsonl"
SPLIT_FILE = "split.json"
SPEC_FILE = "generator_spec.json"


def write_atomic(path: PathLike, text: str) -> Path:
    """Writes ``text`` to a temporary file next to ``path``, then renames it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dump_corpus(corpus: Iterable[Interview]) -> str:
    return "".join(record.model_dump_json() + "\n" for record in corpus)


def save_corpus(corpus: Sequence[Interview], path: PathLike) -> Path:
    path = write_atomic(path, dump_corpus(corpus))
    logger.info(f"Wrote {len(corpus)} interview records to {path}")
    return path


def parse_record(line: str, line_number: int) -> Interview:
    """
    Parses one corpus line.

    Raises:
        CorpusParseError: The line is not a JSON object.
        CorpusValidationError: The record breaks an interview invariant; names the candidate.
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusParseError(f"malformed record ({e.msg} at column {e.colno})", line_number)
    if not isinstance(data, dict):
        raise CorpusParseError(f"expected a JSON object, got {type(data).__name__}", line_number)
    try:
        return Interview.model_validate(data)
    except pydantic.ValidationError as e:
        candidate_id = data.get("candidate_id")
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise CorpusValidationError(f"line {line_number}: {where}: {first['msg']}",
                                    str(candidate_id) if candidate_id is not None else None)


def load_corpus(path: PathLike) -> List[Interview]:
    """Reads and validates every record of a JSON Lines corpus; blank lines are skipped."""
    corpus = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if line.strip():
                corpus.append(parse_record(line, line_number))
    logger.info(f"Loaded {len(corpus)} interview records from {path}")
    return corpus


def save_split(manifest: SplitManifest, path: PathLike) -> Path:
    return write_atomic(path, manifest.model_dump_json(indent=2))


def load_split(path: PathLike) -> SplitManifest:
    return SplitManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_generator_spec(path: PathLike) -> GeneratorSpec:
    return GeneratorSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))


def save_generator_spec(spec: GeneratorSpec, path: PathLike) -> Path:
    return write_atomic(path, spec.model_dump_json(indent=2))


def save_data_dir(directory: PathLike, corpus: Sequence[Interview], manifest: SplitManifest,
                  spec: Optional[GeneratorSpec] = None) -> Path:
    directory = Path(directory)
    save_corpus(corpus, directory / CORPUS_FILE)
    save_split(manifest, directory / SPLIT_FILE)
    if spec is not None:
        save_generator_spec(spec, directory / SPEC_FILE)
    return directory


def load_data_dir(directory: PathLike) -> Tuple[List[Interview], SplitManifest]:
    directory = Path(directory)
    return load_corpus(directory / CORPUS_FILE), load_split(directory / SPLIT_FILE)


def load_splits(directory: PathLike) -> Tuple[List[Interview], List[Interview], List[Interview]]:
    """``(train, validation, test)`` records of a data directory."""
    corpus, manifest = load_data_dir(directory)
    return apply_split(corpus, manifest)

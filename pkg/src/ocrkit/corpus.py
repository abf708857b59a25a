"""Benchmark/training record model.

Records live in line-delimited UTF-8 JSON files (one object per line, LF
terminated) with the fields id, task_kind, image_ref, prompt, ground_truth,
lang and a flat string-to-string meta map. A corpus whose schema_version is
not 1 is prefixed with a single ``{"schema_version": N}`` header line;
version-1 corpora have no header, so an empty corpus is an empty file.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .metrics import edit_distance_norm, tokenize


class TaskKind(str, Enum):
    PLAIN_DOC = "PlainDoc"
    SCENE_TEXT = "SceneText"
    FORMATTED_DOC = "FormattedDoc"
    FINE_GRAINED_BOX = "FineGrainedBox"
    FINE_GRAINED_COLOR = "FineGrainedColor"
    MULTI_CROP = "MultiCrop"
    MULTI_PAGE = "MultiPage"
    SHEET_MUSIC = "SheetMusic"
    GEOMETRY = "Geometry"
    CHART = "Chart"


LANGS = ("en", "zh", "other")

_FIELDS = ("id", "task_kind", "image_ref", "prompt", "ground_truth", "lang", "meta")


class CorpusFormatError(ValueError):
    """A malformed record file; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Sample:
    id: str
    task_kind: TaskKind
    ground_truth: str
    prompt: str = ""
    lang: str = "en"
    image_ref: str | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise ValueError("sample id must be non-empty")
        object.__setattr__(self, "task_kind", TaskKind(self.task_kind))
        if not self.ground_truth:
            raise ValueError(f"sample {self.id!r}: ground_truth must be non-empty")
        if self.lang not in LANGS:
            raise ValueError(f"sample {self.id!r}: lang must be one of {LANGS}")
        for k, v in self.meta.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise ValueError(f"sample {self.id!r}: meta must map strings to strings")


@dataclass(frozen=True)
class Corpus:
    samples: tuple[Sample, ...] = ()
    schema_version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.schema_version < 1:
            raise ValueError("schema_version must be >= 1")
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise ValueError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.samples)

    def by_id(self) -> dict[str, Sample]:
        return {s.id: s for s in self.samples}


def _sample_from_obj(obj: dict, line: int) -> Sample:
    if not isinstance(obj, dict):
        raise CorpusFormatError(line, "record is not an object")
    unknown = set(obj) - set(_FIELDS)
    if unknown:
        raise CorpusFormatError(line, f"unknown field(s): {', '.join(sorted(unknown))}")
    for name in ("id", "task_kind", "ground_truth"):
        if name not in obj:
            raise CorpusFormatError(line, f"missing field {name!r}")
    for name in ("id", "task_kind", "ground_truth", "prompt", "lang"):
        if name in obj and not isinstance(obj[name], str):
            raise CorpusFormatError(line, f"field {name!r} must be a string")
    image_ref = obj.get("image_ref")
    if image_ref is not None and not isinstance(image_ref, str):
        raise CorpusFormatError(line, "field 'image_ref' must be a string or null")
    meta = obj.get("meta", {})
    if not isinstance(meta, dict):
        raise CorpusFormatError(line, "field 'meta' must be an object")
    try:
        return Sample(
            id=obj["id"],
            task_kind=obj["task_kind"],
            ground_truth=obj["ground_truth"],
            prompt=obj.get("prompt", ""),
            lang=obj.get("lang", "en"),
            image_ref=image_ref,
            meta=dict(meta),
        )
    except ValueError as exc:
        raise CorpusFormatError(line, str(exc)) from exc


def load_records(path: str | Path) -> Corpus:
    """Read a record file, preserving file order; raises CorpusFormatError."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    samples: list[Sample] = []
    seen: set[str] = set()
    schema_version = 1
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            raise CorpusFormatError(lineno, "blank line")
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(lineno, f"invalid JSON ({exc.msg})") from exc
        if lineno == 1 and isinstance(obj, dict) and set(obj) == {"schema_version"}:
            version = obj["schema_version"]
            if isinstance(version, bool) or not isinstance(version, int) or version < 1:
                raise CorpusFormatError(lineno, "schema_version must be a positive integer")
            schema_version = version
            continue
        sample = _sample_from_obj(obj, lineno)
        if sample.id in seen:
            raise CorpusFormatError(lineno, f"duplicate sample id {sample.id!r}")
        seen.add(sample.id)
        samples.append(sample)
    return Corpus(tuple(samples), schema_version)


def record_line(sample: Sample) -> str:
    """Canonical single-line JSON for one sample (meta keys sorted)."""
    obj: dict[str, object] = {"id": sample.id, "task_kind": sample.task_kind.value}
    if sample.image_ref is not None:
        obj["image_ref"] = sample.image_ref
    obj["prompt"] = sample.prompt
    obj["ground_truth"] = sample.ground_truth
    obj["lang"] = sample.lang
    obj["meta"] = dict(sorted(sample.meta.items()))
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def dump_records(corpus: Corpus) -> str:
    """Serialize a corpus to the record file text (byte-stable)."""
    lines = []
    if corpus.schema_version != 1:
        lines.append(json.dumps({"schema_version": corpus.schema_version}))
    lines.extend(record_line(s) for s in corpus.samples)
    return "".join(line + "\n" for line in lines)


def save_records(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(dump_records(corpus), encoding="utf-8")


def dedup_filter(test: Corpus, train: Corpus, threshold: float) -> Corpus:
    """Drop test samples too similar to any training ground truth.

    Similarity is 1 - normalized character-level edit distance; a test sample
    survives only if its maximum similarity over the training corpus is below
    the threshold.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    train_toks = [tokenize(s.ground_truth, "char") for s in train.samples]
    kept = []
    for sample in test.samples:
        toks = tokenize(sample.ground_truth, "char")
        if all(1.0 - edit_distance_norm(t, toks) < threshold for t in train_toks):
            kept.append(sample)
    return Corpus(tuple(kept), test.schema_version)


def mix_stages(previous: Corpus, new: Corpus, ratio: float, seed: int) -> Corpus:
    """Combine a new stage with a seeded sample of the previous stage.

    Output order is all of ``new`` followed by floor(ratio * len(previous))
    samples of ``previous``, drawn without replacement by taking the first k
    indices of a seeded Fisher-Yates shuffle.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must be within [0, 1]")
    # epsilon guards against one-ulp-under products of decimal ratios (0.3 * 10)
    k = int(ratio * len(previous.samples) + 1e-9)
    indices = list(range(len(previous.samples)))
    random.Random(seed).shuffle(indices)
    carried = tuple(previous.samples[i] for i in indices[:k])
    return Corpus(new.samples + carried, new.schema_version)

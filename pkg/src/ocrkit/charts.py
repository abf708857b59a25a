"""Chart-OCR structured outputs: parsing, AP scoring and synthesis.

A chart is a title/source/axis-title header plus named series of labeled
numeric points. Two interchangeable text forms are supported: a Python-dict
literal subset (single or double quotes, trailing commas allowed, nothing
else) and a markdown pipe table whose first column holds labels, optionally
preceded by ``key: value`` metadata lines. Scoring matches (series, label,
value) triples at relative-error tolerances 0 / 0.05 / 0.10 for
AP@strict/slight/high.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass

AP_TOLERANCES = {"strict": 0.0, "slight": 0.05, "high": 0.10}
AP_VALUE_FLOOR = 1e-9

_META_KEYS = {"title", "source", "x_title", "y_title"}


class ChartParseError(ValueError):
    """Chart text rejected; carries 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Series:
    name: str
    points: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen = set()
        for label, value in self.points:
            if label in seen:
                raise ValueError(f"series {self.name!r}: duplicate label {label!r}")
            seen.add(label)
            if not math.isfinite(value):
                raise ValueError(f"series {self.name!r}: value for {label!r} not finite")


@dataclass(frozen=True)
class ChartStruct:
    series: tuple[Series, ...] = ()
    title: str | None = None
    source: str | None = None
    x_title: str | None = None
    y_title: str | None = None

    def __post_init__(self):
        seen = set()
        for s in self.series:
            if s.name in seen:
                raise ValueError(f"duplicate series name {s.name!r}")
            seen.add(s.name)

    def items(self) -> list[tuple[str, str, float]]:
        """All (series, label, value) triples."""
        return [(s.name, label, value) for s in self.series for label, value in s.points]


@dataclass(frozen=True)
class ApReport:
    ap_strict: float
    ap_slight: float
    ap_high: float
    n_samples: int

    def __post_init__(self):
        if not self.ap_strict <= self.ap_slight <= self.ap_high:
            raise ValueError("AP values must be non-decreasing with tolerance")

    def as_dict(self) -> dict[str, float | int]:
        return {
            "ap_strict": self.ap_strict,
            "ap_slight": self.ap_slight,
            "ap_high": self.ap_high,
            "n_samples": self.n_samples,
        }


_NUMBER_RE = re.compile(r"-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_ESCAPES = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "t": "\t", "r": "\r"}


class _DictScanner:
    """Tokenizer/parser for the dict-literal subset with position tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _line_col(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        start = self.text.rfind("\n", 0, pos) + 1
        return line, pos - start + 1

    def error(self, message: str, pos: int | None = None) -> ChartParseError:
        line, col = self._line_col(self.pos if pos is None else pos)
        return ChartParseError(line, col, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def string(self) -> str:
        quote = self.peek()
        if quote not in "'\"":
            raise self.error("expected a quoted string")
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == quote:
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                esc = self.text[self.pos + 1 : self.pos + 2]
                if esc not in _ESCAPES:
                    raise self.error(f"unsupported escape \\{esc}")
                out.append(_ESCAPES[esc])
                self.pos += 2
            else:
                out.append(ch)
                self.pos += 1

    def number(self) -> float:
        self.skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number")
        self.pos = m.end()
        return float(m.group())


def _parse_dict_form(text: str) -> ChartStruct:
    scanner = _DictScanner(text)
    meta: dict[str, str] = {}
    series: list[Series] = []
    seen_values = False
    scanner.expect("{")
    while True:
        if scanner.peek() == "}":
            scanner.pos += 1
            break
        scanner.skip_ws()
        key_pos = scanner.pos
        key = scanner.string()
        scanner.expect(":")
        if key == "values":
            if seen_values:
                raise scanner.error("duplicate key 'values'", key_pos)
            series = _parse_values(scanner)
            seen_values = True
        elif key in _META_KEYS:
            if key in meta:
                raise scanner.error(f"duplicate key {key!r}", key_pos)
            meta[key] = scanner.string()
        else:
            raise scanner.error(f"unknown key {key!r}", key_pos)
        ch = scanner.peek()
        if ch == ",":
            scanner.pos += 1
        elif ch != "}":
            raise scanner.error("expected ',' or '}'")
    scanner.skip_ws()
    if scanner.pos != len(scanner.text):
        raise scanner.error("unexpected text after the closing '}'")
    if not seen_values:
        raise scanner.error("missing 'values' map", 0)
    return ChartStruct(
        series=tuple(series),
        title=meta.get("title"),
        source=meta.get("source"),
        x_title=meta.get("x_title"),
        y_title=meta.get("y_title"),
    )


def _parse_values(scanner: _DictScanner) -> list[Series]:
    series: list[Series] = []
    names: set[str] = set()
    scanner.expect("{")
    while True:
        if scanner.peek() == "}":
            scanner.pos += 1
            return series
        scanner.skip_ws()
        name_pos = scanner.pos
        name = scanner.string().strip()
        if name in names:
            raise scanner.error(f"duplicate series name {name!r}", name_pos)
        names.add(name)
        scanner.expect(":")
        points: list[tuple[str, float]] = []
        labels: set[str] = set()
        scanner.expect("{")
        while True:
            if scanner.peek() == "}":
                scanner.pos += 1
                break
            scanner.skip_ws()
            label_pos = scanner.pos
            label = scanner.string().strip()
            if label in labels:
                raise scanner.error(f"duplicate label {label!r}", label_pos)
            labels.add(label)
            scanner.expect(":")
            points.append((label, scanner.number()))
            ch = scanner.peek()
            if ch == ",":
                scanner.pos += 1
            elif ch != "}":
                raise scanner.error("expected ',' or '}'")
        series.append(Series(name, tuple(points)))
        ch = scanner.peek()
        if ch == ",":
            scanner.pos += 1
        elif ch != "}":
            raise scanner.error("expected ',' or '}'")


def _split_row(line: str) -> list[str]:
    cells = line.strip().strip("|").split("|")
    return [c.strip() for c in cells]


_SEPARATOR_CELL_RE = re.compile(r"^:?-+:?$")


def _parse_table_form(text: str) -> ChartStruct:
    meta: dict[str, str] = {}
    lines = text.split("\n")
    table_start = None
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("|"):
            table_start = idx
            break
        key, sep, value = stripped.partition(":")
        norm = key.strip().lower().replace("-", "_")
        if not sep or norm not in _META_KEYS:
            raise ChartParseError(idx + 1, 1, f"expected metadata or a table row, got {stripped!r}")
        if norm in meta:
            raise ChartParseError(idx + 1, 1, f"duplicate metadata key {norm!r}")
        meta[norm] = value.strip()
    if table_start is None:
        raise ChartParseError(len(lines), 1, "no table found")
    header = _split_row(lines[table_start])
    if len(header) < 2:
        raise ChartParseError(table_start + 1, 1, "table header needs a label column and series")
    names = header[1:]
    if len(set(names)) != len(names):
        raise ChartParseError(table_start + 1, 1, "duplicate series name in header")
    columns: list[list[tuple[str, float]]] = [[] for _ in names]
    labels: set[str] = set()
    for idx in range(table_start + 1, len(lines)):
        stripped = lines[idx].strip()
        if not stripped:
            continue
        if not stripped.startswith("|"):
            raise ChartParseError(idx + 1, 1, f"unexpected text after the table: {stripped!r}")
        cells = _split_row(lines[idx])
        if all(_SEPARATOR_CELL_RE.match(c) for c in cells):
            continue
        if len(cells) != len(header):
            raise ChartParseError(
                idx + 1, 1, f"row has {len(cells)} cells, header has {len(header)}"
            )
        label = cells[0]
        if label in labels:
            raise ChartParseError(idx + 1, 1, f"duplicate label {label!r}")
        labels.add(label)
        for col, cell in enumerate(cells[1:]):
            if not _NUMBER_RE.fullmatch(cell):
                raise ChartParseError(idx + 1, 1, f"non-numeric value cell {cell!r}")
            columns[col].append((label, float(cell)))
    return ChartStruct(
        series=tuple(Series(name, tuple(col)) for name, col in zip(names, columns)),
        title=meta.get("title"),
        source=meta.get("source"),
        x_title=meta.get("x_title"),
        y_title=meta.get("y_title"),
    )


def parse_chart_output(text: str) -> ChartStruct:
    """Parse either documented chart form into a canonical ChartStruct."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return _parse_dict_form(text)
        except ValueError as exc:
            if isinstance(exc, ChartParseError):
                raise
            raise ChartParseError(1, 1, str(exc)) from exc
    try:
        return _parse_table_form(text)
    except ValueError as exc:
        if isinstance(exc, ChartParseError):
            raise
        raise ChartParseError(1, 1, str(exc)) from exc


def format_number(value: float) -> str:
    """Shortest decimal text that parses back to the same float."""
    return repr(value)


def serialize_chart_struct(struct: ChartStruct, form: str = "dict") -> str:
    """Canonical text for a ChartStruct; parse_chart_output inverts it."""
    if form == "dict":
        parts = []
        for key in ("title", "source", "x_title", "y_title"):
            value = getattr(struct, key)
            if value is not None:
                parts.append(f'"{key}": "{_escape(value)}"')
        values = ", ".join(
            f'"{_escape(s.name)}": {{'
            + ", ".join(f'"{_escape(label)}": {format_number(v)}' for label, v in s.points)
            + "}"
            for s in struct.series
        )
        parts.append(f'"values": {{{values}}}')
        return "{" + ", ".join(parts) + "}"
    if form == "table":
        label_lists = [tuple(label for label, _ in s.points) for s in struct.series]
        if label_lists and any(ll != label_lists[0] for ll in label_lists):
            raise ValueError("table form requires identical labels across series")
        for name in [s.name for s in struct.series] + list(label_lists[0] if label_lists else ()):
            if "|" in name or "\n" in name:
                raise ValueError(f"table form cannot hold {name!r}")
        lines = []
        for key in ("title", "source", "x_title", "y_title"):
            value = getattr(struct, key)
            if value is not None:
                if "\n" in value or value.lstrip().startswith("|"):
                    raise ValueError(f"table form cannot hold {key}={value!r}")
                lines.append(f"{key}: {value}")
        header = ["label"] + [s.name for s in struct.series]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join(" --- " for _ in header) + "|")
        labels = label_lists[0] if label_lists else ()
        for row_idx, label in enumerate(labels):
            cells = [label] + [format_number(s.points[row_idx][1]) for s in struct.series]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown form {form!r}")


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def chart_ap(preds: list[ChartStruct], gts: list[ChartStruct], tolerance: float) -> float:
    """Mean per-sample match rate of (series, label, value) triples.

    A prediction matches an unused ground-truth item when series and label
    agree exactly and |v_p - v_g| <= tolerance * max(|v_g|, 1e-9); each sample
    scores matches / max(#pred, #gt), and 1.0 when both sides are empty.
    """
    if len(preds) != len(gts):
        raise ValueError(f"got {len(preds)} predictions for {len(gts)} ground truths")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    if not preds:
        return 0.0
    total = 0.0
    for pred, gt in zip(preds, gts):
        gt_items = {(name, label): value for name, label, value in gt.items()}
        pred_items = pred.items()
        if not gt_items and not pred_items:
            total += 1.0
            continue
        used: set[tuple[str, str]] = set()
        matches = 0
        for name, label, value in pred_items:
            key = (name, label)
            if key in gt_items and key not in used:
                gt_value = gt_items[key]
                if abs(value - gt_value) <= tolerance * max(abs(gt_value), AP_VALUE_FLOOR):
                    used.add(key)
                    matches += 1
        total += matches / max(len(pred_items), len(gt_items))
    return total / len(preds)


def ap_report(preds: list[ChartStruct], gts: list[ChartStruct]) -> ApReport:
    return ApReport(
        ap_strict=chart_ap(preds, gts, AP_TOLERANCES["strict"]),
        ap_slight=chart_ap(preds, gts, AP_TOLERANCES["slight"]),
        ap_high=chart_ap(preds, gts, AP_TOLERANCES["high"]),
        n_samples=len(preds),
    )


DEFAULT_TEXT_POOL = (
    "revenue", "growth", "index", "volume", "share", "output", "exports",
    "imports", "traffic", "energy", "rainfall", "humidity", "pressure",
    "north", "south", "east", "west", "quarter", "region", "sector",
    "alpha", "beta", "gamma", "delta", "survey", "census", "forecast",
    "baseline", "observed", "expected", "annual", "monthly", "weekly",
)


@dataclass(frozen=True)
class ChartGenConfig:
    n_series: tuple[int, int] = (1, 3)
    n_points: tuple[int, int] = (2, 6)
    value_range: tuple[float, float] = (0.0, 1000.0)
    decimals: int = 2
    text_pool: tuple[str, ...] = DEFAULT_TEXT_POOL
    kinds: tuple[str, ...] = ("bar", "line")

    def __post_init__(self):
        if not self.text_pool:
            raise ValueError("text_pool must be non-empty")
        for lo, hi, what in (
            (*self.n_series, "n_series"),
            (*self.n_points, "n_points"),
        ):
            if lo < 1 or lo > hi:
                raise ValueError(f"bad {what} range ({lo}, {hi})")
        if self.value_range[0] > self.value_range[1]:
            raise ValueError(f"bad value_range {self.value_range}")
        if self.decimals < 0:
            raise ValueError("decimals must be >= 0")
        if not self.kinds:
            raise ValueError("kinds must be non-empty")
        for word in self.text_pool:
            if "|" in word or "\n" in word or not word:
                raise ValueError(f"pool text {word!r} not usable in every chart form")


RENDER_SPEC_VERSION = "chartspec v1"


def _distinct_names(rng: random.Random, pool: tuple[str, ...], count: int) -> list[str]:
    names: list[str] = []
    seen = set()
    for _ in range(count):
        base = rng.choice(pool)
        name = base
        suffix = 2
        while name in seen:
            name = f"{base} {suffix}"
            suffix += 1
        seen.add(name)
        names.append(name)
    return names


def gen_chart_struct(
    seed: int, config: ChartGenConfig = ChartGenConfig()
) -> tuple[ChartStruct, str]:
    """Deterministic chart ground truth plus its plotting instruction text.

    Labels are shared across series (one x axis), values drawn uniformly in
    the configured range and rounded to the configured decimals. The render
    spec is the documented line-based ``chartspec v1`` format for external
    plotting tools.
    """
    rng = random.Random(seed)
    kind = rng.choice(config.kinds)
    title, source, x_title, y_title = (rng.choice(config.text_pool) for _ in range(4))
    n_series = rng.randint(*config.n_series)
    n_points = rng.randint(*config.n_points)
    names = _distinct_names(rng, config.text_pool, n_series)
    labels = _distinct_names(rng, config.text_pool, n_points)
    lo, hi = config.value_range
    series = tuple(
        Series(
            name,
            tuple((label, round(rng.uniform(lo, hi), config.decimals)) for label in labels),
        )
        for name in names
    )
    struct = ChartStruct(
        series=series, title=title, source=source, x_title=x_title, y_title=y_title
    )
    spec_lines = [
        RENDER_SPEC_VERSION,
        f"kind: {kind}",
        f"title: {title}",
        f"source: {source}",
        f"x_title: {x_title}",
        f"y_title: {y_title}",
        "labels: " + " | ".join(labels),
    ]
    for s in series:
        spec_lines.append(
            f"series: {s.name} | " + " | ".join(format_number(v) for _, v in s.points)
        )
    return struct, "\n".join(spec_lines) + "\n"

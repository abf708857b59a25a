"""Syntactic validators for the structured OCR output formats.

Each validator is total: any text that decodes as UTF-8 yields a report, never
an exception, and every issue points at a 1-based line/column inside the
input. Checks are deliberately syntax-only; chemical valence, musical voice
leading and math semantics are out of scope. CRLF line endings are normalized
and a trailing newline never changes the outcome.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .geometry import TikzParseError, parse_tikz_subset


@dataclass(frozen=True)
class Issue:
    line: int
    column: int
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...]

    @classmethod
    def from_issues(cls, issues: list[Issue]) -> "ValidationReport":
        return cls(not issues, tuple(issues))


def _lines_of(text: str) -> list[str]:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _make_issue(lines: list[str], line: int, column: int, code: str, message: str) -> Issue:
    line = min(max(line, 1), max(len(lines), 1))
    width = len(lines[line - 1]) + 1 if lines else 1
    return Issue(line, min(max(column, 1), width), code, message)


# --- Mathpix-flavoured markdown -------------------------------------------

# Delimiter families checked by default; pass a subset to narrow them.
DEFAULT_MATH_DELIMS = frozenset({"paren", "bracket", "dollar", "double_dollar"})

_ENV_RE = re.compile(r"\\(begin|end)\{([^}]*)\}")
_OPEN_FOR = {"\\)": "\\(", "\\]": "\\["}


def _split_cells(line: str) -> list[str]:
    return [c.strip() for c in line.strip().strip("|").split("|")]


def validate_mathpix_markdown(
    text: str, math_delims: frozenset[str] = DEFAULT_MATH_DELIMS
) -> ValidationReport:
    """Check math delimiter balance, environment pairing, table arity and
    code-fence termination."""
    lines = _lines_of(text)
    issues: list[Issue] = []

    fenced = [False] * len(lines)
    fence_open: tuple[int, int] | None = None
    for i, line in enumerate(lines):
        stripped = line.lstrip()
        if stripped.startswith("```"):
            fenced[i] = True
            if fence_open is None:
                fence_open = (i + 1, line.index("```") + 1)
            else:
                fence_open = None
        elif fence_open is not None:
            fenced[i] = True
    if fence_open is not None:
        issues.append(_make_issue(lines, *fence_open, "FENCE_UNCLOSED", "code fence never closed"))

    env_stack: list[tuple[str, int, int]] = []
    for i, line in enumerate(lines):
        if fenced[i]:
            continue
        for m in _ENV_RE.finditer(line):
            kind, name = m.group(1), m.group(2)
            if kind == "begin":
                env_stack.append((name, i + 1, m.start() + 1))
            elif not env_stack:
                issues.append(
                    _make_issue(
                        lines, i + 1, m.start() + 1, "ENV_UNOPENED", f"\\end{{{name}}} without begin"
                    )
                )
            else:
                open_name, oline, ocol = env_stack.pop()
                if open_name != name:
                    issues.append(
                        _make_issue(
                            lines,
                            i + 1,
                            m.start() + 1,
                            "ENV_MISMATCH",
                            f"\\end{{{name}}} closes \\begin{{{open_name}}} ({oline}:{ocol})",
                        )
                    )
    for name, oline, ocol in env_stack:
        issues.append(
            _make_issue(lines, oline, ocol, "ENV_UNCLOSED", f"\\begin{{{name}}} never closed")
        )

    bracket_stack: list[tuple[str, int, int]] = []
    dollar_open: tuple[int, int] | None = None
    ddollar_open: tuple[int, int] | None = None
    for i, line in enumerate(lines):
        if fenced[i]:
            continue
        j = 0
        while j < len(line):
            ch = line[j]
            if ch == "\\" and j + 1 < len(line):
                tok = line[j : j + 2]
                if tok in ("\\(", "\\[") and _family(tok) in math_delims:
                    bracket_stack.append((tok, i + 1, j + 1))
                elif tok in ("\\)", "\\]") and _family(tok) in math_delims:
                    if bracket_stack and bracket_stack[-1][0] == _OPEN_FOR[tok]:
                        bracket_stack.pop()
                    else:
                        issues.append(
                            _make_issue(
                                lines, i + 1, j + 1, "MATH_UNBALANCED", f"unmatched {tok}"
                            )
                        )
                j += 2
                continue
            if ch == "$":
                if line.startswith("$$", j):
                    if "double_dollar" in math_delims:
                        ddollar_open = None if ddollar_open else (i + 1, j + 1)
                    j += 2
                    continue
                if "dollar" in math_delims:
                    dollar_open = None if dollar_open else (i + 1, j + 1)
            j += 1
    for tok, line_no, col in bracket_stack:
        issues.append(_make_issue(lines, line_no, col, "MATH_UNBALANCED", f"unclosed {tok}"))
    if ddollar_open:
        issues.append(_make_issue(lines, *ddollar_open, "MATH_UNBALANCED", "unclosed $$"))
    if dollar_open:
        issues.append(_make_issue(lines, *dollar_open, "MATH_UNBALANCED", "unclosed $"))

    header_arity: int | None = None
    for i, line in enumerate(lines):
        if fenced[i] or not line.strip().startswith("|"):
            header_arity = None
            continue
        cells = _split_cells(line)
        if header_arity is None:
            header_arity = len(cells)
        elif len(cells) != header_arity:
            issues.append(
                _make_issue(
                    lines,
                    i + 1,
                    1,
                    "TABLE_ARITY",
                    f"row has {len(cells)} cells, header has {header_arity}",
                )
            )
    return ValidationReport.from_issues(issues)


def _family(tok: str) -> str:
    return "paren" if tok in ("\\(", "\\)") else "bracket"


# --- SMILES -----------------------------------------------------------------

_BRACKET_ATOM_RE = re.compile(
    r"\[\d*(?:[A-Z][a-z]?|[bcnops]|\*)(?:@{1,2})?(?:H\d*)?"
    r"(?:[+-]\d*|\+{2,}|-{2,})?(?::\d+)?\]"
)
_TWO_LETTER_ATOMS = ("Cl", "Br")
_ONE_LETTER_ATOMS = set("BCNOPSFI")
_AROMATIC_ATOMS = set("bcnops")
_BOND_CHARS = set("-=#$:/\\")


def validate_smiles(text: str) -> ValidationReport:
    """Check parenthesis balance, bracket-atom syntax, ring-closure pairing
    and that every atom/bond token belongs to the organic subset."""
    lines = _lines_of(text)
    issues: list[Issue] = []
    if len(lines) > 1:
        issues.append(
            _make_issue(lines, 1, len(lines[0]) + 1, "MULTILINE", "SMILES must be a single line")
        )
    s = lines[0] if lines else ""
    paren_stack: list[int] = []
    ring_first: dict[str, int] = {}
    ring_counts: dict[str, int] = {}
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            paren_stack.append(i)
            i += 1
        elif ch == ")":
            if paren_stack:
                paren_stack.pop()
            else:
                issues.append(_make_issue(lines, 1, i + 1, "PAREN_UNBALANCED", "unmatched ')'"))
            i += 1
        elif ch == "[":
            m = _BRACKET_ATOM_RE.match(s, i)
            if m:
                i = m.end()
            else:
                end = s.find("]", i)
                if end < 0:
                    issues.append(
                        _make_issue(lines, 1, i + 1, "BRACKET_UNCLOSED", "unclosed bracket atom")
                    )
                    i = len(s)
                else:
                    issues.append(
                        _make_issue(
                            lines,
                            1,
                            i + 1,
                            "BRACKET_MALFORMED",
                            f"bracket atom {s[i:end + 1]!r} does not match the bracket grammar",
                        )
                    )
                    i = end + 1
        elif ch == "%":
            if i + 2 < len(s) and s[i + 1].isdigit() and s[i + 2].isdigit():
                label = s[i : i + 3]
                ring_first.setdefault(label, i)
                ring_counts[label] = ring_counts.get(label, 0) + 1
                i += 3
            else:
                issues.append(
                    _make_issue(lines, 1, i + 1, "RING_MALFORMED", "'%' needs two digits")
                )
                i += 1
        elif ch.isdigit():
            ring_first.setdefault(ch, i)
            ring_counts[ch] = ring_counts.get(ch, 0) + 1
            i += 1
        elif s.startswith(_TWO_LETTER_ATOMS, i):
            i += 2
        elif ch in _ONE_LETTER_ATOMS or ch in _AROMATIC_ATOMS or ch == "*":
            i += 1
        elif ch in _BOND_CHARS or ch == ".":
            i += 1
        else:
            issues.append(
                _make_issue(
                    lines, 1, i + 1, "ATOM_ILLEGAL", f"character {ch!r} not in the SMILES subset"
                )
            )
            i += 1
    for pos in paren_stack:
        issues.append(_make_issue(lines, 1, pos + 1, "PAREN_UNBALANCED", "unclosed '('"))
    for label, count in ring_counts.items():
        if count != 2:
            issues.append(
                _make_issue(
                    lines,
                    1,
                    ring_first[label] + 1,
                    "RING_UNPAIRED",
                    f"ring closure {label!r} appears {count} time(s), expected exactly 2",
                )
            )
    return ValidationReport.from_issues(issues)


# --- Humdrum **kern ----------------------------------------------------------

# Documented token subset: optional opening ties/slurs, a duration (digits,
# optional %rational part, optional dots), pitch letters or a rest, then
# accidental/articulation/beam/stem modifiers.
_KERN_NOTE_RE = re.compile(
    r"^[\[({]*"
    r"\d+(?:%\d+)?\.*"
    r"(?:[a-gA-G]+|r+)"
    r"[-#n_'\"`~^:;,.xXyYqQJLKkMmTtWwSsRr$&<>@+|=/\\\])}]*$"
)


def validate_kern(text: str) -> ValidationReport:
    """Check spine declaration/termination, per-record field arity, barline
    consistency and the documented duration-pitch token pattern."""
    lines = _lines_of(text)
    issues: list[Issue] = []
    if not lines:
        return ValidationReport.from_issues(
            [Issue(1, 1, "EMPTY_INPUT", "no records in input")]
        )
    spine_count: int | None = None
    terminated = False
    for idx, line in enumerate(lines):
        ln = idx + 1
        if line.startswith("!!"):
            continue
        fields = line.split("\t")
        if spine_count is None:
            if all(f.startswith("**") and len(f) > 2 for f in fields) and "**kern" in fields:
                pass
            else:
                issues.append(
                    _make_issue(
                        lines, ln, 1, "SPINE_DECL", "first record must declare **kern spines"
                    )
                )
            spine_count = len(fields)
            continue
        if terminated:
            issues.append(
                _make_issue(lines, ln, 1, "SPINE_TERMINATED", "record after spine terminator")
            )
            continue
        if len(fields) != spine_count:
            issues.append(
                _make_issue(
                    lines,
                    ln,
                    1,
                    "SPINE_ARITY",
                    f"record has {len(fields)} field(s), spine count is {spine_count}",
                )
            )
            continue
        if line.startswith("!"):
            continue
        if all(f.startswith("*") for f in fields):
            if all(f == "*-" for f in fields):
                terminated = True
            elif any(f in ("*^", "*v") or f.startswith("**") for f in fields):
                issues.append(
                    _make_issue(
                        lines,
                        ln,
                        1,
                        "UNSUPPORTED",
                        "spine splits/merges and multi-system constructs are unsupported",
                    )
                )
            continue
        if any(f.startswith("*") for f in fields):
            issues.append(
                _make_issue(
                    lines, ln, 1, "MIXED_RECORD", "interpretation mixed with data fields"
                )
            )
            continue
        is_barline = [f.startswith("=") for f in fields]
        if any(is_barline):
            if not all(is_barline):
                col = 1 + sum(len(f) + 1 for f in fields[: is_barline.index(False)])
                issues.append(
                    _make_issue(
                        lines, ln, col, "BARLINE_MIXED", "barline record mixes non-barline fields"
                    )
                )
            continue
        col = 1
        for f in fields:
            if f != ".":
                for sub in f.split(" "):
                    if not _KERN_NOTE_RE.match(sub):
                        issues.append(
                            _make_issue(
                                lines,
                                ln,
                                col,
                                "TOKEN_MALFORMED",
                                f"token {sub!r} does not match the kern token pattern",
                            )
                        )
                        break
            col += len(f) + 1
    if spine_count is None:
        issues.append(_make_issue(lines, 1, 1, "SPINE_DECL", "no spine declaration found"))
    elif not terminated:
        issues.append(
            _make_issue(lines, len(lines), 1, "SPINE_UNTERMINATED", "spines never terminated by *-")
        )
    return ValidationReport.from_issues(issues)


# --- TikZ (delegates to the geometry parser) ---------------------------------


def validate_tikz(text: str) -> ValidationReport:
    """Accept exactly the geometry engine's TikZ subset."""
    normalized = "\n".join(_lines_of(text))
    try:
        parse_tikz_subset(normalized + "\n" if normalized else "")
    except TikzParseError as exc:
        lines = _lines_of(text)
        return ValidationReport.from_issues(
            [_make_issue(lines, exc.line, exc.column, "TIKZ_SYNTAX", exc.message)]
        )
    except ValueError as exc:
        return ValidationReport.from_issues([Issue(1, 1, "TIKZ_SYNTAX", str(exc))])
    return ValidationReport.from_issues([])


VALIDATORS = {
    "markdown": validate_mathpix_markdown,
    "tikz": validate_tikz,
    "smiles": validate_smiles,
    "kern": validate_kern,
}

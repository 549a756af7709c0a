"""Line-oriented input files and structured reports.

Input files start with the header ``SNCDESCENT 1``. Blank lines and ``#`` comments
are ignored. Directives::

    FIELD QQ | GF(p)
    RING x y
    DIVISOR x y
    PREC 8 [CAP 64]
    MODULE <name> <n_gens>        followed by REL lines (one relation column each)
    DATUM <name>
    STRATUM <datum> {x,y} <n_gens>   followed by REL lines
    RHO <datum> {} {x}            followed by ROW lines (rows of the matrix)
    RUN glue <datum> | check_cocycle <datum> | verify_roundtrip <module>
    RUN stabilize <module> <var> <depth>

Entries are comma-separated polynomials; comparison maps may use negative powers.
Comparison maps that are not given default to the identity.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from dataclasses import field as dc_field

from .field import Field
from .poly import ParseError as PolyParseError
from .poly import parse_laurent

HEADER = "SNCDESCENT 1"


class InputError(ValueError):
    """Malformed input with a 1-based line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)
        self.line = line
        self.col = col
        self.msg = msg


@dataclass
class EntrySource:
    text: str
    line: int
    col: int


@dataclass
class ModuleDecl:
    name: str
    n_gens: int
    rels: list = dc_field(default_factory=list)  # list of lists of EntrySource
    line: int = 0


@dataclass
class RhoDecl:
    src: tuple
    tgt: tuple
    rows: list = dc_field(default_factory=list)
    line: int = 0


@dataclass
class DatumDecl:
    name: str
    strata: dict = dc_field(default_factory=dict)  # label tuple -> ModuleDecl
    rho: list = dc_field(default_factory=list)
    line: int = 0


@dataclass
class RunDecl:
    command: str
    args: list
    line: int


@dataclass
class InputFile:
    field: Field | None = None
    ring: list = dc_field(default_factory=list)
    divisor: list = dc_field(default_factory=list)
    prec: int | None = None
    cap: int | None = None
    modules: dict = dc_field(default_factory=dict)
    data: dict = dc_field(default_factory=dict)
    runs: list = dc_field(default_factory=list)


_RUNS = {"glue": 1, "check_cocycle": 1, "verify_roundtrip": 1, "stabilize": 3}
_SET = re.compile(r"\{([^{}]*)\}")


def _split_entries(text: str, line: int, col0: int) -> list:
    out = []
    pos = 0
    for part in text.split(","):
        lead = len(part) - len(part.lstrip())
        out.append(EntrySource(part.strip(), line, col0 + pos + lead))
        pos += len(part) + 1
    return out


def _stratum(label: str, line: int, col: int, ring_vars) -> tuple:
    m = _SET.fullmatch(label)
    if not m:
        raise InputError(f"expected a stratum like {{x,y}}, got {label!r}", line, col)
    names = tuple(s.strip() for s in m.group(1).split(",") if s.strip())
    for s in names:
        if s not in ring_vars:
            raise InputError(f"unknown variable {s!r} in stratum", line, col)
    return tuple(sorted(names, key=ring_vars.index))


def parse_input(text: str) -> InputFile:
    lines = text.splitlines()
    content = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not content:
        raise InputError("empty input", 1, 1)
    first_no, first = content[0]
    if first.strip() != HEADER:
        raise InputError(f"expected header {HEADER!r}", first_no, 1)
    out = InputFile()
    current = None  # ModuleDecl or RhoDecl receiving REL/ROW lines
    for no, raw in content[1:]:
        body = raw.split("#", 1)[0].rstrip()
        indent = len(body) - len(body.lstrip())
        stripped = body.strip()
        word, _, rest = stripped.partition(" ")
        # 1-based column where the argument text starts
        rest_col = indent + len(word) + 2 + len(rest) - len(rest.lstrip())
        rest = rest.strip()
        key = word.upper()
        if key == "FIELD":
            try:
                out.field = Field.parse(rest)
            except ValueError as exc:
                raise InputError(str(exc), no, rest_col) from None
        elif key == "RING":
            names = rest.split()
            if not names or len(set(names)) != len(names):
                raise InputError("RING needs distinct variable names", no, rest_col)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
                    raise InputError(f"bad variable name {nm!r}", no, rest_col + rest.index(nm))
            out.ring = names
        elif key == "DIVISOR":
            names = rest.split()
            for nm in names:
                if nm not in out.ring:
                    raise InputError(f"divisor component {nm!r} is not a ring variable", no, rest_col + rest.index(nm))
            out.divisor = names
        elif key == "PREC":
            parts = rest.split()
            try:
                out.prec = int(parts[0])
                if len(parts) == 3 and parts[1].upper() == "CAP":
                    out.cap = int(parts[2])
                elif len(parts) != 1:
                    raise ValueError
            except (ValueError, IndexError):
                raise InputError("expected PREC <level> [CAP <cap>]", no, rest_col) from None
        elif key == "MODULE":
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise InputError("expected MODULE <name> <n_gens>", no, rest_col)
            current = ModuleDecl(parts[0], int(parts[1]), line=no)
            out.modules[parts[0]] = current
        elif key == "DATUM":
            if not rest:
                raise InputError("expected DATUM <name>", no, rest_col)
            out.data[rest] = DatumDecl(rest, line=no)
            current = None
        elif key == "STRATUM":
            m = re.fullmatch(r"(\S+)\s+(\{[^{}]*\})\s+(\d+)", rest)
            if not m:
                raise InputError("expected STRATUM <datum> {vars} <n_gens>", no, rest_col)
            d = out.data.get(m.group(1))
            if d is None:
                raise InputError(f"unknown datum {m.group(1)!r}", no, rest_col)
            label = _stratum(m.group(2), no, rest_col + m.start(2), out.ring)
            current = ModuleDecl(m.group(1) + m.group(2), int(m.group(3)), line=no)
            d.strata[label] = current
        elif key == "RHO":
            m = re.fullmatch(r"(\S+)\s+(\{[^{}]*\})\s+(\{[^{}]*\})", rest)
            if not m:
                raise InputError("expected RHO <datum> {vars} {vars}", no, rest_col)
            d = out.data.get(m.group(1))
            if d is None:
                raise InputError(f"unknown datum {m.group(1)!r}", no, rest_col)
            src = _stratum(m.group(2), no, rest_col + m.start(2), out.ring)
            tgt = _stratum(m.group(3), no, rest_col + m.start(3), out.ring)
            current = RhoDecl(src, tgt, line=no)
            d.rho.append(current)
        elif key == "REL":
            if not isinstance(current, ModuleDecl):
                raise InputError("REL outside a MODULE or STRATUM block", no, indent + 1)
            current.rels.append(_split_entries(rest, no, rest_col))
        elif key == "ROW":
            if not isinstance(current, RhoDecl):
                raise InputError("ROW outside a RHO block", no, indent + 1)
            current.rows.append(_split_entries(rest, no, rest_col))
        elif key == "RUN":
            parts = rest.split()
            if not parts or parts[0] not in _RUNS:
                raise InputError(f"unknown RUN command; expected one of {', '.join(_RUNS)}", no, rest_col)
            if len(parts) - 1 != _RUNS[parts[0]]:
                raise InputError(f"RUN {parts[0]} takes {_RUNS[parts[0]]} argument(s)", no, rest_col)
            out.runs.append(RunDecl(parts[0], parts[1:], no))
        else:
            raise InputError(f"unknown directive {word!r}", no, indent + 1)
    if not out.ring:
        raise InputError("missing RING line", content[-1][0], 1)
    return out


def parse_entry(src: EntrySource, names, fld) -> dict:
    """Laurent terms of one entry; errors point at the offending column."""
    if not src.text:
        raise InputError("empty entry", src.line, src.col)
    try:
        return parse_laurent(src.text, names, fld)
    except PolyParseError as exc:
        raise InputError(exc.msg, src.line, src.col + exc.pos) from None


# -- reports -----------------------------------------------------------------

def emit_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    return format_text(report)


def parse_report(text: str) -> dict:
    return json.loads(text)


def format_text(report: dict) -> str:
    lines = []
    for block in report.get("runs", []):
        head = f"[{block.get('verdict', '?')}] {block.get('command', '')}"
        if block.get("target"):
            head += f" {block['target']}"
        lines.append(head)
        for line in block.get("lines", []):
            lines.append("  " + line)
    lines.append(f"exit code: {report.get('exit_code', 0)}")
    return "\n".join(lines) + "\n"

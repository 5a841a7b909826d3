"""Text formats.

network      ``name = expression`` per line, ``#`` comments
profiles     CSV, header of variable names, cells ``0``, ``1`` or ``-``
graph        ``src -> tgt sign`` per line, sign one of ``+ - ?``
signatures   CSV, header of biomarker names, one 0/1 row per signature
config       flat ``key = value`` lines
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path
from typing import Iterable, Sequence

from . import expr as ex
from .exceptions import ParseError
from .formula import Formula
from .inference import BooleanProfileSet, FormulaPool, RegulatorSpec
from .network import BooleanNetwork
from .objective import SignatureSet

_SIGN_TOKENS = {"+": 1, "-": -1, "?": None}
_SIGN_TEXT = {1: "+", -1: "-", None: "?"}


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _assignments(text: str) -> list[tuple[int, str, Formula]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        eq = line.find("=")
        if eq < 0:
            raise ParseError("expected 'name = expression'", line=lineno, column=1)
        name = line[:eq].strip()
        if not name or not all(c.isalnum() or c in "_.:'" for c in name) or name[0].isdigit():
            raise ParseError(f"invalid variable name {name!r}", line=lineno, column=1)
        e = ex.parse(line[eq + 1 :], line=lineno, offset=eq + 1)
        out.append((lineno, name, Formula.from_expr(e)))
    return out


def parse_network(text: str) -> BooleanNetwork:
    """Parse the network text format. Every referenced variable must have
    its own line."""
    functions: dict[str, Formula] = {}
    lines: dict[str, int] = {}
    for lineno, name, f in _assignments(text):
        if name in functions:
            raise ParseError(f"{name!r} defined twice", line=lineno, column=1)
        functions[name] = f
        lines[name] = lineno
    for name, f in functions.items():
        undeclared = [v for v in f.support if v not in functions]
        if undeclared:
            raise ParseError(f"undeclared variable {undeclared[0]!r} in formula of {name!r}", line=lines[name])
    return BooleanNetwork(tuple(functions), functions)


def serialize_network(network: BooleanNetwork, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"{v} = {network.functions[v]}" for v in network.variables]
    return "\n".join(lines) + "\n"


def parse_pool(text: str) -> dict[str, list[Formula]]:
    """Formula pools: the network format with repeated left-hand sides."""
    out: dict[str, list[Formula]] = {}
    for _, name, f in _assignments(text):
        out.setdefault(name, []).append(f)
    return out


def serialize_pool(pool: FormulaPool, header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"{pool.target} = {f}" for f in pool.formulas]
    return "\n".join(lines) + "\n"


def parse_profiles(text: str) -> BooleanProfileSet:
    reader = csv.reader(_io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("missing header row", line=1)
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise ParseError("duplicate column name in header", line=1)
    data = []
    for lineno, r in enumerate(rows[1:], 2):
        if len(r) != len(header):
            raise ParseError(f"row has {len(r)} cells, header has {len(header)}", line=lineno)
        row = []
        for col, cell in enumerate(r, 1):
            cell = cell.strip()
            if cell == "0":
                row.append(0)
            elif cell == "1":
                row.append(1)
            elif cell == "-":
                row.append(None)
            else:
                raise ParseError(f"invalid cell {cell!r} in column {header[col - 1]!r}", line=lineno, column=col)
        data.append(tuple(row))
    if not data:
        raise ParseError("no profile rows", line=1)
    return BooleanProfileSet(tuple(header), tuple(data))


def serialize_profiles(profiles: BooleanProfileSet) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(profiles.variables)
    for row in profiles.rows:
        w.writerow(["-" if c is None else str(c) for c in row])
    return buf.getvalue()


def parse_graph(text: str) -> list[RegulatorSpec]:
    """Regulator specs grouped by target, in order of first appearance."""
    grouped: dict[str, list[tuple[str, int | None]]] = {}
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError("expected 'source -> target sign'", line=lineno)
        src, rest = line.split("->", 1)
        parts = rest.split()
        src = src.strip()
        if not src or len(parts) != 2:
            raise ParseError("expected 'source -> target sign'", line=lineno)
        tgt, token = parts
        if token not in _SIGN_TOKENS:
            raise ParseError(f"unknown sign {token!r} (use +, - or ?)", line=lineno, column=raw.rfind(token) + 1)
        if (src, tgt) in seen:
            raise ParseError(f"duplicate interaction {src} -> {tgt}", line=lineno)
        seen.add((src, tgt))
        grouped.setdefault(tgt, []).append((src, _SIGN_TOKENS[token]))
    return [RegulatorSpec(t, tuple(regs)) for t, regs in grouped.items()]


def serialize_graph(specs: Iterable[RegulatorSpec]) -> str:
    lines = [f"{src} -> {s.target} {_SIGN_TEXT[sign]}" for s in specs for src, sign in s.regulators]
    return "\n".join(lines) + "\n"


def parse_signatures(text: str) -> SignatureSet:
    reader = csv.reader(_io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("missing header row", line=1)
    header = tuple(h.strip() for h in rows[0])
    sigs = []
    for lineno, r in enumerate(rows[1:], 2):
        if len(r) != len(header):
            raise ParseError(f"row has {len(r)} cells, header has {len(header)}", line=lineno)
        try:
            bits = tuple(int(c) for c in r)
        except ValueError:
            raise ParseError("signature cells must be 0 or 1", line=lineno) from None
        if any(b not in (0, 1) for b in bits):
            raise ParseError("signature cells must be 0 or 1", line=lineno)
        sigs.append(bits)
    return SignatureSet(header, tuple(sigs))


def serialize_signatures(signatures: SignatureSet) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(signatures.biomarkers)
    w.writerows(signatures.signatures)
    return buf.getvalue()


def parse_config(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def write_trace(rows: Iterable, path_or_buf) -> None:
    from .search import TraceRow

    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TraceRow.FIELDS)
        for r in rows:
            w.writerow(r.as_row())

    if isinstance(path_or_buf, (str, Path)):
        with open(path_or_buf, "w", newline="") as fh:
            dump(fh)
    else:
        dump(path_or_buf)


def read_text(path) -> str:
    return Path(path).read_text()

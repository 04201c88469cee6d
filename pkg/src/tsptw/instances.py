"""Reading and writing instance files.

Two layouts are supported:

matrix
    First line ``N`` (vertices including the depot), then ``N`` rows of ``N``
    travel times, then ``N`` rows ``a b`` with the time windows, depot first.
    Lines starting with ``#`` are comments; ``# name:`` and ``# scale:``
    headers are honoured.

coords
    Solomon-style rows ``id x y demand ready due service``, depot first.
    Non-numeric header lines are skipped and a row with id ``999`` ends the
    data.  Travel times are Euclidean distances rounded half-up at the
    requested decimal, plus the service time of the origin.

Numbers are parsed as exact decimals and stored as ints scaled by
``10**scale``.  The end depot ``n + 1`` is a copy of the file's depot.
"""

from __future__ import annotations

import logging
import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .model import Instance

log = logging.getLogger(__name__)


class InstanceFormatError(ValueError):
    pass


class MalformedFile(InstanceFormatError):
    pass


class NonDecimal(InstanceFormatError):
    """A value has more decimals than the chosen scale can hold."""


class NegativeTime(InstanceFormatError):
    pass


def _decimal(token: str) -> Decimal:
    try:
        value = Decimal(token)
    except InvalidOperation:
        raise MalformedFile(f"not a number: {token!r}") from None
    if not value.is_finite():
        raise MalformedFile(f"not a finite number: {token!r}")
    return value


def to_scaled(token: str, scale: int) -> int:
    """Exact fixed-point value of a decimal token, e.g. ``"12.3"`` at scale 1 -> 123."""
    value = _decimal(token)
    if value < 0:
        raise NegativeTime(f"negative time {token!r}")
    scaled = value.scaleb(scale)
    if scaled != scaled.to_integral_value():
        raise NonDecimal(f"{token!r} has more than {scale} decimals")
    return int(scaled)


def format_scaled(value: int, scale: int) -> str:
    if scale == 0:
        return str(value)
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(value), 10**scale)
    return f"{sign}{whole}.{frac:0{scale}d}"


def round_sqrt(square: Fraction, scale: int) -> int:
    """``sqrt(square) * 10**scale`` rounded half-up, computed exactly."""
    y = square * 100**scale
    return (math.isqrt(math.floor(4 * y)) + 1) // 2


def _headers(lines: list[str]) -> dict[str, str]:
    out = {}
    for line in lines:
        if line.startswith("#") and ":" in line:
            key, _, value = line[1:].partition(":")
            out[key.strip().lower()] = value.strip()
    return out


def assemble(travel: list[list[int]], a: list[int], b: list[int], scale: int, name: str) -> Instance:
    """Add the end-depot copy, clip customer deadlines to the horizon and validate."""
    size = len(travel)
    if a[0] != 0:
        raise MalformedFile(f"depot window must open at 0, got {format_scaled(a[0], scale)}")
    horizon = b[0]
    clipped = [min(x, horizon) for x in b]
    if clipped != b:
        log.info("%s: clipped %d deadlines to the horizon", name, sum(x > horizon for x in b))
    for v in range(1, size):
        if a[v] > clipped[v]:
            raise MalformedFile(f"vertex {v} has window [{a[v]}, {b[v]}] outside the horizon {horizon}")
    full = [row + [row[0]] for row in travel]
    full.append(full[0][:])
    full[size][size] = 0
    try:
        return Instance.build(full, a + [0], clipped + [horizon], horizon, scale, name)
    except ValueError as exc:
        raise MalformedFile(str(exc)) from None


def parse_matrix(text: str, scale: Optional[int] = None, name: Optional[str] = None) -> Instance:
    raw = [line.strip() for line in text.splitlines()]
    headers = _headers(raw)
    if scale is None:
        scale = int(headers.get("scale", 0))
    if name is None:
        name = headers.get("name", "")
    lines = [line.split() for line in raw if line and not line.startswith("#")]
    if not lines or len(lines[0]) != 1:
        raise MalformedFile("first line must hold the vertex count")
    try:
        size = int(lines[0][0])
    except ValueError:
        raise MalformedFile(f"bad vertex count {lines[0][0]!r}") from None
    if size < 1:
        raise MalformedFile("vertex count must be positive")
    if len(lines) != 1 + 2 * size:
        raise MalformedFile(f"expected {2 * size} data lines after the count, found {len(lines) - 1}")
    travel = []
    for i, row in enumerate(lines[1 : 1 + size]):
        if len(row) != size:
            raise MalformedFile(f"matrix row {i} has {len(row)} entries, expected {size}")
        travel.append([to_scaled(tok, scale) for tok in row])
    a, b = [], []
    for i, row in enumerate(lines[1 + size :]):
        if len(row) != 2:
            raise MalformedFile(f"window line {i} must hold two numbers")
        a.append(to_scaled(row[0], scale))
        b.append(to_scaled(row[1], scale))
    return assemble(travel, a, b, scale, name)


def parse_coordinates(text: str, scale: int = 0, name: str = "") -> Instance:
    rows = []
    for line in text.splitlines():
        tokens = line.split()
        if len(tokens) < 7 or line.lstrip().startswith("#"):
            continue
        try:
            values = [_decimal(tok) for tok in tokens[:7]]
        except MalformedFile:
            continue
        if values[0] == 999:
            break
        rows.append(values)
    if not rows:
        raise MalformedFile("no coordinate rows found")
    xs = [Fraction(r[1]) for r in rows]
    ys = [Fraction(r[2]) for r in rows]
    service = [to_scaled(str(r[6]), scale) for r in rows]
    a = [to_scaled(str(r[4]), scale) for r in rows]
    b = [to_scaled(str(r[5]), scale) for r in rows]
    size = len(rows)
    travel = [
        [0 if v == w else round_sqrt((xs[v] - xs[w]) ** 2 + (ys[v] - ys[w]) ** 2, scale) + service[v] for w in range(size)]
        for v in range(size)
    ]
    return assemble(travel, a, b, scale, name)


def format_matrix(inst: Instance, header: Optional[dict] = None) -> str:
    """Matrix-layout text for ``inst``; vertex ``n + 1`` must be a copy of the depot."""
    end, d = inst.end, inst.scale
    for v in range(end):
        if inst.travel[v][end] != inst.travel[v][0] or inst.travel[end][v] != inst.travel[0][v]:
            raise ValueError("end depot differs from the start depot; the matrix layout cannot hold it")
    lines = []
    meta = {"name": inst.name, "scale": d}
    meta.update(header or {})
    for key, value in meta.items():
        lines.append(f"# {key}: {value}")
    lines.append(str(end))
    for v in range(end):
        lines.append(" ".join(format_scaled(inst.travel[v][w], d) for w in range(end)))
    for v in range(end):
        lines.append(f"{format_scaled(inst.window_open[v], d)} {format_scaled(inst.window_close[v], d)}")
    return "\n".join(lines) + "\n"


def load(path, fmt: str = "matrix", scale: Optional[int] = None) -> Instance:
    path = Path(path)
    text = path.read_text()
    if fmt == "matrix":
        inst = parse_matrix(text, scale)
        return inst if inst.name else _renamed(inst, path.stem)
    if fmt == "coords":
        return parse_coordinates(text, scale or 0, path.stem)
    raise ValueError(f"unknown format {fmt!r}")


def _renamed(inst: Instance, name: str) -> Instance:
    return Instance(inst.n, inst.horizon, inst.travel, inst.window_open, inst.window_close, inst.scale, name)

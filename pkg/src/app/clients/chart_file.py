"""
Chart text file client (CURV4-CHART v1)

    CURV4-CHART v1
    axes <min> <max> <count> <min> <max> <count> <min> <max> <count> <min> <max> <count>
    fields g[10] f[0|1]
    <10 upper-triangle metric components> [<potential>]     one line per node

Nodes are listed in row-major order (last axis fastest). Metric components are
ordered g00 g01 g02 g03 g11 g12 g13 g22 g23 g33.
"""
import logging
import math
from pathlib import Path
from typing import Union

import numpy as np

from app.core.exceptions import ChartFormatError
from app.models.chart import Axis, MetricChart

logger = logging.getLogger(__name__)

HEADER = "CURV4-CHART v1"
UPPER = np.triu_indices(4)
FIELD_COUNT = len(UPPER[0])


def _floats(tokens: list[str], line_no: int) -> list[float]:
    try:
        values = [float(token) for token in tokens]
    except ValueError as exc:
        raise ChartFormatError(f"line {line_no}: {exc}") from exc
    if not all(math.isfinite(v) for v in values):
        raise ChartFormatError(f"line {line_no}: non-finite value")
    return values


def _parse_axes(line: str) -> tuple[Axis, ...]:
    tokens = line.split()
    if not tokens or tokens[0] != "axes" or len(tokens) != 13:
        raise ChartFormatError("line 2: expected 'axes' followed by four 'min max count' triples")
    values = _floats(tokens[1:], 2)
    axes = []
    for k in range(4):
        low, high, count = values[3 * k: 3 * k + 3]
        if count != int(count):
            raise ChartFormatError(f"line 2: node count {count} is not an integer")
        axes.append(Axis(low, high, int(count)))
    return tuple(axes)


def _parse_fields(line: str) -> bool:
    tokens = line.split()
    if len(tokens) != 3 or tokens[0] != "fields" or tokens[1] != f"g[{FIELD_COUNT}]":
        raise ChartFormatError(f"line 3: expected 'fields g[{FIELD_COUNT}] f[0|1]'")
    if tokens[2] not in ("f[0]", "f[1]"):
        raise ChartFormatError("line 3: potential flag must be f[0] or f[1]")
    return tokens[2] == "f[1]"


def parse_chart(text: str) -> MetricChart:
    """Parse chart text into a MetricChart"""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0].strip() != HEADER:
        raise ChartFormatError(f"line 1: missing '{HEADER}' header")
    if len(lines) < 3:
        raise ChartFormatError("truncated chart header")
    axes = _parse_axes(lines[1])
    has_potential = _parse_fields(lines[2])

    shape = tuple(axis.count for axis in axes)
    nodes = int(np.prod(shape))
    rows = lines[3:]
    if len(rows) != nodes:
        raise ChartFormatError(f"expected {nodes} node rows, found {len(rows)}")
    width = FIELD_COUNT + (1 if has_potential else 0)
    data = np.empty((nodes, width), dtype=np.float64)
    for offset, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != width:
            raise ChartFormatError(f"line {offset + 4}: expected {width} values, found {len(tokens)}")
        data[offset] = _floats(tokens, offset + 4)

    metric = np.empty((nodes, 4, 4), dtype=np.float64)
    metric[:, UPPER[0], UPPER[1]] = data[:, :FIELD_COUNT]
    metric[:, UPPER[1], UPPER[0]] = data[:, :FIELD_COUNT]
    potential = data[:, FIELD_COUNT].reshape(shape) if has_potential else None
    logger.debug("parsed chart with shape %s (potential=%s)", shape, has_potential)
    return MetricChart(axes, metric.reshape(shape + (4, 4)), potential)


def format_chart(chart: MetricChart) -> str:
    """Render a chart in the text format (repr floats round-trip exactly)"""
    axes = " ".join(f"{axis.minimum!r} {axis.maximum!r} {axis.count}" for axis in chart.axes)
    lines = [HEADER, f"axes {axes}", f"fields g[{FIELD_COUNT}] f[{1 if chart.has_potential else 0}]"]
    metric = chart.metric.reshape(-1, 4, 4)[:, UPPER[0], UPPER[1]]
    potential = chart.potential.reshape(-1) if chart.has_potential else None
    for node, components in enumerate(metric):
        values = [repr(float(v)) for v in components]
        if potential is not None:
            values.append(repr(float(potential[node])))
        lines.append(" ".join(values))
    return "\n".join(lines) + "\n"


def read_chart(path: Union[str, Path]) -> MetricChart:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ChartFormatError(f"cannot read chart file {path}: {exc}") from exc
    return parse_chart(text)


def write_chart(chart: MetricChart, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_chart(chart), encoding="utf-8")
    return path

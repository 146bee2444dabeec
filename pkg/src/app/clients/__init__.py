"""
External file clients
"""
from app.clients.chart_file import format_chart, parse_chart, read_chart, write_chart

__all__ = [
    "parse_chart",
    "format_chart",
    "read_chart",
    "write_chart",
]

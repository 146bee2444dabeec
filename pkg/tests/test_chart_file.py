import numpy as np
import pytest

from app.clients.chart_file import HEADER, format_chart, parse_chart, read_chart, write_chart
from app.core.exceptions import ChartFormatError
from app.models.chart import MetricChart


@pytest.fixture
def s2xr2_chart(catalog_service):
    return catalog_service.export_chart("cylinder_s2xr2", center=(1.0, 0.5, 0.3, 0.2), spacing=0.1, count=5)


def test_written_chart_reads_back_identically(s2xr2_chart, tmp_path):
    path = write_chart(s2xr2_chart, tmp_path / "s2xr2.chart")
    chart = read_chart(path)

    assert chart.shape == s2xr2_chart.shape
    assert chart.axes == s2xr2_chart.axes
    assert np.array_equal(chart.metric, s2xr2_chart.metric)
    assert np.array_equal(chart.potential, s2xr2_chart.potential)


def test_format_layout(s2xr2_chart):
    lines = format_chart(s2xr2_chart).splitlines()

    assert lines[0] == HEADER
    assert lines[1].startswith("axes ")
    assert lines[2] == "fields g[10] f[1]"
    assert len(lines) == 3 + 5 ** 4
    assert len(lines[3].split()) == 11


def test_chart_without_potential(catalog_service):
    chart = catalog_service.export_chart("round_s4", spacing=0.1, count=5)
    text = format_chart(MetricChart(chart.axes, chart.metric))

    assert "f[0]" in text.splitlines()[2]
    assert parse_chart(text).has_potential is False


def test_truncated_file(s2xr2_chart, tmp_path):
    text = format_chart(s2xr2_chart)
    path = tmp_path / "truncated.chart"
    path.write_text("\n".join(text.splitlines()[:100]))

    with pytest.raises(ChartFormatError, match="node rows"):
        read_chart(path)


def test_missing_header():
    with pytest.raises(ChartFormatError, match="header"):
        parse_chart("axes 0 1 5 0 1 5 0 1 5 0 1 5\nfields g[10] f[0]\n")


def test_bad_value_reports_line_number(s2xr2_chart):
    lines = format_chart(s2xr2_chart).splitlines()
    lines[7] = lines[7].replace(lines[7].split()[0], "nan", 1)

    with pytest.raises(ChartFormatError, match="line 8"):
        parse_chart("\n".join(lines))


def test_wrong_column_count(s2xr2_chart):
    lines = format_chart(s2xr2_chart).splitlines()
    lines[3] = " ".join(lines[3].split()[:-1])

    with pytest.raises(ChartFormatError, match="line 4"):
        parse_chart("\n".join(lines))


def test_missing_file(tmp_path):
    with pytest.raises(ChartFormatError):
        read_chart(tmp_path / "absent.chart")

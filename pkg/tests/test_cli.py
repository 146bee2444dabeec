import json

import pytest

from app.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, build_config, main, _parse_args
from app.clients.chart_file import format_chart, write_chart
from app.core.exceptions import InvalidRunConfig


def _structured(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_verify_reports_exact_inner_product(capsys):
    code = main(["verify", "cylinder_s2xr2", "--precision", "rational", "--points", "10", "--format", "structured"])
    report = _structured(capsys)

    assert code == EXIT_OK
    assert report["schema_version"] == "v1"
    assert report["command"] == "verify"
    assert report["summary"]["kn_weyl_inner_plus"] == "1/24"
    assert report["summary"]["weyl_plus_spectrum"] == ["-1/12", "-1/12", "1/6"]
    assert report["summary"]["scalar"] == "1"
    assert all(check["pass"] for check in report["checks"])
    assert "potential_asymptotics" in [check["id"] for check in report["checks"]]


def test_structured_reports_are_byte_stable(capsys):
    argv = ["verify", "cp2_fubini_study", "--precision", "rational", "--points", "5", "--format", "structured"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)

    assert capsys.readouterr().out == first


def test_catalog_lists_models(capsys):
    code = main(["catalog", "--format", "structured"])
    models = _structured(capsys)["summary"]["models"]

    assert code == EXIT_OK
    assert [model["name"] for model in models] == [
        "gaussian_r4",
        "round_s4",
        "cylinder_s3xr",
        "cylinder_s2xr2",
        "cp2_fubini_study",
    ]


def test_classify_gaussian_passes_with_zero_margin(capsys):
    code = main(["classify", "gaussian_r4", "--precision", "rational", "--format", "structured"])
    report = _structured(capsys)

    assert code == EXIT_OK
    assert all(check["pass"] and check["margin"] == 0.0 for check in report["checks"])


def test_classify_s2xr2_fails_catino(capsys):
    code = main(["classify", "cylinder_s2xr2", "--gamma", "1.5"])
    out = capsys.readouterr().out

    assert code == EXIT_FAILED
    assert "FAIL catino_12" in out
    assert "PASS thm1_plus" in out
    assert out.rstrip().endswith("result: failed")


def test_fuzz_summary(capsys):
    code = main(["fuzz", "--trials", "2000", "--seed", "42", "--format", "structured"])
    report = _structured(capsys)

    assert code == EXIT_OK
    assert report["summary"]["violations"] == 0
    assert report["summary"]["seed"] == 42
    assert report["checks"][0]["id"] == "fuzz_violations"


def test_fuzz_without_seed_is_invalid(capsys):
    code = main(["fuzz", "--trials", "10"])

    assert code == EXIT_INVALID
    assert "invalid_run_config" in capsys.readouterr().err


def test_unknown_model_is_invalid(capsys):
    assert main(["verify", "hyperbolic_h4"]) == EXIT_INVALID
    assert "unknown_model" in capsys.readouterr().err


def test_gamma_only_for_classify():
    with pytest.raises(InvalidRunConfig):
        build_config(_parse_args(["verify", "round_s4", "--gamma", "1.0"]))


def test_unsupported_flag_value():
    with pytest.raises(SystemExit) as exc:
        _parse_args(["classify", "round_s4", "--duality", "left"])
    assert exc.value.code == 2


def test_truncated_chart_is_invalid(catalog_service, tmp_path, capsys):
    chart = catalog_service.export_chart("gaussian_r4", spacing=0.1, count=5)
    path = tmp_path / "truncated.chart"
    path.write_text("\n".join(format_chart(chart).splitlines()[:50]))

    assert main(["chart", str(path)]) == EXIT_INVALID
    assert "chart_format_error" in capsys.readouterr().err


def test_chart_command(catalog_service, tmp_path, capsys):
    chart = catalog_service.export_chart("gaussian_r4", center=(0.5, 0.5, 0.5, 0.5), spacing=0.1, count=7)
    path = write_chart(chart, tmp_path / "gaussian.chart")

    code = main(["chart", str(path), "--format", "structured"])
    report = _structured(capsys)

    assert code == EXIT_OK
    assert report["checks"][0]["id"] == "growth_feasible"
    assert report["summary"]["growth"]["epsilon_hat"] == pytest.approx(0.0, abs=1e-9)
    assert report["summary"]["cotton_norm_max"] == 0.0
    assert report["summary"]["interior_nodes"] == 81


def test_classify_chart_file(catalog_service, tmp_path, capsys):
    chart = catalog_service.export_chart("gaussian_r4", center=(0.5, 0.5, 0.5, 0.5), spacing=0.1, count=5)
    path = write_chart(chart, tmp_path / "gaussian.chart")

    code = main(["classify", str(path), "--duality", "plus", "--format", "structured"])
    ids = [check["id"] for check in _structured(capsys)["checks"]]

    assert code == EXIT_OK
    assert ids == ["thm1_plus", "catino_12", "remark_14"]


def test_out_writes_report_file(tmp_path, capsys):
    out = tmp_path / "catalog.txt"

    assert main(["catalog", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert out.read_text().startswith("curv4 catalog")


def test_unwritable_out_is_invalid(tmp_path, capsys):
    out = tmp_path / "missing" / "catalog.txt"

    assert main(["catalog", "--out", str(out)]) == EXIT_INVALID
    assert "invalid_run_config" in capsys.readouterr().err
    assert not out.exists()

import io

import pytest

from curvlab.errors import ReportStoreError, SchemaMismatch
from curvlab.potential import default_t_grid
from curvlab.report_store import diff, load, make_record, save
from curvlab.verify import run_battery, write_report_text


def _report_text(sol, grid_points=32):
    report = run_battery(sol, default_t_grid(sol, grid_points))
    buf = io.StringIO()
    write_report_text(report, buf)
    return buf.getvalue()


@pytest.fixture(scope="module")
def schw_record(schw1_sol):
    return make_record("model=schwarzschild\nmass=1.0", _report_text(schw1_sol), "0.1.0", "2026-01-01T00:00:00")


def test_round_trip(tmp_path, schw_record):
    path = save(schw_record, tmp_path)
    loaded = load(path)
    assert loaded.run_id == schw_record.run_id
    assert loaded.config_echo == schw_record.config_echo
    assert loaded.reports == schw_record.reports
    assert loaded.version == schw_record.version


def test_identical_save_is_noop(tmp_path, schw_record):
    path1 = save(schw_record, tmp_path)
    stamp = path1.stat().st_mtime_ns
    path2 = save(schw_record, tmp_path)
    assert path1 == path2
    assert path2.stat().st_mtime_ns == stamp


def test_distinct_configs_get_distinct_ids(schw1_sol):
    text = _report_text(schw1_sol)
    a = make_record("model=schwarzschild\ngrid=32", text, "0.1.0", "t0")
    b = make_record("model=schwarzschild\ngrid=64", text, "0.1.0", "t0")
    assert a.run_id != b.run_id


def test_run_id_deterministic(schw1_sol):
    text = _report_text(schw1_sol)
    a = make_record("cfg", text, "0.1.0", "2026-01-01")
    b = make_record("cfg", text, "0.1.0", "2026-06-30")  # created_at not hashed
    assert a.run_id == b.run_id


def test_corrupted_file_surfaces_error(tmp_path, schw_record):
    path = save(schw_record, tmp_path)
    text = path.read_text().replace("model=schwarzschild", "model=tampered")
    path.write_text(text)
    with pytest.raises(ReportStoreError):
        load(path)
    with pytest.raises(ReportStoreError):
        save(schw_record, tmp_path)  # never silently overwrites


def test_diff_of_identical_records_is_empty(schw_record):
    assert diff(schw_record, schw_record) == ""


def test_diff_flags_margin_and_status_changes(schw1_sol, perturbed_sol):
    a = make_record("cfg-a", _report_text(schw1_sol), "0.1.0", "t")
    b = make_record("cfg-b", _report_text(perturbed_sol), "0.1.0", "t")
    out = diff(a, b)
    assert "a1_upper_bound" in out
    assert "EqualityDetected -> Pass" in out


def test_diff_schema_mismatch(schw1_sol, euclid_sol):
    a = make_record("cfg-a", _report_text(schw1_sol), "0.1.0", "t")
    b = make_record("cfg-b", _report_text(euclid_sol), "0.1.0", "t")
    with pytest.raises(SchemaMismatch):
        diff(a, b)

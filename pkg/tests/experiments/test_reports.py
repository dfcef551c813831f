from src.experiments.reports import write_csv, write_report
from src.utils.io import read_json


def test_csv_format(tmp_path):
    path = write_csv([{"method": "dgi", "mse": 0.123456789}], tmp_path / "r.csv", "abc123", ["method", "mse"])
    assert path.read_text() == "method,mse,config_hash\ndgi,0.123457,abc123\n"


def test_report_carries_hash(tmp_path):
    path = write_report(tmp_path / "sub" / "r.json", {"passed": True}, "abc123")
    assert read_json(path) == {"passed": True, "config_hash": "abc123"}

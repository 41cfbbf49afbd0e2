import json
import warnings
from pathlib import Path

import loguru
import pytest

from lgwave import log, waveode
from lgwave.errors import TruncationWarning


def test_run_logs_into_output_dir(tmp_path: Path):
    log.setup_logger(tmp_path, bind={"key": "wave_test"})
    log.logger.info("hello", c=1.5)
    warnings.warn("profile not settled", TruncationWarning)
    log.setup_logger()

    text = (tmp_path / "output.log").read_text()
    assert "hello" in text
    assert "TruncationWarning: profile not settled" in text

    records = [
        json.loads(line)["record"]
        for line in (tmp_path / "output.jsonl").read_text().splitlines()
    ]
    hello = next(r for r in records if r["message"] == "hello")
    assert hello["extra"] == {"key": "wave_test", "c": 1.5}


def test_bind_reaches_module_loggers(tmp_path: Path):
    log.setup_logger(tmp_path, bind={"key": "wave_test"})
    waveode.logger.info("from waveode")
    assert waveode.logger is log.logger is loguru.logger
    log.setup_logger()
    log.logger.info("after reset")

    records = [
        json.loads(line)["record"]
        for line in (tmp_path / "output.jsonl").read_text().splitlines()
    ]
    record = next(r for r in records if r["message"] == "from waveode")
    assert record["extra"] == {"key": "wave_test"}
    assert not any(r["message"] == "after reset" for r in records)


def test_unknown_level():
    with pytest.raises(ValueError, match="LOUD"):
        log.setup_logger(stderr_level="LOUD")

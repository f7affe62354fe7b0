"""
Checks that the logging helpers work: child loggers, the performance
decorator, environment-driven verbosity and the log-file directory.
"""

import logging

import pytest

from contact_pi1.utils import logger as logger_module
from contact_pi1.utils.logger import (
    configure_logger,
    console_level,
    get_logger,
    log_crossval_metrics,
    log_performance,
    log_validation_diagnostics,
)


@log_performance
def _square(x):
    return x * x


@log_performance
def _explode():
    raise ValueError("boom")


def test_child_logger_name():
    assert get_logger("cone").name == "ContactPi1.cone"
    assert get_logger() is logger_module.logger


def test_performance_decorator_logs_completion(caplog):
    with caplog.at_level(logging.DEBUG, logger="ContactPi1"):
        assert _square(7) == 49
    assert any("_square completed" in record.getMessage() for record in caplog.records)


def test_performance_decorator_reraises(caplog):
    with caplog.at_level(logging.DEBUG, logger="ContactPi1"):
        with pytest.raises(ValueError):
            _explode()
    assert any("_explode failed" in record.getMessage() for record in caplog.records)


@pytest.mark.parametrize("value, level", [
    ("debug", logging.DEBUG),
    ("ERROR", logging.ERROR),
    ("nonsense", logging.WARNING),
])
def test_console_level_from_environment(monkeypatch, value, level):
    monkeypatch.setenv("CONTACT_PI1_LOG", value)
    assert console_level() == level


def test_log_directory(tmp_path):
    configured = configure_logger("ContactPi1LogDirTest", logs_dir=str(tmp_path))
    configured.info("written to file")
    for handler in configured.handlers:
        handler.flush()
    files = list(tmp_path.glob("contact_pi1_*.log"))
    assert len(files) == 1
    assert "written to file" in files[0].read_text()


def test_crossval_metrics_report_disagreements(caplog):
    with caplog.at_level(logging.INFO, logger="ContactPi1"):
        log_crossval_metrics(total=10, agreed=8, disagreed=1, skipped=1, execution_time=0.5)
    errors = [record for record in caplog.records if record.levelno == logging.ERROR]
    assert len(errors) == 1
    assert "1 trials disagree" in errors[0].getMessage()


def test_validation_diagnostics_are_capped(caplog):
    with caplog.at_level(logging.INFO, logger="ContactPi1"):
        log_validation_diagnostics("goodness", [f"face {i}" for i in range(8)])
    details = [record for record in caplog.records if "goodness failure" in record.getMessage()]
    assert len(details) == 5

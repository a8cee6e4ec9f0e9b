import json
import logging

import pytest

from app.core.logging_config import ContextLogger, LoggingConfig


@pytest.fixture
def restore_root_logging():
    root = logging.getLogger()
    saved_handlers, saved_level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        handler.close()
    root.handlers[:] = saved_handlers
    root.setLevel(saved_level)


def test_file_records_carry_run_context(tmp_path, restore_root_logging):
    LoggingConfig(
        log_level="INFO",
        log_dir=str(tmp_path),
        enable_file_logging=True,
        enable_console_logging=False,
    ).setup()
    log = ContextLogger("obrauer.test").bind(command="hom-dim", params_id="l=1;p=0")
    log.info("Command completed", extra={"passed": True})
    log.error("Command failed", extra={"error": "bad word"})
    for handler in logging.getLogger().handlers:
        handler.flush()

    records = [json.loads(line) for line in (tmp_path / "obrauer.log").read_text().splitlines()]
    assert [r["message"] for r in records] == ["Command completed", "Command failed"]
    assert records[0]["service"] == "obrauer"
    assert records[0]["command"] == "hom-dim" and records[0]["passed"] is True
    assert records[1]["level"] == "ERROR" and records[1]["error"] == "bad word"

    errors = (tmp_path / "obrauer-error.log").read_text().splitlines()
    assert len(errors) == 1


def test_console_only_setup_has_no_file_handlers(tmp_path, restore_root_logging):
    root = LoggingConfig(log_format="text", log_dir=str(tmp_path / "unused")).setup()
    assert len(root.handlers) == 1
    assert not (tmp_path / "unused").exists()

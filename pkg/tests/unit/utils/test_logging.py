import io
import logging

from mesh_transformer.utils.logging import (
    log_config_param,
    resolve_log_level,
    setup_logging,
)


def test_setup_logging_default_level():
    """Test setup_logging with default WARNING level"""
    logger = setup_logging()

    assert logger.level == logging.WARNING

    root_logger = logging.getLogger()
    assert root_logger.level == logging.WARNING
    assert len(root_logger.handlers) == 1
    handler = root_logger.handlers[0]
    assert handler.formatter._fmt == "%(levelname)s - %(name)s - %(message)s"


def test_setup_logging_custom_level():
    """Test setup_logging with custom DEBUG level"""
    logger = setup_logging(logging.DEBUG)

    assert logger.level == logging.DEBUG
    assert logging.getLogger().level == logging.DEBUG


def test_setup_logging_removes_existing_handlers():
    """Test that setup_logging removes existing handlers"""
    root_logger = logging.getLogger()
    test_handler = logging.StreamHandler()
    root_logger.addHandler(test_handler)

    setup_logging()

    assert len(root_logger.handlers) == 1
    assert test_handler not in root_logger.handlers


def test_setup_logging_logger_name():
    """Test that setup_logging creates logger with correct name"""
    logger = setup_logging()
    assert logger.name == "mesh-transformer"


def test_setup_logging_logging_stream():
    """Test that setup_logging uses the correct stream"""
    stream = io.StringIO()
    logger = setup_logging(logging.DEBUG, stream)
    logger.debug("test")
    assert stream.getvalue() == f"DEBUG - {logger.name} - test\n"


def test_child_loggers_share_handler():
    """Area loggers such as mesh-transformer.train write through the root handler"""
    stream = io.StringIO()
    setup_logging(logging.INFO, stream)

    logging.getLogger("mesh-transformer.train").info("step 1/10")

    assert stream.getvalue() == "INFO - mesh-transformer.train - step 1/10\n"


def test_resolve_log_level():
    """-v wins over the environment, -vv selects DEBUG"""
    assert resolve_log_level(0, False, False) == logging.WARNING
    assert resolve_log_level(1, False, False) == logging.INFO
    assert resolve_log_level(2, False, False) == logging.DEBUG
    assert resolve_log_level(0, True, False) == logging.DEBUG
    assert resolve_log_level(0, False, True) == logging.INFO
    assert resolve_log_level(1, True, False) == logging.INFO


def test_log_config_param(caplog):
    logger = logging.getLogger("mesh-transformer.test")

    with caplog.at_level(logging.INFO, logger="mesh-transformer.test"):
        log_config_param(logger, "model", "d", 64)
        log_config_param(logger, "data", "test", None)

    assert "model d: 64" in caplog.text
    assert "data test: Not Provided" in caplog.text

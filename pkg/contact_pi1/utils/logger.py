import os
import logging
import logging.handlers
from datetime import datetime
from typing import Optional

from dotenv import load_dotenv, find_dotenv

load_dotenv(find_dotenv())

_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
}


def console_level() -> int:
    """Console verbosity from CONTACT_PI1_LOG (defaults to WARNING)."""
    raw = os.getenv("CONTACT_PI1_LOG", "WARNING").strip().upper()
    return _LEVELS.get(raw, logging.WARNING)


def configure_logger(name: str = "ContactPi1",
                     logs_dir: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger.

    Console output goes to stderr so that reports printed on stdout stay
    byte-identical between runs. A rotating file handler is attached when a
    log directory is given or CONTACT_PI1_LOG_DIR is set.

    Args:
        name: Logger name
        logs_dir: Directory for log files (overrides CONTACT_PI1_LOG_DIR)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    # Check if handlers are already added to avoid duplicate handlers
    if not logger.handlers:
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
        )

        console_handler = logging.StreamHandler()
        console_handler.setLevel(console_level())
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        logs_directory_path = logs_dir or os.getenv("CONTACT_PI1_LOG_DIR")
        if logs_directory_path:
            os.makedirs(logs_directory_path, exist_ok=True)
            current_date = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
            log_filename = os.path.join(logs_directory_path, f'contact_pi1_{current_date}.log')

            # Rotate logs if they exceed 10MB
            file_handler = logging.handlers.RotatingFileHandler(
                log_filename, maxBytes=10**7, backupCount=5
            )
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger


# Create default logger instance
logger = configure_logger()


def get_logger(name: str = None) -> logging.Logger:
    """
    Get a logger instance. If name is provided, creates a child logger.

    Args:
        name: Optional name for child logger

    Returns:
        Logger instance
    """
    if name:
        return logger.getChild(name)
    return logger


def log_performance(func):
    """
    Decorator to log function performance metrics.

    Args:
        func: Function to be decorated

    Returns:
        Wrapped function with performance logging
    """
    import functools
    import time

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        perf_logger = get_logger(func.__module__.rsplit('.', 1)[-1])
        start_time = time.perf_counter()

        perf_logger.debug(f"Starting {func.__name__}")

        try:
            result = func(*args, **kwargs)
            execution_time = time.perf_counter() - start_time

            perf_logger.info(f"{func.__name__} completed in {execution_time:.3f}s")

            if isinstance(result, (list, tuple)):
                perf_logger.debug(f"{func.__name__} returned {len(result)} items")

            return result

        except Exception as e:
            execution_time = time.perf_counter() - start_time
            perf_logger.warning(f"{func.__name__} failed after {execution_time:.3f}s: {str(e)}")
            raise

    return wrapper


def log_crossval_metrics(total: int, agreed: int, disagreed: int,
                         skipped: int, execution_time: float):
    """
    Log summary metrics of a cross-validation run.

    Args:
        total: Number of trials requested
        agreed: Trials where every executed method returned the same group
        disagreed: Trials with a cross-check disagreement
        skipped: Trials skipped with a recorded reason
        execution_time: Wall time of the run
    """
    crossval_logger = get_logger("crossval")

    executed = agreed + disagreed
    pass_rate = (agreed / executed * 100) if executed > 0 else 0

    crossval_logger.info(f"Cross-validation completed: {total} trials")
    crossval_logger.info(f"Agree: {agreed}, Disagree: {disagreed}, Skipped: {skipped}")
    crossval_logger.info(f"Execution time: {execution_time:.2f}s")

    if disagreed:
        crossval_logger.error(f"Pass rate {pass_rate:.1f}%: {disagreed} trials disagree")


def log_validation_diagnostics(label: str, failures: list):
    """
    Log the faces (or vertices) that failed a validation check.

    Args:
        label: What was validated (cone goodness, Delzant condition, ...)
        failures: Diagnostics objects or strings
    """
    validation_logger = get_logger("validation")

    if not failures:
        validation_logger.debug(f"{label}: no failures")
        return

    validation_logger.warning(f"{label}: {len(failures)} failures")
    for failure in failures[:5]:  # Log first 5 failures
        validation_logger.info(f"{label} failure: {failure}")

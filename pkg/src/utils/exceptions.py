"""
Custom exception classes for the L4S simulator
"""

from typing import Optional, Dict, Any


class L4sSimException(Exception):
    """Base exception for all simulator errors"""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.error_code = error_code
        self.details = details or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary"""
        return {
            'error': self.__class__.__name__,
            'message': self.message,
            'error_code': self.error_code,
            'details': self.details
        }


# Configuration Exceptions
class ConfigurationException(L4sSimException):
    """Raised when a scenario configuration is invalid"""

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        line: Optional[int] = None,
        source: Optional[str] = None
    ):
        location = ""
        if source and line:
            location = f"{source}:{line}: "
        elif line:
            location = f"line {line}: "
        details: Dict[str, Any] = {}
        if config_key:
            details['config_key'] = config_key
        if line:
            details['line'] = line
        if source:
            details['source'] = source
        super().__init__(
            message=f"{location}Configuration error: {message}",
            error_code="CONFIGURATION_ERROR",
            details=details
        )
        self.config_key = config_key
        self.line = line


class ScenarioNotFoundException(ConfigurationException):
    """Raised when --scenario names neither a preset nor a readable file"""

    def __init__(self, scenario: str):
        super().__init__(
            message=f"'{scenario}' is not a preset and no such file exists",
            config_key='scenario'
        )
        self.error_code = "SCENARIO_NOT_FOUND"


class OutputDirectoryExistsException(L4sSimException):
    """Raised when the output directory already holds results"""

    def __init__(self, path: str):
        super().__init__(
            message=f"Output directory exists and is not empty: {path} (use --force)",
            error_code="OUTPUT_DIR_EXISTS",
            details={'path': path}
        )


# Simulation Exceptions
class SimulationException(L4sSimException):
    """Raised when a replication fails at runtime"""

    def __init__(self, message: str, run_number: Optional[int] = None):
        super().__init__(
            message=f"Simulation failed: {message}",
            error_code="SIMULATION_FAILED",
            details={'run_number': run_number} if run_number is not None else {}
        )


class SchedulingException(SimulationException):
    """Raised on a negative delay or a run bound in the past"""

    def __init__(self, message: str):
        super().__init__(message)
        self.error_code = "SCHEDULING_ERROR"


# Statistics Exceptions
class MetricsException(L4sSimException):
    """Raised when a metric cannot be computed"""

    def __init__(self, message: str, metric: Optional[str] = None):
        super().__init__(
            message=f"Metric computation failed: {message}",
            error_code="METRICS_FAILED",
            details={'metric': metric} if metric else {}
        )


class EmptyThroughputException(MetricsException):
    """Raised when Jain's index is requested for all-zero throughputs"""

    def __init__(self):
        super().__init__(
            message="Jain's index is undefined when every throughput is zero",
            metric='jain_index'
        )
        self.error_code = "EMPTY_THROUGHPUT"


class InsufficientRunsException(MetricsException):
    """Raised when a confidence interval is requested over fewer than 2 runs"""

    def __init__(self, run_count: int):
        super().__init__(
            message=f"a confidence interval needs at least 2 runs, got {run_count}",
            metric='ci95'
        )
        self.error_code = "INSUFFICIENT_RUNS"
        self.details['run_count'] = run_count

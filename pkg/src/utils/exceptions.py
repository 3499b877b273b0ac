# Custom exceptions for the SpatialUD system

class SpatialUDError(Exception):
    """Base exception class for all SpatialUD errors.

    Every subclass carries the process exit code the CLI returns for it.
    """
    exit_code = 1

class ConfigError(SpatialUDError):
    """Exception raised for errors in the configuration."""
    exit_code = 2

class ValidationError(SpatialUDError):
    """Exception raised when an input violates an operation's precondition."""
    exit_code = 3

class FileAccessError(SpatialUDError):
    """Exception raised when a file cannot be read or written."""
    exit_code = 4

class FormatError(SpatialUDError):
    """Exception raised for malformed or unsupported file contents."""
    exit_code = 5

class DimensionError(SpatialUDError):
    """Exception raised for shape or width mismatches between inputs."""
    exit_code = 6

class ModelError(SpatialUDError):
    """Exception raised for inconsistent or non-finite classifier parameters."""
    exit_code = 7

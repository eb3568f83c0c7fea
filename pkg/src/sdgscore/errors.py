"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class SdgScoreError(Exception):
    """Base class. `error_class` is the machine-parseable tag printed by the CLI."""

    error_class = "ERROR"
    exit_code = 1


class ConfigError(SdgScoreError):
    error_class = "CONFIG_VALUE"
    exit_code = 2


class ConfigPathError(ConfigError):
    error_class = "CONFIG_PATH"


class ConfigSchemaError(ConfigError):
    error_class = "CONFIG_SCHEMA"


class DataError(SdgScoreError):
    error_class = "DATA_FORMAT"
    exit_code = 3


class DataRangeError(DataError):
    error_class = "DATA_RANGE"


class DataMissingError(DataError):
    error_class = "DATA_MISSING"


class NumericError(SdgScoreError):
    error_class = "NUMERIC_FAILURE"
    exit_code = 4


class ProviderUnavailable(SdgScoreError):
    """A live provider backend cannot be reached right now; retrying may help."""

    error_class = "PROVIDER_UNAVAILABLE"
    exit_code = 3


class QuotaExceeded(SdgScoreError):
    """A live provider refused further requests; terminal for the run."""

    error_class = "PROVIDER_QUOTA"
    exit_code = 3

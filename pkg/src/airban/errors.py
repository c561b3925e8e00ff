"""Exception types mapped to CLI exit codes (1 input, 2 validation)."""


class InputError(Exception):
    """An input file is missing, unreadable or malformed."""


class CorpusFormatError(InputError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}" if line else f"{path}: {message}")


class ConfigError(ValueError):
    """A configuration value is missing or invalid."""

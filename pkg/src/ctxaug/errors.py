"""Exception types shared across the package."""


class CtxaugError(Exception):
    """Base class for all errors raised by this package."""


class DatasetValidationError(CtxaugError):
    """A dataset file or in-memory dataset violates the schema contract.

    ``problems`` holds one human-readable message per violation, each
    naming the offending image/annotation/category id.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))


class ScenarioParseError(CtxaugError):
    """A scenario string does not conform to the scenario grammar."""


class RegionResolutionError(CtxaugError):
    """A scenario region cannot be built from an image's annotations."""


class PredictionError(CtxaugError):
    """Prediction records do not line up one-to-one with dataset images."""


class CliConfigError(CtxaugError):
    """Bad command-line flags or config file content."""

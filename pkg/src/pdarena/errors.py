"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid roster, rules, agent, or experiment configuration."""


class IllegalActionError(ValueError):
    """An action was submitted that is not legal in the current state."""


class DegenerateInputError(ValueError):
    """Statistical input carries no usable signal (all-zero diffs, zero variance)."""

"""Exception types raised across the toolkit."""


class ConfigurationError(ValueError):
    """A size or option lies outside what the toolkit supports."""


class StructuralError(ValueError):
    """A circuit, observable or bitstring does not fit the register."""


class BindingError(ValueError):
    """A circuit slot could not be resolved to a concrete angle."""


class UnsupportedGeneratorError(ValueError):
    """A gradient was requested for a slot that is not a Pauli rotation."""

"""Static figure rendering for twotone CSV outputs."""

__version__ = "0.1.0"

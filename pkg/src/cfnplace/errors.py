"""Exception types shared across the package."""


class CfnError(Exception):
    """Base class for all cfnplace errors."""


class ConfigurationError(CfnError):
    """Invalid builder/generator/scenario configuration."""


class CapacityExceededError(CfnError):
    """A node's processing, server, LAN or network capacity is exceeded."""

    def __init__(self, node_id, message=None):
        self.node_id = node_id
        super().__init__(message or f"capacity exceeded at node {node_id!r}")


class NoPathError(CfnError):
    """No physical path exists between the requested endpoints."""


class InfeasibleError(CfnError):
    """No feasible placement exists for the given instance."""


class InputError(CfnError):
    """Malformed or incomplete caller-supplied data."""

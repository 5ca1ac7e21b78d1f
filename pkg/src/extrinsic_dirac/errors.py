"""Exception types raised across the package."""


class ExtrinsicDiracError(Exception):
    """Base class for all package errors."""


class CapacityError(ExtrinsicDiracError):
    """A requested size exceeds a configured cap."""


class GeometryError(ExtrinsicDiracError):
    """Invalid or degenerate geometric input."""


class DegeneratePointError(GeometryError):
    def __init__(self, u, detail="singular first fundamental form"):
        self.u = u
        super().__init__(f"{detail} at u={u!r}")


class IncompleteWindowError(ExtrinsicDiracError):
    """A spectrum cannot be certified complete up to the requested window."""


class NotHermitianError(ExtrinsicDiracError):
    pass


class ConfigError(ExtrinsicDiracError):
    pass

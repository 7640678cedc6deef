"""Exception types shared across the package.

The CLI maps these onto exit codes: config problems exit 2, numeric/domain
problems exit 3, file problems exit 4.
"""


class StrataError(Exception):
    """Base class for all package errors."""

    exit_code = 3

    def __reduce__(self):
        # subclasses with custom __init__ record their arguments in _args
        args = getattr(self, "_args", self.args)
        return (type(self), tuple(args), {"exit_code": self.exit_code})

    def __setstate__(self, state):
        self.exit_code = state["exit_code"]

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class MaterialRangeError(StrataError, ValueError):
    """Wavelength outside a material's validity band."""

    def __init__(self, name, wavelength_nm, band):
        self._args = (name, wavelength_nm, band)
        self.name = name
        self.wavelength_nm = wavelength_nm
        self.band = band
        super().__init__(
            f"material {name!r} is valid for {band[0]:g}-{band[1]:g} nm, "
            f"got {wavelength_nm:g} nm"
        )


class TableParseError(StrataError, ValueError):
    exit_code = 2

    def __init__(self, path, row, reason):
        self._args = (path, row, reason)
        self.path = str(path)
        self.row = row
        super().__init__(f"{path}: row {row}: {reason}")


class DomainError(StrataError, ValueError):
    """Inputs outside the domain of an operation (dipole outside its host, bad NA...)."""


class AccuracyError(StrataError, ArithmeticError):
    """Quadrature could not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        self._args = (message, estimate)
        self.estimate = estimate
        super().__init__(message)


class ConfigError(StrataError, ValueError):
    exit_code = 2

    def __init__(self, path, message):
        self._args = (path, message)
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)

    def to_dict(self):
        d = super().to_dict()
        d["path"] = self.path
        return d

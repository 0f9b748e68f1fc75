"""Exception types shared across the package."""


class CwdlabError(Exception):
    """Base class for all package errors."""


# metric_core
class EmptySpace(CwdlabError):
    pass


class ScaleError(CwdlabError, ValueError):
    pass


class Degenerate(CwdlabError):
    pass


class MetricMismatch(CwdlabError):
    pass


class MetricInvariantError(CwdlabError, ValueError):
    pass


# filling
class ParamError(CwdlabError, ValueError):
    pass


class NoCrossingPaths(CwdlabError):
    pass


class DepthError(CwdlabError):
    pass


class Disconnected(CwdlabError):
    pass


class MassError(CwdlabError, ValueError):
    pass


class SolveError(CwdlabError, RuntimeError):
    pass


class SigmaRangeError(CwdlabError, ValueError):
    pass


class S1Violated(CwdlabError):
    def __init__(self, min_cost, vertex=None):
        self.min_cost = min_cost
        self.vertex = vertex
        super().__init__(f"S1 fails: minimal crossing sum {min_cost:.6g} < 1 (vertex {vertex})")


class S2Violated(CwdlabError):
    def __init__(self, eta0, ratio, vertex=None):
        self.eta0 = eta0
        self.ratio = ratio
        self.vertex = vertex
        super().__init__(
            f"S2 fails at vertex {vertex}: child sum ratio {ratio:.6g} > eta0 = {eta0:.6g}"
        )


class NoNonPeripheralChild(CwdlabError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} has no non-peripheral child")


class SubadditivityViolated(CwdlabError):
    def __init__(self, vertex, ratio):
        self.vertex = vertex
        self.ratio = ratio
        super().__init__(
            f"enhanced subadditivity fails at vertex {vertex}: "
            f"C(B) / sum over non-peripheral children = {ratio:.6g} >= 1"
        )


class CompatibilityDrift(CwdlabError):
    pass


# pcf
class SingularInterior(CwdlabError):
    pass


class ZeroMass(CwdlabError):
    pass


class DimensionError(CwdlabError, ValueError):
    pass


# harnack
class Overlap(CwdlabError, ValueError):
    pass


class EmptyInterior(CwdlabError):
    pass


# cli / io
class ConfigError(CwdlabError, ValueError):
    pass


class IoError(CwdlabError, OSError):
    pass


class ParseError(CwdlabError, ValueError):
    def __init__(self, path, row, column, message):
        self.path, self.row, self.column = path, row, column
        super().__init__(f"{path}: row {row}, column {column}: {message}")


class InvariantError(CwdlabError, ValueError):
    def __init__(self, path, row, column, message):
        self.path, self.row, self.column = path, row, column
        super().__init__(f"{path}: row {row}, column {column}: {message}")

"""Exception hierarchy shared by every module of the package."""


class NetPotentialError(Exception):
    """Base class for all errors raised by netpotential."""


class GraphError(NetPotentialError, ValueError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class DuplicateVertex(GraphError):
    pass


class Disconnected(GraphError):
    pass


class UnknownVertexInEdge(GraphError):
    pass


class InfinityNotAVertex(GraphError):
    pass


class DomainError(NetPotentialError, ValueError):
    pass


class DomainContainsInfinity(DomainError):
    pass


class EmptyDomain(DomainError):
    pass


class UnknownVertex(DomainError, KeyError):
    pass


class VertexNotInDomain(DomainError):
    pass


class FieldError(NetPotentialError, ValueError):
    pass


class MissingVertexValue(FieldError, KeyError):
    pass


class MissingEdgeValue(FieldError, KeyError):
    pass


class MissingClosureValue(FieldError, KeyError):
    pass


class SolverError(NetPotentialError):
    pass


class SingularSystem(SolverError):
    pass


class InconsistentData(SolverError, ValueError):
    pass


class EmptyBoundary(SolverError, ValueError):
    pass


class NotConverged(SolverError):
    """Iteration budget exhausted.

    ``residual`` carries the last convergence measure (pointwise change for
    Perron, remaining interior mass for balayage).
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class NotSubharmonic(NetPotentialError, ValueError):
    pass


class PoleAtInfinity(NetPotentialError, ValueError):
    pass


class MassAtInfinity(NetPotentialError, ValueError):
    pass


class SameVertex(NetPotentialError, ValueError):
    pass


class SupportOutsideDomain(NetPotentialError, ValueError):
    pass


class NegativeMass(NetPotentialError, ValueError):
    pass

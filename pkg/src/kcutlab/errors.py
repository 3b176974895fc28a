"""Exception hierarchy shared across kcutlab modules."""


class KcutError(Exception):
    """Base class for all kcutlab errors."""


# graph
class MalformedLine(KcutError, ValueError):
    pass


class DuplicateEdge(KcutError, ValueError):
    pass


class VertexOutOfRange(KcutError, ValueError):
    pass


class BadParams(KcutError, ValueError):
    pass


# model-ir
class HasPsdBlock(KcutError, ValueError):
    pass


class HasQuadraticObjective(KcutError, ValueError):
    pass


class NoPsdBlock(KcutError, ValueError):
    pass


# formulations
class BadK(KcutError, ValueError):
    pass


class LengthMismatch(KcutError, ValueError):
    pass


class TooLargeUpfront(KcutError, ValueError):
    pass


# chordal
class NotChordal(KcutError):
    def __init__(self, witness):
        self.witness = list(witness)
        super().__init__(f"graph is not chordal; chordless cycle {self.witness}")


class InvalidPeo(KcutError, ValueError):
    pass


# linalg
class NoConvergence(KcutError, ArithmeticError):
    pass


# lp
class IterationLimit(KcutError):
    pass


class Infeasible(KcutError):
    pass


# exact
class TooLarge(KcutError, ValueError):
    pass


# relaxations / polytopes
class NotOnSimplex(KcutError, ValueError):
    pass


class BadDims(KcutError, ValueError):
    pass


class GridTooLarge(KcutError, ValueError):
    pass

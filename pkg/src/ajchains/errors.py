"""Exception types shared across the package.

Every error raised by the library's public operations is a subclass of
ChainCalcError, so callers can catch one base type. Names describe the
violated precondition or the failed verification.
"""


class ChainCalcError(Exception):
    """Base class for all library errors."""


class NotAComplex(ChainCalcError):
    """Input data does not describe a simplicial complex."""


class NonClosedTag(ChainCalcError):
    """A tagged vertex/simplex set is not a subcomplex."""


class BadIntersection(ChainCalcError):
    """Simplexes with coordinates overlap outside a common face."""


class NotSubcomplex(ChainCalcError):
    """Expected a subcomplex of the ambient complex."""


class DegreeMismatch(ChainCalcError):
    """Chain/cochain degrees are incompatible with the operation."""


class NotFull(ChainCalcError):
    """A subcomplex expected to be full is not."""


class NotGoodTriangulation(ChainCalcError):
    """A face configuration violates the good-triangulation conditions."""


class NotOrientable(ChainCalcError):
    """Orientation propagation hit an inconsistency."""


class NotPseudomanifold(ChainCalcError):
    """Top-dimensional cells are not glued like a pseudomanifold."""


class NotChainMap(ChainCalcError):
    """A claimed chain map fails to commute with the boundary."""


class NoSolution(ChainCalcError):
    """An integer or rational linear system has no solution."""


class NotAdmissible(ChainCalcError):
    """A chain (or its boundary) violates the face-incidence bound."""


class AxisMismatch(ChainCalcError):
    """Cube axes of operands disagree."""


class NoLogPole(ChainCalcError):
    """Residue extraction requested along a variable with no log pole."""


class BudgetExceeded(ChainCalcError):
    """A numeric routine ran out of its evaluation budget."""


class NotConverged(ChainCalcError):
    """A numeric routine failed to converge within tolerance."""


class LadderBroken(ChainCalcError):
    """Ladder chains fail their boundary compatibility checks."""


class BadParameter(ChainCalcError):
    """A parameter is outside its allowed range."""


class BadIndex(ChainCalcError):
    """An index (face, axis, position) is out of range or malformed."""


class OutOfRadius(ChainCalcError):
    """Series evaluation requested outside its radius of convergence."""

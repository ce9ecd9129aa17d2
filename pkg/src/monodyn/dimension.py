"""Direct-limit arithmetic over a fixed nonnegative square matrix, and
windowed presentations of the stage-graded vertex monoid.

An element of the limit group is a pair (vec, stage) with (vec, stage)
identified with (vec . A, stage + 1).  Equality and positivity are decided
against explicit power bounds and answer with a third "inconclusive" state
when a bound runs out, because exact decisions in general need spectral
machinery that is out of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, ShapeError
from .graph import Graph
from .matrix import IntMatrix, det, vec_mat_mul
from .monoid import MonoidPresentation, Vector
from .smith import solve_integer_column

DEFAULT_MAX_POWER = 64

POSITIVE = "positive"
NOT_POSITIVE = "not_positive"
INCONCLUSIVE = "inconclusive"
YES = "yes"
NO = "no"

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class DimElement:
    matrix: IntMatrix
    vec: tuple[int, ...]
    stage: int = 0

    def __post_init__(self):
        if not self.matrix.is_square:
            raise ShapeError("stage matrix must be square")
        if not self.matrix.is_nonnegative:
            raise ShapeError("stage matrix must be nonnegative")
        if len(self.vec) != self.matrix.rows:
            raise ShapeError(
                f"vector length {len(self.vec)} does not match matrix size {self.matrix.rows}"
            )


def _require_same_matrix(x: DimElement, y: DimElement):
    if x.matrix != y.matrix:
        raise ShapeError("elements live over different matrices")


def dim_equal(x: DimElement, y: DimElement, max_power: int = DEFAULT_MAX_POWER) -> str:
    """Push both elements to a common stage and compare.

    When det(A) is nonzero, multiplication by A is injective, so equality is
    settled at the first common stage.  Otherwise equal elements must agree
    after some extra push; the bound caps how far to look.
    """
    _require_same_matrix(x, y)
    a = x.matrix
    m0 = max(x.stage, y.stage)
    vx = x.vec
    for _ in range(m0 - x.stage):
        vx = vec_mat_mul(vx, a)
    vy = y.vec
    for _ in range(m0 - y.stage):
        vy = vec_mat_mul(vy, a)
    if vx == vy:
        return YES
    if det(a) != 0:
        return NO
    for _ in range(max_power):
        vx = vec_mat_mul(vx, a)
        vy = vec_mat_mul(vy, a)
        if vx == vy:
            return YES
    return INCONCLUSIVE


def dim_positive(x: DimElement, max_power: int = DEFAULT_MAX_POWER) -> str:
    """Positive iff some power pushes the vector into the nonnegative orthant.

    A strictly negative vector stays strictly negative under any nonnegative
    matrix without zero columns, which certifies the negative answer.
    """
    a = x.matrix
    no_zero_column = all(
        any(a.at(i, j) != 0 for i in range(a.rows)) for j in range(a.cols)
    )
    v = x.vec
    for _ in range(max_power + 1):
        if all(c >= 0 for c in v):
            return POSITIVE
        if no_zero_column and all(c < 0 for c in v):
            return NOT_POSITIVE
        v = vec_mat_mul(v, a)
    return INCONCLUSIVE


def dim_add(x: DimElement, y: DimElement) -> DimElement:
    """Sum after moving both to a common stage."""
    _require_same_matrix(x, y)
    a = x.matrix
    m0 = max(x.stage, y.stage)
    vx = x.vec
    for _ in range(m0 - x.stage):
        vx = vec_mat_mul(vx, a)
    vy = y.vec
    for _ in range(m0 - y.stage):
        vy = vec_mat_mul(vy, a)
    return DimElement(a, tuple(p + q for p, q in zip(vx, vy)), m0)


def delta_shift(x: DimElement, direction: str = FORWARD) -> DimElement:
    """The automorphism induced by the matrix: forward multiplies the vector,
    backward bumps the stage, and the two compose to the identity in the
    limit."""
    if direction == FORWARD:
        return DimElement(x.matrix, vec_mat_mul(x.vec, x.matrix), x.stage)
    if direction == BACKWARD:
        return DimElement(x.matrix, x.vec, x.stage + 1)
    raise ParseError(f"direction must be 'forward' or 'backward', got {direction!r}")


def normalize(x: DimElement) -> DimElement:
    """Smallest-stage representative reachable by exact pullbacks, floored at
    stage 0 (the base of the direct system).  Negative stages push forward."""
    a = x.matrix
    vec = x.vec
    stage = x.stage
    while stage < 0:
        vec = vec_mat_mul(vec, a)
        stage += 1
    at = a.transpose()
    while stage > 0:
        pre = solve_integer_column(at, vec)
        if pre is None:
            break
        vec = pre
        stage -= 1
    return DimElement(a, vec, stage)


def fib_cone_member(m: int, n: int) -> bool:
    """Exact integer test for (1+sqrt(5))/2 * m + n >= 0.

    With t = m + 2n the inequality reads m*sqrt(5) >= -t, which squares to
    the integer comparisons below without ever leaving the integers.
    """
    t = m + 2 * n
    if m >= 0 and t >= 0:
        return True
    if m >= 0 and 5 * m * m >= t * t:
        return True
    if m < 0 and t >= 0 and t * t >= 5 * m * m:
        return True
    return False


@dataclass(frozen=True)
class TalentedWindow:
    """Stage-graded presentation of a graph's vertex monoid, truncated to the
    stages -radius..radius.

    Generators are named ``v(i)``; for every non-sink vertex v and every
    stage i with i+1 still inside the window there is one relation
    ``v(i) = sum of targets at stage i+1``.  The stage shift moves every
    generator one stage up and is defined on elements whose support stays
    inside the window.
    """

    graph: Graph
    radius: int
    presentation: MonoidPresentation

    def stage_count(self) -> int:
        return 2 * self.radius + 1

    def generator_index(self, vertex: str, stage: int) -> int:
        if abs(stage) > self.radius:
            raise ShapeError(f"stage {stage} outside window radius {self.radius}")
        return self.graph.index[vertex] * self.stage_count() + (stage + self.radius)

    def shift(self, vec: Vector, n: int = 1) -> Vector:
        """Shift every stage by n; raises when support would leave the window."""
        vec = self.presentation.validate_element(vec)
        width = self.stage_count()
        out = [0] * len(vec)
        for idx, coeff in enumerate(vec):
            if coeff == 0:
                continue
            offset = idx % width
            target = offset + n
            if not (0 <= target < width):
                raise ShapeError("shifted element leaves the stage window")
            out[idx - offset + target] = coeff
        return tuple(out)


def talented_window(g: Graph, radius: int) -> TalentedWindow:
    if radius < 0:
        raise ShapeError("window radius must be nonnegative")
    width = 2 * radius + 1
    gens = tuple(
        f"{v}({i})" for v in g.vertices for i in range(-radius, radius + 1)
    )
    pos = {(v, i): g.index[v] * width + (i + radius) for v in g.vertices for i in range(-radius, radius + 1)}
    relations = []
    for v in g.vertices:
        if g.is_sink(v):
            continue
        for i in range(-radius, radius):
            lhs = [0] * len(gens)
            lhs[pos[(v, i)]] = 1
            rhs = [0] * len(gens)
            for dst, mult in g.out_adj[v]:
                rhs[pos[(dst, i + 1)]] += mult
            if tuple(lhs) != tuple(rhs):
                relations.append((tuple(lhs), tuple(rhs)))
    return TalentedWindow(g, radius, MonoidPresentation(gens, tuple(relations)))


def parse_dim_element(matrix: IntMatrix, text: str) -> DimElement:
    """Parse ``[v1 v2 ... vn]@stage``."""
    text = text.strip()
    if "@" not in text or not text.startswith("["):
        raise ParseError(f"element must look like '[1 0]@0', got {text!r}")
    vec_part, stage_part = text.rsplit("@", 1)
    vec_part = vec_part.strip()
    if not vec_part.endswith("]"):
        raise ParseError(f"unterminated vector in {text!r}")
    body = vec_part[1:-1].strip()
    try:
        vec = tuple(int(tok) for tok in body.split()) if body else ()
        stage = int(stage_part)
    except ValueError:
        raise ParseError(f"bad element syntax {text!r}") from None
    return DimElement(matrix, vec, stage)


def format_dim_element(x: DimElement) -> str:
    return "[" + " ".join(str(c) for c in x.vec) + f"]@{x.stage}"

"""Finitely presented commutative monoids.

Elements of the free commutative monoid on n generators are length-n vectors
of nonnegative integers.  A presentation is a list of relation pairs
(lhs, rhs); the congruence it generates connects two vectors when one can be
turned into the other by repeatedly replacing an embedded lhs by the matching
rhs or vice versa, additively in context.

Word equality is decided by bounded bidirectional search and is deliberately
tri-state: "no" is only ever backed by a certificate, either a fully
enumerated congruence class that misses the other element, or a difference
vector outside the lattice spanned by the relation differences.  A bound
running out yields "unknown", never "no".  Graph monoids can be infinite, so
the honest third state is unavoidable.

Presentation file format::

    gens: a b c
    2a+b = c        # one relation per line, terms <coeff><generator>
    a = 0
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import ParseError, ShapeError
from .graph import Graph, structure_report

Vector = tuple[int, ...]

DEFAULT_DEPTH = 6
DEFAULT_MAX_ELEMENTS = 10_000
DEFAULT_NODE_BUDGET = 200_000

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class MonoidPresentation:
    generators: tuple[str, ...]
    relations: tuple[tuple[Vector, Vector], ...]

    def __post_init__(self):
        n = len(self.generators)
        if len(set(self.generators)) != n:
            raise ParseError("duplicate generator names")
        for lhs, rhs in self.relations:
            if len(lhs) != n or len(rhs) != n:
                raise ShapeError("relation vector length does not match generator count")
            if lhs == rhs:
                raise ParseError("relation equates a vector with itself")
            if any(x < 0 for x in lhs + rhs):
                raise ParseError("relation vectors must be nonnegative")

    def validate_element(self, vec: Sequence[int]) -> Vector:
        if len(vec) != len(self.generators):
            raise ShapeError(
                f"element length {len(vec)} does not match {len(self.generators)} generators"
            )
        if any(x < 0 for x in vec):
            raise ParseError("element coefficients must be nonnegative")
        return tuple(vec)


@dataclass(frozen=True)
class WordEquality:
    verdict: str  # "yes" | "no" | "unknown"
    path: tuple[Vector, ...] | None = None


@dataclass(frozen=True)
class MonoidTable:
    """Finite commutative monoid as an explicit Cayley table.

    ``elements`` are canonical representative vectors over ``generators``;
    ``add[i][j]`` is the index of the sum; ``generator_classes[k]`` is the
    index of the class of the k-th generator.
    """

    generators: tuple[str, ...]
    elements: tuple[Vector, ...]
    add: tuple[tuple[int, ...], ...]
    identity: int
    generator_classes: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    def add_classes(self, i: int, j: int) -> int:
        return self.add[i][j]

    def unit_class(self) -> int:
        """Class of the sum of all generators (the order unit)."""
        acc = self.identity
        for c in self.generator_classes:
            acc = self.add[acc][c]
        return acc

    def check_laws(self) -> None:
        n = self.size
        for i in range(n):
            if self.add[self.identity][i] != i or self.add[i][self.identity] != i:
                raise AssertionError("identity law fails")
        for i in range(n):
            for j in range(n):
                if self.add[i][j] != self.add[j][i]:
                    raise AssertionError("commutativity fails")
        for i in range(n):
            for j in range(n):
                ij = self.add[i][j]
                for k in range(n):
                    if self.add[ij][k] != self.add[i][self.add[j][k]]:
                        raise AssertionError("associativity fails")

    def to_json_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "elements": [list(e) for e in self.elements],
            "addition": [list(r) for r in self.add],
            "identity": self.identity,
            "generator_classes": list(self.generator_classes),
        }


def graph_monoid_presentation(
    g: Graph, *, weighted: bool = False, sink_zero: bool = False
) -> MonoidPresentation:
    """Presentation on the vertices with one relation per non-sink vertex v:
    w(v) copies of v equal the sum of the targets of v's edges.

    Unweighted means w is constantly 1; weighted uses the declared weights or
    the vertex weighting (outdegree) when none were declared.  ``sink_zero``
    deletes the unique sink generator and erases it from right-hand sides,
    which requires the graph to be a sandpile graph.
    """
    if sink_zero:
        rep = structure_report(g)
        if not rep.sandpile:
            raise ParseError("sink elimination requires a unique sink reachable from every vertex")
        gens = g.nonsink_vertices
    else:
        gens = g.vertices
    pos = {v: i for i, v in enumerate(gens)}
    relations = []
    for v in g.vertices:
        if g.is_sink(v):
            continue
        w = g.vertex_weight(v) if weighted else 1
        lhs = [0] * len(gens)
        lhs[pos[v]] = w
        rhs = [0] * len(gens)
        for dst, mult in g.out_adj[v]:
            if dst in pos:
                rhs[pos[dst]] += mult
        if tuple(lhs) != tuple(rhs):
            relations.append((tuple(lhs), tuple(rhs)))
    return MonoidPresentation(tuple(gens), tuple(relations))


def order_unit(p: MonoidPresentation) -> Vector:
    """Sum of all vertex generators."""
    return (1,) * len(p.generators)


def _one_step(w: Vector, relations) -> list[Vector]:
    out = []
    for lhs, rhs in relations:
        if all(a >= b for a, b in zip(w, lhs)):
            out.append(tuple(a - b + c for a, b, c in zip(w, lhs, rhs)))
        if all(a >= b for a, b in zip(w, rhs)):
            out.append(tuple(a - b + c for a, b, c in zip(w, rhs, lhs)))
    return out


@lru_cache(maxsize=256)
def _coset_fingerprint_fn(p: MonoidPresentation):
    """Function mapping a vector to its coset of the lattice spanned by the
    relation differences lhs - rhs.

    With U B V = D the Smith decomposition of the stacked differences
    (transposed), x lies in the lattice exactly when each coordinate of U x
    vanishes modulo the matching diagonal entry, so reducing U x coordinate
    by coordinate is a complete coset invariant."""
    from .matrix import IntMatrix
    from .smith import smith_normal_form

    k = len(p.generators)
    if not p.relations:
        return lambda vec: tuple(vec)
    rows = [tuple(a - b for a, b in zip(lhs, rhs)) for lhs, rhs in p.relations]
    bt = IntMatrix.from_rows(rows).transpose()  # k x r
    u, d, _ = smith_normal_form(bt)
    diag = [d.at(i, i) if i < min(d.rows, d.cols) else 0 for i in range(k)]
    u_rows = [tuple(u.at(i, j) for j in range(k)) for i in range(k)]

    def fingerprint(vec):
        out = []
        for row, di in zip(u_rows, diag):
            coord = sum(r * x for r, x in zip(row, vec))
            out.append(coord % di if di else coord)
        return tuple(out)

    return fingerprint


def congruent_difference_possible(p: MonoidPresentation, x: Vector, y: Vector) -> bool:
    """Necessary condition for x ~ y: every rewrite step changes the vector
    by some +-(lhs - rhs), so congruent vectors lie in the same coset of the
    relation-difference lattice.  A coset mismatch is a sound certificate of
    inequality."""
    if x == y:
        return True
    fp = _coset_fingerprint_fn(p)
    return fp(x) == fp(y)


def words_equal(
    p: MonoidPresentation,
    x: Sequence[int],
    y: Sequence[int],
    depth: int = DEFAULT_DEPTH,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> WordEquality:
    """Bidirectional breadth-first search over one-step rewrites.

    Returns yes (with a replayable rewrite path) when the classes connect
    within the depth bound.  Returns no on either of two certificates: the
    difference x - y lies outside the relation-difference lattice, or one
    side's entire congruence class was enumerated without reaching the
    other element.  Anything else is unknown.
    """
    x = p.validate_element(x)
    y = p.validate_element(y)
    if x == y:
        return WordEquality(YES, (x,))
    if not congruent_difference_possible(p, x, y):
        return WordEquality(NO)
    relations = p.relations
    parents: tuple[dict[Vector, Vector | None], dict[Vector, Vector | None]] = (
        {x: None},
        {y: None},
    )
    frontiers: list[list[Vector]] = [[x], [y]]
    steps = [0, 0]
    exhausted = [False, False]
    nodes = 2

    def build_path(meet: Vector) -> tuple[Vector, ...]:
        # Chain from x to meet, then meet to y; the meet vector exists in
        # both parent maps once the frontiers touch.
        left: list[Vector] = []
        v: Vector | None = meet
        while v is not None:
            left.append(v)
            v = parents[0][v]
        left.reverse()
        right: list[Vector] = []
        v = parents[1][meet]
        while v is not None:
            right.append(v)
            v = parents[1][v]
        return tuple(left + right)

    while True:
        expandable = [
            s for s in (0, 1) if not exhausted[s] and steps[s] < depth and frontiers[s]
        ]
        if not expandable:
            if exhausted[0] or exhausted[1]:
                return WordEquality(NO)
            return WordEquality(UNKNOWN)
        side = min(expandable, key=lambda s: len(frontiers[s]))
        own, other = parents[side], parents[1 - side]
        new_frontier: list[Vector] = []
        for w in frontiers[side]:
            for w2 in _one_step(w, relations):
                if w2 in own:
                    continue
                own[w2] = w
                if w2 in other:
                    return WordEquality(YES, build_path(w2))
                new_frontier.append(w2)
                nodes += 1
                if nodes > node_budget:
                    return WordEquality(UNKNOWN)
        frontiers[side] = new_frontier
        steps[side] += 1
        if not new_frontier:
            exhausted[side] = True


def enumerate_monoid(
    p: MonoidPresentation,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    depth: int = DEFAULT_DEPTH,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> MonoidTable | None:
    """Breadth-first generation from 0 by adding generators, merging
    vectors whose equality the word search certifies.

    Returns a table only when the generated set closes under addition within
    the bounds and every needed equality was decided; returns None (unknown)
    when a bound was hit or some comparison came back undecided.
    """
    k = len(p.generators)
    zero: Vector = (0,) * k
    gens = [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]
    fingerprint = _coset_fingerprint_fn(p)
    # Searches anchor at the first vector discovered in a class (it sits
    # close to the generation frontier); the published element label is the
    # lexicographically least vector seen in the class.
    anchors: list[Vector] = [zero]
    labels: list[Vector] = [zero]
    vec2class: dict[Vector, int] = {zero: 0}
    # Classes grouped by relation-lattice coset: congruent vectors share the
    # coset, so only same-coset anchors ever need a word search.
    coset_buckets: dict[tuple, list[int]] = {fingerprint(zero): [0]}

    def classify(y: Vector) -> int | None:
        """Class index, len(anchors) for a new class, None for undecided."""
        known = vec2class.get(y)
        if known is not None:
            return known
        undecided = False
        for ci in coset_buckets.get(fingerprint(y), ()):
            res = words_equal(p, y, anchors[ci], depth, node_budget=node_budget)
            if res.verdict == YES:
                vec2class[y] = ci
                if y < labels[ci]:
                    labels[ci] = y
                return ci
            if res.verdict == UNKNOWN:
                undecided = True
        if undecided:
            return None
        return len(anchors)

    def register(y: Vector) -> int:
        ci = len(anchors)
        anchors.append(y)
        labels.append(y)
        vec2class[y] = ci
        coset_buckets.setdefault(fingerprint(y), []).append(ci)
        return ci

    # Classes enter `pending` once, in index order, so gen_add rows line up
    # with class indices.  gen_add[c][i] is the certified class of
    # rep(c) + generator i; the full table follows by folding, since class
    # addition is well-defined on the congruence quotient.
    gen_add: list[list[int]] = []
    pending = deque([0])
    while pending:
        ci = pending.popleft()
        base = anchors[ci]
        row = []
        for e in gens:
            y = tuple(a + b for a, b in zip(base, e))
            cls = classify(y)
            if cls is None:
                return None
            if cls == len(anchors):
                if len(anchors) >= max_elements:
                    return None
                pending.append(register(y))
            row.append(cls)
        gen_add.append(row)

    n = len(anchors)

    def fold_add(start: int, vec: Vector) -> int:
        t = start
        for gi, mult in enumerate(vec):
            for _ in range(mult):
                t = gen_add[t][gi]
        return t

    add_rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            add_rows[i][j] = add_rows[j][i] = fold_add(i, labels[j])

    return MonoidTable(
        generators=p.generators,
        elements=tuple(labels),
        add=tuple(tuple(r) for r in add_rows),
        identity=vec2class[zero],
        generator_classes=tuple(gen_add[vec2class[zero]]),
    )


def replay_path(p: MonoidPresentation, path: Sequence[Vector]) -> bool:
    """Check that consecutive path entries differ by one relation application."""
    diffs = set()
    for lhs, rhs in p.relations:
        d = tuple(a - b for a, b in zip(rhs, lhs))
        diffs.add(d)
        diffs.add(tuple(-x for x in d))
    for a, b in zip(path, path[1:]):
        step = tuple(y - x for x, y in zip(a, b))
        if step not in diffs:
            return False
        # The replaced side must actually be embedded in the source vector.
        ok = False
        for lhs, rhs in p.relations:
            if step == tuple(r - l for l, r in zip(lhs, rhs)) and all(
                x >= l for x, l in zip(a, lhs)
            ):
                ok = True
            if step == tuple(l - r for l, r in zip(lhs, rhs)) and all(
                x >= r for x, r in zip(a, rhs)
            ):
                ok = True
        if not ok:
            return False
    return True


def _format_side(p: MonoidPresentation, vec: Vector) -> str:
    terms = []
    for coeff, name in zip(vec, p.generators):
        if coeff == 0:
            continue
        terms.append(name if coeff == 1 else f"{coeff}{name}")
    return "+".join(terms) if terms else "0"


def parse_element(p: MonoidPresentation, text: str) -> Vector:
    """Parse a term like ``2a+b`` (or ``0``) over the presentation's generators."""
    text = text.strip()
    vec = [0] * len(p.generators)
    if text == "0":
        return tuple(vec)
    pos = {name: i for i, name in enumerate(p.generators)}
    for term in text.split("+"):
        term = term.strip()
        if not term:
            raise ParseError(f"empty term in {text!r}")
        digits = ""
        while term and term[0].isdigit():
            digits += term[0]
            term = term[1:]
        coeff = int(digits) if digits else 1
        if term not in pos:
            raise ParseError(f"unknown generator {term!r}")
        vec[pos[term]] += coeff
    return tuple(vec)


def serialize_presentation(p: MonoidPresentation) -> str:
    lines = ["gens: " + " ".join(p.generators)]
    for lhs, rhs in p.relations:
        lines.append(f"{_format_side(p, lhs)} = {_format_side(p, rhs)}")
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> MonoidPresentation:
    gens: tuple[str, ...] | None = None
    relations: list[tuple[Vector, Vector]] = []
    stub: MonoidPresentation | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if gens is None:
            if not line.startswith("gens:"):
                raise ParseError("first record must be 'gens: <names>'", line=lineno)
            gens = tuple(line[len("gens:"):].split())
            if not gens:
                raise ParseError("no generators declared", line=lineno)
            stub = MonoidPresentation(gens, ())
            continue
        if "=" not in line:
            raise ParseError("relation line must contain '='", line=lineno)
        left, right = line.split("=", 1)
        try:
            lhs = parse_element(stub, left)
            rhs = parse_element(stub, right)
        except ParseError as err:
            raise ParseError(str(err), line=lineno) from None
        relations.append((lhs, rhs))
    if gens is None:
        raise ParseError("presentation file is empty")
    return MonoidPresentation(gens, tuple(relations))


def find_unit_isomorphism(
    p1: MonoidPresentation,
    t1: MonoidTable,
    t2: MonoidTable,
    *,
    require_unit: bool = True,
) -> tuple[int, ...] | None:
    """Exhaustive search for a monoid isomorphism t1 -> t2 determined by
    generator images, optionally required to match the order units.

    A tuple of images defines a well-defined homomorphism exactly when the
    presentation relations of t1 hold among the images; additivity is then
    automatic because every element carries its expression over the
    generators as its representative vector.  Returns the generator image
    tuple or None when no isomorphism exists.
    """
    if t1.size != t2.size:
        return None
    k = len(t1.generator_classes)

    def sum_of(images: Sequence[int], vec: Vector) -> int:
        acc = t2.identity
        for coeff, img in zip(vec, images):
            for _ in range(coeff):
                acc = t2.add[acc][img]
        return acc

    unit1 = t1.unit_class()
    unit2 = t2.unit_class()
    # Relations become checkable as soon as every generator they mention has
    # an image; grouping them by that point prunes the search early.
    checkpoint: list[list[tuple[Vector, Vector]]] = [[] for _ in range(k + 1)]
    for lhs, rhs in p1.relations:
        support = [i for i in range(k) if lhs[i] or rhs[i]]
        level = (max(support) + 1) if support else 0
        checkpoint[level].append((lhs, rhs))

    def extend(images: list[int]) -> tuple[int, ...] | None:
        level = len(images)
        for lhs, rhs in checkpoint[level]:
            if sum_of(images, lhs[:level]) != sum_of(images, rhs[:level]):
                return None
        if level == k:
            mapped = [sum_of(images, rep) for rep in t1.elements]
            if len(set(mapped)) != t1.size:
                return None
            if require_unit and mapped[unit1] != unit2:
                return None
            return tuple(images)
        for img in range(t2.size):
            found = extend(images + [img])
            if found is not None:
                return found
        return None

    return extend([])

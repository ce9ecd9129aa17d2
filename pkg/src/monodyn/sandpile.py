"""Chip-firing dynamics on directed graphs.

A configuration stores one count per non-sink vertex (declaration order) plus
a tally of chips that fell into sinks.  A vertex is unstable when its count
reaches its outdegree; firing sends one chip along every outgoing edge.  The
stable result and the per-vertex firing counts do not depend on the firing
order, which is what makes the randomized scheduler below a legitimate
cross-check of the deterministic one.

Config file format: lines ``<vertex> <count>``, absent vertices mean 0,
``#`` starts a comment.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from random import Random
from typing import Mapping

from .errors import BudgetExceededError, CapExceededError, FiringError, ParseError
from .graph import Graph, structure_report
from .monoid import MonoidTable

DEFAULT_FIRING_BUDGET = 10**9


@dataclass(frozen=True)
class ChipConfig:
    """Chip counts over the non-sink vertices of an ambient graph.

    ``absorbed`` tallies chips that entered a sink; it is bookkeeping for
    conservation checks and deliberately excluded from equality.
    """

    counts: tuple[int, ...]
    absorbed: int = field(default=0, compare=False)

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise FiringError("negative chip count")

    @staticmethod
    def from_mapping(g: Graph, counts: Mapping[str, int], absorbed: int = 0) -> "ChipConfig":
        pos = {v: i for i, v in enumerate(g.nonsink_vertices)}
        out = [0] * len(pos)
        for name, c in counts.items():
            if name not in g.index:
                raise FiringError(f"unknown vertex {name!r}")
            if name not in pos:
                raise FiringError(f"vertex {name!r} is a sink and carries no count")
            out[pos[name]] = c
        return ChipConfig(tuple(out), absorbed)

    @staticmethod
    def zero(g: Graph) -> "ChipConfig":
        return ChipConfig((0,) * len(g.nonsink_vertices))

    def to_mapping(self, g: Graph) -> dict[str, int]:
        return dict(zip(g.nonsink_vertices, self.counts))

    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class Odometer:
    """Per-vertex firing counts over the non-sink vertices."""

    firings: tuple[int, ...]

    def to_mapping(self, g: Graph) -> dict[str, int]:
        return dict(zip(g.nonsink_vertices, self.firings))

    def total(self) -> int:
        return sum(self.firings)


def parse_config(g: Graph, text: str) -> ChipConfig:
    counts: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("config line must be '<vertex> <count>'", line=lineno)
        name = parts[0]
        try:
            c = int(parts[1])
        except ValueError:
            raise ParseError(f"bad count {parts[1]!r}", line=lineno) from None
        if c < 0:
            raise ParseError(f"negative count for {name!r}", line=lineno)
        if name not in g.index:
            raise ParseError(f"unknown vertex {name!r}", line=lineno)
        if g.is_sink(name):
            raise ParseError(f"vertex {name!r} is a sink and carries no count", line=lineno)
        counts[name] = counts.get(name, 0) + c
    return ChipConfig.from_mapping(g, counts)


def serialize_config(g: Graph, c: ChipConfig) -> str:
    lines = [f"{v} {n}" for v, n in zip(g.nonsink_vertices, c.counts) if n]
    return "\n".join(lines) + ("\n" if lines else "")


class _Arena:
    """Mutable firing state shared by the schedulers."""

    def __init__(self, g: Graph, c: ChipConfig):
        self.g = g
        self.nonsink = g.nonsink_vertices
        if len(c.counts) != len(self.nonsink):
            raise FiringError(
                f"config has {len(c.counts)} counts but graph has "
                f"{len(self.nonsink)} non-sink vertices"
            )
        pos = {v: i for i, v in enumerate(self.nonsink)}
        self.outdeg = [g.outdegree(v) for v in self.nonsink]
        # (target position or None-for-sink, multiplicity) per vertex
        self.targets: list[list[tuple[int | None, int]]] = []
        for v in self.nonsink:
            row = []
            for dst, mult in g.out_adj[v]:
                row.append((pos.get(dst), mult))
            self.targets.append(row)
        self.counts = list(c.counts)
        self.absorbed = c.absorbed
        self.odometer = [0] * len(self.nonsink)
        self.fired = 0

    def unstable(self, i: int) -> bool:
        return self.counts[i] >= self.outdeg[i]

    def fire_once(self, i: int):
        self.counts[i] -= self.outdeg[i]
        for j, mult in self.targets[i]:
            if j is None:
                self.absorbed += mult
            else:
                self.counts[j] += mult
        self.odometer[i] += 1
        self.fired += 1

    def snapshot(self) -> ChipConfig:
        return ChipConfig(tuple(self.counts), self.absorbed)

    def result(self) -> tuple[ChipConfig, Odometer]:
        return self.snapshot(), Odometer(tuple(self.odometer))

    def budget_error(self, budget: int) -> BudgetExceededError:
        config, odo = self.result()
        return BudgetExceededError(
            f"did not stabilize within budget of {budget} firings",
            config=config,
            odometer=odo,
            fired=self.fired,
        )


def fire(g: Graph, c: ChipConfig, v: str) -> ChipConfig:
    """Fire a single unstable vertex once."""
    if v not in g.index:
        raise FiringError(f"unknown vertex {v!r}")
    if g.is_sink(v):
        raise FiringError(f"cannot fire sink vertex {v!r}")
    arena = _Arena(g, c)
    i = g.nonsink_vertices.index(v)
    if not arena.unstable(i):
        raise FiringError(
            f"vertex {v!r} holds {arena.counts[i]} chips, fewer than outdegree {arena.outdeg[i]}"
        )
    arena.fire_once(i)
    return arena.snapshot()


def stabilize(
    g: Graph,
    c: ChipConfig,
    *,
    budget: int | None = None,
    rng: Random | None = None,
    trace_to: list[ChipConfig] | None = None,
) -> tuple[ChipConfig, Odometer]:
    """Fire until no vertex is unstable.

    The default scheduler pops a FIFO work queue seeded in declaration order
    and fires the popped vertex maximally (floor(count / outdegree) single
    firings at once).  Passing ``rng`` switches to single random firings,
    which exists so tests can confirm order independence.  ``trace_to``
    collects a snapshot after every single firing.

    Raises BudgetExceededError when the budget runs out, which can happen on
    chip-heavy closed grids but never on sandpile graphs.
    """
    if budget is None:
        budget = DEFAULT_FIRING_BUDGET
    arena = _Arena(g, c)
    n = len(arena.counts)

    if rng is not None:
        while True:
            unstable = [i for i in range(n) if arena.unstable(i)]
            if not unstable:
                return arena.result()
            if arena.fired >= budget:
                raise arena.budget_error(budget)
            i = rng.choice(unstable)
            arena.fire_once(i)
            if trace_to is not None:
                trace_to.append(arena.snapshot())

    queue = deque(i for i in range(n) if arena.unstable(i))
    queued = [arena.unstable(i) for i in range(n)]
    while queue:
        i = queue.popleft()
        queued[i] = False
        if not arena.unstable(i):
            continue
        batch = arena.counts[i] // arena.outdeg[i]
        if arena.fired + batch > budget:
            batch = budget - arena.fired
            for _ in range(batch):
                arena.fire_once(i)
                if trace_to is not None:
                    trace_to.append(arena.snapshot())
            raise arena.budget_error(budget)
        if trace_to is not None:
            for _ in range(batch):
                arena.fire_once(i)
                trace_to.append(arena.snapshot())
        else:
            arena.counts[i] -= batch * arena.outdeg[i]
            for j, mult in arena.targets[i]:
                if j is None:
                    arena.absorbed += batch * mult
                else:
                    arena.counts[j] += batch * mult
            arena.odometer[i] += batch
            arena.fired += batch
        for j, _ in arena.targets[i]:
            if j is not None and not queued[j] and arena.unstable(j):
                queue.append(j)
                queued[j] = True
        if not queued[i] and arena.unstable(i):
            queue.append(i)
            queued[i] = True
    return arena.result()


def is_stable(g: Graph, c: ChipConfig) -> bool:
    return all(
        count < g.outdegree(v) for v, count in zip(g.nonsink_vertices, c.counts)
    )


def stable_add(g: Graph, a: ChipConfig, b: ChipConfig, *, budget: int | None = None) -> ChipConfig:
    """Pointwise sum followed by stabilization: the monoid operation on
    stable configurations."""
    for name, cfg in (("first", a), ("second", b)):
        if not is_stable(g, cfg):
            raise FiringError(f"{name} summand is not stable")
    merged = ChipConfig(
        tuple(x + y for x, y in zip(a.counts, b.counts)),
        a.absorbed + b.absorbed,
    )
    config, _ = stabilize(g, merged, budget=budget)
    return config


def sandpile_monoid(g: Graph, *, max_elements: int = 10_000, budget: int | None = None) -> MonoidTable:
    """All stable configurations under stabilized addition, as a Cayley table.

    The element count is the product of the outdegrees of the non-sink
    vertices; elements are listed in lexicographic count order so index 0 is
    the zero configuration.
    """
    rep = structure_report(g)
    if not rep.sandpile:
        raise FiringError("sandpile monoid requires a graph with a unique reachable sink")
    nonsink = g.nonsink_vertices
    outdeg = [g.outdegree(v) for v in nonsink]
    size = 1
    for d in outdeg:
        size *= d
    if size > max_elements:
        raise CapExceededError(
            f"stable configuration count {size} exceeds cap {max_elements}"
        )
    elements = [tuple(t) for t in itertools.product(*(range(d) for d in outdeg))]
    index = {e: i for i, e in enumerate(elements)}
    add_rows = []
    for i, a in enumerate(elements):
        row = [0] * size
        for j, b in enumerate(elements):
            if j < i:
                row[j] = add_rows[j][i]
                continue
            summed = stable_add(g, ChipConfig(a), ChipConfig(b), budget=budget)
            row[j] = index[summed.counts]
        add_rows.append(row)
    gen_classes = []
    for k in range(len(nonsink)):
        e_k = tuple(1 if i == k else 0 for i in range(len(nonsink)))
        stabilized, _ = stabilize(g, ChipConfig(e_k), budget=budget)
        gen_classes.append(index[stabilized.counts])
    return MonoidTable(
        generators=nonsink,
        elements=tuple(elements),
        add=tuple(tuple(r) for r in add_rows),
        identity=index[(0,) * len(nonsink)],
        generator_classes=tuple(gen_classes),
    )


def format_config_terms(g: Graph, configs: list[ChipConfig]) -> list[str]:
    """Render configurations in additive notation, e.g. ``6v+u``.

    Term order is first-appearance order across the sequence: the vertices
    holding chips in the first configuration come first (declaration order
    breaking ties), then vertices in order of when they first hold a chip.
    The zero configuration renders as ``0``.
    """
    order: list[int] = []
    seen: set[int] = set()
    for cfg in configs:
        for i, count in enumerate(cfg.counts):
            if count and i not in seen:
                seen.add(i)
                order.append(i)
    names = g.nonsink_vertices
    out = []
    for cfg in configs:
        terms = []
        for i in order:
            count = cfg.counts[i]
            if count == 0:
                continue
            terms.append(names[i] if count == 1 else f"{count}{names[i]}")
        out.append("+".join(terms) if terms else "0")
    return out

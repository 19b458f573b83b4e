"""Occupied-cell sets and their boundary structure.

A Support is a finite nonempty connected set of occupied cells.  Derived
facts (adjacency, boundary, articulation points, simple connectivity) are
computed once at construction or memoised on first use.  Boundary cells of
a simply connected support fall into a strict trichotomy: pending (one
occupied neighbour), articulation point, or a theta-angle particle whose
occupied neighbours form a single cyclic arc spanning theta degrees.
A 300-degree angle cannot occur: an arc of six would mean every
neighbour is occupied, contradicting boundary membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence, Union

from .lattice import (
    Cell,
    N_DIRS,
    common_neighbors,
    neighbor,
    neighbors,
)


class SupportError(ValueError):
    """Raised for supports violating a constructor or operation precondition."""


class BoundaryStructureError(RuntimeError):
    """Raised when a boundary fact that should be guaranteed fails to hold.

    Hitting this on a simply connected support would falsify the boundary
    trichotomy or the simple-polygon structure it relies on.
    """


class BoundaryKind(Enum):
    PENDING = "pending"
    ARTICULATION = "articulation"
    ANGLE = "angle"


@dataclass(frozen=True, slots=True)
class BoundaryClass:
    kind: BoundaryKind
    angle: int | None = None  # degrees, set only for ANGLE

    def __str__(self) -> str:
        if self.kind is BoundaryKind.ANGLE:
            return f"angle({self.angle})"
        return self.kind.value


PENDING = BoundaryClass(BoundaryKind.PENDING)
ARTICULATION = BoundaryClass(BoundaryKind.ARTICULATION)


def angle_class(degrees: int) -> BoundaryClass:
    if degrees not in (60, 120, 180, 240):
        raise ValueError(f"impossible boundary angle {degrees}")
    return BoundaryClass(BoundaryKind.ANGLE, degrees)


class Support:
    """Immutable connected set of occupied cells with cached geometry."""

    __slots__ = (
        "cells",
        "_sorted",
        "_occ_adj",
        "_bbox",
        "_boundary",
        "_simply_connected",
        "_articulation",
        "_blocks",
    )

    def __init__(self, cells: Iterable[Cell]):
        cellset = frozenset(Cell(q, r) for q, r in cells)
        if not cellset:
            raise SupportError("support must contain at least one cell")
        self.cells = cellset
        self._sorted = tuple(sorted(cellset))
        self._occ_adj = {
            c: tuple(n for n in neighbors(c) if n in cellset) for c in self._sorted
        }
        qs = [c.q for c in cellset]
        rs = [c.r for c in cellset]
        self._bbox = (min(qs), min(rs), max(qs), max(rs))
        if not self._is_connected():
            raise SupportError("support is not connected")
        self._boundary: frozenset[Cell] | None = None
        self._simply_connected: bool | None = None
        self._articulation: frozenset[Cell] | None = None
        self._blocks: tuple[frozenset[Cell], ...] | None = None

    def _is_connected(self) -> bool:
        seen = {self._sorted[0]}
        stack = [self._sorted[0]]
        while stack:
            for n in self._occ_adj[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        return len(seen) == len(self.cells)

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, c: Cell) -> bool:
        return c in self.cells

    def __iter__(self) -> Iterator[Cell]:
        return iter(self._sorted)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Support) and self.cells == other.cells

    def __hash__(self) -> int:
        return hash(self.cells)

    def __repr__(self) -> str:
        return f"Support({len(self.cells)} cells, bbox={self._bbox})"

    @property
    def bounding_box(self) -> tuple[int, int, int, int]:
        """(min_q, min_r, max_q, max_r)."""
        return self._bbox

    def occupied_neighbors(self, c: Cell) -> tuple[Cell, ...]:
        return self._occ_adj[c]

    def edges(self) -> list[tuple[Cell, Cell]]:
        """All occupied adjacent pairs, canonically ordered (a < b, sorted)."""
        out = []
        for c in self._sorted:
            for n in self._occ_adj[c]:
                if c < n:
                    out.append((c, n))
        return out

    # -- boundary and holes -----------------------------------------------

    def boundary(self) -> frozenset[Cell]:
        """Occupied cells with at least one empty neighbour."""
        if self._boundary is None:
            self._boundary = frozenset(
                c for c in self._sorted if len(self._occ_adj[c]) < N_DIRS
            )
        return self._boundary

    def is_simply_connected(self) -> bool:
        """True iff the empty complement is connected (no enclosed holes).

        Flood-fills the empty cells of the margin-1 bounding box starting
        from the box frame; any empty cell left unreached is enclosed.
        """
        if self._simply_connected is None:
            self._simply_connected = self.hole_cells() == frozenset()
        return self._simply_connected

    def hole_cells(self) -> frozenset[Cell]:
        """Empty cells inside the margin-1 bounding box unreachable from its frame."""
        q0, r0, q1, r1 = self._bbox
        q0, r0, q1, r1 = q0 - 1, r0 - 1, q1 + 1, r1 + 1
        start = Cell(q0, r0)
        seen = {start}
        stack = [start]
        while stack:
            c = stack.pop()
            for n in neighbors(c):
                if q0 <= n.q <= q1 and r0 <= n.r <= r1 and n not in self.cells and n not in seen:
                    seen.add(n)
                    stack.append(n)
        holes = [
            Cell(q, r)
            for q in range(q0, q1 + 1)
            for r in range(r0, r1 + 1)
            if Cell(q, r) not in self.cells and Cell(q, r) not in seen
        ]
        return frozenset(holes)

    # -- articulation points and blocks -------------------------------------

    def articulation_points(self) -> frozenset[Cell]:
        if self._articulation is None:
            self._compute_blocks()
        return self._articulation  # type: ignore[return-value]

    def blocks(self) -> tuple[frozenset[Cell], ...]:
        """2-connected components of the occupancy graph (bridges give 2-cell blocks)."""
        if self._blocks is None:
            self._compute_blocks()
        return self._blocks  # type: ignore[return-value]

    def is_two_connected(self) -> bool:
        return not self.articulation_points()

    def _compute_blocks(self) -> None:
        # Iterative lowpoint computation with an edge stack.
        disc: dict[Cell, int] = {}
        low: dict[Cell, int] = {}
        parent: dict[Cell, Cell | None] = {}
        aps: set[Cell] = set()
        blocks: list[frozenset[Cell]] = []
        edge_stack: list[tuple[Cell, Cell]] = []
        counter = 0

        root = self._sorted[0]
        if len(self.cells) == 1:
            self._articulation = frozenset()
            self._blocks = (frozenset({root}),)
            return

        parent[root] = None
        stack: list[tuple[Cell, Iterator[Cell]]] = [(root, iter(self._occ_adj[root]))]
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0

        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                if v not in disc:
                    parent[v] = u
                    disc[v] = low[v] = counter
                    counter += 1
                    edge_stack.append((u, v))
                    if u is root:
                        root_children += 1
                    stack.append((v, iter(self._occ_adj[v])))
                    advanced = True
                    break
                elif v != parent[u] and disc[v] < disc[u]:
                    edge_stack.append((u, v))
                    low[u] = min(low[u], disc[v])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] >= disc[p]:
                    if parent[p] is not None:
                        aps.add(p)
                    members: set[Cell] = set()
                    while edge_stack and disc[edge_stack[-1][0]] >= disc[u]:
                        a, b = edge_stack.pop()
                        members.add(a)
                        members.add(b)
                    if edge_stack and edge_stack[-1] == (p, u):
                        a, b = edge_stack.pop()
                        members.add(a)
                        members.add(b)
                    members.add(p)
                    members.add(u)
                    blocks.append(frozenset(members))
        if root_children > 1:
            aps.add(root)
        self._articulation = frozenset(aps)
        self._blocks = tuple(blocks)

    # -- boundary classification -------------------------------------------

    def occupied_dirs(self, c: Cell) -> tuple[int, ...]:
        return tuple(
            d for d in range(N_DIRS) if neighbor(c, d) in self.cells
        )

    def classify(self, p: Cell) -> BoundaryClass:
        """Trichotomy of a boundary particle: pending / articulation / angle."""
        if p not in self.cells:
            raise SupportError(f"{p} is not occupied")
        if p not in self.boundary():
            raise SupportError(f"{p} is not on the boundary")
        occ = self.occupied_dirs(p)
        if len(occ) == 1:
            return PENDING
        if p in self.articulation_points():
            return ARTICULATION
        arc = _single_cyclic_arc(occ)
        if arc is None:
            raise BoundaryStructureError(
                f"occupied neighbours of {p} form several arcs but {p} is not "
                "an articulation point; support cannot be simply connected"
            )
        return angle_class(60 * (len(arc) - 1))


def _single_cyclic_arc(dirs: Sequence[int]) -> tuple[int, ...] | None:
    """Return ``dirs`` reordered as one cyclic run, or None if not contiguous."""
    present = set(dirs)
    if not present or len(present) == N_DIRS:
        return None
    # Rotate to a position whose predecessor is absent, then take the run.
    for start in range(N_DIRS):
        if start in present and (start - 1) % N_DIRS not in present:
            run = []
            d = start
            while d in present:
                run.append(d)
                d = (d + 1) % N_DIRS
            return tuple(run) if len(run) == len(present) else None
    return None


# -- boundary polygon -------------------------------------------------------


def boundary_cycle(s: Support) -> list[Cell]:
    """Boundary cells of a 2-connected support in polygon order.

    Consecutive cells share exactly one empty common neighbour; each
    boundary cell lies on exactly two such edges, so the boundary is a
    simple cycle.  The walk starts at the smallest boundary cell and the
    direction is fixed by the smaller of its two partners.
    """
    if len(s) < 3 or not s.is_two_connected():
        raise SupportError("boundary polygon requires a 2-connected support of >= 3 cells")
    bnd = s.boundary()
    partners: dict[Cell, list[Cell]] = {c: [] for c in bnd}
    for c in sorted(bnd):
        for n in s.occupied_neighbors(c):
            if n in bnd:
                empties = [x for x in common_neighbors(c, n) if x not in s.cells]
                if len(empties) == 2:
                    raise BoundaryStructureError(
                        f"edge {c}-{n} has two empty common neighbours in a "
                        "2-connected support; support cannot be simply connected"
                    )
                if empties:
                    partners[c].append(n)
    for c, ns in partners.items():
        if len(ns) != 2:
            raise BoundaryStructureError(
                f"boundary cell {c} lies on {len(ns)} boundary edges, expected 2"
            )
    start = min(bnd)
    cycle = [start]
    prev, cur = None, start
    nxt = min(partners[start])
    while nxt != start:
        cycle.append(nxt)
        prev, cur = cur, nxt
        a, b = partners[cur]
        nxt = b if a == prev else a
    if len(cycle) != len(bnd):
        raise BoundaryStructureError("boundary walk did not visit every boundary cell")
    return cycle


# -- Euler-style census check ------------------------------------------------


def check_angle_census(s: Support) -> bool:
    """Angle census identity for 2-connected supports: 2*n60 + n120 - n240 == 6."""
    if len(s) < 3:
        raise SupportError("census identity needs at least three particles")
    if not s.is_two_connected():
        raise SupportError("census identity needs a 2-connected support")
    census = {60: 0, 120: 0, 180: 0, 240: 0}
    for c in s.boundary():
        cls = s.classify(c)
        if cls.kind is not BoundaryKind.ANGLE:
            raise BoundaryStructureError(f"unexpected {cls} on 2-connected boundary")
        census[cls.angle] += 1  # type: ignore[index]
    return 2 * census[60] + census[120] - census[240] == 6


# -- boundary witness --------------------------------------------------------


@dataclass(frozen=True)
class PendingWitness:
    cell: Cell


@dataclass(frozen=True)
class SixtyWitness:
    cell: Cell


@dataclass(frozen=True)
class FlatPairWitness:
    """Two 120-degree particles joined along the boundary by 180-degree cells."""

    first: Cell
    second: Cell
    path: tuple[Cell, ...]


Witness = Union[PendingWitness, SixtyWitness, FlatPairWitness]


def boundary_witness(s: Support) -> Witness:
    """Find the guaranteed boundary feature of a simply connected support.

    Every simply connected support with >= 2 particles contains a pending
    particle, a 60-degree particle, or two 120-degree particles joined by a
    (possibly empty) boundary path of 180-degree particles.  The returned
    witness is validated against the full support before being returned;
    failure to find one raises BoundaryStructureError, which would falsify
    the statement.
    """
    if len(s) < 2:
        raise SupportError("witness needs at least two particles")
    if not s.is_simply_connected():
        raise SupportError("witness is only guaranteed for simply connected supports")

    for c in s:
        if len(s.occupied_neighbors(c)) == 1:
            return PendingWitness(c)

    # No pending particle: every leaf block is 2-connected with >= 3 cells.
    cut = s.articulation_points()
    block = _leaf_block(s, cut)
    inner_cut = block & cut
    excluded = next(iter(inner_cut)) if inner_cut else None
    sub = Support(block)

    for c in sub:
        if excluded is not None and c == excluded:
            continue
        if c in sub.boundary() and sub.classify(c) == angle_class(60):
            witness: Witness = SixtyWitness(c)
            _validate_witness(s, witness)
            return witness

    cycle = boundary_cycle(sub)
    angles = {c: sub.classify(c) for c in cycle}
    m = len(cycle)
    idx120 = [
        i
        for i, c in enumerate(cycle)
        if angles[c] == angle_class(120) and c != excluded
    ]
    for a, b in zip(idx120, idx120[1:] + idx120[:1]):
        gap = [cycle[i % m] for i in range(a + 1, a + 1 + (b - a - 1) % m)]
        if excluded is not None and excluded in gap:
            continue
        if all(angles[c] == angle_class(180) for c in gap):
            witness = FlatPairWitness(cycle[a], cycle[b], tuple(gap))
            _validate_witness(s, witness)
            return witness
    raise BoundaryStructureError(
        f"no boundary witness found on {s!r}; the boundary trichotomy is falsified"
    )


def _leaf_block(s: Support, cut: frozenset[Cell]) -> frozenset[Cell]:
    """A block containing at most one articulation point of ``s``."""
    best = None
    for block in s.blocks():
        inner = len(block & cut)
        if inner <= 1:
            key = (len(block), sorted(block))
            if best is None or key < best[0]:
                best = (key, block)
    if best is None:
        raise BoundaryStructureError("block tree has no leaf; impossible for a finite graph")
    return best[1]


def _validate_witness(s: Support, w: Witness) -> None:
    if isinstance(w, PendingWitness):
        ok = len(s.occupied_neighbors(w.cell)) == 1
    elif isinstance(w, SixtyWitness):
        ok = s.classify(w.cell) == angle_class(60)
    else:
        ok = (
            s.classify(w.first) == angle_class(120)
            and s.classify(w.second) == angle_class(120)
            and all(s.classify(c) == angle_class(180) for c in w.path)
        )
    if not ok:
        raise BoundaryStructureError(f"witness {w} does not hold in the full support")


# -- canonical forms ----------------------------------------------------------


def canonical_cells(cells: Iterable[Cell]) -> tuple[Cell, ...]:
    """Translate so the smallest cell sits at the origin; sort the rest."""
    cs = sorted(Cell(q, r) for q, r in cells)
    dq, dr = cs[0]
    return tuple(Cell(q - dq, r - dr) for q, r in cs)


def _rot60(c: Cell) -> Cell:
    return Cell(-c.r, c.q + c.r)


def _mirror(c: Cell) -> Cell:
    return Cell(c.q + c.r, -c.r)


def symmetry_canonical_cells(cells: Iterable[Cell]) -> tuple[Cell, ...]:
    """Smallest canonical translate over the 12-element lattice symmetry group."""
    base = [Cell(q, r) for q, r in cells]
    best: tuple[Cell, ...] | None = None
    for reflect in (False, True):
        img = [_mirror(c) for c in base] if reflect else list(base)
        for _ in range(6):
            img = [_rot60(c) for c in img]
            cand = canonical_cells(img)
            if best is None or cand < best:
                best = cand
    assert best is not None
    return best


# -- shape files --------------------------------------------------------------


def parse_shape_text(text: str) -> list[Cell]:
    """Parse the one-cell-per-line ``q r`` shape format ('#' comments allowed)."""
    cells = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SupportError(f"line {lineno}: expected 'q r', got {raw!r}")
        try:
            cells.append(Cell(int(parts[0]), int(parts[1])))
        except ValueError:
            raise SupportError(f"line {lineno}: non-integer coordinate in {raw!r}") from None
    if not cells:
        raise SupportError("shape file contains no cells")
    return cells


def format_shape_text(cells: Iterable[Cell]) -> str:
    return "".join(f"{c.q} {c.r}\n" for c in sorted(set(cells)))

"""Shape construction and register initialisation.

Enumeration grows simply connected supports one cell at a time,
deduplicating canonical translates at every size; growth from simply
connected shapes is complete because any such shape can lose an erodible
boundary cell and stay simply connected.  The erosion orientation walks
that reduction forwards: repeatedly remove a particle whose remaining
neighbours are one to three cells on consecutive ports and whose removal
keeps the rest connected, then direct every edge from the earlier-removed
to the later-removed endpoint.  The result satisfies all four validity
rules, is globally acyclic, and its unique sink is the last particle
standing.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Mapping

from .lattice import (
    ALL_PORTMAPS,
    Cell,
    N_DIRS,
    PortMap,
    dir_to_port,
    direction_from,
    neighbor,
    neighbors,
)
from .config import ALL_IN, Configuration, OUT, identity_portmaps
from .support import (
    Support,
    SupportError,
    canonical_cells,
    symmetry_canonical_cells,
)


class ErosionError(RuntimeError):
    """No erodible particle exists; would contradict the erosion guarantee."""


# -- enumeration ---------------------------------------------------------------


def enumerate_supports(n: int, canonical: str = "translation") -> list[Support]:
    """All simply connected supports of ``n`` cells, one per canonical form.

    ``canonical`` is ``"translation"`` (default) or ``"symmetry"`` for
    deduplication up to the full 12-element lattice symmetry group.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if canonical not in ("translation", "symmetry"):
        raise ValueError(f"unknown canonicalisation {canonical!r}")
    canon: Callable[[Iterable[Cell]], tuple[Cell, ...]]
    canon = canonical_cells if canonical == "translation" else symmetry_canonical_cells

    shapes: set[tuple[Cell, ...]] = {canon([Cell(0, 0)])}
    for _ in range(n - 1):
        grown: set[tuple[Cell, ...]] = set()
        for shape in shapes:
            cellset = set(shape)
            frontier = {
                nb for c in shape for nb in neighbors(c) if nb not in cellset
            }
            for nb in frontier:
                cand = canon(cellset | {nb})
                if cand in grown:
                    continue
                if _simply_connected_cells(cand):
                    grown.add(cand)
        shapes = grown
    return [Support(shape) for shape in sorted(shapes)]


def _simply_connected_cells(cells: tuple[Cell, ...]) -> bool:
    # Same complement flood fill as Support, without paying for construction.
    cellset = set(cells)
    q0 = min(c.q for c in cells) - 1
    r0 = min(c.r for c in cells) - 1
    q1 = max(c.q for c in cells) + 1
    r1 = max(c.r for c in cells) + 1
    start = Cell(q0, r0)
    seen = {start}
    stack = [start]
    empties = (q1 - q0 + 1) * (r1 - r0 + 1) - len(cellset)
    while stack:
        c = stack.pop()
        for nb in neighbors(c):
            if q0 <= nb.q <= q1 and r0 <= nb.r <= r1 and nb not in cellset and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == empties


def random_support(n: int, seed: int) -> Support:
    """Random simply connected support grown cell by cell."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    cells = {Cell(0, 0)}
    while len(cells) < n:
        frontier = sorted(
            {nb for c in cells for nb in neighbors(c) if nb not in cells}
        )
        rng.shuffle(frontier)
        for nb in frontier:
            if _simply_connected_cells(tuple(cells | {nb})):
                cells.add(nb)
                break
        else:
            raise SupportError("no simply-connectivity-preserving extension found")
    return Support(cells)


# -- erosion orientation ---------------------------------------------------------


def erosion_order(s: Support) -> list[Cell]:
    """Removal order: each step takes the smallest erodible cell.

    A cell is erodible while others remain if its remaining occupied
    neighbours number 1..3, sit on consecutive ports, and removing it
    keeps the remainder connected.
    """
    if not s.is_simply_connected():
        raise SupportError("erosion orientation requires a simply connected support")
    remaining = set(s.cells)
    order: list[Cell] = []
    while len(remaining) > 1:
        for c in sorted(remaining):
            if _erodible(c, remaining):
                order.append(c)
                remaining.remove(c)
                break
        else:
            raise ErosionError(f"no erodible particle among {sorted(remaining)}")
    order.extend(remaining)
    return order


def _erodible(c: Cell, remaining: set[Cell]) -> bool:
    occ_dirs = [d for d in range(N_DIRS) if neighbor(c, d) in remaining]
    if not 1 <= len(occ_dirs) <= 3:
        return False
    present = set(occ_dirs)
    runs = sum(1 for d in present if (d - 1) % N_DIRS not in present)
    if runs != 1:
        return False
    rest = remaining - {c}
    start = next(iter(rest))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for nb in neighbors(x):
            if nb in rest and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(rest)


def erosion_orientation(
    s: Support, portmaps: Mapping[Cell, PortMap] | None = None
) -> Configuration:
    """Acyclic all-directed configuration induced by the erosion order."""
    order = erosion_order(s)
    rank = {c: i for i, c in enumerate(order)}
    pms = dict(portmaps) if portmaps is not None else identity_portmaps(s)
    regs: dict[Cell, list] = {c: list(ALL_IN) for c in s}
    for a, b in s.edges():
        src = a if rank[a] < rank[b] else b
        dst = b if src == a else a
        port = dir_to_port(pms[src], direction_from(src, dst))
        regs[src][port] = OUT
    return Configuration(s, pms, {c: tuple(r) for c, r in regs.items()})


# -- random registers -------------------------------------------------------------


def random_portmaps(s: Support, seed: int) -> dict[Cell, PortMap]:
    rng = random.Random(seed)
    return {c: rng.choice(ALL_PORTMAPS) for c in s}


def random_registers(
    s: Support,
    seed: int,
    conflict_probability: float = 0.25,
    portmaps: Mapping[Cell, PortMap] | None = None,
) -> Configuration:
    """Arbitrary initial registers: per edge, Out/Out with the given
    probability, otherwise uniform over the three conflict-free states.

    The default 0.25 makes every free port an independent fair coin.
    Ports toward empty cells always hold In.
    """
    if not 0.0 <= conflict_probability <= 1.0:
        raise ValueError("conflict probability must lie in [0, 1]")
    rng = random.Random(seed)
    pms = dict(portmaps) if portmaps is not None else identity_portmaps(s)
    regs: dict[Cell, list] = {c: list(ALL_IN) for c in s}
    for a, b in s.edges():
        pa = dir_to_port(pms[a], direction_from(a, b))
        pb = dir_to_port(pms[b], direction_from(b, a))
        if rng.random() < conflict_probability:
            regs[a][pa] = OUT
            regs[b][pb] = OUT
        else:
            code = rng.randrange(3)
            if code == 1:
                regs[a][pa] = OUT
            elif code == 2:
                regs[b][pb] = OUT
    return Configuration(s, pms, {c: tuple(r) for c, r in regs.items()})


# -- named fixtures ---------------------------------------------------------------


def triangle3() -> Support:
    return Support([Cell(0, 0), Cell(1, 0), Cell(0, 1)])


def line(n: int) -> Support:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Support([Cell(i, 0) for i in range(n)])


def hexagon(k: int) -> Support:
    """All cells within hex distance k of the origin (1 + 3k(k+1) cells)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    cells = [
        Cell(q, r)
        for q in range(-k, k + 1)
        for r in range(-k, k + 1)
        if (abs(q) + abs(r) + abs(q + r)) // 2 <= k
    ]
    return Support(cells)


def parallelogram(w: int, h: int) -> Support:
    if w < 1 or h < 1:
        raise ValueError("sides must be >= 1")
    return Support([Cell(q, r) for q in range(w) for r in range(h)])


# Closed 18-step tour whose every step turns by 60 degrees, so each cell
# sees its two ring neighbours through directions two apart.
_RING18_TURNS = (1, 1, -1) * 6


def ring18_cells() -> list[Cell]:
    cells = [Cell(0, 0)]
    d = 0
    for turn in _RING18_TURNS[:-1]:
        cells.append(neighbor(cells[-1], d))
        d = (d + turn) % N_DIRS
    return cells


def ring18() -> Configuration:
    """The 18-particle ring: every particle reaches its two occupied
    neighbours through local ports 2 and 4.  Not simply connected; kept
    as the canonical negative fixture.
    """
    cells = ring18_cells()
    support = Support(cells)
    n = len(cells)
    portmaps: dict[Cell, PortMap] = {}
    for i, c in enumerate(cells):
        d_prev = direction_from(c, cells[(i - 1) % n])
        d_next = direction_from(c, cells[(i + 1) % n])
        delta = (d_next - d_prev) % N_DIRS
        # Ports 2 and 4 differ by two, matching the direction gap; the
        # chirality sign absorbs which way around the gap runs.
        if delta == 2:
            pm = PortMap((d_prev - 2) % N_DIRS, 1)
        elif delta == 4:
            pm = PortMap((d_prev + 2) % N_DIRS, -1)
        else:
            raise SupportError(f"ring cell {c} does not turn by 60 degrees")
        assert neighbor(c, (pm.offset + pm.chirality * 2) % N_DIRS) == cells[(i - 1) % n]
        assert neighbor(c, (pm.offset + pm.chirality * 4) % N_DIRS) == cells[(i + 1) % n]
        portmaps[c] = pm
    return Configuration(support, portmaps, {c: ALL_IN for c in support})


def shape_by_name(name: str) -> Support:
    """Resolve CLI shape names: triangle3, lineN, hexagonK, parallelogramWxH, ring18."""
    if name == "triangle3":
        return triangle3()
    if name == "ring18":
        return ring18().support
    if name.startswith("line"):
        return line(int(name[4:]))
    if name.startswith("hexagon"):
        return hexagon(int(name[7:]))
    if name.startswith("parallelogram"):
        w, h = name[len("parallelogram"):].split("x")
        return parallelogram(int(w), int(h))
    raise ValueError(f"unknown shape name {name!r}")

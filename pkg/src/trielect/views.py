"""Port-label views and chirality inference inside triangles.

The label of a walk is the sequence of (exit port, entry port) pairs it
traverses; view_k(p) is the set of labels of all walks of length at most
k starting at p.  Walks may revisit cells: the label of a walk determines
the walk, so views are prefix-deterministic, and using walks rather than
simple paths only ever adds labels.

A particle p in a triangle pqr knows its own two ports on the triangle
and the ports its neighbours assign to the shared edges.  The ports q and
r use for the third edge qr are each one of two values consecutive to the
known ones, giving four candidate labelings.  Exactly one candidate
survives the view_3 membership formula below, even when p and q share a
second common neighbour; from it p recovers q's handedness relative to
its own and the full orientation of every edge in the triangle, which is
all the triangle rule needs.  Depth 3 suffices and is the default
everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Cell, N_DIRS, neighbor, port_to_dir
from .config import Configuration, EdgeOrientation, LinkState, OUT

#: Sequence of (exit port at step i, entry port at step i+1) pairs.
PathLabel = tuple[tuple[int, int], ...]

VIEW_DEPTH = 3


class ChiralityInferenceError(RuntimeError):
    """No or several candidate labelings satisfy the view formula.

    Raising this would falsify the triangle-chirality statement; it is
    never expected on well-formed configurations.
    """


@dataclass(frozen=True)
class View:
    owner: Cell
    depth: int
    labels: frozenset[PathLabel]

    def __contains__(self, label: PathLabel) -> bool:
        return label in self.labels


def build_view(c: Configuration, p: Cell, k: int = VIEW_DEPTH) -> View:
    """Labels of all walks of length <= k over occupied cells starting at p."""
    if p not in c.support.cells:
        raise ValueError(f"{p} is not occupied")
    if k < 1:
        raise ValueError("view depth must be >= 1")
    labels: set[PathLabel] = set()
    frontier: list[tuple[Cell, PathLabel]] = [(p, ())]
    for _ in range(k):
        nxt: list[tuple[Cell, PathLabel]] = []
        for cell, label in frontier:
            pm = c.portmaps[cell]
            for port in range(N_DIRS):
                n = neighbor(cell, port_to_dir(pm, port))
                if n not in c.support.cells:
                    continue
                extended = label + ((port, c.port_of(n, cell)),)
                labels.add(extended)
                nxt.append((n, extended))
        frontier = nxt
    return View(owner=p, depth=k, labels=frozenset(labels))


def _formula_holds(
    labels: frozenset[PathLabel],
    p0: int,
    p1: int,
    q1: int,
    r1: int,
    x: int,
    y: int,
) -> bool:
    """Membership formula deciding whether edge qr is labelled (x, y).

    p0/p1 are p's ports toward r/q; q1 and r1 are the ports q and r assign
    to their edges with p.  The derived port numbers continue each
    particle's 0..5 progression in the sense fixed by the candidate.
    """
    q0 = (2 * q1 - x) % N_DIRS
    r2 = (2 * r1 - y) % N_DIRS
    r5 = (2 * y - r1) % N_DIRS
    p2 = (2 * p1 - p0) % N_DIRS
    around = ((p1, q1), (x, y), (r1, p0)) in labels
    around_back = ((p0, r1), (y, x), (q1, p1)) in labels
    other_triangle = ((p1, q1), (q0, r2)) in labels and ((p2, r5),) in labels
    return around and around_back and not other_triangle


def _infer(
    labels: frozenset[PathLabel], p0: int, p1: int, q1: int, r1: int
) -> tuple[int, int]:
    matches = [
        (x, y)
        for x in ((q1 + 1) % N_DIRS, (q1 - 1) % N_DIRS)
        for y in ((r1 + 1) % N_DIRS, (r1 - 1) % N_DIRS)
        if _formula_holds(labels, p0, p1, q1, r1, x, y)
    ]
    if len(matches) != 1:
        raise ChiralityInferenceError(
            f"{len(matches)} candidate labelings survive the view formula"
        )
    return matches[0]


def infer_triangle_labels(c: Configuration, p: Cell, q: Cell, r: Cell) -> tuple[int, int]:
    """True port labels (q's port toward r, r's port toward q), seen from p.

    Uses only view_3(p) plus the labels p's neighbours assign to their
    shared edges, never q's or r's port maps.
    """
    for a, b in ((p, q), (q, r), (r, p)):
        if b not in (neighbor(a, d) for d in range(N_DIRS)):
            raise ValueError(f"{p}, {q}, {r} do not form a triangle")
    p1 = c.port_of(p, q)
    p0 = c.port_of(p, r)
    q1 = c.port_of(q, p)
    r1 = c.port_of(r, p)
    labels = build_view(c, p, VIEW_DEPTH).labels
    try:
        return _infer(labels, p0, p1, q1, r1)
    except ChiralityInferenceError as exc:
        raise ChiralityInferenceError(f"edge {q}-{r} seen from {p}: {exc}") from None


def relative_chirality(c: Configuration, p: Cell, q: Cell, r: Cell) -> int:
    """+1 if q numbers its ports in the same rotational sense as p, else -1."""
    x, _ = infer_triangle_labels(c, p, q, r)
    p1 = c.port_of(p, q)
    p0 = c.port_of(p, r)
    q1 = c.port_of(q, p)
    sp = 1 if (p1 - p0) % N_DIRS == 1 else -1
    sq = 1 if (x - q1) % N_DIRS == 1 else -1
    # p measures r against q, q measures r against p: the third corner sits
    # on opposite rotational sides of the shared edge, and the two sign
    # flips cancel.
    return sp * sq


def _orientation_from_links(side_a: LinkState, side_b: LinkState) -> EdgeOrientation:
    if side_a is OUT:
        return EdgeOrientation.CONFLICT if side_b is OUT else EdgeOrientation.A_TO_B
    return EdgeOrientation.B_TO_A if side_b is OUT else EdgeOrientation.UNDIRECTED


def local_check_r4(c: Configuration, p: Cell) -> bool:
    """Triangle rule at ``p`` computed from view_3(p) and neighbour registers.

    Agrees pointwise with the omniscient checker: the only extra knowledge
    the omniscient version uses is the labelling of the far edge of each
    triangle, which the view formula recovers.
    """
    cells = c.support.cells
    nbs = [neighbor(p, d) for d in range(N_DIRS)]
    labels: frozenset[PathLabel] | None = None
    for d in range(N_DIRS):
        q, r = nbs[d], nbs[(d + 1) % N_DIRS]
        if q not in cells or r not in cells:
            continue
        if labels is None:
            labels = build_view(c, p, VIEW_DEPTH).labels
        q_to_r, r_to_q = _infer(
            labels, c.port_of(p, r), c.port_of(p, q), c.port_of(q, p), c.port_of(r, p)
        )
        pq = _orientation_from_links(c.link_toward(p, q), c.link(q, c.port_of(q, p)))
        pr = _orientation_from_links(c.link_toward(p, r), c.link(r, c.port_of(r, p)))
        qr = _orientation_from_links(c.link(q, q_to_r), c.link(r, r_to_q))
        fwd = (
            pq is EdgeOrientation.A_TO_B
            and qr is EdgeOrientation.A_TO_B
            and pr is EdgeOrientation.B_TO_A
        )
        bwd = (
            pr is EdgeOrientation.A_TO_B
            and qr is EdgeOrientation.B_TO_A
            and pq is EdgeOrientation.B_TO_A
        )
        if fwd or bwd:
            return False
    return True

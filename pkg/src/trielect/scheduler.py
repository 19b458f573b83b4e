"""Execution drivers, termination detection and periodic-cycle analysis.

The contract surface is sequential scheduling.  Uniform random choice
among activable particles realises the required fairness: any
configuration recurring forever keeps every one-step successor reachable
with fixed positive probability, so every successor also recurs.  Round
robin and scripted drivers exist for determinism and for replaying
adversarial executions; the concurrent random-set driver is exploratory
only and takes no part in any acceptance gate.

Activability is tracked incrementally: activating a particle can change
activability only for itself and its six neighbours.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Sequence, Union

from .lattice import Cell
from .config import Configuration, EdgeOrientation
from .support import SupportError, format_shape_text
from .algorithm import ActivationEffect, activation_step, step_register
from .rules import check_r2, check_r3, check_r4, _consecutive_cyclic


# -- scheduler kinds -------------------------------------------------------------


@dataclass(frozen=True)
class RandomSequential:
    seed: int


@dataclass(frozen=True)
class RoundRobin:
    pass


@dataclass(frozen=True)
class Scripted:
    """Cyclic list of cells to activate; a non-activable entry is a no-op event."""

    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("scripted schedule must list at least one cell")


@dataclass(frozen=True)
class ConcurrentRandomSet:
    seed: int
    inclusion_probability: float = 0.5


SchedulerKind = Union[RandomSequential, RoundRobin, Scripted, ConcurrentRandomSet]


class Outcome(Enum):
    FINAL = "final"
    CAP_EXCEEDED = "cap"


@dataclass(frozen=True)
class TraceEvent:
    step: int
    activated: tuple[Cell, ...]
    effect: ActivationEffect
    post_violation_count: int | None = None


@dataclass
class ExecutionResult:
    outcome: Outcome
    config: Configuration
    steps: int
    events: list[TraceEvent] = field(default_factory=list)

    @property
    def is_final(self) -> bool:
        return self.outcome is Outcome.FINAL


class StepInvariantError(AssertionError):
    """A per-step guarantee failed; the offending configuration is attached."""

    def __init__(self, message: str, config: Configuration):
        super().__init__(message + "\n" + config.serialize())
        self.config = config


# -- helpers ----------------------------------------------------------------------


def detect_final(c: Configuration) -> bool:
    """True iff no particle's activation would change any register."""
    return not any(_is_activable(c, p) for p in c.support)


def violation_count(c: Configuration) -> int:
    """Number of particles breaking the out-degree, consecutiveness or triangle rule."""
    return sum(
        1
        for p in c.support
        if not (check_r2(c, p) and check_r3(c, p) and check_r4(c, p))
    )


def shape_hash(c: Configuration) -> str:
    text = format_shape_text(c.support.cells)
    return hashlib.sha1(text.encode()).hexdigest()[:12]


def _kind_label(kind: SchedulerKind) -> str:
    if isinstance(kind, RandomSequential):
        return f"random seed={kind.seed}"
    if isinstance(kind, RoundRobin):
        return "roundrobin"
    if isinstance(kind, Scripted):
        return f"script len={len(kind.cells)}"
    return f"concurrent seed={kind.seed} p={kind.inclusion_probability}"


# -- the driver --------------------------------------------------------------------


def run(
    c0: Configuration,
    kind: SchedulerKind,
    max_steps: int = 1_000_000,
    record_trace: bool = False,
    check_invariants: bool = False,
    trace_file: IO[str] | None = None,
) -> ExecutionResult:
    """Drive ``c0`` until final or ``max_steps`` events have been applied.

    ``check_invariants`` asserts, after every event, that the activated
    particle satisfies the three repairable rules and that the count of
    particles violating any of them never increases.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    if isinstance(kind, Scripted):
        unknown = sorted(set(kind.cells) - c0.support.cells)
        if unknown:
            raise SupportError(f"scripted cells not in the support: {unknown}")
    cells = tuple(c0.support)
    config = c0
    activable = {p: _is_activable(config, p) for p in cells}
    rng = (
        random.Random(kind.seed)
        if isinstance(kind, (RandomSequential, ConcurrentRandomSet))
        else None
    )
    rr_index = 0
    script_index = 0
    events: list[TraceEvent] = []
    prev_violations = violation_count(config) if check_invariants else None

    if trace_file is not None:
        trace_file.write(
            f"# trace shape={shape_hash(config)} scheduler={_kind_label(kind)}"
            f" cap={max_steps}\n"
        )

    def finish(final_config: Configuration, steps: int) -> ExecutionResult:
        if check_invariants:
            from .rules import is_valid, sinks

            if not is_valid(final_config) or len(sinks(final_config)) != 1:
                raise StepInvariantError(
                    "final configuration is not a valid single-sink state",
                    final_config,
                )
        return ExecutionResult(Outcome.FINAL, final_config, steps, events)

    step = 0
    while step < max_steps:
        live = [p for p in cells if activable[p]]
        if not live:
            return finish(config, step)

        if isinstance(kind, RandomSequential):
            chosen: tuple[Cell, ...] = (live[rng.randrange(len(live))],)
        elif isinstance(kind, RoundRobin):
            while not activable[cells[rr_index % len(cells)]]:
                rr_index += 1
            chosen = (cells[rr_index % len(cells)],)
            rr_index += 1
        elif isinstance(kind, Scripted):
            chosen = (kind.cells[script_index % len(kind.cells)],)
            script_index += 1
        else:
            picked = [p for p in live if rng.random() < kind.inclusion_probability]
            chosen = tuple(picked) if picked else (live[rng.randrange(len(live))],)

        if len(chosen) == 1:
            config, effect = activation_step(config, chosen[0])
        else:
            config, effect = _concurrent_step(config, chosen)
        step += 1

        touched = set(chosen)
        for p in chosen:
            touched.update(config.support.occupied_neighbors(p))
        for p in touched:
            activable[p] = _is_activable(config, p)

        post_violations = None
        if check_invariants:
            post_violations = violation_count(config)
            if len(chosen) == 1:
                p = chosen[0]
                if not (check_r2(config, p) and check_r3(config, p) and check_r4(config, p)):
                    raise StepInvariantError(
                        f"step {step}: activated particle {p} violates a repairable rule",
                        config,
                    )
                if post_violations > prev_violations:
                    raise StepInvariantError(
                        f"step {step}: violation count rose {prev_violations} -> {post_violations}",
                        config,
                    )
            prev_violations = post_violations
        elif trace_file is not None or record_trace:
            post_violations = violation_count(config)

        if record_trace or trace_file is not None:
            event = TraceEvent(step - 1, chosen, effect, post_violations)
            if record_trace:
                events.append(event)
            if trace_file is not None:
                for p in chosen:
                    trace_file.write(
                        f"{event.step} {p.q} {p.r} "
                        f"{int(effect.line1_fired)} {int(effect.line2_fired)} "
                        f"{int(effect.changed)} {post_violations}\n"
                    )

    if detect_final(config):
        return finish(config, step)
    return ExecutionResult(Outcome.CAP_EXCEEDED, config, step, events)


def _is_activable(c: Configuration, p: Cell) -> bool:
    _, effect = step_register(c, p)
    return effect.changed


def _concurrent_step(
    config: Configuration, chosen: tuple[Cell, ...]
) -> tuple[Configuration, ActivationEffect]:
    """All chosen particles read the same pre-state and write simultaneously."""
    new_regs = {}
    changed = line1 = line2 = False
    conflicts = 0
    for p in chosen:
        reg, effect = step_register(config, p)
        new_regs[p] = reg
        changed |= effect.changed
        line1 |= effect.line1_fired
        line2 |= effect.line2_fired
        conflicts += effect.conflicts_resolved
    out = config
    for p, reg in new_regs.items():
        out = out.with_register(p, reg)
    return out, ActivationEffect(changed, line1, line2, conflicts)


# -- periodic-cycle analysis ---------------------------------------------------------


Edge = tuple[Cell, Cell]


@dataclass(frozen=True)
class CycleReport:
    period: int
    stable_edges: frozenset[Edge]
    unstable_edges: frozenset[Edge]
    activated: tuple[Cell, ...]
    stable_out_violations: tuple[str, ...]
    unstable_spread_violations: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return not self.stable_out_violations and not self.unstable_spread_violations


def analyze_cycle(
    configs: Sequence[Configuration], activated: Sequence[Cell]
) -> CycleReport:
    """Classify edges of an exactly periodic window as stable or unstable.

    ``configs`` must hold period+1 configurations with the last equal to
    the first; ``activated[i]`` produced ``configs[i+1]`` from
    ``configs[i]``.  Stable edges are those never undirected inside the
    window.  Windows containing conflict edges are rejected: a conflict
    can never re-form, so it cannot live on a cycle unless frozen, and
    frozen conflicts have no stable/unstable reading.

    Two facts about such windows are checked and reported:
      - a particle with a stable outgoing edge is never activated in the
        period and all its edges are stable;
      - a particle met by an unstable edge has at least two unstable
        edges not forming one consecutive run of ports, or at least four.
    """
    if len(configs) < 2 or configs[0] != configs[-1]:
        raise ValueError("window is not an exactly periodic configuration cycle")
    if len(activated) != len(configs) - 1:
        raise ValueError("activation list does not match the window length")
    base = configs[0]
    edges = base.edges()
    orientations: dict[Edge, set[EdgeOrientation]] = {e: set() for e in edges}
    for cfg in configs[:-1]:
        for e in edges:
            o = cfg.orientation(*e)
            if o is EdgeOrientation.CONFLICT:
                raise ValueError(f"window contains a conflict edge {e}")
            orientations[e].add(o)

    stable = frozenset(
        e for e, os in orientations.items() if EdgeOrientation.UNDIRECTED not in os
    )
    unstable = frozenset(edges) - stable
    activated_cells = frozenset(activated)

    stable_out: list[str] = []
    for p in base.support:
        has_stable_out = any(
            (e in stable)
            and configs[0].orientation(p, e[1] if e[0] == p else e[0])
            is EdgeOrientation.A_TO_B
            for e in edges
            if p in e
        )
        if not has_stable_out:
            continue
        if p in activated_cells:
            stable_out.append(f"{p} has a stable outgoing edge but is activated")
        bad = [e for e in unstable if p in e]
        if bad:
            stable_out.append(f"{p} has a stable outgoing edge but unstable edges {bad}")

    spread: list[str] = []
    for p in base.support:
        ports = tuple(
            base.port_of(p, e[1] if e[0] == p else e[0]) for e in unstable if p in e
        )
        if not ports:
            continue
        if len(ports) >= 4:
            continue
        if len(ports) >= 2 and not _consecutive_cyclic(ports):
            continue
        spread.append(f"{p} has unstable edges only on ports {sorted(ports)}")

    return CycleReport(
        period=len(configs) - 1,
        stable_edges=stable,
        unstable_edges=unstable,
        activated=tuple(activated),
        stable_out_violations=tuple(stable_out),
        unstable_spread_violations=tuple(spread),
    )

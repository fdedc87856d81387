"""Deterministic event-driven simulator for asynchronous consensus under
adversarial message scheduling and Byzantine senders.

Virtual time is an integer event counter; asynchrony is modelled purely as
delivery order.  Every run is fully reproducible from its SimConfig
(including the seed): schedulers draw from a seeded generator and Byzantine
"random" values are derived from (seed, node, round) alone.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from typing import Iterable

from byztrim.digraph import Digraph, parse_graph
from byztrim.conditions import Partition
from byztrim.protocol import NodeState, RoundMessage, init_node

VALIDITY_SLACK = 1e-12


class SimulationError(RuntimeError):
    """Raised when a run cannot make progress (scheduler deadlock)."""


@dataclass(frozen=True)
class ByzantineSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params}


@dataclass(frozen=True)
class SchedulerSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params}


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one experiment: graph, faults, inputs,
    adversary, scheduler, seed and stopping rule."""

    graph: Digraph
    f: int
    fault_set: frozenset[int]
    inputs: tuple[float, ...]
    scheduler: SchedulerSpec
    byzantine: ByzantineSpec | None = None
    seed: int = 0
    max_rounds: int = 1000
    epsilon: float = 0.0

    def validate(self) -> None:
        if self.f < 0:
            raise ValueError("f must be >= 0")
        if len(self.fault_set) > self.f:
            raise ValueError(f"|fault set|={len(self.fault_set)} exceeds f={self.f}")
        if not self.fault_set <= set(self.graph.nodes):
            raise ValueError("fault set contains unknown nodes")
        if len(self.fault_set) == self.graph.n:
            raise ValueError("at least one node must be fault-free")
        if len(self.inputs) != self.graph.n:
            raise ValueError(f"need {self.graph.n} inputs, got {len(self.inputs)}")
        if self.fault_set and self.byzantine is None:
            raise ValueError("fault set given without a byzantine behavior")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "f": self.f,
            "fault_set": sorted(self.fault_set),
            "inputs": list(self.inputs),
            "scheduler": self.scheduler.to_json_dict(),
            "byzantine": self.byzantine.to_json_dict() if self.byzantine else None,
            "seed": self.seed,
            "max_rounds": self.max_rounds,
            "epsilon": self.epsilon,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json_dict(cls, d: dict) -> "SimConfig":
        byz = d.get("byzantine")
        return cls(
            graph=parse_graph(d["graph"]),
            f=d["f"],
            fault_set=frozenset(d.get("fault_set", ())),
            inputs=tuple(float(x) for x in d["inputs"]),
            scheduler=SchedulerSpec(d["scheduler"]["kind"], d["scheduler"].get("params", {})),
            byzantine=ByzantineSpec(byz["kind"], byz.get("params", {})) if byz else None,
            seed=d.get("seed", 0),
            max_rounds=d.get("max_rounds", 1000),
            epsilon=d.get("epsilon", 0.0),
        )

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class PendingMessage:
    """An in-flight message: unique sequence number plus the virtual time it
    entered the network."""

    sequence: int
    destination: int
    message: RoundMessage
    available_at: int


@dataclass(frozen=True)
class Delivery:
    virtual_time: int
    sender: int
    receiver: int
    tag: int
    value: float


@dataclass
class Trace:
    """Round-indexed value history of the fault-free nodes plus the full
    delivery log.  u_levels/mu_levels cover rounds every fault-free node has
    completed (the "common" rounds)."""

    config: SimConfig
    values: dict[int, list[float]]
    u_levels: list[float]
    mu_levels: list[float]
    deliveries: list[Delivery]
    outcome: str  # "converged" | "max-rounds-hit"
    converged_round: int | None

    @property
    def common_rounds(self) -> int:
        return len(self.u_levels) - 1

    def spread(self, t: int) -> float:
        return self.u_levels[t] - self.mu_levels[t]

    @property
    def spreads(self) -> list[float]:
        return [u - m for u, m in zip(self.u_levels, self.mu_levels)]


# ---------------------------------------------------------------------------
# Byzantine behaviors


@dataclass(frozen=True)
class BehaviorContext:
    out_neighbors: tuple[int, ...]
    seed: int


def _derived_rng(seed: int, node: int, tag: int) -> random.Random:
    mix = (
        seed * 0x9E3779B97F4A7C15 + node * 0xBF58476D1CE4E5B9 + tag * 0x94D049BB133111EB + 1
    ) & 0xFFFFFFFFFFFFFFFF
    return random.Random(mix)


def _split_values(params: dict, node: int, tag: int, ctx: BehaviorContext) -> dict[int, float]:
    m, big_m = float(params["m"]), float(params["M"])
    low = float(params.get("m_minus", m - 1.0))
    high = float(params.get("M_plus", big_m + 1.0))
    mid = (m + big_m) / 2.0
    left = set(params.get("left", ()))
    right = set(params.get("right", ()))
    out = {}
    for dest in ctx.out_neighbors:
        if dest in left:
            out[dest] = low
        elif dest in right:
            out[dest] = high
        else:
            out[dest] = mid
    return out


def _identical_wrong_values(params: dict, node: int, tag: int, ctx: BehaviorContext) -> dict[int, float]:
    value = float(params["value"])
    return {dest: value for dest in ctx.out_neighbors}


def _random_values(params: dict, node: int, tag: int, ctx: BehaviorContext) -> dict[int, float]:
    low = float(params.get("low", 0.0))
    high = float(params.get("high", 1.0))
    rng = _derived_rng(ctx.seed, node, tag)
    return {dest: rng.uniform(low, high) for dest in ctx.out_neighbors}


def _silent_values(params: dict, node: int, tag: int, ctx: BehaviorContext) -> dict[int, float]:
    return {}


_BEHAVIORS = {
    "split": _split_values,
    "identical-wrong": _identical_wrong_values,
    "random": _random_values,
    "silent": _silent_values,
}


def byzantine_values(
    behavior: ByzantineSpec, node: int, round_tag: int, context: BehaviorContext
) -> dict[int, float]:
    """Per-out-edge values a faulty node sends for one round tag.

    Behaviors: "split" (below-range to the left side, above-range to the
    right side, mid-range elsewhere), "identical-wrong" (one arbitrary value
    to all), "random" (seeded uniform draws), "silent" (no messages).
    """
    try:
        fn = _BEHAVIORS[behavior.kind]
    except KeyError:
        raise ValueError(f"unknown byzantine behavior {behavior.kind!r}") from None
    return fn(behavior.params, node, round_tag, context)


# ---------------------------------------------------------------------------
# Schedulers


class RandomScheduler:
    """Uniform out-of-order delivery among all pending messages."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def select(self, pending: list[PendingMessage], rounds: dict[int, int]) -> int:
        return self.rng.randrange(len(pending))


class FifoScheduler:
    """Random delivery, but per-link in order (lowest sequence per link first)."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def select(self, pending: list[PendingMessage], rounds: dict[int, int]) -> int:
        heads: dict[tuple[int, int], int] = {}
        for idx, pm in enumerate(pending):
            link = (pm.message.sender, pm.destination)
            if link not in heads or pm.sequence < pending[heads[link]].sequence:
                heads[link] = idx
        candidates = sorted(heads.values(), key=lambda i: pending[i].sequence)
        return candidates[self.rng.randrange(len(candidates))]


class SynchronousScheduler:
    """Deliver all messages of a round tag before any later tag (plumbing for
    lockstep sanity runs; pair with SimConfig scheduler kind "synchronous",
    which also makes nodes wait for every in-edge)."""

    def select(self, pending: list[PendingMessage], rounds: dict[int, int]) -> int:
        best = min(range(len(pending)), key=lambda i: (pending[i].message.tag, pending[i].sequence))
        return best


class AdaptiveDelayScheduler:
    """The necessity-proof adversary: for each fault-free node on the left
    (resp. right) side, the messages from a fixed set of min(f, |cross|)
    cross-side senders are withheld until the receiver completes the round
    that could have used them, then released (and discarded as stale).  All
    delays stay finite."""

    def __init__(self, g: Digraph, f: int, left: Iterable[int], center: Iterable[int], right: Iterable[int]):
        left, center, right = set(left), set(center), set(right)
        self.withheld: dict[int, frozenset[int]] = {}
        for v in sorted(left):
            cross = sorted(g.in_nbrs[v] & (center | right))
            self.withheld[v] = frozenset(cross[: min(f, len(cross))])
        for v in sorted(right):
            cross = sorted(g.in_nbrs[v] & (left | center))
            self.withheld[v] = frozenset(cross[: min(f, len(cross))])

    def _held(self, pm: PendingMessage, rounds: dict[int, int]) -> bool:
        senders = self.withheld.get(pm.destination)
        if not senders or pm.message.sender not in senders:
            return False
        # Held while the receiver could still use the tag (round <= tag+1).
        return rounds[pm.destination] <= pm.message.tag + 1

    def select(self, pending: list[PendingMessage], rounds: dict[int, int]) -> int:
        best = -1
        for idx, pm in enumerate(pending):
            if self._held(pm, rounds):
                continue
            if best < 0 or pm.sequence < pending[best].sequence:
                best = idx
        if best < 0:
            raise SimulationError("scheduler deadlock: every pending message is withheld")
        return best


def make_scheduler(config: SimConfig):
    spec = config.scheduler
    if spec.kind == "random":
        return RandomScheduler(config.seed)
    if spec.kind == "fifo":
        return FifoScheduler(config.seed)
    if spec.kind == "synchronous":
        return SynchronousScheduler()
    if spec.kind == "adaptive-delay":
        p = spec.params
        return AdaptiveDelayScheduler(
            config.graph, config.f, p.get("left", ()), p.get("center", ()), p.get("right", ())
        )
    raise ValueError(f"unknown scheduler {spec.kind!r}")


# ---------------------------------------------------------------------------
# Event loop


def run_simulation(config: SimConfig) -> Trace:
    """Drive every node's transmit/receive/update cycle under the configured
    scheduler until the fault-free spread falls to epsilon or every
    fault-free node completes max_rounds."""
    config.validate()
    g, f = config.graph, config.f
    require_all = config.scheduler.kind == "synchronous"
    fault_free = [v for v in g.nodes if v not in config.fault_set]
    states: dict[int, NodeState] = {
        v: init_node(v, config.inputs[v], g, f, require_all=require_all) for v in g.nodes
    }
    rounds = {v: states[v].round for v in g.nodes}
    values: dict[int, list[float]] = {v: [states[v].value] for v in fault_free}
    deliveries: list[Delivery] = []
    pending: list[PendingMessage] = []
    scheduler = make_scheduler(config)
    seq = 0
    vt = 0

    def emit(v: int) -> None:
        nonlocal seq
        st = states[v]
        if v in config.fault_set:
            ctx = BehaviorContext(st.out_nbrs, config.seed)
            assert config.byzantine is not None
            per_dest = byzantine_values(config.byzantine, v, st.round - 1, ctx)
            outgoing = [
                (dest, RoundMessage(v, st.round - 1, per_dest[dest]))
                for dest in st.out_nbrs
                if dest in per_dest
            ]
        else:
            outgoing = st.outgoing_messages()
        for dest, msg in outgoing:
            pending.append(PendingMessage(seq, dest, msg, vt))
            seq += 1

    u_levels = [max(values[v][0] for v in fault_free)]
    mu_levels = [min(values[v][0] for v in fault_free)]
    outcome: str | None = None
    converged_round: int | None = None
    if u_levels[0] - mu_levels[0] <= config.epsilon:
        outcome, converged_round = "converged", 0

    def advance_common_metrics() -> None:
        nonlocal outcome, converged_round
        common = min(len(values[v]) - 1 for v in fault_free)
        while len(u_levels) - 1 < common and outcome is None:
            t = len(u_levels)
            u_levels.append(max(values[v][t] for v in fault_free))
            mu_levels.append(min(values[v][t] for v in fault_free))
            if u_levels[t] - mu_levels[t] <= config.epsilon:
                outcome, converged_round = "converged", t
            elif t >= config.max_rounds:
                outcome = "max-rounds-hit"

    def advance_faulty(st: NodeState) -> None:
        # Faulty nodes only pace rounds; their internal value is never used
        # (outgoing values come from the behavior), so no update rule runs.
        st.round += 1
        for old in [t for t in st.buffer if t < st.round - 1]:
            del st.buffer[old]

    def process_ready(v: int) -> None:
        st = states[v]
        while outcome is None and st.round <= config.max_rounds and st.round_ready():
            if v in config.fault_set:
                advance_faulty(st)
            else:
                st.apply_update()
            rounds[v] = st.round
            if v not in config.fault_set:
                values[v].append(st.value)
                advance_common_metrics()
            if outcome is None and st.round <= config.max_rounds:
                emit(v)

    if outcome is None:
        for v in sorted(g.nodes):
            emit(v)
        for v in sorted(g.nodes):
            process_ready(v)

    while outcome is None:
        if not pending:
            raise SimulationError("no pending messages but the run is not finished")
        idx = scheduler.select(pending, rounds)
        pm = pending.pop(idx)
        vt += 1
        deliveries.append(
            Delivery(vt, pm.message.sender, pm.destination, pm.message.tag, pm.message.value)
        )
        states[pm.destination].ingest_message(pm.message)
        process_ready(pm.destination)

    return Trace(
        config=config,
        values=values,
        u_levels=u_levels,
        mu_levels=mu_levels,
        deliveries=deliveries,
        outcome=outcome,
        converged_round=converged_round,
    )


# ---------------------------------------------------------------------------
# Attack construction


def build_attack_config(
    g: Digraph,
    f: int,
    partition: Partition,
    m: float,
    big_m: float,
    max_rounds: int = 1000,
    seed: int = 0,
) -> SimConfig:
    """Instantiate the convergence-blocking attack for a violating partition:
    left side starts at m, right side at M, faulty nodes split-send out-of-range
    values per side, and the adaptive scheduler starves each side of enough
    cross-traffic that trimming removes the rest.  On a genuinely violating
    partition the two sides then never move."""
    if m >= big_m:
        raise ValueError(f"need m < M, got m={m}, M={big_m}")
    partition.check_covers(g)
    if len(partition.faulty) > f:
        raise ValueError("partition fault set larger than f")
    if not partition.left or not partition.right:
        raise ValueError("partition must have non-empty left and right sides")
    r = 2 * f + 1
    for v in sorted(partition.left):
        if len(g.in_nbrs[v] & (partition.center | partition.right)) >= r:
            raise ValueError(f"partition does not violate the condition: left node {v} has >= {r} cross in-edges")
    for v in sorted(partition.right):
        if len(g.in_nbrs[v] & (partition.left | partition.center)) >= r:
            raise ValueError(f"partition does not violate the condition: right node {v} has >= {r} cross in-edges")
    mid = (m + big_m) / 2.0
    inputs = []
    for v in g.nodes:
        if v in partition.left:
            inputs.append(float(m))
        elif v in partition.right:
            inputs.append(float(big_m))
        else:
            inputs.append(mid)
    sides = {
        "left": sorted(partition.left),
        "center": sorted(partition.center),
        "right": sorted(partition.right),
    }
    return SimConfig(
        graph=g,
        f=f,
        fault_set=partition.faulty,
        inputs=tuple(inputs),
        scheduler=SchedulerSpec("adaptive-delay", dict(sides)),
        byzantine=ByzantineSpec(
            "split",
            {"m": m, "M": big_m, "m_minus": m - 1.0, "M_plus": big_m + 1.0, **sides},
        )
        if partition.faulty
        else None,
        seed=seed,
        max_rounds=max_rounds,
        epsilon=0.0,
    )


# ---------------------------------------------------------------------------
# Metrics and CSV export


@dataclass(frozen=True)
class TraceMetrics:
    u_levels: tuple[float, ...]
    mu_levels: tuple[float, ...]
    spreads: tuple[float, ...]
    first_converged_round: int | None
    validity_per_round: tuple[bool, ...]  # index t checks round t against t-1

    @property
    def all_valid(self) -> bool:
        return all(self.validity_per_round)

    def to_json_dict(self) -> dict:
        return {
            "rounds": len(self.spreads) - 1,
            "initial_spread": self.spreads[0],
            "final_spread": self.spreads[-1],
            "first_converged_round": self.first_converged_round,
            "validity_ok": self.all_valid,
        }


def trace_metrics(trace: Trace, epsilon: float | None = None) -> TraceMetrics:
    """Per-round maximum/minimum/spread over fault-free nodes, the first
    round at or below epsilon, and per-round validity checks."""
    eps = trace.config.epsilon if epsilon is None else epsilon
    u, mu = trace.u_levels, trace.mu_levels
    spreads = [a - b for a, b in zip(u, mu)]
    first = next((t for t, s in enumerate(spreads) if s <= eps), None)
    validity = [True]
    for t in range(1, len(u)):
        validity.append(
            mu[t] >= mu[t - 1] - VALIDITY_SLACK and u[t] <= u[t - 1] + VALIDITY_SLACK
        )
    return TraceMetrics(tuple(u), tuple(mu), tuple(spreads), first, tuple(validity))


def write_trace_csv(trace: Trace, path: str) -> None:
    """Value history as CSV rows (round, nodeId, value), fault-free nodes only."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "nodeId", "value"])
        max_len = max(len(vs) for vs in trace.values.values())
        for t in range(max_len):
            for v in sorted(trace.values):
                if t < len(trace.values[v]):
                    w.writerow([t, v, repr(trace.values[v][t])])


def write_metrics_csv(trace: Trace, path: str) -> None:
    """Companion CSV (round, U, mu, spread) over the common rounds."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "U", "mu", "spread"])
        for t in range(len(trace.u_levels)):
            w.writerow([t, repr(trace.u_levels[t]), repr(trace.mu_levels[t]), repr(trace.spread(t))])


def read_trace_csv(path: str) -> dict[int, list[float]]:
    """Load a values CSV back into {node: [v[0], v[1], ...]}."""
    values: dict[int, dict[int, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            values.setdefault(int(row["nodeId"]), {})[int(row["round"])] = float(row["value"])
    out = {}
    for node, by_round in values.items():
        seq = [by_round[t] for t in sorted(by_round)]
        if sorted(by_round) != list(range(len(seq))):
            raise ValueError(f"trace rounds for node {node} are not contiguous")
        out[node] = seq
    return out

"""Per-node state machine for asynchronous iterative trim-and-average
consensus.

Each node progresses in locally-numbered rounds.  In round t it transmits
its current value tagged t-1, waits for tagged values on all but f incoming
edges, discards the f smallest and f largest, and averages the survivors
together with its own value at equal weight 1/(|in-neighbours|+1-3f).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from byztrim.digraph import Digraph


class ProtocolError(ValueError):
    """Raised on protocol-rule violations (bad sender, degree too small, ...)."""


@dataclass(frozen=True)
class RoundMessage:
    """A value announcement tagged with the round index it belongs to."""

    sender: int
    tag: int
    value: float

    def __post_init__(self):
        if self.tag < 0:
            raise ProtocolError(f"message tag must be >= 0, got {self.tag}")


class NodeState:
    """Mutable single-owner state of one consensus node.

    The buffer keeps the first value received per (sender, tag); messages
    tagged below the round in progress are discarded as stale, later tags
    are held for future rounds.
    """

    __slots__ = ("id", "value", "round", "f", "in_nbrs", "out_nbrs", "require_all", "buffer")

    def __init__(self, node_id: int, value: float, g: Digraph, f: int, require_all: bool = False):
        if not 0 <= node_id < g.n:
            raise ProtocolError(f"node id {node_id} out of range for n={g.n}")
        if f < 0:
            raise ProtocolError("f must be >= 0")
        self.id = node_id
        self.value = float(value)
        self.round = 1
        self.f = f
        self.in_nbrs = g.in_nbrs[node_id]
        self.out_nbrs = tuple(sorted(g.out_nbrs[node_id]))
        self.require_all = require_all
        # tag -> {sender: value}, insertion-ordered per tag (= arrival order)
        self.buffer: dict[int, dict[int, float]] = {}

    @property
    def expected_count(self) -> int:
        """Messages needed per round: all but f in-edges (all of them when
        emulating a synchronous execution)."""
        if self.require_all:
            return len(self.in_nbrs)
        return len(self.in_nbrs) - self.f

    def outgoing_messages(self) -> list[tuple[int, RoundMessage]]:
        """Round-opening transmissions: current value, tagged round-1, to
        every out-neighbour (no self-message; the own value joins the update
        directly)."""
        msg = RoundMessage(self.id, self.round - 1, self.value)
        return [(dest, msg) for dest in self.out_nbrs]

    def ingest_message(self, m: RoundMessage) -> bool:
        """Buffer a received message.  Returns True if stored, False if the
        message was stale or a duplicate for its (sender, tag) slot."""
        if m.sender not in self.in_nbrs:
            raise ProtocolError(f"node {self.id} got message from non-neighbour {m.sender}")
        if m.tag < self.round - 1:
            return False
        slot = self.buffer.setdefault(m.tag, {})
        if m.sender in slot:
            return False
        slot[m.sender] = m.value
        return True

    def round_ready(self) -> bool:
        """True once enough distinct senders delivered the tag this round waits on."""
        return len(self.buffer.get(self.round - 1, ())) >= self.expected_count

    def apply_update(self) -> float:
        """Run the trim-and-average update, advance to the next round and
        return the new value.

        Exactly `expected_count` buffered values are used (first arrivals
        win); they are sorted by (value, sender id), the f smallest and f
        largest dropped, and the rest averaged with the own value at weight
        1/(kept+1).
        """
        if not self.round_ready():
            raise ProtocolError(f"node {self.id} not ready for round {self.round}")
        if self.f > 0 and not self.require_all and len(self.in_nbrs) < 3 * self.f + 1:
            raise ProtocolError(
                f"node {self.id} has in-degree {len(self.in_nbrs)} < 3f+1={3 * self.f + 1}"
            )
        tag = self.round - 1
        arrivals = list(self.buffer[tag].items())[: self.expected_count]
        arrivals.sort(key=lambda sv: (sv[1], sv[0]))
        kept = arrivals[self.f : len(arrivals) - self.f]
        if not kept:
            raise ProtocolError(
                f"node {self.id}: trimming 2f={2 * self.f} values leaves nothing to average"
            )
        total = self.value
        for _, w in kept:
            total += w
        self.value = total / (len(kept) + 1)
        self.round += 1
        for old in [t for t in self.buffer if t < self.round - 1]:
            del self.buffer[old]
        return self.value


def init_node(node_id: int, value: float, g: Digraph, f: int, require_all: bool = False) -> NodeState:
    """Fresh node state: stored input, round 1 in progress, empty buffer."""
    return NodeState(node_id, value, g, f, require_all=require_all)


def compute_alpha(g: Digraph, f: int) -> Fraction:
    """Minimum self-inclusive averaging weight over all nodes, exactly.

    Every node averages |in|+1-3f values at equal weight, so the minimum
    weight is the unit fraction 1/(max in-degree + 1 - 3f).
    """
    if f < 0:
        raise ProtocolError("f must be >= 0")
    if g.n == 0:
        raise ProtocolError("empty graph")
    degrees = [len(g.in_nbrs[v]) for v in g.nodes]
    if f > 0 and min(degrees) < 3 * f + 1:
        bad = min(range(g.n), key=lambda v: len(g.in_nbrs[v]))
        raise ProtocolError(
            f"node {bad} has in-degree {len(g.in_nbrs[bad])} < 3f+1={3 * f + 1}"
        )
    return Fraction(1, max(degrees) + 1 - 3 * f)

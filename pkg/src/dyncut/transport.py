"""Pluggable transport cost model for the bulk-synchronous engine.

``InProcessTransport`` models shared memory: everything is free.
``SimulatedNetworkTransport`` assigns subgraphs to machines and charges
modeled latency plus byte-proportional time for every cross-machine message:
per-iteration coordination traffic, full subgraph serialization when a merge
pulls a subgraph onto another machine, and only the swept band when a
boundary is adjusted instead.  Counters are monotone; delivery is reliable
and ordered, so no payloads are actually queued, only accounted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

BYTES_PER_LABEL = 1
BYTES_PER_DELTA = 24


@dataclass
class InProcessTransport:
    """Shared-memory model: zero modeled time, zero bytes."""

    modeled_time: float = 0.0
    modeled_bytes: int = 0
    messages: int = 0

    def assign_machines(self, n_subgraphs: int) -> None:
        pass

    def machine_of(self, subgraph_index: int) -> int:
        return 0

    def on_labels(self, pair, n_overlap: int) -> None:
        pass

    def on_deltas(self, pair, n_deltas: int) -> None:
        pass

    def on_merge(self, group, sizes: list[int], index_map) -> None:
        pass

    def on_adjust(self, pair, band_bytes: int) -> None:
        pass


@dataclass
class SimulatedNetworkTransport:
    """Latency + bandwidth accounting over a fixed machine grid."""

    n_machines: int = 2
    latency: float = 1e-4          # seconds per message
    bytes_per_sec: float = 1e9
    modeled_time: float = 0.0
    modeled_bytes: int = 0
    messages: int = 0
    _machine: list[int] = field(default_factory=list)

    def assign_machines(self, n_subgraphs: int) -> None:
        self._machine = [min(k * self.n_machines // n_subgraphs,
                             self.n_machines - 1)
                         for k in range(n_subgraphs)]

    def machine_of(self, subgraph_index: int) -> int:
        return self._machine[subgraph_index]

    def _send(self, n_bytes: int) -> None:
        self.messages += 1
        self.modeled_bytes += n_bytes
        self.modeled_time += self.latency + n_bytes / self.bytes_per_sec

    def on_labels(self, pair, n_overlap: int) -> None:
        """Per-iteration label exchange across one overlap (both ways)."""
        a, b = pair
        if self._machine[a] == self._machine[b]:
            return
        self._send(n_overlap * BYTES_PER_LABEL)
        self._send(n_overlap * BYTES_PER_LABEL)

    def on_deltas(self, pair, n_deltas: int) -> None:
        """Dual-step exchange for the disagreeing vertices of one overlap."""
        a, b = pair
        if self._machine[a] == self._machine[b] or not n_deltas:
            return
        self._send(n_deltas * BYTES_PER_DELTA)
        self._send(n_deltas * BYTES_PER_DELTA)

    def on_merge(self, group, sizes: list[int], index_map) -> None:
        """Members move to the first member's machine; movers pay full size."""
        group = sorted(group)
        host = self._machine[group[0]]
        for k, size in zip(group, sizes):
            if self._machine[k] != host:
                self._send(size)
        n_new = max(index_map.values()) + 1
        new_machine = [0] * n_new
        group_set = set(group)
        for old, new in index_map.items():
            new_machine[new] = host if old in group_set else self._machine[old]
        self._machine = new_machine

    def on_adjust(self, pair, band_bytes: int) -> None:
        a, b = pair
        if self._machine[a] == self._machine[b]:
            return
        self._send(band_bytes)
        self._send(band_bytes)

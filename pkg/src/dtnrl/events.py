"""Time-ordered event list with deterministic tie-breaking."""

import heapq
import itertools


class EventQueue:
    """Priority queue of ``(time, seq, kind, payload)`` entries.

    Events at equal times pop in insertion order.
    """

    def __init__(self):
        self._heap = []
        self._seq = itertools.count()

    def __len__(self):
        return len(self._heap)

    def push(self, time, kind, payload=None):
        heapq.heappush(self._heap, (time, next(self._seq), kind, payload))

    def peek_time(self):
        return self._heap[0][0] if self._heap else float("inf")

    def pop(self):
        time, _, kind, payload = heapq.heappop(self._heap)
        return time, kind, payload

    def clear(self):
        self._heap.clear()

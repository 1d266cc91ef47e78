"""Quantum networks as hypergraphs: parties are vertices, sources are hyperedges."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

Hyperedge = tuple[int, ...]


@dataclass(frozen=True)
class Network:
    """Hypergraph ``G(V, E)`` with ``n_parties`` vertices.

    Hyperedges are stored as sorted tuples and the edge list itself is kept
    in canonical (sorted) order, so two networks with the same sources
    compare equal regardless of input order.
    """

    n_parties: int
    sources: tuple[Hyperedge, ...]

    def __post_init__(self):
        n = int(self.n_parties)
        if n < 1:
            raise ValueError("a network needs at least one party")
        canon = []
        for e in self.sources:
            e = tuple(sorted(int(i) for i in e))
            if not e:
                raise ValueError("empty hyperedge")
            if len(set(e)) != len(e):
                raise ValueError(f"hyperedge {e} repeats a party")
            if e[0] < 0 or e[-1] >= n:
                raise ValueError(f"hyperedge {e} references a party outside 0..{n - 1}")
            canon.append(e)
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate hyperedges")
        covered = {i for e in canon for i in e}
        missing = sorted(set(range(n)) - covered)
        if missing:
            raise ValueError(f"parties {missing} are not covered by any source")
        object.__setattr__(self, "n_parties", n)
        object.__setattr__(self, "sources", tuple(sorted(canon)))

    def to_dict(self) -> dict:
        return {"parties": self.n_parties, "sources": [list(e) for e in self.sources]}

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        return cls(int(data["parties"]), tuple(tuple(e) for e in data["sources"]))

    def sources_of(self, party: int) -> tuple[Hyperedge, ...]:
        return tuple(e for e in self.sources if party in e)


def triangle() -> Network:
    return Network(3, ((0, 1), (1, 2), (0, 2)))


def cycle(n: int) -> Network:
    """Ring of ``n`` bipartite sources; ``cycle(4)`` is the square network."""
    if n < 3:
        raise ValueError("a cycle needs at least 3 parties")
    return Network(n, tuple((i, (i + 1) % n) for i in range(n)))


def star(n_leaves: int) -> Network:
    """Central party 0 sharing one bipartite source with each leaf."""
    return Network(n_leaves + 1, tuple((0, i) for i in range(1, n_leaves + 1)))


def sliding_window(n: int, k: int) -> Network:
    """Ring of ``n`` parties with a ``k``-party source on every window of ``k`` neighbours."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if k == n:
        return Network(n, (tuple(range(n)),))
    return Network(n, tuple(tuple((i + j) % n for j in range(k)) for i in range(n)))


def _check_party(g: Network, i: int) -> None:
    if not 0 <= i < g.n_parties:
        raise IndexError(f"party {i} out of range for a {g.n_parties}-party network")


def sources_covering(g: Network, i: int, j: int) -> tuple[Hyperedge, ...]:
    """All sources containing both ``i`` and ``j`` (the set C_ij)."""
    _check_party(g, i)
    _check_party(g, j)
    if i == j:
        raise ValueError("sources_covering needs two distinct parties")
    return tuple(e for e in g.sources if i in e and j in e)


def max_source_size(g: Network) -> int:
    return max(len(e) for e in g.sources)


def row_offsets(sizes: Sequence[int]) -> list[int]:
    out = [0]
    for m in sizes:
        out.append(out[-1] + int(m))
    return out


def block_projector_indices(g: Network, sizes, e: Iterable[int]) -> list[int]:
    """Covariance rows belonging to the parties of source ``e``.

    ``sizes`` is either a per-party list of measurement counts or any object
    with a ``sizes`` attribute (e.g. a ``MeasurementCollection``).
    """
    sizes = list(getattr(sizes, "sizes", sizes))
    if len(sizes) != g.n_parties:
        raise ValueError(
            f"measurement collection has {len(sizes)} parties, network has {g.n_parties}"
        )
    e = tuple(sorted(e))
    if e not in g.sources:
        raise ValueError(f"{e} is not a source of the network")
    off = row_offsets(sizes)
    return [r for i in e for r in range(off[i], off[i + 1])]


def pairs_within(e: Hyperedge) -> list[tuple[int, int]]:
    return list(combinations(e, 2))


def count_sources_by_size(g: Network) -> dict[int, int]:
    out: dict[int, int] = {}
    for e in g.sources:
        out[len(e)] = out.get(len(e), 0) + 1
    return out

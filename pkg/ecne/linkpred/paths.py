import random
from dataclasses import dataclass, field

import numpy as np

from ..utils import derive_seed

DEFAULT_LENGTHS = (3, 4)
DEFAULT_MAX_PATHS = 100


@dataclass(frozen=True)
class PathSample:
    """
    Simple path of exact length l between its first and last node.

    :param nodes: The l + 1 node ids, first u and last v
    :param edges: The l edge ids, edge t joins nodes t and t + 1
    """
    nodes: tuple
    edges: tuple

    @property
    def u(self):
        return self.nodes[0]

    @property
    def v(self):
        return self.nodes[-1]

    def __len__(self):
        return len(self.edges)


@dataclass
class PathBundle:
    """
    Evidence for one candidate pair: for every path length, up to `max_paths` distinct paths sorted by node
    sequence.
    """
    u: int
    v: int
    paths: dict = field(default_factory=dict)

    @property
    def lengths(self):
        return tuple(sorted(self.paths))

    def edge_array(self, length):
        """ Edge ids of the paths of one length, shape (paths, length) """
        return np.array([p.edges for p in self.paths.get(length, ())], dtype=np.int64).reshape(-1, length)

    def edge_ids(self):
        """ Every edge id referenced by the bundle """
        return {e for ps in self.paths.values() for p in ps for e in p.edges}


def _simple_paths(nbrs, u, v, l):
    """ Depth-first enumeration of the simple u-v paths with exactly l edges, as node tuples """
    on_path = {u}

    def extend(path, remaining):
        x = path[-1]
        if remaining == 1:
            if v in nbrs[x]:
                yield path + (v,)
            return
        if remaining == 2:
            for w in sorted(nbrs[x] & nbrs[v]):
                if w not in on_path:
                    yield path + (w, v)
            return
        for w in sorted(nbrs[x]):
            if w == v or w in on_path:
                continue
            on_path.add(w)
            yield from extend(path + (w,), remaining - 1)
            on_path.discard(w)

    yield from extend((u,), l)


def find_paths(g, u, v, l, max_paths=DEFAULT_MAX_PATHS, seed=1):
    """
    Simple paths of exactly `l` edges between `u` and `v`. When more than `max_paths` exist a uniform sample
    of `max_paths` is drawn by reservoir sampling seeded by `seed`. The direct edge is never returned:
    `l == 1` yields no path.

    :raises ValueError: `l` < 1 or `u` == `v`

    :return: Paths sorted by node sequence
    :rtype: `list` of :class:`PathSample`
    """
    if l < 1:
        raise ValueError("Path length must be >= 1, got {}".format(l))
    if u == v:
        raise ValueError("Paths need two distinct endpoints, got {} twice".format(u))
    if max_paths < 1:
        raise ValueError("max_paths must be >= 1, got {}".format(max_paths))
    if l == 1:
        return []

    rng = random.Random(seed)
    reservoir = []
    for seen, nodes in enumerate(_simple_paths(g.neighbor_sets(), u, v, l)):
        if seen < max_paths:
            reservoir.append(nodes)
        else:
            j = rng.randrange(seen + 1)
            if j < max_paths:
                reservoir[j] = nodes

    lookup = g.edge_lookup()
    samples = []
    for nodes in sorted(reservoir):
        edges = tuple(lookup[(a, b) if a < b else (b, a)] for a, b in zip(nodes[:-1], nodes[1:]))
        samples.append(PathSample(nodes=nodes, edges=edges))
    return samples


def build_bundle(g, u, v, lengths=DEFAULT_LENGTHS, max_paths=DEFAULT_MAX_PATHS, seed=1):
    """
    :func:`find_paths` for every length, each with its own seed derived from (seed, u, v, length).
    """
    paths = {l: find_paths(g, u, v, l, max_paths=max_paths, seed=derive_seed(seed, u, v, l)) for l in lengths}
    return PathBundle(u=int(u), v=int(v), paths=paths)

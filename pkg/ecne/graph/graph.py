import io

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ..exceptions import EdgeListError
from ..formatter import getLogger

logger = getLogger(__name__)


class Graph:
    """
    Immutable undirected simple graph over dense node ids 0..node_count-1.

    Edges are stored canonically, min endpoint first, sorted lexicographically, so that an edge id is simply the
    row index into :attr:`edges`. Adjacency is kept in CSR form: for every node its neighbors are sorted and
    aligned with the id of the edge joining them, which gives O(log deg) membership queries.

    :param node_count: Number of nodes, ids are 0..node_count-1
    :type node_count: `int`
    :param edges: Canonical edges, shape (m, 2), unique rows with u < v, lexsorted
    :type edges: `numpy.ndarray`
    :param labels: Raw label of every node as found in the input file, defaults to the str of the node ids
    :type labels: `list` of `str`, optional
    """

    def __init__(self, node_count, edges, labels=None):
        edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
        if node_count < 0:
            raise ValueError("node_count must be >= 0, got {}".format(node_count))
        if len(edges):
            if edges.min() < 0 or edges.max() >= node_count:
                raise ValueError("Edge endpoints out of range [0, {})".format(node_count))
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("Edges must be canonical (u < v) and without self-loops")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            if np.any(order != np.arange(len(edges))):
                raise ValueError("Edges must be sorted in canonical order")
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("Duplicate edges are not allowed")
        if labels is None:
            labels = [str(i) for i in range(node_count)]
        if len(labels) != node_count:
            raise ValueError("Got {} labels for {} nodes".format(len(labels), node_count))

        self.node_count = int(node_count)
        self.edges = edges
        self.edges.setflags(write=False)
        self.labels = list(labels)
        self._neighbor_sets = None
        self._edge_lookup = None
        self._build_adjacency()

    @classmethod
    def from_pairs(cls, node_count, pairs, labels=None):
        """
        Build a graph from arbitrary node pairs: canonicalizes, deduplicates and rejects self-loops.
        """
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise ValueError("Self-loops are not allowed in a simple graph")
        canon = np.sort(pairs, axis=1)
        if len(canon):
            canon = np.unique(canon, axis=0)
        return cls(node_count, canon, labels=labels)

    def _build_adjacency(self):
        m = len(self.edges)
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        self._neighbors = dst[order]
        self._incident = eid[order]
        counts = np.bincount(src, minlength=self.node_count)
        self._indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(counts, out=self._indptr[1:])
        for arr in (self._neighbors, self._incident, self._indptr):
            arr.setflags(write=False)

    @property
    def edge_count(self):
        return len(self.edges)

    @property
    def indptr(self):
        return self._indptr

    def _check_node(self, v):
        if not 0 <= v < self.node_count:
            raise IndexError("Node id {} out of range [0, {})".format(v, self.node_count))

    def degree(self, v):
        self._check_node(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def degrees(self):
        return np.diff(self._indptr)

    def neighbors(self, v):
        """ Sorted neighbors of `v` """
        self._check_node(v)
        return self._neighbors[self._indptr[v]:self._indptr[v + 1]]

    def incident_edges(self, v):
        """ Edge ids incident to `v`, aligned with :meth:`neighbors` """
        self._check_node(v)
        return self._incident[self._indptr[v]:self._indptr[v + 1]]

    def neighbor_sets(self):
        """ Neighbors of every node as python sets, built once """
        if self._neighbor_sets is None:
            self._neighbor_sets = [frozenset(self._neighbors[a:b].tolist())
                                   for a, b in zip(self._indptr[:-1].tolist(), self._indptr[1:].tolist())]
        return self._neighbor_sets

    def edge_lookup(self):
        """ Canonical (u, v) -> edge id, built once """
        if self._edge_lookup is None:
            self._edge_lookup = {(u, v): e for e, (u, v) in enumerate(self.edges.tolist())}
        return self._edge_lookup

    def edge_id(self, u, v):
        """
        :raises KeyError: if (u, v) is not an edge
        """
        nbrs = self.neighbors(u)
        self._check_node(v)
        pos = np.searchsorted(nbrs, v)
        if pos < len(nbrs) and nbrs[pos] == v:
            return int(self._incident[self._indptr[u] + pos])
        raise KeyError((u, v))

    def has_edge(self, u, v):
        try:
            self.edge_id(u, v)
        except KeyError:
            return False
        return True

    def edge_name(self, e):
        u, v = self.edges[e]
        return "{}_{}".format(u, v)

    def edge_names(self):
        return ["{}_{}".format(u, v) for u, v in self.edges.tolist()]

    def adjacency(self):
        """ Symmetric unit-weight adjacency as a scipy CSR matrix """
        return sparse.csr_matrix(
            (np.ones(len(self._neighbors)), self._neighbors, self._indptr),
            shape=(self.node_count, self.node_count))

    def without_edges(self, edge_ids):
        """
        Same nodes and labels, the given edges removed. Remaining edges keep canonical order and get
        re-densified ids.
        """
        mask = np.ones(self.edge_count, dtype=bool)
        mask[np.asarray(edge_ids, dtype=np.int64)] = False
        return Graph(self.node_count, self.edges[mask], labels=self.labels)

    def __repr__(self):
        return "Graph(nodes={}, edges={})".format(self.node_count, self.edge_count)


def _iter_lines(source):
    if isinstance(source, io.TextIOBase):
        yield from source
        return
    # decoded line by line so that a bad byte is reported on its own line
    with open(source, 'rb') as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                yield raw.decode('utf-8')
            except UnicodeDecodeError as e:
                raise EdgeListError("not valid UTF-8 text ({})".format(e.reason), source, line_number) from e


def load_edge_list(path):
    """
    Load an undirected edge list. Lines starting with '#' and blank lines are skipped, the first two
    whitespace separated tokens of every other line are the node labels. Labels are remapped to dense
    node ids in order of first appearance, duplicates and reversed duplicates collapse to one edge and
    self-loops are dropped. A label seen only in self-loops creates no node, so writing the graph back and
    reloading it gives the same graph.

    :param path: Path of the edge list, or an open text stream
    :type path: `str` or `os.PathLike`

    :raises FileNotFoundError: missing file
    :raises EdgeListError: malformed or undecodable line (with its line number) or no edge at all

    :return: The loaded graph
    :rtype: :class:`Graph`
    """
    name = getattr(path, 'name', path)
    label_to_id = {}
    pairs = []
    self_loops = 0
    extra_columns = 0
    for line_number, line in enumerate(_iter_lines(path), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise EdgeListError("expected two node labels, got '{}'".format(line), name, line_number)
        if len(tokens) > 2:
            extra_columns += 1
        if tokens[0] == tokens[1]:
            self_loops += 1
            continue
        u = label_to_id.setdefault(tokens[0], len(label_to_id))
        v = label_to_id.setdefault(tokens[1], len(label_to_id))
        pairs.append((u, v))

    if extra_columns:
        logger.warning("{}: ignored extra columns on {} line(s)".format(name, extra_columns))
    if self_loops:
        logger.warning("{}: dropped {} self-loop(s)".format(name, self_loops))
    if not pairs:
        raise EdgeListError("empty graph, no edge found", name)

    g = Graph.from_pairs(len(label_to_id), pairs, labels=list(label_to_id))
    duplicates = len(pairs) - g.edge_count
    if duplicates:
        logger.debug("{}: collapsed {} duplicate edge(s)".format(name, duplicates))
    logger.debug("Loaded {} from {}".format(g, name))
    return g


def connected_components(g):
    """
    :return: The number of components and the component label of every node. Labels are numbered by
        the smallest node id they contain.
    :rtype: `tuple` of (`int`, `numpy.ndarray`)
    """
    n, labels = csgraph.connected_components(g.adjacency(), directed=False)
    return int(n), labels.astype(np.int64)


def component_members(labels):
    """ Sorted node ids of every component, in component label order """
    order = np.argsort(labels, kind='stable')
    bounds = np.cumsum(np.bincount(labels))[:-1]
    return np.split(order, bounds)


def write_edge_list(g, path):
    """ Canonical edge list using the raw labels, reloading it gives back the same edge set """
    with open(path, 'w', encoding='utf-8') as f:
        for u, v in g.edges.tolist():
            f.write("{} {}\n".format(g.labels[u], g.labels[v]))


def write_remap_table(g, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write("raw_label\tnode_id\n")
        for node_id, label in enumerate(g.labels):
            f.write("{}\t{}\n".format(label, node_id))

"""
Current-flow betweenness of the nodes of an undirected graph.

For one connected component with grounded Laplacian inverse C, injecting a unit current at s and extracting
it at t produces on edge e=(x, y) the current F_e[s] - F_e[t] with F_e = C[x] - C[y]. The throughput of a
node is half the sum of the absolute currents on its incident edges, so summing over unordered pairs
{s, t} only requires, per edge, the sum of |F_e[s] - F_e[t]| over all pairs, which is obtained from the
sorted row of F_e in O(n log n). Pairs where the node itself is an endpoint contribute exactly 1/2 each and
are removed afterwards (endpoints excluded).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse import linalg as splinalg

from .graph import connected_components, component_members
from ..exceptions import ConvergenceError
from ..formatter import getLogger
from ..utils import resolve_threads

logger = getLogger(__name__)

DEFAULT_EPSILON = 1e-6
DEFAULT_DENSE_THRESHOLD = 2000
DEFAULT_TOLERANCE = 1e-10
GROUNDING_STRATEGIES = ('first', 'last', 'max-degree')

# number of float64 entries of F processed at once
_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class CentralityVector:
    """
    :param values: Centrality used downstream, one per node (clamped if `epsilon` is set)
    :param raw: Values as computed, before clamping
    :param epsilon: Smoothing floor applied by :func:`clamp`, None if never clamped
    """
    values: np.ndarray
    raw: np.ndarray = field(default=None)
    epsilon: float = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("Centrality values must be finite and non-negative")
        object.__setattr__(self, 'values', values)
        if self.raw is None:
            object.__setattr__(self, 'raw', values)

    def __len__(self):
        return len(self.values)

    @property
    def clamped_count(self):
        if self.epsilon is None:
            return 0
        return int(np.count_nonzero(self.raw < self.epsilon))


def clamp(cv, epsilon=DEFAULT_EPSILON):
    """
    Floor every value at `epsilon` so that 1 / cb is defined. Raw values are kept for reporting.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0, got {}".format(epsilon))
    clamped = replace(cv, values=np.maximum(cv.raw, epsilon), epsilon=float(epsilon))
    if clamped.clamped_count:
        logger.warning("Clamped {} centrality value(s) below {:g} (leaves and isolated nodes)".format(
            clamped.clamped_count, epsilon))
    return clamped


class LaplacianSystem:
    """
    Laplacian of one connected component with one grounded node, solved either by a dense Cholesky
    factorization or by Jacobi-preconditioned conjugate gradient, one column of the identity at a time.

    :param nodes: Sorted global ids of the component
    :type nodes: `numpy.ndarray`
    :param adjacency: Adjacency of the whole graph
    :type adjacency: `scipy.sparse.csr_matrix`
    :param ground: Grounding strategy, one of 'first', 'last', 'max-degree'
    :type ground: `str`
    """

    def __init__(self, nodes, adjacency, ground='first', dense_threshold=DEFAULT_DENSE_THRESHOLD,
                 tol=DEFAULT_TOLERANCE, threads=1):
        if ground not in GROUNDING_STRATEGIES:
            raise ValueError("Unknown grounding '{}' (valid := {})".format(ground, GROUNDING_STRATEGIES))
        self.nodes = np.asarray(nodes)
        sub = adjacency[self.nodes][:, self.nodes]
        deg = np.asarray(sub.sum(axis=1)).ravel()
        self.laplacian = (sparse.diags(deg) - sub).tocsr()
        if ground == 'first':
            self.ground = 0
        elif ground == 'last':
            self.ground = len(self.nodes) - 1
        else:
            self.ground = int(np.argmax(deg))
        self.method = 'dense' if len(self.nodes) <= dense_threshold else 'cg'
        self.tol = tol
        self.threads = threads

    def __len__(self):
        return len(self.nodes)

    def reduced(self):
        keep = np.delete(np.arange(len(self)), self.ground)
        return self.laplacian[keep][:, keep], keep

    def potentials(self):
        """
        Grounded inverse C of the Laplacian: zero row and column at the grounded node, the inverse of the
        reduced Laplacian elsewhere. Column s holds the node potentials when a unit current enters at s and
        leaves at the grounded node.
        """
        n = len(self)
        C = np.zeros((n, n))
        if n == 1:
            return C
        reduced, keep = self.reduced()
        if self.method == 'dense':
            inv = cho_solve(cho_factor(reduced.toarray()), np.eye(n - 1))
        else:
            inv = self._cg_inverse(reduced.tocsr())
        C[np.ix_(keep, keep)] = inv
        return C

    def _cg_inverse(self, A):
        n = A.shape[0]
        preconditioner = sparse.diags(1. / A.diagonal())

        def solve_column(i):
            b = np.zeros(n)
            b[i] = 1.
            x, info = splinalg.cg(A, b, rtol=self.tol, atol=0., maxiter=10 * n, M=preconditioner)
            if info != 0:
                residual = np.linalg.norm(b - A @ x)
                raise ConvergenceError(
                    "Conjugate gradient did not converge on column {} of a {} node component".format(i, n + 1),
                    residual=residual)
            return x

        logger.debug("Solving {} columns by conjugate gradient on {} thread(s)".format(n, self.threads))
        inv = np.empty((n, n))
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                for i, x in enumerate(executor.map(solve_column, range(n))):
                    inv[:, i] = x
        else:
            for i in range(n):
                inv[:, i] = solve_column(i)
        # symmetrize, the iterative solution is only symmetric up to the tolerance
        return (inv + inv.T) / 2


def _pair_sums(F):
    """ Row-wise sum over all unordered column pairs of |F[:, s] - F[:, t]| """
    n = F.shape[1]
    coef = 2. * np.arange(n) - n + 1
    return np.sort(F, axis=1) @ coef


def _component_betweenness(system, edges_local):
    n = len(system)
    cb = np.zeros(n)
    if n < 3:
        return cb
    C = system.potentials()
    block = max(1, _BLOCK_ENTRIES // n)
    for start in range(0, len(edges_local), block):
        x, y = edges_local[start:start + block].T
        S = _pair_sums(C[x] - C[y])
        np.add.at(cb, x, S)
        np.add.at(cb, y, S)
    cb = cb / 2 - (n - 1) / 2
    return np.maximum(cb, 0.)


def current_flow_betweenness(g, dense_threshold=DEFAULT_DENSE_THRESHOLD, tol=DEFAULT_TOLERANCE, threads=None,
                             ground='first'):
    """
    Unnormalized current-flow betweenness of every node, endpoints excluded, summed over unordered
    source-sink pairs within each connected component. Nodes in singleton components get 0.

    :param g: The graph
    :type g: :class:`~ecne.graph.graph.Graph`
    :param dense_threshold: Components with at most this many nodes are solved by dense factorization,
        larger ones by conjugate gradient
    :type dense_threshold: `int`, optional
    :param tol: Relative residual tolerance of conjugate gradient
    :type tol: `float`, optional
    :param threads: Worker threads for the conjugate gradient columns, defaults to ECNE_THREADS or 1
    :type threads: `int`, optional
    :param ground: Which node of each component is grounded, the result does not depend on it
    :type ground: `str`, optional

    :raises ValueError: empty graph
    :raises ConvergenceError: conjugate gradient failed to reach `tol`

    :return: Raw (unclamped) centralities
    :rtype: :class:`CentralityVector`
    """
    if g.node_count == 0:
        raise ValueError("Current-flow betweenness of an empty graph is undefined")
    threads = resolve_threads(threads)
    adjacency = g.adjacency()
    _, labels = connected_components(g)
    local_index = np.empty(g.node_count, dtype=np.int64)
    edge_component = labels[g.edges[:, 0]]

    cb = np.zeros(g.node_count)
    for comp, nodes in enumerate(component_members(labels)):
        if len(nodes) < 3:
            continue
        local_index[nodes] = np.arange(len(nodes))
        edges_local = local_index[g.edges[edge_component == comp]]
        system = LaplacianSystem(nodes, adjacency, ground=ground, dense_threshold=dense_threshold, tol=tol,
                                 threads=threads)
        logger.debug("Component {}: {} nodes, {} edges, {} solve".format(
            comp, len(nodes), len(edges_local), system.method))
        cb[nodes] = _component_betweenness(system, edges_local)
    return CentralityVector(cb)


def write_centrality(cv, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write("node_id\tcb\n")
        for node_id, value in enumerate(cv.raw.tolist()):
            f.write("{}\t{!r}\n".format(node_id, value))

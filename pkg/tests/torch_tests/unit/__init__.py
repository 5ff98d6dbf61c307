import pytest

import numpy as np

try:
    import torch
    TORCH_AVAILABLE = True
except (ImportError, NameError, AttributeError, OSError):
    TORCH_AVAILABLE = False

@pytest.mark.skipif(not TORCH_AVAILABLE, reason="PyTorch is not used as a backend")
class BaseUnitTest:
    def setup_method(self, method):
        """ setup any state tied to the execution of the given method in a
        class.  setup_method is invoked for every test method of a class.
        """
        print("setup ", method.__name__)
        pass


    def teardown_method(self, method):
        """ teardown any state that was previously setup with a setup_method
        call.
        """
        print("teardown ", method.__name__)
        pass

# rows 0, 1 point one way, rows 2, 3 the other
EDGE_VECTORS = np.array([[1., 0.], [0.8, 0.2], [-1., 0.], [-0.8, -0.2]])


def bundle_of(edge_rows, u=0, v=1):
    """ PathBundle of length 3 paths, one per tuple of edge rows """
    from ecne.linkpred.paths import PathBundle, PathSample
    paths = [PathSample(nodes=(u, 10 + i, 20 + i, v), edges=tuple(edges)) for i, edges in enumerate(edge_rows)]
    return PathBundle(u=u, v=v, paths={3: sorted(paths, key=lambda p: p.nodes)})


class SeparableData:
    """ Positives only walk through rows 0 and 1, negatives through rows 2 and 3 """
    def __init__(self, examples=40, seed=0):
        rng = np.random.default_rng(seed)
        labels = np.arange(examples) % 2
        bundles = []
        for label in labels:
            rows = (0, 1) if label else (2, 3)
            count = int(rng.integers(1, 4))
            bundles.append(bundle_of([tuple(rng.choice(rows, size=3).tolist()) for _ in range(count)]))
        self.bundles = {'train': bundles}
        self.labels = {'train': labels}

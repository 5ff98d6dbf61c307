import json
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from .aggregators import DEFAULT_HIDDEN, make_aggregator
from ..exceptions import MissingEmbeddingError
from ..formatter import getLogger

logger = getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 2
PROBABILITY_CLAMP = 1e-7


@dataclass
class PathBatch:
    """
    Vectorized paths of a batch of examples: for every length, the stacked edge embeddings of all the paths
    (paths, length, d) and the number of paths of each example.
    """
    inputs: dict
    counts: dict

    def __len__(self):
        return len(next(iter(self.counts.values())))


def as_embedding_tensor(embeddings, dtype=torch.float32):
    """ Accepts an :class:`~ecne.embed.skipgram.EmbeddingMatrix`, an array or a tensor """
    vectors = getattr(embeddings, 'vectors', embeddings)
    if isinstance(vectors, torch.Tensor):
        return vectors.to(dtype)
    return torch.as_tensor(np.asarray(vectors), dtype=dtype)


def _check_rows(ids, embeddings):
    if ids.size and (ids.min() < 0 or ids.max() >= embeddings.shape[0]):
        bad = ids[(ids < 0) | (ids >= embeddings.shape[0])][0]
        raise MissingEmbeddingError("Edge {} has no embedding row ({} rows), the path graph and the embedding "
                                    "graph diverged".format(int(bad), embeddings.shape[0]))


def embed_path(path, embeddings):
    """
    Edge vectors of a path, in path order, shape (length, d).

    :raises MissingEmbeddingError: an edge of the path has no row
    """
    embeddings = as_embedding_tensor(embeddings)
    ids = np.asarray(path.edges, dtype=np.int64)
    _check_rows(ids, embeddings)
    return embeddings[torch.from_numpy(ids)]


def collate(bundles, embeddings, lengths):
    """
    :param bundles: Path bundles of the examples
    :type bundles: `list` of :class:`~ecne.linkpred.paths.PathBundle`
    :param embeddings: Edge embeddings as a tensor
    :type embeddings: `torch.Tensor`
    :rtype: :class:`PathBatch`
    """
    inputs, counts = {}, {}
    for l in lengths:
        arrays = [b.edge_array(l) for b in bundles]
        ids = np.concatenate(arrays) if arrays else np.empty((0, l), dtype=np.int64)
        _check_rows(ids, embeddings)
        inputs[l] = embeddings[torch.from_numpy(ids)]
        counts[l] = torch.tensor([len(a) for a in arrays], dtype=torch.long)
    return PathBatch(inputs=inputs, counts=counts)


class LinkModel(nn.Module):
    """
    One aggregator per path length, then a logistic classifier over the concatenated per-length
    representations and one presence flag per length (0 when the pair has no path of that length, whose
    representation is then the zero vector). The classifier starts at zero.

    :param kind: Aggregator, one of 'avg', 'max', 'lstm'
    :type kind: `str`
    :param dim: Edge embedding dimension
    :type dim: `int`
    :param lengths: Path lengths
    :type lengths: `tuple` of `int`
    :param hidden: Hidden size of the dense and LSTM aggregators
    :type hidden: `int`, optional
    """

    def __init__(self, kind, dim, lengths, hidden=DEFAULT_HIDDEN):
        super().__init__()
        self.kind = kind
        self.dim = dim
        self.lengths = tuple(sorted(lengths))
        self.hidden = hidden
        self.aggregators = nn.ModuleDict(
            {str(l): make_aggregator(kind, l, dim, hidden=hidden) for l in self.lengths})
        features = sum(a.output_size for a in self.aggregators.values()) + len(self.lengths)
        self.classifier = nn.Linear(features, 1)
        # zero classifier, an untrained model scores every pair 0.5
        nn.init.zeros_(self.classifier.weight)
        nn.init.zeros_(self.classifier.bias)

    def representation(self, batch):
        parts, flags = [], []
        for l in self.lengths:
            aggregator = self.aggregators[str(l)]
            counts = batch.counts[l]
            present = counts > 0
            rep = batch.inputs[l].new_zeros(len(counts), aggregator.output_size)
            if present.any():
                idx = torch.nonzero(present).squeeze(1)
                rep = rep.index_put((idx,), aggregator(batch.inputs[l], counts[present]))
            parts.append(rep)
            flags.append(present.to(rep.dtype).unsqueeze(1))
        return torch.cat(parts + flags, dim=1)

    def forward(self, batch):
        """ Plausibility score of every example of the batch, in (0, 1) """
        return torch.sigmoid(self.classifier(self.representation(batch)).squeeze(1))

    def config(self):
        return {'kind': self.kind, 'dim': self.dim, 'lengths': list(self.lengths), 'hidden': self.hidden}


def bce_loss(predictions, labels):
    """ Mean binary cross-entropy, predictions clamped to [1e-7, 1 - 1e-7] first """
    predictions = predictions.clamp(PROBABILITY_CLAMP, 1 - PROBABILITY_CLAMP)
    return F.binary_cross_entropy(predictions, labels.to(predictions.dtype))


def predict(model, bundle, embeddings):
    """ Plausibility score of one candidate pair """
    return float(predict_many(model, [bundle], embeddings)[0])


def predict_many(model, bundles, embeddings, batch_size=256):
    embeddings = as_embedding_tensor(embeddings, dtype=next(model.parameters()).dtype)
    model.eval()
    scores = []
    with torch.no_grad():
        for start in range(0, len(bundles), batch_size):
            batch = collate(bundles[start:start + batch_size], embeddings, model.lengths)
            scores.append(model(batch).cpu().numpy())
    return np.concatenate(scores) if scores else np.empty(0)


def save_checkpoint(model, path, **extra):
    """
    Versioned JSON document: the model configuration and every named parameter with its shape and values.
    The same model always serializes to the same bytes.
    """
    parameters = {}
    for name, tensor in model.state_dict().items():
        tensor = tensor.detach().cpu()
        parameters[name] = {
            'dtype': str(tensor.dtype).replace('torch.', ''),
            'shape': list(tensor.shape),
            'values': tensor.flatten().tolist(),
        }
    document = {
        'format_version': CHECKPOINT_FORMAT_VERSION,
        'model': model.config(),
        'parameters': parameters,
        'extra': extra,
    }
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(document, f, sort_keys=True)
        f.write('\n')


def load_checkpoint(path):
    """
    :raises ValueError: unknown format version or parameter values not matching their shape headers
    :rtype: :class:`LinkModel`
    """
    with open(path, encoding='utf-8') as f:
        try:
            checkpoint = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError("Checkpoint {} is not a JSON document: {}".format(path, e)) from e
    if checkpoint.get('format_version') != CHECKPOINT_FORMAT_VERSION:
        raise ValueError("Unsupported checkpoint format version {}".format(checkpoint.get('format_version')))
    state = {}
    for name, entry in checkpoint['parameters'].items():
        shape, values = entry['shape'], entry['values']
        if len(values) != int(np.prod(shape, dtype=np.int64)):
            raise ValueError("Parameter '{}' has {} values, header shape {} needs {}".format(
                name, len(values), shape, int(np.prod(shape, dtype=np.int64))))
        state[name] = torch.tensor(values, dtype=getattr(torch, entry['dtype'])).reshape(shape)
    cfg = checkpoint['model']
    model = LinkModel(cfg['kind'], cfg['dim'], cfg['lengths'], hidden=cfg['hidden'])
    expected = {k: list(v.shape) for k, v in model.state_dict().items()}
    for name, tensor in state.items():
        if expected.get(name) != list(tensor.shape):
            raise ValueError("Parameter '{}' has shape {}, the model expects {}".format(
                name, list(tensor.shape), expected.get(name)))
    model.load_state_dict(state)
    return model

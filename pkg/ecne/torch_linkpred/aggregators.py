"""
Aggregators reduce the vectorized paths of one length into one representation per candidate pair. They all
take the edge embeddings of every path of a batch, shape (paths, length, d), and the number of paths of each
example (every count >= 1, examples without paths are handled by the model).
"""
from abc import abstractmethod

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pack_sequence, pad_packed_sequence

__all__ = ['PathAggregator', 'AvgPoolAggregator', 'MaxPoolAggregator', 'LSTMAggregator', 'make_aggregator',
           'AGGREGATORS']

DEFAULT_HIDDEN = 64


def _segment_ids(counts):
    return torch.repeat_interleave(torch.arange(len(counts), device=counts.device), counts)


class PathAggregator(nn.Module):
    def __init__(self, length, dim):
        super().__init__()
        self.length = length
        self.dim = dim

    @property
    @abstractmethod
    def output_size(self):
        """ Size of the representation of one example """

    @abstractmethod
    def forward(self, x, counts):
        """
        :param x: Edge embeddings of the paths, shape (paths, length, d), paths of one example contiguous
        :type x: `torch.Tensor`
        :param counts: Paths of every example, shape (examples,)
        :type counts: `torch.LongTensor`
        :return: Shape (examples, output_size)
        """


class AvgPoolAggregator(PathAggregator):
    """ Element-wise mean of the concatenated edge vectors of the paths """

    @property
    def output_size(self):
        return self.length * self.dim

    def forward(self, x, counts):
        flat = x.reshape(x.shape[0], -1)
        out = flat.new_zeros(len(counts), flat.shape[1])
        out = out.index_add(0, _segment_ids(counts), flat)
        return out / counts.unsqueeze(1).to(flat.dtype)


class MaxPoolAggregator(PathAggregator):
    """ Dense layer with ReLU on every concatenated path, then element-wise max over the paths """

    def __init__(self, length, dim, hidden=DEFAULT_HIDDEN):
        super().__init__(length, dim)
        self.dense = nn.Linear(length * dim, hidden)
        self.hidden = hidden

    @property
    def output_size(self):
        return self.hidden

    def forward(self, x, counts):
        h = torch.relu(self.dense(x.reshape(x.shape[0], -1)))
        return torch.stack([chunk.max(dim=0).values for chunk in torch.split(h, counts.tolist())])


class LSTMAggregator(PathAggregator):
    """
    Two levels of LSTM. The first reads the edge vectors of a path, its last hidden state represents the path.
    The second reads the path representations of an example in their canonical (sorted node sequence)
    order and its hidden states are max pooled.
    """

    def __init__(self, length, dim, hidden=DEFAULT_HIDDEN):
        super().__init__(length, dim)
        self.edge_lstm = nn.LSTM(dim, hidden, batch_first=True)
        self.path_lstm = nn.LSTM(hidden, hidden, batch_first=True)
        self.hidden = hidden

    @property
    def output_size(self):
        return self.hidden

    def forward(self, x, counts):
        _, (h_n, _) = self.edge_lstm(x)
        paths = h_n[-1]
        packed = pack_sequence(list(torch.split(paths, counts.tolist())), enforce_sorted=False)
        out, _ = self.path_lstm(packed)
        out, _ = pad_packed_sequence(out, batch_first=True, padding_value=float('-inf'))
        return out.max(dim=1).values


AGGREGATORS = {
    'avg': AvgPoolAggregator,
    'max': MaxPoolAggregator,
    'lstm': LSTMAggregator,
}


def make_aggregator(kind, length, dim, hidden=DEFAULT_HIDDEN):
    if kind not in AGGREGATORS:
        raise ValueError("Unknown aggregator '{}' (valid := {})".format(kind, tuple(AGGREGATORS)))
    if kind == 'avg':
        return AvgPoolAggregator(length, dim)
    return AGGREGATORS[kind](length, dim, hidden=hidden)

from dataclasses import dataclass, field

import numpy as np
from gensim.models import Word2Vec
from gensim.models.callbacks import CallbackAny2Vec

from ..formatter import getLogger

logger = getLogger(__name__)


@dataclass
class EmbeddingMatrix:
    """
    One row per item (edge or node id).

    :param vectors: Center (input) vectors, shape (items, d)
    :param context: Context (output) vectors of the same shape, only meaningful right after training
    :param kind: 'edge' or 'node'
    :param loss_history: Skip-gram loss of every epoch
    """
    vectors: np.ndarray
    context: np.ndarray = None
    kind: str = 'edge'
    loss_history: list = field(default_factory=list)

    def __post_init__(self):
        if self.vectors.ndim != 2:
            raise ValueError("Embeddings must be a 2D matrix, got shape {}".format(self.vectors.shape))
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("Embeddings contain non finite values")

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]


class EpochLossRecorder(CallbackAny2Vec):
    """ gensim reports a running total over one train() call, keep per-epoch increments """

    def __init__(self):
        self.losses = []
        self._previous = 0.

    def on_train_begin(self, model):
        self._previous = 0.

    def on_epoch_end(self, model):
        total = model.get_latest_training_loss()
        self.losses.append(total - self._previous)
        self._previous = total
        logger.debug("Skip-gram epoch {}: loss {:.4f}".format(len(self.losses), self.losses[-1]))


def train_skipgram(walks, d, cfg, item_count=None):
    """
    Skip-gram with negative sampling over the walks. Every item within `cfg.window` positions of a center
    forms a positive pair, `cfg.negative` negatives are drawn from the unigram distribution of the walk
    occurrences raised to 0.75, and the learning rate decays linearly from `cfg.lr_start` to `cfg.lr_end`.
    Center vectors start uniform in [-0.5/d, 0.5/d] and context vectors at zero. With `cfg.workers == 1` the
    result is bit-identical for a given seed.

    :param walks: Walks of item ids
    :type walks: `list` of `numpy.ndarray`
    :param d: Embedding dimension
    :type d: `int`
    :param cfg: Skip-gram parameters
    :type cfg: :class:`~ecne.embed.walks.WalkConfig`
    :param item_count: Number of rows of the output, defaults to the largest id seen + 1

    :raises ValueError: `d` <= 0, no walks or no positive pair (every walk of length 1)

    :return: Trained embeddings, row i for item i
    :rtype: :class:`EmbeddingMatrix`
    """
    if d <= 0:
        raise ValueError("Embedding dimension must be > 0, got {}".format(d))
    if not walks:
        raise ValueError("Cannot train skip-gram without walks")
    if all(len(w) < 2 for w in walks):
        raise ValueError("No positive pair to train on, every walk has length 1")

    sentences = [[str(x) for x in w.tolist()] for w in walks]
    recorder = EpochLossRecorder()
    model = Word2Vec(vector_size=d, window=cfg.window, sg=1, hs=0, negative=cfg.negative, ns_exponent=0.75,
                     sample=0, min_count=1, alpha=cfg.lr_start, min_alpha=cfg.lr_end, seed=cfg.seed,
                     workers=cfg.workers, epochs=cfg.epochs, shrink_windows=False, compute_loss=True)
    model.build_vocab(sentences)
    # gensim draws from [-1/d, 1/d]
    model.wv.vectors *= 0.5
    model.train(sentences, total_examples=model.corpus_count, epochs=model.epochs, compute_loss=True,
                callbacks=[recorder])

    keys = np.array([int(k) for k in model.wv.index_to_key], dtype=np.int64)
    if item_count is None:
        item_count = int(keys.max()) + 1
    vectors = np.zeros((item_count, d), dtype=np.float32)
    context = np.zeros((item_count, d), dtype=np.float32)
    vectors[keys] = model.wv.vectors
    context[keys] = model.syn1neg
    logger.debug("Trained {} skip-gram vectors of dimension {}".format(len(keys), d))
    return EmbeddingMatrix(vectors=vectors, context=context, loss_history=recorder.losses)

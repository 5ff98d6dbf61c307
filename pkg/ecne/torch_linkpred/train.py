from copy import deepcopy
from dataclasses import dataclass

import numpy as np
import torch

from .model import as_embedding_tensor, bce_loss, collate
from ..exceptions import DivergedTrainingError
from ..formatter import getLogger
from ..utils import AverageAggregator

logger = getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """
    :param lr: Adam learning rate
    :param epochs: Maximum number of epochs, 0 leaves the model untouched
    :param patience: Epochs without validation improvement before stopping
    :param batch_size: Examples per optimizer step
    :param seed: Seed of the batch order
    """
    lr: float = 0.001
    epochs: int = 50
    patience: int = 5
    batch_size: int = 32
    seed: int = 1
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be > 0, got {}".format(self.lr))
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0, got {}".format(self.epochs))
        if self.patience < 1:
            raise ValueError("patience must be >= 1, got {}".format(self.patience))
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1, got {}".format(self.batch_size))


def _labels_tensor(labels, dtype):
    return torch.as_tensor(np.asarray(labels), dtype=dtype)


def evaluate_loss(model, bundles, labels, embeddings, batch_size=256):
    """ Mean binary cross-entropy of the model over some examples """
    labels = _labels_tensor(labels, embeddings.dtype)
    agg = AverageAggregator()
    model.eval()
    with torch.no_grad():
        for start in range(0, len(bundles), batch_size):
            batch = collate(bundles[start:start + batch_size], embeddings, model.lengths)
            loss = bce_loss(model(batch), labels[start:start + batch_size])
            agg.update(loss.item(), weight=len(batch))
    return agg.get()


def _parameter_norms(model):
    return {name: float(p.detach().norm()) for name, p in model.named_parameters()}


def train(model, dataset, embeddings, config=TrainConfig()):
    """
    Adam on the binary cross-entropy of the training examples, early stopping on the validation loss (on the
    training loss when there is no validation example). The parameters of the best epoch are restored.

    :param model: Model to train, modified in place
    :type model: :class:`~ecne.torch_linkpred.model.LinkModel`
    :param dataset: Examples with their path bundles
    :type dataset: :class:`~ecne.linkpred.dataset.LinkDataset`
    :param embeddings: Edge embeddings of `dataset.train_graph`
    :param config: Training parameters
    :type config: :class:`TrainConfig`

    :raises DivergedTrainingError: the loss became NaN or infinite

    :return: The model and one record per epoch with its mean train and validation loss
    :rtype: `tuple` of (`LinkModel`, `list` of `dict`)
    """
    dtype = next(model.parameters()).dtype
    embeddings = as_embedding_tensor(embeddings, dtype=dtype)
    bundles, labels = dataset.bundles['train'], _labels_tensor(dataset.labels['train'], dtype)
    val_bundles, val_labels = dataset.bundles.get('val', []), dataset.labels.get('val', [])
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr, betas=config.betas, eps=config.eps)
    generator = torch.Generator().manual_seed(config.seed)

    history = []
    best_loss, best_state, stale = float('inf'), None, 0
    epoch_loss = AverageAggregator()
    for epoch in range(1, config.epochs + 1):
        model.train()
        order = torch.randperm(len(bundles), generator=generator).tolist()
        for step, start in enumerate(range(0, len(order), config.batch_size)):
            idx = order[start:start + config.batch_size]
            batch = collate([bundles[i] for i in idx], embeddings, model.lengths)
            loss = bce_loss(model(batch), labels[idx])
            if not torch.isfinite(loss):
                raise DivergedTrainingError("Loss is {} at epoch {}, batch {}; parameter norms: {}".format(
                    loss.item(), epoch, step, _parameter_norms(model)))
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss.update(loss.item(), weight=len(idx))

        record = {'epoch': epoch, 'train_loss': epoch_loss.get()}
        if len(val_bundles):
            record['val_loss'] = evaluate_loss(model, val_bundles, val_labels, embeddings)
        monitored = record.get('val_loss', record['train_loss'])
        if not np.isfinite(monitored):
            raise DivergedTrainingError("Monitored loss is {} at epoch {}; parameter norms: {}".format(
                monitored, epoch, _parameter_norms(model)))
        history.append(record)
        logger.debug("Epoch {}: train loss {:.4f}, val loss {}".format(
            epoch, record['train_loss'], record.get('val_loss')))

        if monitored < best_loss:
            best_loss, best_state, stale = monitored, deepcopy(model.state_dict()), 0
        else:
            stale += 1
            if stale >= config.patience:
                logger.debug("Early stop at epoch {}, best loss {:.4f}".format(epoch, best_loss))
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return model, history

from unittest import mock

import numpy as np
import pytest

from tests.torch_tests.unit import BaseUnitTest, TORCH_AVAILABLE, EDGE_VECTORS, SeparableData
from ecne.exceptions import DivergedTrainingError


class TestTrainConfig(BaseUnitTest):
    def test_defaults(self):
        from ecne.torch_linkpred import TrainConfig
        cfg = TrainConfig()
        assert (cfg.lr, cfg.epochs, cfg.patience, cfg.betas, cfg.eps) == (0.001, 50, 5, (0.9, 0.999), 1e-8)

    @pytest.mark.parametrize('kwargs', [{'lr': 0.}, {'epochs': -1}, {'patience': 0}, {'batch_size': 0}])
    def test_invalid(self, kwargs):
        from ecne.torch_linkpred import TrainConfig
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestTrain(BaseUnitTest):
    @pytest.mark.parametrize('kind', ['avg', 'max', 'lstm'])
    def test_separable_fixture(self, kind):
        import torch
        from ecne.torch_linkpred import LinkModel, TrainConfig, predict, train
        torch.manual_seed(0)
        data = SeparableData()
        model = LinkModel(kind, 2, (3,), hidden=8)
        model, history = train(model, data, EDGE_VECTORS, TrainConfig(lr=0.05, epochs=50, patience=10))
        assert 1 <= len(history) <= 50
        assert min(h['train_loss'] for h in history) < 0.1
        positives = [predict(model, b, EDGE_VECTORS) for b, y in zip(data.bundles['train'], data.labels['train'])
                     if y == 1]
        negatives = [predict(model, b, EDGE_VECTORS) for b, y in zip(data.bundles['train'], data.labels['train'])
                     if y == 0]
        assert min(positives) > 0.9
        assert max(negatives) < 0.1

    def test_zero_epochs_leave_model_unchanged(self):
        import torch
        from ecne.torch_linkpred import LinkModel, TrainConfig, train
        model = LinkModel('max', 2, (3,), hidden=4)
        before = {k: v.clone() for k, v in model.state_dict().items()}
        model, history = train(model, SeparableData(), EDGE_VECTORS, TrainConfig(epochs=0))
        assert history == []
        assert all(torch.equal(before[k], v) for k, v in model.state_dict().items())

    def test_validation_loss_recorded(self):
        from ecne.torch_linkpred import LinkModel, TrainConfig, train
        data = SeparableData(examples=40)
        val = SeparableData(examples=10, seed=1)
        data.bundles['val'], data.labels['val'] = val.bundles['train'], val.labels['train']
        _, history = train(LinkModel('avg', 2, (3,)), data, EDGE_VECTORS, TrainConfig(lr=0.05, epochs=3))
        assert all('val_loss' in h for h in history)
        assert [h['epoch'] for h in history] == [1, 2, 3]

    def test_early_stopping_restores_best(self):
        import torch
        from ecne.torch_linkpred import LinkModel, TrainConfig, train
        from ecne.torch_linkpred.train import evaluate_loss
        data = SeparableData(examples=20)
        # validation labels flipped, training makes it worse every epoch
        flipped = SeparableData(examples=20)
        data.bundles['val'], data.labels['val'] = flipped.bundles['train'], 1 - flipped.labels['train']
        model, history = train(LinkModel('avg', 2, (3,)), data, EDGE_VECTORS,
                               TrainConfig(lr=0.05, epochs=50, patience=2))
        assert len(history) < 50
        best = min(h['val_loss'] for h in history)
        E = torch.as_tensor(EDGE_VECTORS, dtype=torch.float32)
        assert evaluate_loss(model, data.bundles['val'], data.labels['val'], E) == pytest.approx(best, rel=1e-5)

    def test_nan_loss_aborts(self):
        import torch
        from ecne.torch_linkpred import LinkModel, TrainConfig, train
        nan = torch.tensor(float('nan'), requires_grad=True)
        import sys
        train_module = sys.modules['ecne.torch_linkpred.train']
        with mock.patch.object(train_module, 'bce_loss', return_value=nan):
            with pytest.raises(DivergedTrainingError) as excinfo:
                train(LinkModel('avg', 2, (3,)), SeparableData(), EDGE_VECTORS, TrainConfig(epochs=1))
        assert 'epoch 1' in str(excinfo.value)
        assert 'classifier.weight' in str(excinfo.value)

    def test_adam_zero_gradient_keeps_parameters(self):
        import torch
        from ecne.torch_linkpred import LinkModel
        model = LinkModel('avg', 2, (3,))
        before = [p.detach().clone() for p in model.parameters()]
        optimizer = torch.optim.Adam(model.parameters(), lr=0.001, betas=(0.9, 0.999), eps=1e-8)
        for p in model.parameters():
            p.grad = torch.zeros_like(p)
        optimizer.step()
        assert all(torch.equal(a, b) for a, b in zip(before, model.parameters()))

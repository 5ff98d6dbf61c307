from .aggregators import AvgPoolAggregator, MaxPoolAggregator, LSTMAggregator, make_aggregator
from .model import LinkModel, collate, embed_path, predict, bce_loss, save_checkpoint, load_checkpoint
from .train import TrainConfig, train
from .experiment import LinkPredictionConfig, run_link_prediction

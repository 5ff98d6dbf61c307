from .walks import WalkConfig, AliasTable, generate_walks
from .skipgram import EmbeddingMatrix, train_skipgram
from .pipeline import choose_dimension, ecne_pipeline, deepwalk_pipeline, run_ecne

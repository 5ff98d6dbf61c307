import hashlib
import json
from typing import List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .embed.walks import MAX_WALK_LENGTH
from .evaluate.tasks import EDGE_SOURCES, TRAIN_FRACTIONS
from .exceptions import ConfigError


class RunConfig(BaseModel):
    """
    Every parameter of a command line run. Defaults reproduce the reference protocol: 10 walks of 100 steps
    per line-node, window 10, 100 negatives, d = 128, paths of length 3 and 4 (100 per length), Adam at 0.001
    for at most 50 epochs with patience 5, and 5 seeds.
    """
    model_config = ConfigDict(extra='forbid', frozen=True)

    input: Optional[str] = None
    dataset: Optional[str] = None
    out: str = 'out'
    embeddings: Optional[str] = None

    mode: Literal['ecne', 'ecne-d'] = 'ecne'
    dim: int = Field(128, gt=0)
    weighting: Literal['current-flow', 'uniform'] = 'current-flow'
    epsilon: float = Field(1e-6, gt=0)
    dense_threshold: int = Field(2000, ge=1)

    walks: int = Field(10, ge=1)
    walk_len: int = Field(100, ge=1, le=MAX_WALK_LENGTH)
    window: int = Field(10, ge=1)
    neg: int = Field(100, ge=1)
    sg_epochs: int = Field(5, ge=1)
    sg_lr_start: float = Field(0.025, gt=0)
    sg_lr_end: float = Field(0.0001, gt=0)

    agg: Literal['avg', 'max', 'lstm'] = 'lstm'
    lengths: List[int] = Field(default_factory=lambda: [3, 4], min_length=1)
    max_paths: int = Field(100, ge=1)
    lr: float = Field(0.001, gt=0)
    epochs: int = Field(50, ge=0)
    patience: int = Field(5, ge=1)
    batch_size: int = Field(32, ge=1)
    hidden: int = Field(64, ge=1)
    edge_source: str = 'ecne'

    train_fractions: List[float] = Field(default_factory=lambda: list(TRAIN_FRACTIONS), min_length=1)
    baseline: bool = False

    seed: int = Field(1, ge=0)
    seeds: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5], min_length=1)
    threads: Optional[int] = Field(None, ge=1)

    dump_centrality: bool = False
    dump_line_graph: bool = False

    @field_validator('lengths')
    @classmethod
    def _check_lengths(cls, v):
        if any(l < 2 for l in v):
            raise ValueError("path lengths must be >= 2, a length 1 path is the edge itself")
        return sorted(set(v))

    @field_validator('train_fractions')
    @classmethod
    def _check_fractions(cls, v):
        if any(not 0 < f < 1 for f in v):
            raise ValueError("train fractions must be in (0, 1)")
        return v

    @field_validator('seeds')
    @classmethod
    def _check_seeds(cls, v):
        if any(s < 0 for s in v):
            raise ValueError("seeds must be >= 0")
        return v

    @field_validator('edge_source')
    @classmethod
    def _check_edge_source(cls, v):
        if v not in EDGE_SOURCES:
            raise ValueError("edge_source must be one of {}".format(EDGE_SOURCES))
        return v

    @model_validator(mode='after')
    def _check_learning_rates(self):
        if self.sg_lr_end > self.sg_lr_start:
            raise ValueError("sg_lr_end must not exceed sg_lr_start")
        return self

    @property
    def dimension_mode(self):
        return 'matched' if self.mode == 'ecne-d' else 'fixed'

    @property
    def method(self):
        return 'ECNEd' if self.mode == 'ecne-d' else 'ECNE'

    def digest(self):
        """ SHA-256 of the canonical JSON of every field """
        payload = json.dumps(self.model_dump(mode='json'), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def normalize_key(key):
    return str(key).strip().replace('-', '_')


def load_config(path):
    """
    Flat YAML mapping of `RunConfig` fields; dashes and underscores are interchangeable in keys.

    :raises ConfigError: not a mapping, or a nested mapping value
    :rtype: `dict`
    """
    with open(path, encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError("{}: {}".format(path, e)) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("{}: expected 'key: value' lines".format(path))
    values = {}
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError("{}: nested value for '{}' is not supported, the file must be flat".format(
                path, key))
        values[normalize_key(key)] = value
    return values


def build_run_config(file_values=None, overrides=None):
    """
    Config file values overridden by command line values (None means not given).

    :raises ConfigError: unknown key or out of range value
    """
    values = dict(file_values or {})
    values.update({normalize_key(k): v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e

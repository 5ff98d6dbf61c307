from .paths import PathSample, PathBundle, find_paths, build_bundle
from .dataset import LinkDataset, build_dataset, split_ratio_for

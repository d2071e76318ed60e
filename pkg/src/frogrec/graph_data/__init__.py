from .features import PAIR_FEATURE_NAMES, InteractionLog, PairFeaturizer, pair_features
from .graph import FriendshipGraph
from .io import DatasetFormatError, load_dataset, load_dataset_dir, write_dataset
from .records import Dataset, DatasetSplit, PairInstance, PairSet, UserRecord
from .sampling import NeighborTable, NegativeSample, k_hop_neighbors, sample_negatives, sample_neighbor_table
from .split import split_temporal
from .synthetic import GeneratorConfig, generate_synthetic

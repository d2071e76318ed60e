from .frog import VARIANTS, FrogConfig, FrogModel, embed_user, load_checkpoint, save_checkpoint, score_pair
from .heads import (
    JointNetParams,
    LocalNetParams,
    global_preference,
    joint_predict,
    local_preference,
)
from .loss import LossConfig, binary_cross_entropy, focal_loss
from .matching import MatchingParams, affinity, attention_values, pair_similarity, relevance_vectors

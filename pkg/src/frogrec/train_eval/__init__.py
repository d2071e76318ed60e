from .ablation import SeedSweep, build_model, run_ablation, run_seeds
from .baselines import LogisticRegression, MLPBaseline, baseline_from_state, baseline_inputs, baseline_lr, baseline_mlp
from .bench import BenchResult, bench_matching, loglog_slope
from .evaluate import CandidateSet, EvalResult, build_candidates, evaluate, positive_targets, rank_all
from .metrics import expected_constant_hit_rate, hit_rate_at_k, ndcg_at_k, rank_candidates, ranks_from_scores, summarize
from .trainer import MetricsReport, TrainConfig, dataset_loss, train, train_and_evaluate

"""Multi-granularity open intent classification with granular-balls.

Pipeline: adaptive granular-ball clustering of labeled vectors, a dense
encoder trained against nearest-sub-centroid targets that are re-clustered
every epoch, and per-ball decision boundaries whose union separates known
classes from open-world inputs.
"""
from .boundary import (BoundaryModel, build_boundaries, build_single_boundary_baseline,
                       classify_closed, classify_open)
from .cluster import (ClusterResult, cluster_adaptive, filter_quality, make_ball,
                      should_split, split_ball)
from .data import (COSINE, EUCLIDEAN, STAGE_ENCODED, STAGE_RAW, Dataset, GranularBall,
                   HyperParams, LabeledVector, distance, pairwise_distances)
from .encoder import (DenseEncoder, TrainState, class_distance, class_distances,
                      grad_loss, loss_gb, sub_centroid_bank, train_ce_baseline, train_hrl)
from .gbem import (GBEMFormatError, load_embeddings, load_tsv, save_embeddings, save_tsv)
from .harness import (ABLATIONS, ExperimentConfig, SplitResult, run_cell,
                      run_experiment, split_open, split_pool)
from .metrics import EvalReport, evaluate
from .synth import FAMILIES, SynthSpec, gen_synthetic

__version__ = "0.1.0"

__all__ = [
    "BoundaryModel", "build_boundaries", "build_single_boundary_baseline",
    "classify_closed", "classify_open",
    "ClusterResult", "cluster_adaptive", "filter_quality", "make_ball",
    "should_split", "split_ball",
    "COSINE", "EUCLIDEAN", "STAGE_ENCODED", "STAGE_RAW", "Dataset", "GranularBall",
    "HyperParams", "LabeledVector", "distance", "pairwise_distances",
    "DenseEncoder", "TrainState", "class_distance", "class_distances",
    "grad_loss", "loss_gb", "sub_centroid_bank", "train_ce_baseline", "train_hrl",
    "GBEMFormatError", "load_embeddings", "load_tsv", "save_embeddings", "save_tsv",
    "ABLATIONS", "ExperimentConfig", "SplitResult", "run_cell",
    "run_experiment", "split_open", "split_pool",
    "EvalReport", "evaluate",
    "FAMILIES", "SynthSpec", "gen_synthetic",
    "__version__",
]

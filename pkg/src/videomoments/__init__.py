"""Training-free motion embeddings for video retrieval.

Per-video patch-feature tensors (MVFT files) are summarized by temporal
moment statistics: the per-patch temporal mean plus higher-order central
moments, spatially aggregated, weighted, fused, and unit-normalized into a
single motion-sensitive descriptor. Descriptors are searched by exact
cosine similarity; the harness runs triplet retrieval, kNN classification,
and the ablation/frame-count sweeps over declarative benchmark manifests.
"""

from .errors import (
    BadMagicError,
    ContractError,
    DegenerateEmbeddingError,
    FeatureFormatError,
    InvalidIdError,
    ManifestError,
    ShapeMismatchError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    ValidationError,
    VideoMomentsError,
)
from .featureio import (
    FeatureTensor,
    TensorDiagnostics,
    read_feature_file,
    read_feature_path,
    validate,
    write_feature_file,
    write_feature_path,
)
from .harness import (
    EmbeddingCache,
    FrameSweepRow,
    HeatmapMatrix,
    SweepRow,
    TripletRecord,
    TripletReport,
    ablation_sweep,
    embed_manifest,
    frame_count_sweep,
    group_similarity_means,
    heatmap_from_index,
    run_knn_benchmark,
    run_triplet_benchmark,
    similarity_heatmap,
)
from .knn import KnnReport, LabeledSet, eval_knn, knn, majority_vote, weighted_vote
from .manifest import BenchmarkManifest, ManifestEntry, Triplet, load_manifest, save_manifest
from .moments import (
    MomentConfig,
    MomentDescriptor,
    MomentEmbedding,
    PatchMoments,
    central_moment,
    compute_embedding,
    frame_collapse,
    moment_descriptors,
    spatial_aggregate,
    subsample_frames,
    temporal_difference,
    temporal_mean,
)
from .retrieval import (
    EmbeddingIndex,
    RankedList,
    build_index,
    cosine,
    rank,
    read_index_path,
    triplet_success,
    write_index_path,
)
from .sampling import uniform_frame_indices
from .synthetic import generate_labeled_synthetic, generate_synthetic

__version__ = "0.1.0"

"""Video to MVFT feature extraction.

Decodes clips, uniformly samples frames with the engine's pinned index
formula, runs a frame backbone, and writes MVFT feature files plus
provenance sidecars. The extractor never computes moments: the MVFT file
is the entire boundary with the retrieval engine.
"""

from .backbones import build_backbone, preprocess_frames
from .errors import BackboneLoadError, ExtractorError, VideoDecodeError
from .extract import (
    BatchSummary,
    ExtractionResult,
    ExtractionSpec,
    extract,
    extract_batch,
    load_video_manifest,
)
from .mvft import read_mvft_header, write_mvft
from .sampling import uniform_indices
from .video import count_frames, read_frames, sample_frames

__version__ = "0.1.0"

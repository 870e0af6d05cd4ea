"""Engagement analytics over per-frame gaze and emotion label streams.

The pipeline: upstream detectors emit per-frame gaze points and emotion
labels; this package assigns gaze points to entities (tablet, facilitator,
elsewhere), segments label streams into episodes of sustained focus,
computes 21 attention features and 2 attitude features per observation
window, and statistically validates features against expert behavioral
observation scores (MPES / OME).
"""

__version__ = "0.1.0"

from .analytics import (
    WindowFeatures,
    attention_features,
    attention_features_for_labels,
    attitude_features,
    complement_periods,
    period_features,
    segment_episodes,
    window_features,
    windowize,
)
from .errors import AveidError
from .gaze import assign_entity, label_pipeline, smooth_labels
from .model import (
    ANALYTICS_ENTITIES,
    ATTENTION_FEATURE_NAMES,
    MPES_ITEMS,
    AttentionFeatures,
    AttitudeFeatures,
    BosAnnotation,
    EmotionLabel,
    Episode,
    FrameRecord,
    GazeEntity,
    GazePointRecord,
    LabelStream,
    MpesWindowScore,
    ObservationWindow,
    OmePeriod,
    Rect,
    RegionConfig,
)
from .stats import (
    CorrelationResult,
    DescriptiveStats,
    KsResult,
    Significance,
    describe,
    ks_two_sample,
    pearson,
    spearman,
)
from .synth import (
    ExpectedFeatures,
    GeneratorSpec,
    Xorshift64Star,
    expected_features,
    generate,
    points_from_stream,
)
from .validation import (
    CorrelationMatrixReport,
    OmeComparison,
    attitude_correlation,
    mpes_correlation,
    ome_comparison,
    render_report,
)

__all__ = [
    "__version__",
    "ANALYTICS_ENTITIES",
    "ATTENTION_FEATURE_NAMES",
    "MPES_ITEMS",
    "AveidError",
    "AttentionFeatures",
    "AttitudeFeatures",
    "BosAnnotation",
    "CorrelationMatrixReport",
    "CorrelationResult",
    "DescriptiveStats",
    "EmotionLabel",
    "Episode",
    "ExpectedFeatures",
    "FrameRecord",
    "GazeEntity",
    "GazePointRecord",
    "GeneratorSpec",
    "KsResult",
    "LabelStream",
    "MpesWindowScore",
    "ObservationWindow",
    "OmeComparison",
    "OmePeriod",
    "Rect",
    "RegionConfig",
    "Significance",
    "WindowFeatures",
    "Xorshift64Star",
    "assign_entity",
    "attention_features",
    "attention_features_for_labels",
    "attitude_correlation",
    "attitude_features",
    "complement_periods",
    "describe",
    "expected_features",
    "generate",
    "ks_two_sample",
    "label_pipeline",
    "mpes_correlation",
    "ome_comparison",
    "pearson",
    "period_features",
    "points_from_stream",
    "render_report",
    "segment_episodes",
    "smooth_labels",
    "spearman",
    "window_features",
    "windowize",
]

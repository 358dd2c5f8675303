"""Track the conversation around a debunked claim on a microblogging network.

The pipeline: generate boolean search queries from the claim, ingest
post archives, label each post as entailing / contradicting / neutral
toward the claim, reconstruct the propagation cascade as a directed
graph, lay it out, and emit renderings plus spreader analytics.
"""

from .align import (
    AlignmentConfig,
    BaselineClassifier,
    Embedder,
    HashingEmbedder,
    NliClassifier,
    RemoteClassifier,
    align_posts,
    classify_baseline,
    classify_remote,
    cosine_similarity,
    semantic_filter,
)
from .analytics import (
    AccountRow,
    ReportBundle,
    alignment_proportions,
    build_report,
    engagement_histogram,
    follower_histogram,
    top_accounts,
)
from .cascade import (
    AnomalyReport,
    CascadeGraph,
    Edge,
    VertexRecord,
    anomaly_report,
    build_graph,
    chronological_order,
    detect_orphaned_viral,
    detect_self_reposts,
    detect_time_inversions,
)
from .fixtures import PROFILES, CaseFixture, generate_case_fixture, write_case_fixture
from .ingest import (
    ArchiveRecord,
    ArchiveSource,
    FetchWindow,
    HydrationReport,
    LiveSource,
    RecordStore,
    fetch_window,
    hydrate,
    read_archive,
)
from .layout import LayoutModel, StyleConfig, build_layout, vertex_style, x_positions, y_position
from .model import (
    AlignmentLabel,
    AlignmentResult,
    Author,
    Claim,
    ClaimStatus,
    Post,
    Reference,
    RefType,
    ResultSource,
    validate_post,
)
from .numbers import expand_numbers
from .querygen import (
    And,
    Keyword,
    Or,
    Phrase,
    QueryExpr,
    QuerySpec,
    Term,
    build_query,
    extract_keywords,
    normalize,
    parse_query,
    serialize_query,
)
from .render import RenderOptions, export_json, import_json, render_dot, render_svg

__version__ = "0.1.0"

"""Evidence reasoning networks for lateral movement detection."""

from .builder import (
    IMPACT_WEIGHTS, TopologyDecl, VulnCatalog, build_ern, build_from_files,
    impact_category_weight, load_ern,
)
from .ern import (
    And, DirectedLink, Ern, ErnError, ErnVertex, EvidenceQueue, EvidenceRecord,
    Leaf, NotFoundError, Or, RecordRef, State, ValidationError, Vulnerability,
    compute_weight, evaluate_logic, in_links, out_links, push_record,
)
from .export import RenderOptions, report_json, to_dot
from .ingest import (
    Evidence, IngestStats, RawAlert, SignatureMap, map_evidence, merge_duplicates,
    normalize_alert, preprocess,
)
from .reasoner import (
    EvidenceChain, Mode, OrderingError, ReasonerSession, chain_confidence,
    generate_chains, merge_chains, reason_timed, reason_untimed,
)

__version__ = "0.1.0"

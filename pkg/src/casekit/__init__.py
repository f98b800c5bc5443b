"""casekit: build, score, aggregate, and report on assurance cases."""

from .model import (
    CaseScope,
    Claim,
    ClaimStatus,
    CounterArgument,
    Evidence,
    EvidenceKind,
    EvidenceLink,
    SafetyCase,
    ValidationReport,
    Violation,
    content_hash,
    traverse,
    validate_case,
)
from .formats import (
    TabularRow,
    export_tabular,
    import_tabular,
    parse_case,
    read_tabular_csv,
    serialize_case,
    write_tabular_csv,
)
from .evidence import EvidenceHygieneReport, EvidenceStatusScore, score_evidence, score_library
from .assessment import (
    AssessmentLog,
    ClaimAssessment,
    RubricCell,
    assessment_prompts,
    record_assessment,
    rubric_table,
    rubric_text,
)
from .rollup import (
    CONSERVATIVE_MIN,
    WEIGHTED_MEAN,
    Override,
    RadarData,
    RegisterEntry,
    RollupNode,
    RollupResult,
    Spoke,
    Weighting,
    rollup,
    spoke_values,
)
from .lint import LintFinding, lint_case
from .lifecycle import (
    ChangeItem,
    ChangeKind,
    ChangeSet,
    StalenessUpdate,
    TriggerEvent,
    WorkItem,
    classify,
    diff_cases,
    mark_stale,
)
from .report import (
    AssessmentReport,
    Finding,
    SuggestedAction,
    build_report,
    render_markdown,
    render_radar_svg,
    render_report_json,
)
from .service import SessionState, make_server, serve

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

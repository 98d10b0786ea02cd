"""Exhaustive law checking for enriched symmetric monoidal categories
over finite models: function tables, boolean relations, and exact
rational matrices, with structural closures, process-preserving
functors, towers, and a classical non-signalling instantiation.
"""

from hopt.causlite import (
    CausType,
    SupermapVerdict,
    check_causlite,
    check_supermap_preserves,
    choi_vector,
    copy_across,
    correlated_noise,
    deterministic_choi,
    first_order_type,
    hom_type,
    ns_tensor,
    random_stochastic,
    seq_supermap,
)
from hopt.cli import RunConfig, main, render_report, run_program
from hopt.closure import (
    ClosedDerived,
    check_closed_determines_enrichment,
    check_couniversal,
    check_linked,
    curry,
    eval_morphism,
    native_curry,
    native_eval,
    uncurry,
)
from hopt.combs import (
    Comb,
    ClosureMember,
    StructuralClosure,
    build_comb,
    check_combs,
    fill,
    generate_structural_closure,
    is_comb,
    replay_trace,
    trace_from_jsonable,
    trace_to_jsonable,
)
from hopt.enrichment import (
    EnrichedSmc,
    check_enriched_laws,
    check_faithful,
    check_hom_functor,
    check_kappa_bijection,
    get_enrichment,
    partial_insertion,
    standard_enrichments,
    usage_theta,
    usage_theta_at,
)
from hopt.dsl import (
    MODEL_ALIASES,
    Program,
    SUITE_NAMES,
    build_env,
    parse,
)
from hopt.errors import (
    BoundExceededError,
    DslError,
    DslParseError,
    DslTypeError,
    HoptError,
    TypeMismatchError,
    UnsupportedError,
)
from hopt.kernel import (
    FinRelModel,
    FinSetModel,
    MatQModel,
    Morphism,
    ObjectExpr,
)
from hopt.pmcat import (
    FunctorData,
    KaroubiEnrichment,
    KaroubiModel,
    PmFunctor,
    check_pm,
    compose_pm,
    gamma_layer,
    is_fully_faithful,
    karoubi,
    karoubi_embedding,
    raising_functor,
)
from hopt.report import Bounds, LawReport
from hopt.suites import SUITES, run_declared_tower, run_suite
from hopt.towers import (
    FiniteMerger,
    Tower,
    apex_curry,
    apex_eval,
    build_tower,
    check_apex_closed,
    check_apex_matches_closure,
    check_merger,
    check_mu_condition,
    check_tower,
    identity_pm,
    mu,
    trivial_merger,
)

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "BoundExceededError",
    "CausType",
    "ClosedDerived",
    "Comb",
    "ClosureMember",
    "DslError",
    "DslParseError",
    "DslTypeError",
    "EnrichedSmc",
    "FinRelModel",
    "FinSetModel",
    "FiniteMerger",
    "FunctorData",
    "HoptError",
    "KaroubiEnrichment",
    "KaroubiModel",
    "LawReport",
    "MODEL_ALIASES",
    "MatQModel",
    "Morphism",
    "ObjectExpr",
    "PmFunctor",
    "Program",
    "RunConfig",
    "SUITES",
    "SUITE_NAMES",
    "StructuralClosure",
    "SupermapVerdict",
    "Tower",
    "TypeMismatchError",
    "UnsupportedError",
    "apex_curry",
    "apex_eval",
    "build_comb",
    "build_env",
    "build_tower",
    "check_apex_closed",
    "check_apex_matches_closure",
    "check_causlite",
    "check_closed_determines_enrichment",
    "check_combs",
    "check_couniversal",
    "check_enriched_laws",
    "check_faithful",
    "check_hom_functor",
    "check_kappa_bijection",
    "check_linked",
    "check_merger",
    "check_mu_condition",
    "check_pm",
    "check_supermap_preserves",
    "check_tower",
    "choi_vector",
    "compose_pm",
    "copy_across",
    "correlated_noise",
    "curry",
    "deterministic_choi",
    "eval_morphism",
    "fill",
    "first_order_type",
    "gamma_layer",
    "generate_structural_closure",
    "get_enrichment",
    "hom_type",
    "identity_pm",
    "is_comb",
    "is_fully_faithful",
    "karoubi",
    "karoubi_embedding",
    "main",
    "mu",
    "native_curry",
    "native_eval",
    "ns_tensor",
    "parse",
    "partial_insertion",
    "raising_functor",
    "random_stochastic",
    "render_report",
    "replay_trace",
    "run_declared_tower",
    "run_program",
    "run_suite",
    "seq_supermap",
    "standard_enrichments",
    "trace_from_jsonable",
    "trace_to_jsonable",
    "trivial_merger",
    "uncurry",
    "usage_theta",
    "usage_theta_at",
]

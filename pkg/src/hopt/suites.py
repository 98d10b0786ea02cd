"""Suite registry: uniform entry points over every check module.

Each runner takes (enrichment, bounds, options) and returns the list
of LawReports it produced, in a fixed order, so callers can merge
results deterministically regardless of how they schedule the work.
"""

from .causlite import check_causlite
from .closure import (
    check_closed_determines_enrichment,
    check_couniversal,
    check_linked,
)
from .combs import check_combs
from .enrichment import (
    check_enriched_laws,
    check_faithful,
    check_kappa_bijection,
)
from .errors import UnsupportedError
from .pmcat import (
    check_pm,
    gamma_layer,
    is_fully_faithful,
    karoubi,
    karoubi_embedding,
    raising_functor,
)
from .report import Bounds
from .towers import (
    build_tower,
    check_apex_closed,
    check_apex_matches_closure,
    check_merger,
    check_mu_condition,
    check_tower,
    trivial_merger,
)


def _run_enriched(E, bounds, options):
    return [check_enriched_laws(E, bounds,
                                inject=options.get("inject"))]


def _run_faithful(E, bounds, options):
    return [check_faithful(E, bounds),
            check_kappa_bijection(E, bounds)]


def _run_linked(E, bounds, options):
    return [check_linked(E, bounds)]


def _run_closed(E, bounds, options):
    return [check_couniversal(E, bounds),
            check_closed_determines_enrichment(E, bounds)]


def _layer_atoms(E, bounds):
    return [o for o in E.objects(bounds) if not o.is_unit
            and len(o.atoms) == 1]


def _run_pm(E, bounds, options):
    # raising_functor uses gamma_layer as its hom cell, so P1-P3 here
    # exercise the gamma structure maps directly
    rep = check_pm(raising_functor(E), bounds)
    I = E.C.unit()
    for A in _layer_atoms(E, bounds):
        for B in _layer_atoms(E, bounds):
            g = gamma_layer(E, A, B)
            rep.record(
                "gamma-boundary", f"{A!r} {B!r}",
                (repr(g.dom), repr(g.cod)),
                (repr(E.hom_ob(I, E.hom_ob(A, B))),
                 repr(E.hom_ob(E.hom_ob(I, A), E.hom_ob(I, B)))))
    return [rep]


def _run_karoubi(E, bounds, options):
    K = karoubi(E)
    emb = karoubi_embedding(E)
    return [check_enriched_laws(K, bounds),
            check_faithful(K, bounds),
            check_pm(emb, bounds),
            is_fully_faithful(emb, bounds)]


def _run_combs(E, bounds, options):
    return [check_combs(E, bounds)]


def _run_tower(E, bounds, options):
    return [check_tower(E, bounds)]


def _run_causlite(E, bounds, options):
    # fixed exact-rational arithmetic; the model choice is ignored
    return [check_causlite(bounds)]


SUITES = {
    "enriched": _run_enriched,
    "faithful": _run_faithful,
    "linked": _run_linked,
    "closed": _run_closed,
    "pm": _run_pm,
    "karoubi": _run_karoubi,
    "combs": _run_combs,
    "tower": _run_tower,
    "causlite": _run_causlite,
}


def run_suite(name, E, bounds=None, options=None):
    """Run one named suite; reports come back in registry order."""
    try:
        runner = SUITES[name]
    except KeyError:
        raise UnsupportedError(f"unknown suite {name!r}") from None
    return runner(E, bounds or Bounds(), options or {})


def run_declared_tower(E, layer_count, bounds, mu_level=None):
    """The tower suite over an explicitly declared layer list.

    mu_level, when given, checks the mu condition at exactly that
    level; a level the tower cannot host raises BoundExceededError.
    """
    bounds = bounds or Bounds()
    layer_bounds = Bounds(max_size=min(bounds.max_size, 2),
                          samples=bounds.samples, seed=bounds.seed)
    T = build_tower([E] * layer_count, bounds=layer_bounds)
    M = trivial_merger(T)
    reports = [check_merger(M, bounds)]
    if mu_level is not None:
        reports.append(check_mu_condition(M, mu_level, bounds))
    else:
        for i in range(1, M.order - 1):
            reports.append(check_mu_condition(M, i, bounds))
    reports.append(check_apex_closed(M, bounds))
    reports.append(check_apex_matches_closure(M, bounds))
    return reports

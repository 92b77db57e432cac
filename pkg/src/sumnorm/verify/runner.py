"""Running property checks: sampling, judging and replaying counterexamples."""
from __future__ import annotations

import time

import numpy as np

from ..optim import ordered_map
from ..spaces import InputError
from .config import CheckConfig, CheckReport, PropertyId, parse_property
from .properties import CHECKERS, ENGINE_PROPERTIES

#: subject used by properties that do not depend on a class
POLYNOMIAL_SUBJECT = "polynomial"


def subjects(prop: PropertyId, cfg: CheckConfig) -> list:
    """What a property is checked against: engines, preset families, or nothing."""
    if prop in ENGINE_PROPERTIES:
        return list(cfg.engines)
    if prop is PropertyId.LEMMA_PA:
        return [POLYNOMIAL_SUBJECT]
    return list(cfg.families)


def _subject_name(subject) -> str:
    return getattr(subject, "value", subject)


def _sample_rng(cfg: CheckConfig, prop: PropertyId, subject_index: int, sample: int):
    ordinal = list(PropertyId).index(prop)
    return np.random.default_rng([cfg.seed, ordinal, subject_index, sample])


def _run_sample(prop, cfg, subject_index, subject, sample):
    rng = _sample_rng(cfg, prop, subject_index, sample)
    # sample 0 of every subject is the degenerate (zero) case
    return CHECKERS[prop](rng, cfg, subject, sample == 0)


def _counterexample(prop, cfg, subject_index, subject, sample, outcome) -> dict:
    return {"property": prop.value, "seed": cfg.seed, "subject": _subject_name(subject),
            "subject_index": subject_index, "sample": sample, "margin": float(outcome.margin),
            "tolerance": float(outcome.tol), "inputs": outcome.payload}


def check(prop, cfg: CheckConfig | None = None) -> CheckReport:
    """Run ``cfg.samples`` samples of one property per subject."""
    prop = parse_property(prop)
    cfg = cfg or CheckConfig()
    start = time.perf_counter()
    jobs = [(i, subj, k) for i, subj in enumerate(subjects(prop, cfg)) for k in range(cfg.samples)]
    results = ordered_map(lambda job: _run_sample(prop, cfg, *job), jobs)
    worst, cex, worst_excess = float("inf"), None, 0.0
    for (i, subj, k), outcomes in zip(jobs, results):
        for o in outcomes:
            worst = min(worst, o.margin)
            excess = -(o.margin + o.tol)
            if o.failed and (cex is None or excess > worst_excess):
                cex, worst_excess = _counterexample(prop, cfg, i, subj, k, o), excess
    return CheckReport(prop.value, cex is None, worst, len(jobs), cex,
                       time.perf_counter() - start, seed=cfg.seed)


def run_suite(cfg: CheckConfig | None = None, properties=None) -> CheckReport:
    """Every property (or the given ones), aggregated into one report."""
    cfg = cfg or CheckConfig()
    props = list(PropertyId) if properties is None else [parse_property(p) for p in properties]
    start = time.perf_counter()
    children = tuple(check(p, cfg) for p in props)
    failed = [c for c in children if not c.passed]
    return CheckReport("ALL", not failed, min(c.worst_margin for c in children),
                       sum(c.samples for c in children), failed[0].counterexample if failed else None,
                       time.perf_counter() - start, children, cfg.seed)


def replay(counterexample: dict, cfg: CheckConfig | None = None) -> float:
    """Recompute the worst margin of the sample a counterexample came from.

    The sample is regenerated from the seed and indices, so ``cfg`` must
    match the configuration of the original run apart from ``samples``.
    """
    try:
        prop = parse_property(counterexample["property"])
        seed = int(counterexample["seed"])
        i, k = int(counterexample["subject_index"]), int(counterexample["sample"])
    except (KeyError, TypeError, ValueError):
        raise InputError("counterexample needs property, seed, subject_index and sample") from None
    cfg = (cfg or CheckConfig()).with_seed(seed)
    subs = subjects(prop, cfg)
    if not 0 <= i < len(subs):
        raise InputError(f"subject index {i} out of range")
    outcomes = _run_sample(prop, cfg, i, subs[i], k)
    return min(o.margin for o in outcomes)

"""Ranking, summary statistics, sample-size heuristics and run reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    iq_mean: float
    iq_std: float
    count: int
    iq_count: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "iq_mean": self.iq_mean,
            "iq_std": self.iq_std,
            "count": self.count,
            "iq_count": self.iq_count,
        }


@dataclass(frozen=True)
class RankEntry:
    rank: int
    dmu: str
    ka_eps: float
    ka0: float
    kam_efficient: bool
    technically_efficient: bool
    dmu_index: int

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "dmu": self.dmu,
            "ka_eps": self.ka_eps,
            "ka0": self.ka0,
            "technically_efficient": self.technically_efficient,
            "kam_efficient": self.kam_efficient,
        }


@dataclass(frozen=True)
class AdequacyFinding:
    rule: str
    source: str
    expression: str
    threshold: int
    n: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "source": self.source,
            "expression": self.expression,
            "threshold": self.threshold,
            "n": self.n,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Report:
    config: dict
    dmu_names: tuple[str, ...]
    evaluations: tuple
    ranking: tuple[RankEntry, ...]
    summary: SummaryStats
    adequacy: tuple[AdequacyFinding, ...]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "ranking": [r.to_dict() for r in self.ranking],
            "evaluations": [e.to_dict() for e in self.evaluations],
            "summary": self.summary.to_dict(),
            "adequacy": [a.to_dict() for a in self.adequacy],
        }


def neighbor_distance(eps_in, eps_out) -> float:
    """Euclidean length of the perturbation from a DMU to its neighbor."""
    v = np.concatenate([np.asarray(eps_in, dtype=float).ravel(), np.asarray(eps_out, dtype=float).ravel()])
    return float(np.linalg.norm(v))


def rank(evaluations: Sequence[Any], tol: float = 1e-9) -> list[RankEntry]:
    """Competition ranking by descending ka_eps, then ka0, then dataset order.

    Consecutive entries whose ka_eps and ka0 both lie within ``tol`` of the
    first entry of the current tie group share its rank number.
    """
    order = sorted(
        range(len(evaluations)),
        key=lambda i: (-evaluations[i].ka_eps, -evaluations[i].ka0, evaluations[i].dmu_index),
    )
    out: list[RankEntry] = []
    lead = None
    for pos, i in enumerate(order):
        ev = evaluations[i]
        if lead is None or abs(ev.ka_eps - lead.ka_eps) > tol or abs(ev.ka0 - lead.ka0) > tol:
            lead = ev
            current = pos + 1
        out.append(
            RankEntry(
                rank=current,
                dmu=ev.dmu_name,
                ka_eps=ev.ka_eps,
                ka0=ev.ka0,
                kam_efficient=ev.kam_efficient,
                technically_efficient=ev.technically_efficient,
                dmu_index=ev.dmu_index,
            )
        )
    return out


def interquartile_subset(scores: Sequence[float]) -> np.ndarray:
    """Middle half of the sorted scores: drop floor(N/4) from each end."""
    s = np.sort(np.asarray(scores, dtype=float))
    cut = len(s) // 4
    return s[cut : len(s) - cut]


def summary(scores: Sequence[float]) -> SummaryStats:
    s = np.asarray(scores, dtype=float)
    if s.size == 0:
        raise ValueError("summary of an empty score list")
    iq = interquartile_subset(s)
    return SummaryStats(
        mean=float(s.mean()),
        std=float(s.std()),
        iq_mean=float(iq.mean()),
        iq_std=float(iq.std()),
        count=int(s.size),
        iq_count=int(iq.size),
    )


# (rule, source, expression, threshold function)
_RULES = (
    ("golany-roll", "Golany and Roll (1989)", "n > 2(m+p)", lambda m, p: 2 * (m + p)),
    ("banker", "Banker et al. (1989)", "n > 3(m+p)", lambda m, p: 3 * (m + p)),
    ("dyson", "Dyson et al. (2001)", "n > 2mp", lambda m, p: 2 * m * p),
)


def adequacy_report(n: int, m: int, p: int) -> list[AdequacyFinding]:
    """Check the usual rules of thumb on the number of DMUs.

    The findings are informational; KAM scores are computed either way.
    """
    findings = []
    for rule, source, expr, threshold in _RULES:
        t = threshold(m, p)
        findings.append(AdequacyFinding(rule, source, expr, t, n, n > t))
    return findings


def build_report(dataset, config, evaluations: Sequence[Any]) -> Report:
    if len(evaluations) != dataset.n:
        raise ValueError(f"expected {dataset.n} evaluations, got {len(evaluations)}")
    tol = getattr(config, "score_tolerance", 1e-9)
    cfg = config.to_dict() if hasattr(config, "to_dict") else dict(config)
    return Report(
        config=cfg,
        dmu_names=dataset.dmu_names,
        evaluations=tuple(evaluations),
        ranking=tuple(rank(evaluations, tol)),
        summary=summary([e.ka_eps for e in evaluations]),
        adequacy=tuple(adequacy_report(dataset.n, dataset.m, dataset.p)),
    )


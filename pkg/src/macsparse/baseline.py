"""Topology-unaware baseline: keep the K most confident measurements."""

from __future__ import annotations

import numpy as np

from .graph import SelectionVector, SparsificationProblem

__all__ = ["naive_topk"]


def naive_topk(problem: SparsificationProblem) -> SelectionVector:
    """Indicator of the K candidates with the largest rotational weight.

    Ignores graph topology entirely.  Ties broken by ascending edge index.
    """
    order = np.argsort(-problem.candidate_weights, kind="stable")
    return SelectionVector.from_indices(order[: problem.budget],
                                        problem.num_candidates)

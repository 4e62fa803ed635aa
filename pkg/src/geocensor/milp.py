"""MILP encoding of both problem variants, LP-format export, and decoding.

The bilinear rank constraints are emitted pre-linearized: each alternate
location gets an indicator h_j, a product variable w_j and the five
McCormick rows tying w_j to h_j * v_j, where v_j is the kept-score
advantage expression. T is chosen per location from the row's absolute
contribution sum, which makes its validity provable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .model import (
    DeletionPlan,
    Instance,
    PlanStatus,
    ProblemSpec,
    Variant,
    apply_margin,
    make_plan,
    protected_k,
)

Z_TOL = 1e-6


@dataclass(frozen=True)
class LinearRow:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=", ">=" or "="
    rhs: float


@dataclass
class LinearModel:
    binaries: list[str]
    continuous: list[str]
    rows: list[LinearRow]
    objective: dict[str, float]  # sense is always maximize
    big_t: dict[int, float]      # alternate location -> T_j
    variant: Variant
    num_photos: int
    true_location: int


def _contributions(instance: Instance, spec: ProblemSpec) -> dict[int, np.ndarray]:
    t = instance.true_location
    st = instance.scores[:, t]
    return {
        j: instance.scores[:, j] - st - spec.margin
        for j in range(instance.num_locations) if j != t
    }


def build_milp(instance: Instance, spec: ProblemSpec) -> LinearModel:
    """Emit the linearized model for the chosen variant."""
    spec.check(instance)
    n = instance.num_photos
    t = instance.true_location
    contribs = _contributions(instance, spec)
    zs = [f"z{i}" for i in range(n)]
    hs = {j: f"h{j}" for j in contribs}
    ws = {j: f"w{j}" for j in contribs}
    big_t = {j: 1.0 + float(np.abs(c).sum()) for j, c in contribs.items()}

    rows: list[LinearRow] = []
    for j, c in contribs.items():
        T = big_t[j]
        h, w = hs[j], ws[j]
        v = {zs[i]: float(c[i]) for i in range(n)}
        rows.append(LinearRow(f"mc{j}_nonneg", {w: 1.0}, ">=", 0.0))
        rows.append(LinearRow(f"mc{j}_lo0", {w: 1.0, h: T}, ">=", 0.0))
        rows.append(LinearRow(f"mc{j}_hi0", {w: 1.0, h: -T}, "<=", 0.0))
        rows.append(LinearRow(
            f"mc{j}_lo1", {w: 1.0, h: -T, **{k: -cv for k, cv in v.items()}},
            ">=", -T))
        rows.append(LinearRow(
            f"mc{j}_hi1", {w: 1.0, h: T, **{k: -cv for k, cv in v.items()}},
            "<=", T))

    if spec.variant is Variant.TOPK:
        rows.append(LinearRow("rank_card", {h: 1.0 for h in hs.values()},
                              ">=", float(spec.k)))
        objective = {z: 1.0 for z in zs}
    else:
        rows.append(LinearRow("budget", {z: 1.0 for z in zs},
                              ">=", float(n - spec.d)))
        objective = {h: 1.0 for h in hs.values()}

    for i in sorted(spec.keep_set):
        rows.append(LinearRow(f"keep{i}", {zs[i]: 1.0}, "=", 1.0))
    rows.append(LinearRow("nonempty", {z: 1.0 for z in zs}, ">=", 1.0))

    return LinearModel(
        binaries=zs + [hs[j] for j in sorted(hs)],
        continuous=[ws[j] for j in sorted(ws)],
        rows=rows,
        objective=objective,
        big_t=big_t,
        variant=spec.variant,
        num_photos=n,
        true_location=t,
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def export_lp(model: LinearModel) -> str:
    """Deterministic LP-format text for external solvers."""
    lines = ["Maximize"]
    terms = " ".join(f"{c:+.12g} {name}" for name, c in model.objective.items())
    lines.append(f" obj: {terms}")
    lines.append("Subject To")
    for row in model.rows:
        terms = " ".join(f"{c:+.12g} {name}" for name, c in row.coeffs.items())
        lines.append(f" {row.name}: {terms} {row.sense} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for w in model.continuous:
        j = int(w[1:])
        T = model.big_t[j]
        lines.append(f" {_fmt(-T)} <= {w} <= {_fmt(T)}")
    lines.append("Binary")
    lines.append(" " + " ".join(model.binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def decode_solution(instance: Instance, spec: ProblemSpec,
                    assignment: Mapping[str, float],
                    attest_optimal: bool = False) -> DeletionPlan:
    """Round a solver assignment back into a plan, recomputing protected-k
    from the core model; claimed h values are checked but never trusted."""
    spec.check(instance)
    n = instance.num_photos
    deleted = []
    for i in range(n):
        name = f"z{i}"
        if name not in assignment:
            raise ValueError(f"assignment is missing {name}")
        val = float(assignment[name])
        if abs(val) <= Z_TOL:
            deleted.append(i)
        elif abs(val - 1.0) > Z_TOL:
            raise ValueError(f"{name}={val} is not within {Z_TOL} of binary")
    if len(deleted) == n:
        raise ValueError("assignment deletes every photo; plans must keep one")

    eff = apply_margin(instance, spec.margin) if spec.margin > 0 else instance
    kept = set(range(n)) - set(deleted)
    pk = protected_k(eff, kept)

    agg = np.zeros(eff.num_locations)
    for i in sorted(kept):
        agg += eff.scores[i]
    st = agg[eff.true_location]
    for j in range(eff.num_locations):
        if j == eff.true_location:
            continue
        claimed = assignment.get(f"h{j}")
        if claimed is not None and claimed > 0.5 and agg[j] < st:
            warnings.warn(
                f"h{j}=1 claimed but location {j} does not outrank the true "
                f"location in the decoded plan", stacklevel=2)

    if spec.variant is Variant.TOPK:
        satisfied = pk >= spec.k
    else:
        satisfied = len(deleted) <= spec.d
    satisfied = satisfied and spec.keep_set.isdisjoint(deleted)
    if not satisfied:
        status = PlanStatus.INFEASIBLE
    elif attest_optimal:
        status = PlanStatus.OPTIMAL
    else:
        status = PlanStatus.FEASIBLE
    return make_plan(eff, deleted, status)

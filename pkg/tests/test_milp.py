import itertools
import math
import re

import numpy as np
import pytest

from geocensor import (
    PlanStatus,
    ProblemSpec,
    brute_force,
    build_milp,
    decode_solution,
    export_lp,
    gen_random,
    protected_k,
    solve_bnb,
)
from .conftest import random_small


def _satisfies(lhs, sense, rhs):
    if sense == "<=":
        return lhs <= rhs
    if sense == ">=":
        return lhs >= rhs
    return lhs == rhs


class ExactModelEnumerator:
    """Independent evaluation of the row data in exact integer arithmetic.

    Doubles are dyadic rationals, so scaling every coefficient by the
    largest power-of-two denominator turns the whole system into integers;
    interval emptiness for the product variables is then decided exactly,
    with no float cancellation artifacts.
    """

    def __init__(self, model):
        self.model = model
        values = set(model.objective.values())
        for row in model.rows:
            values.update(row.coeffs.values())
            values.add(row.rhs)
        self.denom = max(v.as_integer_ratio()[1] for v in values)
        self.z_rows = []       # rows over z only
        self.h_rows = []       # rows over h only (topk cardinality)
        self.w_groups = {}     # w name -> list of scaled rows
        for row in model.rows:
            scaled = {v: self._scale(c) for v, c in row.coeffs.items()}
            entry = (scaled, row.sense, self._scale(row.rhs))
            wvars = [v for v in row.coeffs if v in set(model.continuous)]
            if wvars:
                assert len(wvars) == 1 and row.coeffs[wvars[0]] == 1.0
                self.w_groups.setdefault(wvars[0], []).append(entry)
            elif any(v.startswith("h") for v in row.coeffs):
                self.h_rows.append(entry)
            else:
                self.z_rows.append(entry)

    def _scale(self, v: float) -> int:
        num, den = float(v).as_integer_ratio()
        return num * (self.denom // den)

    @staticmethod
    def _const(scaled, assign):
        return sum(c for v, c in scaled.items() if v[0] != "w" and assign.get(v))

    def _h_option_feasible(self, w, assign):
        lo, hi = None, None
        for scaled, sense, rhs in self.w_groups[w]:
            bound = rhs - self._const(scaled, assign)
            if sense == ">=":
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        return lo is None or hi is None or lo <= hi

    def evaluate_z(self, z_bits):
        """Returns (structurally_valid, per-location h options) for one z."""
        assign = {f"z{i}": b for i, b in enumerate(z_bits)}
        for scaled, sense, rhs in self.z_rows:
            if not _satisfies(self._const(scaled, assign), sense, rhs):
                return False, {}
        options = {}
        for w in self.model.continuous:
            j = int(w[1:])
            opts = set()
            for hbit in (0, 1):
                assign[f"h{j}"] = hbit
                if self._h_option_feasible(w, assign):
                    opts.add(hbit)
            del assign[f"h{j}"]
            options[j] = opts
        return True, options

    def best_objective(self):
        """Optimum over all binary assignments admitting feasible products."""
        n = self.model.num_photos
        maximize_z = any(v.startswith("z") for v in self.model.objective)
        best = None
        for z_bits in itertools.product((0, 1), repeat=n):
            valid, options = self.evaluate_z(z_bits)
            if not valid or any(not opts for opts in options.values()):
                continue
            max_h = sum(1 in opts for opts in options.values())
            if self.h_rows:
                # the only h-row is the top-k cardinality constraint
                (scaled, sense, rhs), = self.h_rows
                per_h = next(iter(scaled.values()))
                if not _satisfies(per_h * max_h, sense, rhs):
                    continue
            value = sum(z_bits) if maximize_z else max_h
            if best is None or value > best:
                best = value
        return best


class TestBuildModel:
    def test_inst_a_topk_structure(self, inst_a):
        model = build_milp(inst_a, ProblemSpec.topk(1))
        assert model.binaries == ["z0", "z1", "z2", "h0", "h1"]
        assert model.continuous == ["w0", "w1"]
        # 5 McCormick rows per alternate location + cardinality + non-empty
        assert len(model.rows) == 12
        assert model.objective == {"z0": 1.0, "z1": 1.0, "z2": 1.0}
        card = [r for r in model.rows if r.name == "rank_card"]
        assert card and card[0].sense == ">=" and card[0].rhs == 1.0

    def test_inst_a_budget_structure(self, inst_a):
        model = build_milp(inst_a, ProblemSpec.budget(1))
        assert model.objective == {"h0": 1.0, "h1": 1.0}
        budget = [r for r in model.rows if r.name == "budget"]
        assert budget[0].coeffs == {"z0": 1.0, "z1": 1.0, "z2": 1.0}
        assert budget[0].sense == ">=" and budget[0].rhs == 2.0
        assert not any(r.name == "rank_card" for r in model.rows)

    def test_keep_set_pins_variables(self, inst_a):
        model = build_milp(inst_a, ProblemSpec.topk(1, keep_set={2}))
        keep = [r for r in model.rows if r.name == "keep2"]
        assert keep[0].coeffs == {"z2": 1.0}
        assert keep[0].sense == "=" and keep[0].rhs == 1.0

    def test_big_t_strictly_dominates_row_sums(self):
        rng = np.random.default_rng(3)
        for trial in range(10):
            inst = random_small(rng)
            margin = 0.5 if trial % 2 else 0.0
            spec = ProblemSpec.topk(1, margin=margin)
            model = build_milp(inst, spec)
            t = inst.true_location
            for j, T in model.big_t.items():
                row_sum = float(np.abs(
                    inst.scores[:, j] - inst.scores[:, t] - margin).sum())
                assert T > row_sum

    def test_margin_changes_only_coefficients(self, inst_a):
        flat = build_milp(inst_a, ProblemSpec.topk(1))
        hedged = build_milp(inst_a, ProblemSpec.topk(1, margin=0.5))
        assert [r.name for r in flat.rows] == [r.name for r in hedged.rows]
        assert [r.sense for r in flat.rows] == [r.sense for r in hedged.rows]
        for a, b in zip(flat.rows, hedged.rows):
            assert list(a.coeffs) == list(b.coeffs)
        assert flat.big_t != hedged.big_t

    def test_invalid_spec_rejected(self, inst_a):
        with pytest.raises(ValueError):
            build_milp(inst_a, ProblemSpec.topk(3))
        with pytest.raises(ValueError):
            build_milp(inst_a, ProblemSpec.budget(5))


class TestExportLp:
    def test_format_skeleton(self, inst_a):
        text = export_lp(build_milp(inst_a, ProblemSpec.topk(1)))
        assert text.startswith("Maximize")
        binary_section = text.split("Binary")[1]
        assert "z0 z1 z2 h0 h1" in binary_section

    def test_deterministic(self, inst_a):
        spec = ProblemSpec.topk(1)
        assert export_lp(build_milp(inst_a, spec)) == \
            export_lp(build_milp(inst_a, spec))

    def test_reparse_row_count(self, inst_a):
        model = build_milp(inst_a, ProblemSpec.budget(1))
        text = export_lp(model)
        body = text.split("Subject To")[1].split("Bounds")[0]
        rows = [ln for ln in body.splitlines() if re.match(r"^ \w+:", ln)]
        assert len(rows) == len(model.rows)
        senses = [re.search(r"(<=|>=|=) [^ ]+$", ln).group(1) for ln in rows]
        assert senses == [r.sense for r in model.rows]


class TestDecode:
    def test_decode_matches_core_model(self, inst_a):
        spec = ProblemSpec.topk(1)
        plan = decode_solution(inst_a, spec, {"z0": 0.0, "z1": 1.0, "z2": 1.0})
        assert plan.deleted == {0}
        assert plan.protected_k == 1
        assert plan.status is PlanStatus.FEASIBLE

    def test_attested_optimal(self, inst_a):
        spec = ProblemSpec.topk(1)
        plan = decode_solution(inst_a, spec, {"z0": 0.0, "z1": 1.0, "z2": 1.0},
                               attest_optimal=True)
        assert plan.status is PlanStatus.OPTIMAL

    def test_all_kept_on_private_instance(self):
        inst = gen_random(4, 3, 1.0, seed=2)
        spec = ProblemSpec.budget(2)
        plan = decode_solution(inst, spec,
                               {f"z{i}": 1.0 for i in range(4)})
        assert plan.deleted == set()

    def test_full_deletion_rejected(self, inst_a):
        with pytest.raises(ValueError, match="keep"):
            decode_solution(inst_a, ProblemSpec.topk(1),
                            {"z0": 0.0, "z1": 0.0, "z2": 0.0})

    def test_fractional_rejected(self, inst_a):
        with pytest.raises(ValueError, match="binary"):
            decode_solution(inst_a, ProblemSpec.topk(1),
                            {"z0": 0.4, "z1": 1.0, "z2": 1.0})

    def test_missing_variable_rejected(self, inst_a):
        with pytest.raises(ValueError, match="missing"):
            decode_solution(inst_a, ProblemSpec.topk(1), {"z0": 1.0})

    def test_overclaimed_h_warns(self, inst_a):
        # kept {1, 2} aggregates to [-3, 2, 1]: location 0 does not outrank
        spec = ProblemSpec.topk(1)
        with pytest.warns(UserWarning, match="h0"):
            decode_solution(inst_a, spec,
                            {"z0": 0.0, "z1": 1.0, "z2": 1.0, "h0": 1.0})

    def test_unsatisfied_assignment_reports_infeasible(self, inst_a):
        plan = decode_solution(inst_a, ProblemSpec.topk(2),
                               {"z0": 0.0, "z1": 1.0, "z2": 1.0})
        assert plan.status is PlanStatus.INFEASIBLE


class TestEncodingSoundness:
    def test_enumerated_optimum_matches_search(self):
        rng = np.random.default_rng(19)
        for trial in range(12):
            inst = random_small(rng, n_max=6, m_max=4)
            if trial % 2 == 0:
                spec = ProblemSpec.topk(int(rng.integers(1, inst.num_locations)))
            else:
                spec = ProblemSpec.budget(int(rng.integers(0, inst.num_photos)))
            model = build_milp(inst, spec)
            best = ExactModelEnumerator(model).best_objective()
            report = solve_bnb(inst, spec)
            if spec.variant.value == "topk":
                if report.plan.status is PlanStatus.INFEASIBLE:
                    assert best is None
                else:
                    assert best == inst.num_photos - len(report.plan.deleted)
            else:
                assert best == report.plan.protected_k

    def test_no_z_cut_off_and_h_sum_matches_rank(self):
        rng = np.random.default_rng(29)
        for _ in range(8):
            inst = random_small(rng, n_max=6, m_max=4)
            spec = ProblemSpec.budget(inst.num_photos - 1)
            enum = ExactModelEnumerator(build_milp(inst, spec))
            n = inst.num_photos
            for bits in itertools.product((0, 1), repeat=n):
                kept = {i for i in range(n) if bits[i]}
                valid, options = enum.evaluate_z(bits)
                assert valid == bool(kept)  # only the non-empty row cuts a z
                if not valid:
                    continue
                # big T never cuts: every location keeps its h=0 fallback
                assert all(0 in opts for opts in options.values())
                # maximal h sum equals the recomputed protected-k
                max_h = sum(1 in opts for opts in options.values())
                assert max_h == protected_k(inst, kept)

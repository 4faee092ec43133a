from __future__ import annotations

import pytest

from mathforge.errors import ValidationError
from mathforge.fixtures import load_false_patterns
from mathforge.statement import (
    FindingSeverity,
    apply_fixes,
    lint,
)


def fixable_ids(report):
    return [f.rule_id for f in report.fixable]


def test_chained_inequality_suggestion_matches_catalog():
    report = lint("theorem t (a b c : ℝ) (h : a >= b >= c > 0) : a > 0 := by sorry")
    (finding,) = report.fixable
    assert finding.rule_id == "chained_inequality"
    assert finding.suggestion == "a >= b ∧ b >= c ∧ c > 0"


def test_missing_operator_suggestion():
    report = lint("theorem t (a b : ℝ) (h : 0 <= a) : 2a+3b >= 0 := by sorry")
    assert [f.suggestion for f in report.fixable] == ["2*a", "3*b"]
    fixed = apply_fixes("theorem t (a b : ℝ) (h : 0 <= a) : 2a+3b >= 0 := by sorry", report)
    assert "2*a+3*b >= 0" in fixed


def test_missing_operator_ignores_trailing_digit_identifiers():
    report = lint("theorem t (x2 : ℝ) (h : x2 > 0) : x2 ^ 2 > 0 := by sorry")
    assert not report.findings


def test_nat_division_needs_real_binders():
    real = "theorem t (a : ℝ) (h : 0 < a) : a^(1/3) <= a := by sorry"
    report = lint(real)
    assert fixable_ids(report) == ["nat_division"]
    assert report.fixable[0].suggestion == "((1:ℝ)/3)"
    nat_only = "theorem t (a : ℕ) (h : 0 < a) : a^(1/3) <= a := by sorry"
    assert "nat_division" not in lint(nat_only).rule_ids()


def test_sqrt_qualification():
    src = "theorem t (a : ℝ) (h : 0 <= a) : sqrt a >= 0 := by sorry"
    report = lint(src)
    assert fixable_ids(report) == ["namespace_qualification"]
    assert apply_fixes(src, report).count("Real.sqrt") == 1


def test_qualified_sqrt_not_flagged():
    report = lint("theorem t (a : ℝ) (h : 0 <= a) : Real.sqrt a >= 0 := by sorry")
    assert not report.findings


def test_two_patterns_fixed_in_one_pass():
    src = "theorem t (a b : ℝ) (h : 2a >= b >= 0) : b >= 0 := by sorry"
    report = lint(src)
    fixed = apply_fixes(src, report)
    assert "2*a >= b ∧ b >= 0" in fixed
    assert len(lint(fixed).fixable) == 0


def test_apply_fixes_strictly_reduces_fixable_count():
    src = "theorem t (a b c : ℝ) (h : a >= b >= c) : sqrt a >= 0 ∧ 2b >= 0 := by sorry"
    report = lint(src)
    assert len(report.fixable) >= 2
    fixed = apply_fixes(src, report)
    assert len(lint(fixed).fixable) < len(report.fixable)


def test_apply_fixes_identity_on_clean_report():
    src = "theorem t (a : ℝ) (h : 0 < a) : a ^ 2 > 0 := by sorry"
    report = lint(src)
    assert not report.findings
    assert apply_fixes(src, report) == src


def test_apply_fixes_confluent_under_span_order():
    src = "theorem t (a b : ℝ) (ha : 0 <= a) : 2a+3b >= 0 := by sorry"
    report = lint(src)
    fixed_sorted = apply_fixes(src, report)
    # reversing the finding order must not change the result
    from mathforge.statement.lint import LintReport

    reversed_report = LintReport(findings=tuple(reversed(report.findings)))
    assert apply_fixes(src, reversed_report) == fixed_sorted


def test_parse_failure_single_finding():
    report = lint("this is not lean")
    assert [f.rule_id for f in report.findings] == ["parse_failure"]
    assert report.findings[0].severity is FindingSeverity.FLAG


def test_triangle_condition_flag():
    nl = "If a, b, c are side lengths of a triangle, prove the inequality."
    missing = "theorem t (a b c : ℝ) : a / (b + c) <= 2 := by sorry"
    assert "triangle_condition" in lint(missing, nl).rule_ids()
    present = (
        "theorem t (a b c : ℝ) (hab : a + b > c) (hbc : b + c > a) (hca : a + c > b) "
        ": a / (b + c) <= 2 := by sorry"
    )
    assert "triangle_condition" not in lint(present, nl).rule_ids()


def test_extremum_flag_only_with_nl():
    nl = "Find the maximal value of a."
    bare = "theorem t (a : ℝ) (h : a ^ 2 <= 100) : a <= 10 := by sorry"
    assert "missing_extremum_witness" in lint(bare, nl).rule_ids()
    witness = "theorem t : IsGreatest {a : ℝ | a ^ 2 <= 100} 10 := by sorry"
    assert "missing_extremum_witness" not in lint(witness, nl).rule_ids()
    assert "missing_extremum_witness" not in lint(bare).rule_ids()


def test_solution_count_flag_keyed_on_nl_phrases():
    nl = "How many ordered pairs (x, y) of positive integers satisfy x + y = 3?"
    wrong = "theorem t (x y : ℕ) (h : x + y = 3) : x = 1 := by sorry"
    assert "solution_count_set" in lint(wrong, nl).rule_ids()
    finset = (
        "theorem t : (Finset.filter (fun p => p.1 + p.2 = 3) "
        "(Finset.range 4 ×ˢ Finset.range 4)).card = 2 := by sorry"
    )
    assert "solution_count_set" not in lint(finset, nl).rule_ids()


def test_enumeration_flag_is_structural():
    src = "theorem t (x y : ℕ) (h : x + y = 3) : (x,y)=(1,2),(2,1) := by sorry"
    assert "all_solutions_enumeration" in lint(src).rule_ids()
    ok = "theorem t (x y : ℕ) (h : x + y = 3) : (x = 1 ∧ y = 2) ∨ (x = 2 ∧ y = 1) := by sorry"
    assert "all_solutions_enumeration" not in lint(ok).rule_ids()


def test_infinitude_flag():
    nl = "Prove that there are infinitely many positive integers n divisible by 5."
    weak = "theorem t (n : ℕ) (h : 5 ∣ n) : 5 ∣ n := by sorry"
    assert "infinitude_witness" in lint(weak, nl).rule_ids()
    strong = "theorem t : ∀ N : ℕ, ∃ n, N < n ∧ 5 ∣ n := by sorry"
    assert "infinitude_witness" not in lint(strong, nl).rule_ids()


def test_digits_flag():
    nl = "Find the sum of the digits of 2^10."
    wrong = "theorem t (n : ℕ) (h : n = 1024) : n >= 0 := by sorry"
    assert "digit_decomposition" in lint(wrong, nl).rule_ids()
    right = "theorem t : (Nat.digits 10 (2 ^ 10)).sum = 7 := by sorry"
    assert "digit_decomposition" not in lint(right, nl).rule_ids()


def test_lint_is_pure_and_deterministic():
    src = "theorem t (a b : ℝ) (h : a >= b >= 0) : sqrt a >= 0 := by sorry"
    a = lint(src, "maximal triangle digits")
    b = lint(src, "maximal triangle digits")
    assert a == b


def test_fixable_spans_are_disjoint_and_in_bounds():
    for entry in load_false_patterns():
        report = lint(entry["wrong"], entry["nl_text"])
        limit = len(entry["wrong"].encode("utf-8"))
        prev_end = -1
        for f in sorted(report.fixable, key=lambda f: f.span):
            assert 0 <= f.span[0] <= f.span[1] <= limit
            assert f.span[0] >= prev_end
            prev_end = f.span[1]


def test_byte_spans_on_multibyte_text():
    src = "theorem t (a b : ℝ) (h : a ≥ b ≥ 0) : a ≥ 0 := by sorry"
    report = lint(src)
    (finding,) = report.fixable
    data = src.encode("utf-8")
    assert data[finding.span[0] : finding.span[1]].decode("utf-8") == "a ≥ b ≥ 0"
    assert apply_fixes(src, report).count("∧") == 1


def test_overlapping_fixable_spans_rejected():
    from mathforge.statement.lint import Finding, LintReport

    report = LintReport(
        findings=(
            Finding("chained_inequality", (0, 10), FindingSeverity.FIXABLE, "x"),
            Finding("missing_operator", (5, 8), FindingSeverity.FIXABLE, "y"),
        )
    )
    with pytest.raises(ValidationError, match="overlapping"):
        apply_fixes("theorem t : a = a := by sorry", report)

"""Acceptance gate: every headline requirement at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to watch them).  The
heavy enumerations (V = 5) run once per session and are shared through the
module-level caches; V = 6 stays behind the LINKCENSUS_SLOW_TESTS switch.
"""

import math
import os
from fractions import Fraction

import pytest

from linkcensus import abab, census, flype
from linkcensus import onematrix as om
from linkcensus import oracle as oc
from linkcensus.series import Series

F = Fraction
VMAX = 5


def report(label: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {status} {label}" + (f" [{detail}]" if detail else ""), flush=True)
    assert ok, f"{label}: {detail}"


# -- 1. oracle vs closed forms, exact, V = 1..5 -------------------------------------


def test_criterion_1_free_energy_oracle_equivalence():
    closed = om.free_energy_raw_series(VMAX)
    counted = oc.free_energy_series(VMAX)
    ok = closed == counted
    report("1a closed-diagram counts == oracle (V <= 5, exact rationals)", ok,
           f"closed {closed.coeffs} vs oracle {counted.coeffs}")


def test_criterion_1_two_point_oracle_equivalence():
    closed = om.g2_raw_series(VMAX)
    counted = oc.g2_series(VMAX)
    ok = closed == counted
    report("1b two-point counts == oracle (V <= 5, exact rationals)", ok,
           f"closed {closed.coeffs} vs oracle {counted.coeffs}")


def test_criterion_1_tangle_oracle_equivalence():
    closed = om.gamma_raw_series(VMAX)
    counted = oc.gamma_series(VMAX)
    ok = closed == counted
    report("1c connected-four-point counts == oracle (V <= 5, exact rationals)", ok,
           f"closed {closed.coeffs} vs oracle {counted.coeffs}")


@pytest.mark.slow
def test_criterion_1_optional_v6_free_energy():
    closed = om.free_energy_raw_series(6)
    counted = oc.free_energy_series(6)
    report("1d closed-diagram counts == oracle at V = 6 (optional)", closed == counted)


# -- 2. double-factorial totals ------------------------------------------------------


def test_criterion_2_double_factorial_totals():
    mismatches = []
    for V in range(1, VMAX + 1):
        total = oc.enumerate_pairings(V).total()
        expected = oc.double_factorial(4 * V - 1)
        if total != expected:
            mismatches.append((V, total, expected))
    report("2 all-pairings totals equal (4V-1)!! for V = 1..5", not mismatches,
           str(mismatches) if mismatches else "exact")


# -- 3. unit two-point constraint ----------------------------------------------------


def test_criterion_3_unit_two_point_series_identity():
    order = 10
    reduced = om.substitute_renormalized(
        om.g2_raw_series(order), om.t_series(order), legs=2)
    ok = reduced == Series.one(order)
    report("3 renormalized two-point function == 1 through order 10 (exact)", ok,
           str(reduced.coeffs))


# -- 4. growth constants ---------------------------------------------------------------


def test_criterion_4_raw_growth():
    growth = census.raw_growth()
    report("4a raw growth constant == 12 (algebraic)", growth == 12.0, f"{growth!r}")


def test_criterion_4_reduced_growth_exact_and_estimated():
    g_c, growth = census.reduced_cubic_growth()
    exact_ok = g_c == F(4, 27) and growth == 6.75
    est = census.ratio_asymptotics(census.reduced_link_diagrams(12))
    ratio_ok = abs(est.growth - 6.75) / 6.75 < 0.02
    report("4b reduced growth == 27/4 exact; 12-term ratio estimate within 2%",
           exact_ok and ratio_ok,
           f"exact g_c={g_c}, estimate={est.growth:.4f}")


def test_criterion_4_flype_growth():
    sing = flype.flype_singularity()
    target = (101 + math.sqrt(21001)) / 40
    exact_ok = abs(sing.growth - target) <= 1e-10
    fold_ok = sing.agreement <= 1e-8
    report("4c flype growth == (101+sqrt(21001))/40 to 1e-10; fold agrees to 1e-8",
           exact_ok and fold_ok,
           f"growth={sing.growth!r}, fold gap={sing.agreement:.2e}")


def test_criterion_4_two_color_growth():
    cc = abab.critical_constants()
    growth_ok = abs(cc.growth - 6.91167) <= 1e-3
    identity_ok = abs(cc.g_critical / cc.t_critical**2 - 1 / (4 * math.pi)) <= 1e-12
    report("4d two-color growth matches 6.91167 to 1e-3 with coupling identity to 1e-12",
           growth_ok and identity_ok,
           f"growth={cc.growth!r}, identity residual={cc.identity_residual:.2e}")


# -- 5. flype-class series -------------------------------------------------------------


def test_criterion_5_flype_class_series():
    order = 12
    gt = flype.gamma_tilde(order)  # raises if the two routes disagree
    residual_zero = flype.flype_quintic().eval_series(gt).is_zero()
    integral = all(c.denominator == 1 and c > 0 for c in gt.coeffs[1:])
    gamma = om.gamma_reduced_series(order)
    dominated = all(gt.coeffs[p] <= gamma.coeffs[p] for p in range(order + 1))
    strict = any(gt.coeffs[p] < gamma.coeffs[p] for p in range(order + 1))
    report("5 flype-class series: zero residual, positive integers, dominated "
           "with strict deficit by order 12",
           residual_zero and integral and dominated and strict,
           f"counts={tuple(int(c) for c in gt.coeffs)}")


# -- 6. spectral density -----------------------------------------------------------------


def test_criterion_6_spectral_density_checks():
    worst = 0.0
    for i in range(20):
        g = 0.08 * i / 19
        worst = max(worst, abs(om.density_moment(g, 0) - 1.0))
        worst = max(worst, abs(om.density_moment(g, 2) - om.g2_raw(g)))
        worst = max(worst, abs(om.density_moment(g, 4) - om.g4_raw(g)))
    report("6 density normalization and moments 2/4 at 20 couplings to 1e-9",
           worst <= 1e-9, f"worst deviation {worst:.2e}")


# -- 7. replica decomposition --------------------------------------------------------------


def test_criterion_7_replica_decomposition():
    table = census.component_decomposition(VMAX)
    polys_ok = all(
        all(c > 0 for c in table.by_order[p].values())
        and (max(table.by_order[p]) <= p + 1 if table.by_order[p] else True)
        for p in range(1, VMAX + 1)
    )
    n_one_ok = table.evaluate(1) == om.free_energy_raw_series(VMAX).coeffs
    knots = table.knots()
    knots_ok = len(knots) == VMAX + 1 and knots[1] == F(1, 2) and all(
        c > 0 for c in knots[1:])
    report("7 loop-weight polynomials with n=1 specialization exact and a "
           "knot column through p = 5",
           polys_ok and n_one_ok and knots_ok,
           f"knot column={knots}")


# -- 8. scope statement ------------------------------------------------------------------


def test_criterion_8_external_tables_out_of_scope():
    # large-scale published censuses are not reproduced here; the checks above
    # substitute exact oracle equivalence plus algebraic singularities. an
    # import hook exists for side-by-side display only and nothing asserts
    # against it.
    hook_exists = callable(census.load_external_sequence)
    nothing_external = all(
        row.anchor and "external" not in row.anchor for row in census.constants_report()
    )
    report("8 external census comparison is display-only (out of scope)",
           hook_exists and nothing_external)

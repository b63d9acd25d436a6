"""The exhaustive pairing enumerator: engines, stratification, series assembly."""

import math
from fractions import Fraction

import pytest

from linkcensus import onematrix as om
from linkcensus import oracle as oc
from linkcensus.oracle import CROSSING, TANGENCY, _enumerate_plain

F = Fraction


# -- single-vertex ground truth ---------------------------------------------------


def test_single_crossing_table():
    table = oc.enumerate_pairings(1)
    assert table.cells == {(0, 1, True): 2, (1, 2, True): 1}
    assert table.total() == 3


def test_single_tangency_table():
    table = oc.enumerate_pairings(1, oc.VertexModel.generalized(),
                                  type_counts={"tangency": 1, "crossing": 0})
    assert table.cells == {(0, 1, True): 1, (0, 2, True): 1, (1, 1, True): 1}


@pytest.mark.parametrize("V", [1, 2, 3])
def test_double_factorial_totals(V):
    table = oc.enumerate_pairings(V)
    assert table.total() == oc.double_factorial(4 * V - 1)


def test_euler_characteristic_bounds():
    table = oc.enumerate_pairings(3)
    for (genus, strands, connected), count in table.cells.items():
        assert genus >= 0
        assert strands >= 1
        assert count > 0


# -- fast engine against the reference engine --------------------------------------


@pytest.mark.parametrize("V", [1, 2, 3])
def test_fast_matches_reference_closed(V):
    fast = oc.enumerate_pairings(V)
    plain = _enumerate_plain((CROSSING.strand_pairs,) * V, 0, False, False)
    assert fast.cells == dict(sorted(plain.items()))


@pytest.mark.parametrize("V,legs", [(0, 2), (1, 2), (2, 2), (0, 4), (1, 4), (2, 4)])
def test_fast_matches_reference_marked(V, legs):
    fast = oc.two_point_table(V, legs, planar_only=False)
    plain = _enumerate_plain((CROSSING.strand_pairs,) * V, legs, False, False)
    assert fast.cells == dict(sorted(plain.items()))


@pytest.mark.parametrize("V", [1, 2, 3])
def test_planar_mode_equals_genus_zero_slice(V):
    planar = oc.enumerate_pairings(V, planar_only=True)
    full = oc.enumerate_pairings(V)
    assert planar.cells == {k: v for k, v in full.cells.items() if k[0] == 0}


@pytest.mark.parametrize("V", [1, 2, 3])
def test_connected_mode_equals_connected_slice(V):
    conn = oc.enumerate_pairings(V, connected_only=True)
    full = oc.enumerate_pairings(V)
    assert conn.cells == {k: v for k, v in full.cells.items() if k[2]}


@pytest.mark.parametrize("V", [0, 1, 2, 3])
def test_gamma_mode_equals_connected_four_slice(V):
    gamma = oc.two_point_table(V, 4, gamma_only=True)
    full = oc.two_point_table(V, 4)
    assert gamma.cells == {k: v for k, v in full.cells.items() if k[3]}


def test_disconnected_cells_from_connected_convolution():
    """Labeled first-block recursion rebuilds every cell from connected ones."""
    vmax = 4
    conn = {V: {k: v for k, v in oc.enumerate_pairings(V).cells.items() if k[2]}
            for V in range(1, vmax + 1)}

    def convolve(V):
        # all[V][cell] including disconnected, by splitting off vertex 0's block
        if V == 0:
            return {(0, 0): 1}
        out = {}
        for s in range(1, V + 1):
            ways = math.comb(V - 1, s - 1)
            for (h1, k1, _c), c1 in conn[s].items():
                for (h2, k2), c2 in convolve(V - s).items():
                    key = (h1 + h2, k1 + k2)
                    out[key] = out.get(key, 0) + ways * c1 * c2
        return out

    for V in range(1, vmax + 1):
        rebuilt = convolve(V)
        table = oc.enumerate_pairings(V)
        merged = {}
        for (h, k, _conn), c in table.cells.items():
            merged[(h, k)] = merged.get((h, k), 0) + c
        assert merged == rebuilt


def test_relabeling_invariance_mixed_model():
    orders = [
        (CROSSING.strand_pairs, TANGENCY.strand_pairs, CROSSING.strand_pairs),
        (CROSSING.strand_pairs, CROSSING.strand_pairs, TANGENCY.strand_pairs),
        (TANGENCY.strand_pairs, CROSSING.strand_pairs, CROSSING.strand_pairs),
    ]
    tables = [_enumerate_plain(patterns, 0, False, False) for patterns in orders]
    assert tables[0] == tables[1] == tables[2]


def test_mixed_model_total_and_planar_cells():
    table = oc.enumerate_pairings(2, oc.VertexModel.generalized(),
                                  type_counts={"crossing": 1, "tangency": 1})
    assert table.total() == oc.double_factorial(7)
    planar_conn = {k: v for k, v in table.cells.items() if k[2] and k[0] == 0}
    assert planar_conn == {(0, 1, True): 20, (0, 2, True): 16}


# -- two-point tables and series -----------------------------------------------------


def test_two_point_coefficients_match_closed_forms():
    assert oc.g2_series(3) == om.g2_raw_series(3)
    assert oc.g4_series(3) == om.g4_raw_series(3)
    assert oc.gamma_series(3) == om.gamma_raw_series(3)


def test_boundary_strand_count_is_consistent():
    table = oc.two_point_table(2, 2)
    assert all(kext == 1 for (_h, _kin, kext, _c4, _t) in table.cells)
    table4 = oc.two_point_table(2, 4)
    assert {kext for (_h, _kin, kext, _c4, _t) in table4.cells} <= {1, 2}


def test_loop_polynomial_of_single_table():
    table = oc.enumerate_pairings(2, planar_only=True, connected_only=True)
    assert oc.loop_polynomial(table) == {1: F(1), 2: F(1, 8)}


def test_free_energy_polynomials_low_orders():
    polys = oc.free_energy_polynomials(4)
    assert polys[1] == {1: F(1, 2)}
    assert polys[2] == {1: F(1), 2: F(1, 8)}
    assert polys[3] == {1: F(7, 2), 2: F(1)}
    assert polys[4] == {1: F(65, 4), 2: F(57, 8), 3: F(1, 4)}


def test_loop_polynomials_positive_and_degree_bounded():
    polys = oc.free_energy_polynomials(4)
    for V, poly in polys.items():
        assert all(c > 0 for c in poly.values())
        assert max(poly) <= V + 1


def test_free_energy_specializations():
    assert oc.free_energy_series(4, n=1) == om.free_energy_raw_series(4)
    two_color = oc.free_energy_series(4, n=2)
    assert two_color.coeffs == (0, 1, F(5, 2), 11, 63)


def test_half_loop_weight_is_rational():
    series = oc.free_energy_series(3, n=F(1, 2))
    assert series[1] == F(1, 4)


def test_reduced_tangles_from_oracle_data_alone():
    order = 4
    t = om.solve_unit_two_point(oc.g2_series(order))
    reduced = om.substitute_renormalized(oc.gamma_series(order), t, legs=4)
    assert reduced == om.gamma_reduced_series(order)


def test_twopi_tangle_series_raw():
    assert oc.twopi_gamma_series(3).coeffs == (0, 1, 8, 60)


def test_twopi_tangles_renormalize_to_skeleton_form():
    from linkcensus import flype

    order = 3
    t = om.solve_unit_two_point(oc.g2_series(order))
    reduced_2pi = om.substitute_renormalized(oc.twopi_gamma_series(order), t, legs=4)
    expected = flype.d_of_gamma(om.gamma_reduced_series(order))
    assert reduced_2pi == expected
    assert reduced_2pi.coeffs == (0, 1, 0, 0)


@pytest.mark.slow
def test_twopi_tangles_renormalize_to_skeleton_form_deeper():
    from linkcensus import flype

    order = 4
    t = om.solve_unit_two_point(oc.g2_series(order))
    reduced_2pi = om.substitute_renormalized(oc.twopi_gamma_series(order), t, legs=4)
    assert reduced_2pi == flype.d_of_gamma(om.gamma_reduced_series(order))


# -- interfaces ----------------------------------------------------------------------


def test_ceiling_is_enforced_with_message():
    with pytest.raises(oc.CeilingError, match="ceiling 6"):
        oc.enumerate_pairings(7)
    with pytest.raises(oc.CeilingError):
        oc.two_point_table(9, 2)


def test_vertex_model_validation():
    with pytest.raises(ValueError):
        oc.VertexModel((oc.VertexType("bad", ((0, 1), (1, 2)), "x"),))


def test_pairing_diagram_validation():
    with pytest.raises(ValueError):
        oc.PairingDiagram(1, (CROSSING,), (1, 0, 3, 3))
    diagram = oc.PairingDiagram(1, (CROSSING,), (1, 0, 3, 2))
    assert diagram.num_vertices == 1


def test_iter_pairings_counts():
    assert sum(1 for _ in oc.iter_pairings(1)) == 3
    assert sum(1 for _ in oc.iter_pairings(1, legs=2)) == 15


def test_classify_pairing_single_crossing():
    faces, kin, kext, comps = oc.classify_pairing((1, 0, 3, 2), (CROSSING.strand_pairs,))
    assert (faces, kin, comps) == (3, 1, 1)


def test_csv_export_schema():
    table = oc.enumerate_pairings(1)
    text = oc.count_table_csv([table])
    lines = text.strip().split("\n")
    assert lines[0] == "V,vertex_type_counts,genus,strands,connected,count"
    assert "1,crossing=1,0,1,true,2" in lines
    assert "1,crossing=1,1,2,true,1" in lines


def test_thread_count_does_not_change_results():
    base = oc._fast_search(3, 0, (2, 3, 0, 1), False, True, False)
    merged = oc._run_fast(3, 0, (2, 3, 0, 1), False, True, False, False, threads=1)
    assert base == merged
    # force the parallel path on a small case by lowering the split threshold
    prefixes = oc._fast_search(4, 0, (2, 3, 0, 1), False, True, False, depth_cap=2)
    total = {}
    for prefix in prefixes:
        part = oc._fast_search(4, 0, (2, 3, 0, 1), False, True, False, prefix=prefix)
        for key, value in part.items():
            total[key] = total.get(key, 0) + value
    assert total == oc.enumerate_pairings(4).cells


def test_multiprocess_merge_matches_sequential():
    seq = oc.enumerate_pairings(4, planar_only=True).cells
    par = oc._run_fast(4, 0, (2, 3, 0, 1), True, True, False, False, threads=2)
    assert par == seq

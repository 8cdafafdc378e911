import cmath
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import WAVELENGTH, open_layout
from oracles import free_space_amplitude, segment_hits_box
from irs_beamsim.env_model import (Blocker, PathComponent, PathSet, Scatterer, SiteLayout, UEArea,
                                   array_frame, export_paths, import_paths, inside_blocker,
                                   local_angles, read_locations, sample_ue_locations,
                                   segment_blocked, trace_bs_irs, trace_irs_ue, trace_paths,
                                   write_locations)
from irs_beamsim.errors import DegenerateGeometry, LayoutError, ParseError, UnitError
from irs_beamsim.harness.config import default_layout

BOX = Blocker((4, -1, 0), (6, 1, 2))


# ---------------------------------------------------------------- blockage

@pytest.mark.parametrize("p1,p2,expected", [
    ((0, 0, 1), (10, 0, 1), True),
    ((0, 0, 5), (10, 0, 5), False),
    ((0, 0, 1), (3, 0, 1), False),
])
def test_segment_blocked_examples(p1, p2, expected):
    assert segment_blocked(p1, p2, [BOX]) is expected


def test_touching_faces_do_not_block():
    assert not segment_blocked((0, 0, 1), (4, 0, 1), [BOX])      # ends on a face
    assert not segment_blocked((0, 1, 1), (10, 1, 1), [BOX])     # slides along a face
    assert not segment_blocked((4, -1, 0), (6, 1, 2), [Blocker((6, -1, 0), (8, 1, 2))])
    assert segment_blocked((4.5, 0, 1), (5.5, 0, 1), [BOX])     # entirely inside


def test_no_blockers():
    assert not segment_blocked((0, 0, 0), (1, 1, 1), [])


coord = st.floats(-5, 5, allow_nan=False).map(lambda x: round(x, 1))
point = st.tuples(coord, coord, coord)


@given(point, point, point, point)
def test_segment_blocked_matches_oracle(p1, p2, c1, c2):
    if p1 == p2:
        return
    lo = tuple(min(a, b) for a, b in zip(c1, c2))
    hi = tuple(max(a, b) for a, b in zip(c1, c2))
    assert segment_blocked(p1, p2, [Blocker(lo, hi)]) == segment_hits_box(p1, p2, lo, hi)


def test_inside_blocker():
    assert inside_blocker((5, 0, 1), [BOX])
    assert not inside_blocker((4, 0, 1), [BOX])
    assert not inside_blocker((7, 0, 1), [BOX])


# ---------------------------------------------------------------- layout

def test_layout_validation():
    with pytest.raises(DegenerateGeometry):
        SiteLayout((0, 0, 5), (1, 0, 0), (0, 0, 5), (1, 0, 0), UEArea(0, 1, 0, 1))
    with pytest.raises(LayoutError):
        open_layout(blockers=[Blocker((9, -1, 0), (11, 1, 10))])
    with pytest.raises(LayoutError):
        open_layout(wavelength=0.0)
    with pytest.raises(LayoutError):
        Blocker((1, 0, 0), (0, 1, 1))
    with pytest.raises(LayoutError):
        Scatterer((0, 0, 0), 0.0)
    with pytest.raises(LayoutError):
        Scatterer((0, 0, 0), 1.5)


def test_frame_is_right_handed_and_orthonormal():
    for b in [(1, 0, 0), (0, 0, 1), (-1, -0.6, -0.25), (0.3, 0.2, -0.9)]:
        fr = array_frame(b)
        np.testing.assert_allclose(fr @ fr.T, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(np.cross(fr[0], fr[1]), fr[2], atol=1e-12)
        np.testing.assert_allclose(fr[2], np.asarray(b) / np.linalg.norm(b), atol=1e-12)


@given(st.tuples(*[st.floats(-1, 1)] * 3))
def test_local_angle_ranges(d):
    if np.linalg.norm(d) < 1e-3:
        return
    z, a = local_angles(array_frame((0.3, -1, 0.2)), d)
    assert 0 <= z <= math.pi
    assert -math.pi <= a < math.pi


def test_boresight_direction_has_zero_zenith():
    z, _ = local_angles(array_frame((1, 0, 0)), (2, 0, 0))
    assert z == 0.0


# ---------------------------------------------------------------- tracing

def test_los_only_link():
    lay = open_layout()
    paths = trace_bs_irs(lay)
    assert len(paths) == 1
    d = math.dist(lay.bs_position, lay.irs_position)
    assert abs(paths[0].gain) == pytest.approx(free_space_amplitude(d, WAVELENGTH), rel=1e-12)
    ref = cmath.exp(-2j * math.pi * d / WAVELENGTH)
    assert paths[0].gain / abs(paths[0].gain) == pytest.approx(ref, abs=1e-9)
    assert paths[0].delay == pytest.approx(d / 299792458.0)
    # the BS is aimed at the IRS: the LoS leaves along its boresight
    assert paths[0].depart_zenith == pytest.approx(0.0, abs=1e-7)


def test_blocked_ue_link_is_empty():
    lay = open_layout(blockers=[Blocker((3, -1, 0), (4, 1, 4))])
    assert trace_irs_ue(lay, (8.0, 0.0, 1.5)) == []


def test_single_scatterer_amplitude():
    # IRS->S is 5 m, S->UE is 3 m, the direct path is boxed in
    s = Scatterer((3.0, 4.0, 5.0), 0.3)
    lay = open_layout(blockers=[Blocker((1, 1.5, 3), (2, 2.5, 4))], scatterers=[s])
    paths = trace_irs_ue(lay, (3.0, 4.0, 2.0))
    assert len(paths) == 1
    assert abs(paths[0].gain) == pytest.approx(3.19304604578115e-05, rel=1e-12)
    assert abs(paths[0].gain) == pytest.approx(free_space_amplitude(8.0, WAVELENGTH, 0.3), rel=1e-12)


def test_degenerate_ue():
    lay = open_layout()
    with pytest.raises(DegenerateGeometry):
        trace_irs_ue(lay, lay.irs_position)
    with pytest.raises(DegenerateGeometry):
        trace_irs_ue(open_layout(scatterers=[Scatterer((5, 0, 1.5))]), (5, 0, 1.5))


@given(st.floats(0.5, 50), st.floats(0.01, 20))
def test_amplitude_decreases_with_distance(d, extra):
    lay = open_layout()
    near = trace_irs_ue(lay, (d, 0.0, 5.0))[0]
    far = trace_irs_ue(lay, (d + extra, 0.0, 5.0))[0]
    assert abs(far.gain) < abs(near.gain)


def test_trace_is_deterministic():
    lay = default_layout()
    for ue in [(5.0, 1.0, 1.5), (12.0, -4.0, 1.5)]:
        assert trace_paths(lay, ue) == trace_paths(lay, ue)


def _gains(paths):
    return {p.gain for p in paths}


@pytest.mark.parametrize("seed", [0, 2, 3, 4, 5, 6])
def test_blockers_only_remove_paths(seed):
    from dataclasses import replace
    lay = default_layout(seed=seed)
    bare = replace(lay, blockers=())
    fewer = replace(lay, blockers=lay.blockers[: len(lay.blockers) // 2])
    for ue in sample_ue_locations(lay.ue_area, 5, seed):
        full, half, none = (_gains(trace_irs_ue(x, ue)) for x in (lay, fewer, bare))
        assert full <= half <= none


# ---------------------------------------------------------------- sampling

def test_sample_degenerate_area():
    assert sample_ue_locations(UEArea(2, 2, 3, 3, 1.5), 1, 0) == [(2.0, 3.0, 1.5)]


def test_sample_reproducible_and_inside():
    area = UEArea(3, 13, -5, 5)
    a = sample_ue_locations(area, 984, 7)
    assert a == sample_ue_locations(area, 984, 7)
    assert len(a) == 984 and all(area.contains(p) for p in a)
    assert a != sample_ue_locations(area, 984, 8)


def test_sample_mean_is_center():
    area = UEArea(3, 13, -5, 5)
    pts = np.array(sample_ue_locations(area, 100_000, 1))
    assert abs(pts[:, 0].mean() - 8.0) < 0.1
    assert abs(pts[:, 1].mean() - 0.0) < 0.1
    assert np.all(pts[:, 2] == 1.5)


def test_sample_rejects_nonpositive_count():
    with pytest.raises(ValueError):
        sample_ue_locations(UEArea(0, 1, 0, 1), 0, 0)


# ---------------------------------------------------------------- path files

HEADER = "link,power_db,phase_deg,depart_zenith_rad,depart_azimuth_rad,arrive_zenith_rad,arrive_azimuth_rad,delay_s\n"


def test_import_example_row():
    ps = import_paths(io.StringIO(HEADER + "bs_irs,-60.0,45.0,1.3962,0.0,1.5708,3.1415,3.3e-7\n"))
    (p,) = ps.bs_irs_paths
    assert ps.irs_ue_paths == ()
    assert abs(p.gain) == pytest.approx(1e-3, rel=1e-12)
    assert math.degrees(cmath.phase(p.gain)) == pytest.approx(45.0, abs=1e-9)
    assert (p.depart_zenith, p.arrive_azimuth, p.delay) == (1.3962, 3.1415, 3.3e-7)


def test_import_rejects_bad_rows():
    cases = [
        ("bs_irs,inf,0,0,0,0,0,0\n", UnitError),
        ("bs_irs,-3,0,3.5,0,0,0,0\n", UnitError),
        ("bs_irs,-3,0,0,3.1416,0,0,0\n", UnitError),
        ("bs_irs,-3,0,0,0,0,0,-1\n", UnitError),
        ("bs_irs,-3,0,0,0\n", ParseError),
        ("ue_bs,-3,0,0,0,0,0,0\n", ParseError),
        ("bs_irs,abc,0,0,0,0,0,0\n", ParseError),
    ]
    for row, err in cases:
        with pytest.raises(err) as info:
            import_paths(io.StringIO(HEADER + "irs_ue,-80,0,0,0,0,0,0\n" + row))
        assert info.value.line == 3
    with pytest.raises(ParseError):
        import_paths(io.StringIO("power,phase\n"))
    with pytest.raises(ParseError):
        import_paths(io.StringIO(""))


def test_import_minus_inf_power_is_zero_gain():
    ps = import_paths(io.StringIO(HEADER + "irs_ue,-inf,0,0,0,0,0,0\n"))
    assert ps.irs_ue_paths[0].gain == 0


angle_z = st.floats(0, math.pi)
angle_a = st.floats(-math.pi, math.pi, exclude_max=True)
path_st = st.builds(
    PathComponent,
    st.complex_numbers(min_magnitude=1e-9, max_magnitude=1.0),
    angle_z, angle_a, angle_z, angle_a, st.floats(0, 1e-5),
)


@given(st.lists(path_st, max_size=4), st.lists(path_st, max_size=4))
def test_export_import_round_trip(a, b):
    buf = io.StringIO()
    export_paths(PathSet(a, b), buf)
    buf.seek(0)
    back = import_paths(buf)
    for orig, new in zip(a + b, back.bs_irs_paths + back.irs_ue_paths):
        assert abs(orig.gain - new.gain) <= 1e-12 * max(1.0, abs(orig.gain))
        for f in ("depart_zenith", "depart_azimuth", "arrive_zenith", "arrive_azimuth", "delay"):
            assert abs(getattr(orig, f) - getattr(new, f)) <= 1e-12
    assert (len(back.bs_irs_paths), len(back.irs_ue_paths)) == (len(a), len(b))


def test_traced_paths_round_trip(tmp_path):
    lay = default_layout()
    ps = trace_paths(lay, (6.0, 2.0, 1.5))
    export_paths(ps, tmp_path / "p.csv")
    back = import_paths(tmp_path / "p.csv")
    assert len(back.bs_irs_paths) == len(ps.bs_irs_paths)
    for x, y in zip(ps.irs_ue_paths, back.irs_ue_paths):
        assert abs(x.gain - y.gain) <= 1e-12 * abs(x.gain)


def test_location_file_round_trip(tmp_path):
    pts = sample_ue_locations(UEArea(0, 1, 0, 1), 10, 3)
    write_locations(pts, tmp_path / "l.csv")
    assert read_locations(tmp_path / "l.csv") == pts

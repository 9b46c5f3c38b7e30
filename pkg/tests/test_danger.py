from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from headlight_sim.danger import (
    FACING_WINDOWS,
    DangerConfig,
    Policy,
    Section,
    classify_section,
    classify_section_legacy,
    danger_mask,
    danger_threshold,
    dangerous_subset,
    detect_danger,
    is_facing_vehicle,
)


def track(x, y, speed, yaw, tid=0):
    return SimpleNamespace(track_id=tid, position=np.array([x, y, 0.0]), speed=speed, yaw=yaw)


@pytest.mark.parametrize("center,section", [((5, 0, 0), Section.FRONT), ((5, 1, 0), Section.LEFT),
                                             ((5, -2, 0), Section.RIGHT), ((5, -1, 0), Section.RIGHT)])
def test_classify_section(center, section):
    assert classify_section(center, DangerConfig(vehicle_width_w=1.0)) is section


@pytest.mark.parametrize("center,section", [((1, 0, 0), Section.FRONT), ((1, 2, 0), Section.LEFT),
                                             ((1, -1, 0), Section.FRONT), ((1, -3, 0), Section.RIGHT)])
def test_classify_section_legacy(center, section):
    assert classify_section_legacy(center) is section


@pytest.mark.parametrize(
    "policy,section,yaw,facing",
    [
        (Policy.CURRENT, Section.LEFT, 270.0, True),
        (Policy.CURRENT, Section.LEFT, 190.0, False),
        (Policy.CURRENT, Section.LEFT, 195.0, True),
        (Policy.CURRENT, Section.FRONT, 0.0, False),
        (Policy.CURRENT, Section.RIGHT, 165.0, True),
        (Policy.LEGACY, Section.FRONT, 0.0, True),
        (Policy.LEGACY, Section.LEFT, 0.0, False),
        (Policy.LEGACY, Section.RIGHT, 0.0, True),
        (Policy.CURRENT, Section.FRONT, None, True),
    ],
)
def test_is_facing(policy, section, yaw, facing):
    assert is_facing_vehicle(yaw, section, policy) is facing


def test_current_windows_are_150_degrees():
    for lo, hi in FACING_WINDOWS[Policy.CURRENT].values():
        assert hi - lo == 150
        assert sum(lo <= y <= hi for y in range(360)) == 151


@pytest.mark.parametrize("speed,t,expected", [(2, 3, 6), (0, 3, 0), (10, 1, 10)])
def test_threshold(speed, t, expected):
    assert danger_threshold(speed, DangerConfig(reaction_time_s=t)) == expected


def test_threshold_rejects_negative_speed():
    with pytest.raises(ValueError):
        danger_threshold(-1, DangerConfig())


def test_detect_danger_examples():
    cfg = DangerConfig(reaction_time_s=3)
    near, far = detect_danger([track(5, 0, 2, 180.0, 1), track(7, 0, 2, 180.0, 2)], cfg)
    assert near.dangerous and near.section is Section.FRONT and near.threshold_m == 6
    assert not far.dangerous
    assert [v.track_id for v in dangerous_subset([near, far])] == [1]


def test_parallel_object_policy_difference():
    t = track(3, 3, 1.5, 0.0)
    assert not detect_danger([t], DangerConfig(policy=Policy.CURRENT))[0].dangerous
    assert detect_danger([t], DangerConfig(policy=Policy.LEGACY))[0].dangerous


def test_rear_objects_never_dangerous():
    v = detect_danger([track(-1, 0, 10, 0.0)], DangerConfig())[0]
    assert not v.dangerous and v.section is None


def test_config_validation():
    with pytest.raises(ValueError):
        DangerConfig(reaction_time_s=0)
    with pytest.raises(ValueError):
        DangerConfig(vehicle_width_w=-1)
    assert DangerConfig(policy="legacy").policy is Policy.LEGACY


coord = st.floats(-30, 30, allow_nan=False)
fwd = st.floats(0, 30, allow_nan=False)
yaw_st = st.one_of(st.none(), st.integers(0, 719).map(lambda k: k / 2))
speed_st = st.floats(0, 15, allow_nan=False)


@given(fwd, coord, st.floats(0.1, 5))
def test_section_partition(x, y, w):
    cfg = DangerConfig(vehicle_width_w=w)
    hits = [y >= w, y <= -w, -w < y < w]
    assert sum(hits) == 1
    assert classify_section((x, y, 0), cfg) is [Section.LEFT, Section.RIGHT, Section.FRONT][hits.index(True)]


@given(fwd, coord, speed_st, yaw_st, st.floats(0.1, 5), st.floats(0, 5), st.sampled_from(list(Policy)))
def test_monotone_in_reaction_time(x, y, s, yaw, t, extra, policy):
    tr = [track(x, y, s, yaw)]
    lo = detect_danger(tr, DangerConfig(reaction_time_s=t, policy=policy))[0]
    hi = detect_danger(tr, DangerConfig(reaction_time_s=t + extra, policy=policy))[0]
    assert not lo.dangerous or hi.dangerous


def mirror(yaw):
    return None if yaw is None else (360.0 - yaw) % 360.0


@given(fwd, coord, speed_st, yaw_st)
def test_mirror_symmetry_current(x, y, s, yaw):
    cfg = DangerConfig()
    a = detect_danger([track(x, y, s, yaw)], cfg)[0]
    b = detect_danger([track(x, -y, s, mirror(yaw))], cfg)[0]
    assert a.dangerous == b.dangerous
    swap = {Section.LEFT: Section.RIGHT, Section.RIGHT: Section.LEFT, Section.FRONT: Section.FRONT}
    assert b.section is swap[a.section]


@given(fwd, coord, speed_st, yaw_st.filter(lambda v: v != 0.0))
def test_mirror_symmetry_legacy_off_axis_yaw(x, y, s, yaw):
    # yaw 0 is the one exception: it sits in the closed right window but
    # mirrors onto 360, the open end of the left window
    cfg = DangerConfig(policy=Policy.LEGACY)
    a = detect_danger([track(x, y, s, yaw)], cfg)[0]
    b = detect_danger([track(x, -y, s, mirror(yaw))], cfg)[0]
    assert a.dangerous == b.dangerous


def test_current_windows_inside_legacy_windows():
    for section in Section:
        for yaw in range(360):
            if is_facing_vehicle(float(yaw), section, Policy.CURRENT):
                assert is_facing_vehicle(float(yaw), section, Policy.LEGACY)


@given(fwd, coord, speed_st, yaw_st)
def test_legacy_superset_when_sections_agree(x, y, s, yaw):
    cur = detect_danger([track(x, y, s, yaw)], DangerConfig())[0]
    leg = detect_danger([track(x, y, s, yaw)], DangerConfig(policy=Policy.LEGACY))[0]
    if cur.section is leg.section and cur.dangerous:
        assert leg.dangerous


def test_sections_can_disagree_near_the_vehicle():
    # inside the lane but at a steep bearing: Front for the lane split,
    # Right for the 45 degree split, where yaw 181 is not facing
    t = track(0.5, -1.0, 2.0, 181.0)
    assert detect_danger([t], DangerConfig())[0].dangerous
    leg = detect_danger([t], DangerConfig(policy=Policy.LEGACY))[0]
    assert leg.section is Section.RIGHT and not leg.dangerous


@pytest.mark.parametrize("policy", list(Policy))
def test_mask_agrees_with_scalar_path(policy):
    rng = np.random.default_rng(11)
    n = 5000
    pos = np.column_stack([rng.uniform(-5, 30, n), rng.uniform(-10, 10, n)])
    pos[:50, 1] = 2.0  # exact section boundary
    speeds = rng.integers(0, 10, n).astype(float)
    yaws = rng.integers(0, 360, n).astype(float)
    yaws[::97] = np.nan
    cfg = DangerConfig(policy=policy)
    mask = danger_mask(pos, speeds, yaws, cfg)
    tracks = [track(p[0], p[1], s, None if np.isnan(y) else y, i) for i, (p, s, y) in enumerate(zip(pos, speeds, yaws))]
    assert mask.tolist() == [v.dangerous for v in detect_danger(tracks, cfg)]

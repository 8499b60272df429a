import numpy as np
import pytest
from hypothesis import given, strategies as st

from asynclife.engine import BoundaryMode, Grid
from asynclife.patterns import (
    BLINKER,
    GLIDER,
    crop_to_content,
    dihedral_transforms,
    format_cells,
    glider_phases,
    load_grid,
    parse_cells,
    save_grid,
)


def test_parse_basic():
    arr = parse_cells("010\n001\n111\n")
    assert np.array_equal(arr, GLIDER)


def test_parse_with_header():
    arr = parse_cells("3 2\n010\n111\n")
    assert arr.shape == (2, 3)


def test_parse_header_mismatch():
    with pytest.raises(ValueError):
        parse_cells("4 2\n010\n111\n")


def test_parse_rejects_bad_chars():
    with pytest.raises(ValueError):
        parse_cells("01x\n010\n")
    with pytest.raises(ValueError):
        parse_cells("")
    with pytest.raises(ValueError):
        parse_cells("010\n01\n")


def test_format_round_trip():
    text = format_cells(GLIDER, header=True)
    assert text.splitlines()[0] == "3 3"
    assert np.array_equal(parse_cells(text), GLIDER)


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32), st.booleans())
def test_round_trip_property(h, w, seed, header):
    arr = (np.random.default_rng(seed).random((h, w)) < 0.5).astype(np.uint8)
    assert np.array_equal(parse_cells(format_cells(arr, header=header)), arr)


def test_save_load_grid(tmp_path):
    g = Grid.from_array(np.pad(GLIDER, 1), BoundaryMode.FIXED_ZERO)
    path = tmp_path / "snap.txt"
    save_grid(g, path)
    loaded = load_grid(path, BoundaryMode.FIXED_ZERO)
    assert loaded.equals(g)


def test_dihedral_transforms_count():
    mats = dihedral_transforms(GLIDER)
    assert len(mats) == 8
    assert len({m.tobytes() + bytes(m.shape) for m in mats}) == 8  # glider is chiral


def test_crop_to_content():
    padded = np.pad(BLINKER, ((2, 1), (0, 3)))
    assert np.array_equal(crop_to_content(padded), BLINKER)
    with pytest.raises(ValueError):
        crop_to_content(np.zeros((3, 3), dtype=np.uint8))


def test_glider_phases_shape_and_count():
    phases = glider_phases()
    assert len(phases) == 4
    for ph in phases:
        assert ph.shape == (3, 3)
        assert ph.sum() == 5
    # consecutive phases are distinct matrices
    assert len({ph.tobytes() for ph in phases}) == 4

import argparse
import math

import pytest

from heckelab_config import default_config
from scans.base_scan import (
    form_index,
    half_plane_point,
    level_list,
    nonnegative_int,
    positive_int,
    unit_point,
    value_grid,
)
from scans.rn_enumerate_scan import RnEnumerateScan
from scans.scan_factory import ScanFactory


def test_value_grid():
    assert value_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert value_grid("2:2:1") == (2.0,)
    assert value_grid("0.5,4") == (0.5, 4.0)


@pytest.mark.parametrize("text", ["1:0:3", "0:1:0", "0:1", "a:b:c", "0,x"])
def test_value_grid_rejects(text):
    with pytest.raises(argparse.ArgumentTypeError):
        value_grid(text)


def test_unit_point():
    x = unit_point("0,3,4")
    assert x == pytest.approx((0.0, 0.6, 0.8))
    assert math.fsum(v * v for v in x) == pytest.approx(1.0)
    for text in ("0,0,0", "1,2", "1,nan,0"):
        with pytest.raises(argparse.ArgumentTypeError):
            unit_point(text)


def test_half_plane_point():
    z = half_plane_point("0.3,1.2")
    assert (z.x, z.y) == (0.3, 1.2)
    for text in ("0,-1", "0,0", "1"):
        with pytest.raises(argparse.ArgumentTypeError):
            half_plane_point(text)


def test_integer_types():
    assert level_list("5, 13") == (5, 13)
    assert positive_int("3") == 3
    assert nonnegative_int("0") == 0
    assert form_index("2:4") == (2, 4)
    for parse, text in ((level_list, ""), (level_list, "5,x"), (positive_int, "0"), (nonnegative_int, "-1")):
        with pytest.raises(argparse.ArgumentTypeError):
            parse(text)
    for text in ("2:5", "2", "-1:0", "a:b"):
        with pytest.raises(argparse.ArgumentTypeError):
            form_index(text)


def test_manifest_parameters_drop_run_options():
    scan = RnEnumerateScan(default_config())
    args = argparse.Namespace(command="rn-enumerate", n=5, as_json=True, config=None, out="x.csv", threads=2, seed=1)
    parameters = scan.parameters(args)
    assert parameters["flags"] == {"as_json": True, "n": 5}
    assert parameters["settings"]["algebra"] == {"a": 2, "b": 3, "level": 1}


def test_scan_factory():
    names = ScanFactory.available()
    assert len(names) == 10
    assert {"rn-enumerate", "hecke", "amplify", "selfcheck", "count-hyp"} <= set(names)
    for name in names:
        assert ScanFactory.scan_class(name).name == name
    assert isinstance(ScanFactory.get_scan("rn-enumerate", default_config()), RnEnumerateScan)
    with pytest.raises(ValueError, match="rn-enumerate"):
        ScanFactory.get_scan("count-torus", default_config())

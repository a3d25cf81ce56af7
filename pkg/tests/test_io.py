"""
CSV writers and readers.
"""

import io

import numpy as np
import pandas as pd
import pytest

from spinbath.core.exceptions import DataFormatError
from spinbath.core.models import DecayCurve
from spinbath.core.schemas import load_config
from spinbath.io import read_decay_csv, read_metadata, render_csv, write_text


def _config(**overrides):
    data = {"modes": [{"omega": 10.0, "cutoff": 4}], "depths": [0, 1, 2]}
    data.update(overrides)
    return load_config(data)


def test_render_csv_header_and_body():
    curve = DecayCurve(depths=[0, 1, 2], values=[1.0, 0.9087164, 1 / 3])
    text = render_csv(curve.to_frame(), "decay", _config())
    lines = text.splitlines()
    assert lines[0] == "# spinbath-rb 1.0.0"
    assert lines[1] == "# command: decay"
    assert lines[2].startswith("# config: {")
    assert lines[3] == "depth,value,stderr"
    assert lines[4] == "0,1,"
    assert lines[6] == "2,0.333333333333,"
    assert "\r" not in text


def test_render_csv_trailer():
    frame = pd.DataFrame({"depth": [1], "D": [0.5]})
    summary = pd.DataFrame({"depth": [1], "positive_fraction": [0.25]})
    text = render_csv(frame, "witness", trailer=summary)
    assert text.endswith("# summary\n# depth,positive_fraction\n# 1,0.25\n")
    parsed = pd.read_csv(io.StringIO(text), comment="#")
    assert len(parsed) == 1


def test_write_and_read_round_trip(tmp_path):
    cfg = _config(n_qubits=2, depths=[0, 1, 2, 3])
    curve = DecayCurve(depths=[0, 1, 2, 3], values=[1.0, 0.8, 0.6, 0.5], stderr=[0, 0.01, 0.02, 0.01], dimension=4)
    path = tmp_path / "out" / "decay.csv"
    write_text(render_csv(curve.to_frame(), "decay", cfg), path)

    meta = read_metadata(path)
    assert meta["version"] == "spinbath-rb 1.0.0"
    assert meta["command"] == "decay"
    assert meta["config"].model_dump() == cfg.model_dump()

    parsed, _ = read_decay_csv(path)
    assert parsed.dimension == 4
    np.testing.assert_allclose(parsed.values, curve.values)
    np.testing.assert_allclose(parsed.stderr, curve.stderr)


def test_read_without_stderr(tmp_path):
    path = tmp_path / "curve.csv"
    path.write_text("depth,value,stderr\n0,1,\n1,0.9,\n2,0.8,\n")
    curve, meta = read_decay_csv(path)
    assert curve.stderr is None
    assert curve.dimension == 2
    assert meta["config"] is None


@pytest.mark.parametrize(
    "content",
    [
        "k,value\n0,1\n",
        "depth,value\n0,abc\n",
        "depth,value\n0,1.5\n",
        "depth,value\n0.5,0.9\n",
        "depth,value\n",
        "# config: {not json}\ndepth,value\n0,1\n",
    ],
)
def test_malformed_input(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DataFormatError):
        read_decay_csv(path)


def test_missing_file(tmp_path):
    with pytest.raises(DataFormatError):
        read_decay_csv(tmp_path / "absent.csv")

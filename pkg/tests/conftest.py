import os
from pathlib import Path

import numpy as np
import pytest

from bbplace import generate_synthetic, load
from bbplace.kernels import available

DATA = Path(__file__).parent / "data"
BACKENDS = available()


@pytest.fixture
def fig2():
    return load(DATA / "four_modules.json")


@pytest.fixture
def small_synth():
    return generate_synthetic(6, 40, 50, n_terminals=4, seed=3)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_bundle(tmp_path, nodes, nets, pl, scl=None, name="tiny"):
    """Write a Bookshelf bundle from line lists; returns the .aux path."""
    files = [f"{name}.nodes", f"{name}.nets", f"{name}.pl"] + ([f"{name}.scl"] if scl else [])
    (tmp_path / f"{name}.aux").write_text("RowBasedPlacement : " + " ".join(files) + "\n")
    (tmp_path / f"{name}.nodes").write_text("UCLA nodes 1.0\n" + "\n".join(nodes) + "\n")
    (tmp_path / f"{name}.nets").write_text("UCLA nets 1.0\n" + "\n".join(nets) + "\n")
    (tmp_path / f"{name}.pl").write_text("UCLA pl 1.0\n" + "\n".join(pl) + "\n")
    if scl:
        (tmp_path / f"{name}.scl").write_text("UCLA scl 1.0\n" + "\n".join(scl) + "\n")
    return tmp_path / f"{name}.aux"

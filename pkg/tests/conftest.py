import os
from pathlib import Path

import numpy as np
import pytest

from boundarylab.logistic import Design


def hie_csv_path():
    """Locate a user-supplied RAND HIE CSV.

    Checks BOUNDARYLAB_HIE_DATA first, then the copy distributed with
    statsmodels when that package happens to be installed.  Returns None
    when no data is available; dependent tests skip.
    """
    env = os.environ.get("BOUNDARYLAB_HIE_DATA")
    if env and Path(env).exists():
        return Path(env)
    try:
        import statsmodels.datasets.randhie as randhie_mod
    except ImportError:
        return None
    path = Path(randhie_mod.__file__).parent / "randhie.csv"
    return path if path.exists() else None


@pytest.fixture(scope="session")
def hie_path():
    path = hie_csv_path()
    if path is None:
        pytest.skip("RAND HIE data not available; set BOUNDARYLAB_HIE_DATA")
    return path


def separable_design(margin=0.5):
    """1-D complete separation with the given margin around zero."""
    x = np.array([[-1.0 - margin], [-margin], [margin], [1.0 + margin]])
    y = np.array([0, 0, 1, 1])
    return Design(x, y)


def interleaved_design():
    """1-D overlap: classes interleave, no separating direction."""
    x = np.array([[-1.0], [-0.5], [0.5], [1.0]])
    y = np.array([0, 1, 1, 0])
    return Design(x, y)


def quasi_design():
    """Two points of opposite class tied at x = 0."""
    x = np.array([[-2.0], [0.0], [0.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    return Design(x, y)


def complete_corpus():
    """Designs with verified complete separation, for finiteness tests."""
    rng = np.random.default_rng(1234)
    designs = [separable_design(0.5), separable_design(0.1)]
    # 2-D: positives shifted well away from negatives
    for shift in (2.5, 4.0):
        x0 = rng.standard_normal((6, 2))
        x1 = rng.standard_normal((6, 2)) + shift
        x = np.vstack([x0, x1])
        y = np.array([0] * 6 + [1] * 6)
        designs.append(Design(x, y))
    # single event far outside the hull of the rest
    x = np.vstack([rng.standard_normal((11, 3)), [[8.0, 8.0, 8.0]]])
    y = np.array([0] * 11 + [1])
    designs.append(Design(x, y))
    return designs

"""boundarylab: practical boundary-degeneracy rules for sequential
binary data.

Subpackages cover closed-form Bernoulli boundary rules (``bernoulli``),
an anytime-valid confidence sequence (``confseq``), the Wald SPRT
benchmark (``sprt``), separation-aware logistic regression
(``logistic``), trajectory stopping rules (``stopping``), the study
harness (``studies``), and a command-line front end (``cli``).
"""

from . import (bernoulli, confseq, kernels, logistic, metrics, randhie, rng,
               sprt, stopping, studies)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["bernoulli", "confseq", "kernels", "logistic", "metrics",
           "randhie", "rng", "sprt", "stopping", "studies", "BACKEND",
           "__version__"]

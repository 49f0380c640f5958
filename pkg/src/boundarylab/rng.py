"""Deterministic random-stream derivation for the simulation harness.

Every replicate owns its own generator, derived from a stable hash of
``(master seed, study id, setting index, replicate index)``.  Identical
tuples yield identical streams regardless of execution order or thread
count, which is what makes study reruns byte-identical.
"""

import numpy as np

__all__ = ["stream"]


def stream(seed: int, study_id: int, setting_index: int,
           replicate_index: int) -> np.random.Generator:
    """Return the generator owned by one (study, setting, replicate) cell.

    All four components must be nonnegative integers; ``seed`` is the
    master seed of the whole run.
    """
    parts = (seed, study_id, setting_index, replicate_index)
    for name, value in zip(("seed", "study_id", "setting_index",
                            "replicate_index"), parts):
        if not isinstance(value, (int, np.integer)) or value < 0:
            raise ValueError(f"{name} must be a nonnegative integer, "
                             f"got {value!r}")
    return np.random.default_rng(np.random.SeedSequence(entropy=parts))

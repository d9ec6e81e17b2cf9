"""Cached model instances shared across test modules."""
from functools import lru_cache
from types import SimpleNamespace

import numpy as np

from sov6v import ModelParams, Representation, brute_spectrum
from sov6v.sovbasis import SovFrame


@lru_cache(maxsize=None)
def model(N, x=0, y=1, seed=7, kappa=1.0):
    return ModelParams.seeded(N, x, y, seed=seed, kappa=kappa)


@lru_cache(maxsize=None)
def bundle(N, x=0, y=1, seed=7):
    """Params, representation, SOV frame and brute spectrum of one model."""
    p = model(N, x, y, seed)
    rep = Representation(p)
    frame = SovFrame(p, rep)
    return SimpleNamespace(p=p, rep=rep, frame=frame, spec=brute_spectrum(p, rep))


def random_points(rng, n, re=(0.0, 3.0), im=(-0.3, 0.3)):
    return rng.uniform(*re, n) + 1j * rng.uniform(*im, n)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))

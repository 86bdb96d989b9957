import sys
from functools import lru_cache
from pathlib import Path
from types import SimpleNamespace

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toricmirror.cohomology import build_algebra
from toricmirror.fan import FanoType, classify_fano, exact_sequence, primitive_relations
from toricmirror.gkz import batyrev_quantum_ring
from toricmirror.hypergeometric import log_free_part, mirror_map
from toricmirror.io import load_fixture

SMOOTH_WEAK_FANO = ("p1", "p2", "p1xp1", "f1", "f2")


@lru_cache(maxsize=None)
def toric(name: str) -> SimpleNamespace:
    """Fan-level data for a bundled fixture; cached across the session."""
    fan = load_fixture(name).fan
    esd = exact_sequence(fan)
    prels = primitive_relations(fan, esd)
    ga = build_algebra(esd, prels)
    return SimpleNamespace(name=name, fan=fan, esd=esd, prels=prels, ga=ga,
                           fano=classify_fano(fan))


@lru_cache(maxsize=None)
def series_data(name: str, N: int) -> SimpleNamespace:
    t = toric(name)
    G = log_free_part(t.esd, t.ga, N)
    mm = mirror_map(t.esd, t.ga, N, G)
    mode = "graded_exact" if t.fano == FanoType.FANO else "q_truncated"
    qring = batyrev_quantum_ring(t.esd, t.prels, t.ga.basis, mode=mode, N=N, fano_type=t.fano)
    return SimpleNamespace(G=G, mm=mm, qring=qring, N=N)


@pytest.fixture(params=SMOOTH_WEAK_FANO)
def fixture_name(request):
    return request.param


@pytest.fixture
def data(fixture_name):
    return toric(fixture_name)

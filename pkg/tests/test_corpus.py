import itertools

import numpy as np
import pytest

from qubitlocc.corpus import corpus_get, corpus_names, ub_states
from qubitlocc.errors import CorpusLookupError
from qubitlocc.lpmcc import decide
from qubitlocc.qstate import DensityOperator, PureState, supports_orthogonal
from qubitlocc.schmidt import orth_schmidt_number
from qubitlocc.statefile import parse_state_file


@pytest.mark.parametrize("name", corpus_names())
def test_entry_invariants(name):
    entry = corpus_get(name)
    assert len(entry.states) == len(entry.labels)
    for s in entry.states:
        if isinstance(s, PureState):
            assert s.is_normalized()
        else:
            assert isinstance(s, DensityOperator)
            s.check_unit_trace()
    if len(entry.states) > 1:
        assert all(supports_orthogonal(a, b) for a, b in itertools.combinations(entry.states, 2))
    assert all(e.claim for e in entry.expected.values())


@pytest.mark.parametrize("name", [n for n in corpus_names() if n not in ("GHZ", "W")])
def test_export_round_trip(name):
    entry = corpus_get(name)
    sf = parse_state_file(entry.to_state_file())
    assert sf.labels == entry.labels and not sf.warnings
    for a, b in zip(sf.states, entry.states):
        assert np.allclose(getattr(a, "matrix", np.asarray(a)), getattr(b, "matrix", np.asarray(b)))


def test_s3():
    entry = corpus_get("S3")
    assert len(entry.states) == 3
    assert decide(entry.states).verdict == entry.expected["decide"].value


def test_s5_gram():
    S = np.column_stack([np.asarray(s) for s in corpus_get("S5").states])
    assert np.max(np.abs(S.conj().T @ S - np.eye(5))) <= 1e-12


def test_data_hiding():
    entry = corpus_get("data_hiding_pair")
    got = tuple(orth_schmidt_number(s).upper for s in entry.states)
    assert got == entry.expected["orth_schmidt_number"].value


def test_ub2_complements_ub1(rng):
    for _ in range(5):
        th = np.sort(rng.uniform(0, 2 * np.pi, 4))
        vecs = [np.asarray(s) for s in ub_states(th, 1) + ub_states(th, -1)]
        P = sum(np.outer(v, v.conj()) for v in vecs)
        assert np.max(np.abs(P - np.eye(8))) <= 1e-10


@pytest.mark.parametrize(
    "name,params",
    [
        ("nope", {}),
        ("UB1", {"phases": (0, 1, 2, 3)}),
        ("UB1", {"phases": (1, 0, 2, 3)}),
        ("UPB3", {"angles": (0, 1, 1)}),
        ("GHZ", {"n": 1}),
        ("W", {"bogus": 1}),
    ],
)
def test_lookup_errors(name, params):
    with pytest.raises(CorpusLookupError):
        corpus_get(name, **params)

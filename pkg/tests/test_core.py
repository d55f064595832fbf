import json
import math

import numpy as np
import pytest
from conftest import BARKER13, acf_loop
from hypothesis import given, settings
from hypothesis import strategies as st

from phasecode import (
    Alphabet,
    PhaseSequence,
    SchemaError,
    autocorrelation,
    generate,
    isl,
    load_sequence,
    objective_f_theta,
    psl,
    save_sequence,
)
from phasecode.core import (
    autocorrelation_fft,
    frank_phases,
    lp_norm,
    sequence_from_dict,
    write_acf_csv,
)
from phasecode.errors import FrankLengthError, SequenceError


def test_zero_phase_acf():
    ac = autocorrelation(PhaseSequence.from_phases(np.zeros(4)))
    np.testing.assert_allclose(ac.r, [3, 2, 1])
    assert ac.r0 == 4


def test_barker13_metrics(barker13):
    ref = acf_loop(BARKER13)
    np.testing.assert_allclose(autocorrelation(barker13).r, ref, atol=1e-12)
    assert set(np.round(np.abs(ref)).astype(int)) <= {0, 1}
    assert psl(barker13) == 1.0
    assert isl(barker13) == 6.0
    assert objective_f_theta(barker13, 1) == 1.0
    assert objective_f_theta(barker13, 0) == 6.0


def test_small_values():
    z = PhaseSequence.from_phases(np.zeros(4))
    assert psl(z) == 3.0
    assert isl(z) == 14.0
    assert objective_f_theta(z, 0.5) == pytest.approx(11.5)
    for seed in range(5):
        two = generate("random", 2, seed=seed)
        assert psl(two) == pytest.approx(1.0)
        assert isl(two) == pytest.approx(1.0)


def test_random_r0_exact():
    assert autocorrelation(generate("random", 64, seed=3)).r0 == 64.0


@pytest.mark.parametrize("n", [2, 5, 31, 64, 128, 256])
def test_acf_matches_loop(n):
    seq = generate("random", n, seed=n)
    np.testing.assert_allclose(autocorrelation(seq).r, acf_loop(seq.x), atol=1e-12, rtol=0)
    np.testing.assert_allclose(autocorrelation_fft(seq), acf_loop(seq.x), atol=1e-10, rtol=0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=40), st.floats(-10, 10))
def test_rotation_invariance(phases, shift):
    a = np.abs(autocorrelation(PhaseSequence.from_phases(phases)).r)
    b = np.abs(autocorrelation(PhaseSequence.from_phases(np.array(phases) + shift)).r)
    np.testing.assert_allclose(a, b, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=2, max_size=30))
def test_objective_endpoints(phases):
    seq = PhaseSequence.from_phases(phases)
    assert objective_f_theta(seq, 0) == pytest.approx(isl(seq), rel=1e-12)
    assert objective_f_theta(seq, 1) == pytest.approx(psl(seq) ** 2, rel=1e-12)


def test_theta_range():
    with pytest.raises(ValueError):
        objective_f_theta(generate("random", 4, seed=0), 1.5)


def test_frank():
    np.testing.assert_allclose(frank_phases(4), [0, 0, 0, np.pi])
    np.testing.assert_allclose(autocorrelation(generate("frank", 4)).r, [1, 0, -1], atol=1e-12)
    seq = generate("frank", 16)
    np.testing.assert_allclose(autocorrelation(seq).r, acf_loop(seq.x), atol=1e-12)
    with pytest.raises(FrankLengthError) as ei:
        generate("frank", 10)
    assert "frank-length-not-square" in str(ei.value)


def test_golomb():
    seq = generate("golomb", 3)
    ref = np.pi * np.arange(1, 4) * np.arange(0, 3) / 3
    np.testing.assert_allclose(seq.x, np.exp(1j * ref), atol=1e-12)
    np.testing.assert_allclose(np.abs(seq.x), 1.0)
    np.testing.assert_allclose(autocorrelation(seq).r, acf_loop(seq.x), atol=1e-12)


def test_generators_deterministic():
    a = generate("random", 32, seed=9)
    assert a == generate("random", 32, seed=9)
    assert a != generate("random", 32, seed=10)
    b = generate("random", 32, Alphabet.discrete(8), seed=9)
    assert b.indices.max() < 8
    c = generate("binary-random", 20, seed=1)
    assert c.alphabet.is_binary
    assert set(np.unique(c.x.real)) <= {-1.0, 1.0}


def test_discrete_starts_are_quantized():
    seq = generate("frank", 16, Alphabet.discrete(8))
    assert seq.alphabet.m == 8
    seq = generate("golomb", 10, Alphabet.binary())
    assert set(np.unique(seq.indices)) <= {0, 1}


def test_phase_sequence_validation():
    with pytest.raises(SequenceError):
        PhaseSequence.from_phases([1.0])
    with pytest.raises(SequenceError):
        PhaseSequence.from_indices([0, 4], 4)
    with pytest.raises(SequenceError):
        PhaseSequence.from_signs([1, 0])
    seq = PhaseSequence.from_indices([0, 1, 3], 4)
    with pytest.raises(ValueError):
        seq.indices[0] = 2


def test_binary_entries_exact():
    seq = PhaseSequence.from_signs(BARKER13)
    np.testing.assert_array_equal(seq.x.real, BARKER13)
    np.testing.assert_array_equal(seq.x.imag, 0)


def test_discrete_roundtrip(tmp_path):
    seq = generate("random", 50, Alphabet.discrete(16), seed=4)
    save_sequence(seq, tmp_path / "s.json")
    back = load_sequence(tmp_path / "s.json")
    assert back == seq
    assert back.indices.tobytes() == seq.indices.tobytes()
    cont = generate("random", 20, seed=4)
    save_sequence(cont, tmp_path / "c.json")
    np.testing.assert_array_equal(load_sequence(tmp_path / "c.json").phases, cont.phases)


@pytest.mark.parametrize(
    "data, field",
    [
        ({"n": 3, "alphabet": "continuous", "phases": [0, 1]}, "phases"),
        ({"n": "3", "alphabet": "continuous", "phases": [0, 1, 2]}, "n"),
        ({"n": 2, "alphabet": "cont", "phases": [0, 1]}, "alphabet"),
        ({"n": 2, "alphabet": {"discrete": 4}, "phases": [0, 0]}, "indices"),
        ({"n": 2, "alphabet": {"discrete": 4}, "phases": [0, 0], "indices": [0, 5]}, "indices"),
        ({"n": 2, "alphabet": {"discrete": 4}, "phases": [0, 1], "indices": [0, 0]}, "phases"),
        ([1, 2], "<root>"),
    ],
)
def test_schema_errors(data, field):
    with pytest.raises(SchemaError) as ei:
        sequence_from_dict(data)
    assert ei.value.field == field
    assert str(ei.value).startswith(field)


def test_bad_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_sequence(p)


def test_acf_csv(tmp_path, barker13):
    write_acf_csv(barker13, tmp_path / "a.csv")
    lines = (tmp_path / "a.csv").read_text().splitlines()
    assert lines[0] == "lag,k,re,im,abs"
    assert len(lines) == 14
    assert lines[1].startswith("0,0,13.0")


def test_lp_norm_large_p():
    r = np.array([3.0, 2.0, 1.0])
    assert lp_norm(r, 2) == pytest.approx(math.sqrt(14))
    assert lp_norm(r, 8192) == pytest.approx(3.0, rel=1e-3)
    assert np.isfinite(lp_norm(r * 1e3, 8192))


def test_sequence_json_shape(tmp_path):
    seq = PhaseSequence.from_indices([0, 1, 2], 3)
    save_sequence(seq, tmp_path / "s.json", manifest="abc")
    data = json.loads((tmp_path / "s.json").read_text())
    assert data["alphabet"] == {"discrete": 3}
    assert data["indices"] == [0, 1, 2]
    assert data["manifest"] == "abc"

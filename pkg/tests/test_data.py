import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rareclass.data import (
    APPENDIX_41,
    Dataset,
    RebalanceSpec,
    SchemaDescriptor,
    SynthSpec,
    class_counts,
    load_csv,
    rebalance,
    rebalance_indices,
    synth_generate,
    synth_intercept,
    write_csv,
)
from rareclass.errors import (
    EmptyMinorityError,
    LabelError,
    ParseError,
    SchemaError,
    StructureError,
)
from rareclass.metrics import auc_pairwise

from conftest import make_dataset


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_simple(tmp_path):
    d = load_csv(write(tmp_path, "a,b,cv\n1.0,2.0,1\n3.0,4.0,0\n"))
    assert (d.n, d.p) == (2, 2)
    assert d.labels.tolist() == [1, 0]
    assert d.column_names == ("a", "b")
    assert d.features.tolist() == [[1.0, 2.0], [3.0, 4.0]]


def test_load_scientific_notation(tmp_path):
    d = load_csv(write(tmp_path, "a,cv\n1e-3,0\n-2.5E+2,1\n"))
    assert d.features[:, 0].tolist() == [1e-3, -250.0]


def test_bad_label_names_row(tmp_path):
    with pytest.raises(LabelError) as ei:
        load_csv(write(tmp_path, "a,cv\n1,0\n2,2\n"))
    assert ei.value.row == 2
    assert "row 2" in str(ei.value)


def test_parse_error_coordinates(tmp_path):
    with pytest.raises(ParseError) as ei:
        load_csv(write(tmp_path, "a,b,cv\n1,2,0\n3,x,1\n"))
    assert (ei.value.row, ei.value.column) == (2, 1)


@pytest.mark.parametrize("text,exc", [
    ("", SchemaError),
    ("a,b\n1,2\n", SchemaError),
    ("a,a,cv\n1,2,0\n", SchemaError),
    ("a,b,cv\n1,2\n", StructureError),
    ("a,cv\n", StructureError),
    ("a,cv\nnan,1\n", ParseError),
    ("a,cv\ninf,1\n", ParseError),
])
def test_load_errors(tmp_path, text, exc):
    with pytest.raises(exc):
        load_csv(write(tmp_path, text))


def test_dataset_invariants():
    with pytest.raises(LabelError):
        make_dataset([1.0, 2.0], [0, 3])
    with pytest.raises(SchemaError):
        Dataset(np.ones((2, 1)), [0, 1], ("cv",))
    with pytest.raises(StructureError):
        Dataset(np.ones((0, 1)), [], ("a",))
    d = make_dataset([1.0, 2.0], [0, 1])
    with pytest.raises(ValueError):
        d.features[0, 0] = 5.0


def test_write_header_and_roundtrip(tmp_path):
    d = make_dataset([[0.1, 1 / 3], [2.0, -1e-300], [math.pi, 7.0]], [1, 0, 1], ("u", "v"))
    p = tmp_path / "o.csv"
    write_csv(d, p)
    assert p.read_text().splitlines()[0] == "u,v,cv"
    assert load_csv(p) == d


def test_appendix_header(tmp_path):
    assert len(APPENDIX_41) == 41 and len(set(APPENDIX_41)) == 41
    SchemaDescriptor()
    d = Dataset(np.zeros((2, 41)), [0, 1], APPENDIX_41)
    p = tmp_path / "a.csv"
    write_csv(d, p)
    assert p.read_text().splitlines()[0] == ",".join(APPENDIX_41) + ",cv"


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)),
              elements=st.floats(allow_nan=False, allow_infinity=False)),
       st.data())
def test_roundtrip_property(tmp_path_factory, X, data):
    y = data.draw(arrays(np.int8, X.shape[0], elements=st.integers(0, 1)))
    d = make_dataset(X, y)
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(d, p)
    assert load_csv(p) == d


def test_class_counts():
    s = class_counts(make_dataset([0, 0, 0, 0], [1, 0, 0, 0]))
    assert (s.n_pos, s.n_neg, s.prevalence) == (1, 3, 0.25)
    s = class_counts(make_dataset([0, 0, 0], [0, 0, 0]))
    assert (s.n_pos, s.n_neg, s.prevalence) == (0, 3, 0.0)


def test_synth_prevalence_concentrates():
    # binomial sd at n=20000, q=0.04 is ~0.0014; the calibration error is < 1e-4
    spec = SynthSpec(20000, 5, (0.5, -0.5, 1.0, 0.0, 0.3), 0.04, 0.0, seed=11)
    assert abs(class_counts(synth_generate(spec)).prevalence - 0.04) <= 0.01


def test_synth_zero_coefficients():
    spec = SynthSpec(10000, 3, (0.0, 0.0, 0.0), 0.3, 0.0, seed=5)
    alpha = synth_intercept(spec)
    assert abs(1 / (1 + math.exp(-alpha)) - 0.3) < 1e-3
    assert abs(class_counts(synth_generate(spec)).prevalence - 0.3) <= 0.02


def test_synth_deterministic():
    spec = SynthSpec(500, 4, (1.0, 2.0, -1.0, 0.5), 0.2, 0.1, seed=9)
    a, b = synth_generate(spec), synth_generate(spec)
    assert a == b
    assert a.features.tobytes() == b.features.tobytes()
    assert synth_generate(SynthSpec(500, 4, (1.0, 2.0, -1.0, 0.5), 0.2, 0.1, seed=10)) != a


def test_synth_near_chance_with_heavy_mislabelling():
    beta = (4.0, -4.0, 3.0)
    spec = SynthSpec(20000, 3, beta, 0.3, 0.499, seed=3)
    d = synth_generate(spec)
    true_scores = synth_intercept(spec) + d.features @ np.array(beta)
    # oracle: even the generating probabilities cannot rank flipped labels
    assert abs(auc_pairwise(true_scores[:4000], d.labels[:4000]) - 0.5) < 0.03


@pytest.mark.parametrize("scale", [1.0, 10.0])
def test_synth_bayes_error(scale):
    beta = tuple(scale * np.array([8.0, -8.0, 6.0]))
    spec = SynthSpec(20000, 3, beta, 0.3, 0.0, seed=4)
    d = synth_generate(spec)
    s = synth_intercept(spec) + d.features @ np.array(beta)
    q = 1 / (1 + np.exp(-s))
    expected_err = np.mean(np.minimum(q, 1 - q))
    err = np.mean((s > 0) != (d.labels == 1))
    assert abs(err - expected_err) < 4 * math.sqrt(expected_err / d.n) + 1e-3
    if scale == 10.0:
        assert err < 0.01


def test_synth_mislabel_caps_accuracy():
    beta = (80.0, -80.0, 60.0)
    spec = SynthSpec(20000, 3, beta, 0.3, 0.1, seed=4)
    d = synth_generate(spec)
    s = synth_intercept(spec) + d.features @ np.array(beta)
    # with an almost noiseless truth the best classifier is right ~90% of the time
    assert np.mean((s > 0) == (d.labels == 1)) < 0.9 + 3 * math.sqrt(0.09 / d.n)


def _tagged(n_pos, n_neg, seed=0):
    rng = np.random.default_rng(seed)
    y = np.r_[np.ones(n_pos), np.zeros(n_neg)].astype(np.int8)
    rng.shuffle(y)
    X = np.c_[np.arange(y.size, dtype=float), rng.standard_normal(y.size)]
    return Dataset(X, y, ("row_id", "z"))


def test_rebalance_ratio_02():
    d = _tagged(100, 3000)
    out = rebalance(d, RebalanceSpec(0.2, seed=1))
    s = class_counts(out)
    assert (s.n_pos, s.n_neg) == (100, 500)
    ids = out.column("row_id")
    pos_ids = d.column("row_id")[d.labels == 1]
    assert set(ids[out.labels == 1]) == set(pos_ids)
    assert len(set(ids)) == ids.size
    assert out.labels[:100].tolist() == [1] * 100


def test_rebalance_balanced_and_capped():
    d = _tagged(100, 3000)
    s = class_counts(rebalance(d, RebalanceSpec(1.0, seed=1)))
    assert (s.n_pos, s.n_neg) == (100, 100)
    s = class_counts(rebalance(_tagged(100, 300), RebalanceSpec(0.2, seed=1)))
    assert (s.n_pos, s.n_neg) == (100, 300)


def test_rebalance_seeded():
    d = _tagged(50, 2000)
    a = rebalance_indices(d.labels, RebalanceSpec(0.2, 7))
    assert np.array_equal(a, rebalance_indices(d.labels, RebalanceSpec(0.2, 7)))
    assert not np.array_equal(a, rebalance_indices(d.labels, RebalanceSpec(0.2, 8)))


def test_rebalance_empty_minority():
    with pytest.raises(EmptyMinorityError):
        rebalance(make_dataset([1.0, 2.0], [0, 0]), RebalanceSpec(0.2, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(0, 400), st.floats(0.05, 1.0), st.integers(0, 2**32 - 1))
def test_rebalance_properties(n_pos, n_neg, ratio, seed):
    d = _tagged(n_pos, n_neg, seed % 97)
    out = rebalance(d, RebalanceSpec(ratio, seed))
    s = class_counts(out)
    assert s.n_pos == n_pos
    ids = out.column("row_id")
    assert len(set(ids.tolist())) == ids.size
    target = math.floor(n_pos / ratio + 0.5)
    if target <= n_neg:
        assert s.n_neg == target
        assert abs(s.n_pos / s.n_neg - ratio) <= ratio / s.n_neg + 1e-12
    else:
        assert s.n_neg == n_neg

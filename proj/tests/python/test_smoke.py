import math

import numpy as np
import pytest

import stunmix

SMALL = "width = 12\nheight = 12\nT = 4\nB = 2\nK = 3\n"


@pytest.fixture(scope="module")
def scene():
    ds = stunmix.synth(SMALL, seed=3)
    train_ids, test_ids = stunmix.block_split(ds, 4, 4, 0.8, 3)
    return ds, train_ids, test_ids


def test_version():
    assert stunmix.__version__ == "0.1.0"


def test_synth_shapes(scene):
    ds, train_ids, test_ids = scene
    assert len(ds) == 144
    assert (ds.steps, ds.bands, ds.classes) == (4, 2, 3)
    refs = ds.references()
    assert refs.shape == (3, 144)
    np.testing.assert_allclose(refs.sum(axis=0), 1.0, atol=1e-12)
    assert sorted(train_ids + test_ids) == list(range(144))
    assert stunmix.parse_dataset(ds.to_csv()).pixel_ids == ds.pixel_ids


def test_train_predict_evaluate(scene, tmp_path):
    ds, train_ids, test_ids = scene
    model = stunmix.train(ds, train_ids, test_ids, "H = 4\nA = 2\n", "epochs = 3\nbatch_size = 16\n")
    assert model.epochs_done == 3
    assert len(model.history) == 3
    preds = model.predict(ds)
    assert preds.shape == (3, 144)
    np.testing.assert_allclose(preds.sum(axis=0), 1.0, atol=1e-12)
    report = stunmix.evaluate(model, ds, train_ids, test_ids)
    assert report["samples"] == len(test_ids)
    assert 0.0 <= report["MAE"] < 1.0
    path = tmp_path / "m.ckpt"
    model.save(str(path))
    assert stunmix.load_model(str(path)).to_bytes() == model.to_bytes()


def test_metrics_and_undefined_values():
    refs = np.array([[0.2, 0.6, 0.9], [0.8, 0.4, 0.1]])
    report = stunmix.metrics(refs, refs, ["a", "b"])
    assert report["MAE"] == 0.0
    assert math.isclose(report["CC"], 1.0)
    const = stunmix.metrics(refs, np.full_like(refs, 0.5), ["a", "b"])
    assert const["CC"] is None
    assert const["warnings"]


def test_gradcheck():
    result = stunmix.gradcheck(seed=1)
    assert result["max_rel_error"] < 1e-4
    assert result["checked"] > 0


def test_aggregate():
    labels = np.array([[0, 0, 1, -1], [0, 1, -1, -1]], dtype=np.int32)
    out = stunmix.aggregate(labels, 2, 2)
    np.testing.assert_allclose(out[0], [0.75, 0.25])
    np.testing.assert_allclose(out[1], [0.0, 1.0])


def test_errors_are_typed():
    with pytest.raises(stunmix.StunmixError, match="bogus"):
        stunmix.synth("bogus = 1\n")
    ds = stunmix.synth(SMALL)
    with pytest.raises(stunmix.StunmixError, match="TooFewBlocks"):
        stunmix.block_split(ds)


def test_run_cli(tmp_path):
    code, out, _ = stunmix.run_cli(["--out-dir", str(tmp_path), "gradcheck"])
    assert code == 0
    assert "max_rel_error=" in out
    code, _, _ = stunmix.run_cli(["gradcheck", "--corrupt-backward"])
    assert code == 1
    code, _, _ = stunmix.run_cli(["no-such-command"])
    assert code == 2

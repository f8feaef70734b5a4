import numpy as np
import pytest

from ckfscreen.dataio import load_dataset
from ckfscreen.errors import InvalidInputError
from ckfscreen.simgen import (
    MIN_P,
    TRUE_SETS,
    CovarianceSpec,
    CovKind,
    ModelSpec,
    derive_seed,
    generate,
    sample_mvn,
    write_instance_csv,
)


def off_diagonal(z):
    c = np.corrcoef(z, rowvar=False)
    return c, c[~np.eye(c.shape[0], dtype=bool)]


class TestSampleMvn:
    def test_compound_symmetry(self):
        z = sample_mvn(10000, 6, CovarianceSpec(CovKind.CS, 0.7), 1)
        _, off = off_diagonal(z)
        assert np.all(np.abs(off - 0.7) < 0.03)
        assert np.allclose(z.var(axis=0), 1.0, atol=0.05)

    def test_autoregressive(self):
        z = sample_mvn(10000, 6, CovarianceSpec(CovKind.AR, 0.7), 2)
        c, _ = off_diagonal(z)
        for i in range(6):
            for j in range(6):
                assert abs(c[i, j] - 0.7 ** abs(i - j)) < 0.03

    def test_identity(self):
        _, off = off_diagonal(sample_mvn(10000, 5, CovarianceSpec("identity"), 3))
        assert np.all(np.abs(off) < 0.04)

    def test_bad_specs(self):
        with pytest.raises(InvalidInputError):
            CovarianceSpec(CovKind.CS, -0.2)
        with pytest.raises(InvalidInputError):
            CovarianceSpec(CovKind.AR, 1.0)
        with pytest.raises(InvalidInputError):
            sample_mvn(0, 3, CovarianceSpec(CovKind.AR, 0.5), 0)


class TestGenerate:
    @pytest.mark.parametrize("model", range(1, 10))
    def test_shapes_true_sets_and_determinism(self, model):
        spec = ModelSpec(model, 50, 30, 9)
        a, b = generate(spec), generate(spec)
        assert a.data.x.shape == (50, 30) and a.data.y.shape == (50,)
        assert a.true_set == frozenset(TRUE_SETS[model])
        assert np.array_equal(a.data.x, b.data.x) and np.array_equal(a.data.y, b.data.y)
        assert np.all(np.isfinite(a.data.x)) and np.all(np.isfinite(a.data.y))
        c = generate(ModelSpec(model, 50, 30, 10))
        assert not np.array_equal(a.data.y, c.data.y)

    def test_true_set_sizes(self):
        assert {m: len(s) for m, s in TRUE_SETS.items()} == {1: 2, 2: 2, 3: 2, 4: 10, 5: 10, 6: 10, 7: 2, 8: 3, 9: 8}

    @pytest.mark.parametrize("model", range(1, 10))
    def test_minimum_p(self, model):
        with pytest.raises(InvalidInputError):
            ModelSpec(model, 50, MIN_P[model] - 1, 0)
        ModelSpec(model, 50, MIN_P[model], 0)

    def test_invalid_specs(self):
        for kwargs in ({"model_id": 10}, {"n": 1}, {"seed": -1}, {"model9_cov": "id"}):
            base = {"model_id": 1, "n": 20, "p": 5, "seed": 0}
            base.update(kwargs)
            with pytest.raises(InvalidInputError):
                ModelSpec(**base)
        with pytest.raises(InvalidInputError):
            ModelSpec("toy", 20, 2, 0)

    def test_transformed_models_undo_to_model_one(self):
        m1 = generate(ModelSpec(1, 80, 12, 5)).data
        m2 = generate(ModelSpec(2, 80, 12, 5)).data
        m3 = generate(ModelSpec(3, 80, 12, 5)).data
        root = lambda v: np.sign(v) * np.abs(v) ** (1 / 9)
        # a ninth power and root round-trip to a few ulps, not bit-exactly
        assert np.allclose(root(m2.x), m1.x, rtol=1e-13, atol=1e-300)
        assert np.array_equal(m2.y, m1.y)
        assert np.allclose(root(m3.y), m1.y, rtol=1e-13)
        assert np.array_equal(m3.x, m1.x)

    def test_log_models_undo_to_model_four(self):
        m4 = generate(ModelSpec(4, 80, 12, 5)).data
        m5 = generate(ModelSpec(5, 80, 12, 5)).data
        m6 = generate(ModelSpec(6, 80, 12, 5)).data
        assert np.allclose(0.5 * np.log(m5.x), m4.x, rtol=1e-12, atol=1e-14)
        assert np.allclose(np.log(m6.y), m4.y, rtol=1e-12, atol=1e-14)
        assert np.all(m5.x > 0) and np.all(m6.y > 0)

    def test_model8_uniform_range(self):
        x = generate(ModelSpec(8, 500, 5, 1)).data.x
        assert x.min() >= 0.0 and x.max() < 1.0

    def test_model9_variants(self):
        ar = generate(ModelSpec(9, 4000, 25, 1)).data.x
        cs = generate(ModelSpec(9, 4000, 25, 1, model9_cov="cs")).data.x
        assert abs(np.corrcoef(ar[:, 0], ar[:, 2])[0, 1] - 0.64) < 0.05
        assert abs(np.corrcoef(cs[:, 0], cs[:, 2])[0, 1] - 0.8) < 0.05

    def test_toy(self):
        inst = generate(ModelSpec("toy", 3000, 1, 4, beta=0.5))
        assert inst.true_set == frozenset({0})
        slope = np.polyfit(inst.data.x[:, 0], inst.data.y, 1)[0]
        assert abs(slope - 0.5) < 0.06
        assert generate(ModelSpec("TOY", 10, 1, 4)).true_set == frozenset()


class TestSeeds:
    def test_derive_seed_is_stable_and_distinct(self):
        assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
        seen = {derive_seed(0, m, r) for m in range(1, 10) for r in range(50)}
        assert len(seen) == 450
        assert derive_seed(1, 1, 2) != derive_seed(0, 1, 2)
        assert 0 <= derive_seed(123, 4) < 2**64


def test_csv_round_trip(tmp_path):
    inst = generate(ModelSpec(7, 25, 6, 3))
    path = tmp_path / "m7.csv"
    write_instance_csv(inst, path, ["true_set 0 1"])
    text = path.read_text().splitlines()
    assert text[0] == "# true_set 0 1"
    assert text[1] == "y,x1,x2,x3,x4,x5,x6"
    back = load_dataset(path)
    assert np.array_equal(back.x, inst.data.x)
    assert np.array_equal(back.y, inst.data.y)
    assert back.feature_names == inst.data.feature_names

"""Smoke test for the funcspace Python module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/funcspace-*.whl
"""

import math
import os
import tempfile

import funcspace


def main():
    data = funcspace.gen_synthetic_svo(12, 5, 10, 2, 800, 4)
    tuples = [[s, v, o, str(c)] for s, v, o, c in data.tuples]
    model = funcspace.Model.train(tuples, dim=8, epochs=3, batch_size=64, learning_rate=0.01)
    print(model)

    assert model.groups == ["S", "V", "O"]
    assert model.dim == 8
    s, v, o, _ = data.tuples[0]
    assert len(model.vector("V", v)) == 8
    assert math.isfinite(model.plausibility(s, v, o))

    for kind in funcspace.COMPOSITIONS:
        out = model.compose(s, v, o, kind)
        print(f"{kind}: {'scalar' if isinstance(out, float) else len(out)}")
    assert isinstance(model.compose(s, v, o, "network"), float)
    assert len(model.compose(s, v, o, "concat")) == 24

    print("nearest:", model.nearest(v, "V", k=3))
    acc = model.pseudo_disambiguation([t[:3] for t in tuples[:200]], seed=1)
    assert 0.0 <= acc <= 1.0
    print(f"pseudo-disambiguation on training tuples: {acc:.3f}")

    assert abs(funcspace.spearman([1, 2, 3], [1, 2, 3]) - 1.0) < 1e-12
    assert abs(funcspace.cosine([1, 0], [0, 1])) < 1e-12

    try:
        model.vector("V", "no-such-word")
    except KeyError:
        pass
    else:
        raise AssertionError("expected KeyError")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.json")
        model.save(path)
        again = funcspace.Model.load(path)
        assert again.vector("V", v) == model.vector("V", v)
        assert len(model.export(os.path.join(tmp, "vectors"))) == 3

    print("smoke test passed")


if __name__ == "__main__":
    main()

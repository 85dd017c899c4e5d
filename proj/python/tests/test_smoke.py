import json
import random

import pytest

import riskcascade as rc


ANALYST_REPLY = json.dumps(
    {
        "suicide_intent": True,
        "emotional_distress_level": "high",
        "has_plan": False,
        "is_metaphor": False,
        "farewell_hint": False,
        "reasoning": "x" * 20,
    }
)


def test_routing_boundaries():
    assert rc.route(10, 0.995) == {"accepted": True, "label": "suicide"}
    assert rc.route(10, 0.005) == {"accepted": True, "label": "non_suicide"}
    assert rc.route(256, 0.999)["accepted"]
    assert rc.route(257, 0.999)["reason"] == "too_long"
    assert rc.route(257, 0.5)["reason"] == "both"
    assert rc.route(3, 0.5)["reason"] == "ambiguous_prob"
    with pytest.raises(rc.Error):
        rc.route(3, 0.5, tau_low=0.9, tau_high=0.1)


def test_token_length_and_features():
    assert rc.token_length("  a  b\tc\n") == 3
    assert rc.features(ANALYST_REPLY) == [1, 0, 0, 1, 0, 0, 0, 0, 20.0]
    assert len(rc.feature_names()) == 9
    with pytest.raises(ValueError):
        rc.features("not json")


def test_votes():
    assert rc.llm_vote(["suicide", "suicide", "non_suicide"], "non_suicide") == "suicide"
    assert rc.llm_vote(["suicide", "non_suicide", "abstain"], "non_suicide") == "non_suicide"
    assert rc.llm_vote(["abstain"] * 3, "suicide") == "suicide"
    label, prob = rc.ml_vote([0.9, 0.1], [0.5, 0.5])
    assert (label, prob) == ("suicide", 0.5)
    with pytest.raises(rc.Error):
        rc.ml_vote([0.1], [0.5, 0.5])


def test_optimizer_and_projection():
    rng = random.Random(3)
    scores, labels = [], []
    for _ in range(200):
        pos = rng.random() < 0.5
        labels.append("suicide" if pos else "non_suicide")
        scores.append([rng.random(), 1.0 if pos else 0.0, rng.random()])
    r = rc.optimize_weights(scores, labels, cap=0.5, seed=1)
    assert rc.is_feasible(r["weights"], 0.5)
    assert r["f1"] >= r["uniform_f1"]
    assert r["f1"] > 0.99
    p = rc.project_to_capped_simplex([2.0, 0.0, 0.0], 0.5)
    assert rc.is_feasible(p, 0.5)
    assert p[0] == pytest.approx(0.5)


def test_metrics_and_gap():
    preds = ["suicide", "non_suicide", "suicide", "non_suicide", "non_suicide",
             "suicide", "non_suicide", "non_suicide", "non_suicide", "suicide"]
    gold = ["suicide", "non_suicide", "suicide", "suicide", "non_suicide",
            "non_suicide", "non_suicide", "non_suicide", "non_suicide", "suicide"]
    m = rc.metrics(preds, gold)
    assert m["f1"] == pytest.approx(0.75)
    assert m["accuracy"] == pytest.approx(0.8)
    g = rc.cross_domain_gap({"recall": 0.9671, "f1": 0.9741}, {"recall": 0.8847, "f1": 0.9388})
    assert 100 * g["avg_gap"] == pytest.approx(5.885, abs=0.01)


def test_model_training():
    rows, labels = [], []
    for i in range(60):
        pos = i % 2 == 0
        rows.append([1.0 if pos else 0.0, 0, 0, 1.0 if pos else 0.0, 0.0 if pos else 1.0, 0, 0, 0, 10.0 + i])
        labels.append("suicide" if pos else "non_suicide")
    model = rc.train_model("logistic_regression", rows, labels, seed=2)
    assert rc.predict_proba(model, rows[0]) > 0.5
    assert rc.predict_proba(model, rows[1]) < 0.5
    with pytest.raises(rc.Error):
        rc.train_model("naive_bayes", rows, labels)


def test_pipeline_commands(tmp_path):
    explicit = ["I want to kill myself, I can't go on.", "I have decided to end my life."]
    neutral = ["Had a great weekend hiking.", "Anyone have tips for learning guitar?"]

    def write(name, n):
        with open(tmp_path / name, "w") as f:
            for i in range(n):
                pos = i % 2 == 0
                text = (explicit if pos else neutral)[i % 4 // 2] + f" ({i})"
                f.write(json.dumps({"id": str(i), "text": text, "label": int(pos)}) + "\n")

    write("train.jsonl", 40)
    write("val.jsonl", 20)
    write("test.jsonl", 20)
    config = {
        "datasets": {"train": "train.jsonl", "val": "val.jsonl",
                     "test": [{"name": "explicit", "path": "test.jsonl"}]},
        "roster": ["logistic_regression"],
        "output_dir": "out",
    }
    (tmp_path / "run.json").write_text(json.dumps(config))
    code, out, err = rc.train(str(tmp_path / "run.json"))
    assert code == 0, err
    assert (tmp_path / "out" / "weights.json").exists()
    code, out, err = rc.evaluate(tmp_path / "run.json")
    assert code == 0, err
    rows = [json.loads(line) for line in (tmp_path / "out" / "report.jsonl").read_text().splitlines()]
    assert [r["method"] for r in rows] == ["stage1", "cascade_ml"]

    (tmp_path / "bad.json").write_text(json.dumps({"nope": 1}))
    with pytest.raises(rc.Error):
        rc.train(tmp_path / "bad.json")

import json
from fractions import Fraction

import pytest

import schedrate

CANONICAL = dict(
    alphabet=[("a", 1), ("b", 3)],
    machines=["1", "2"],
    process={"kind": "iid", "probs": {"a": 0.5, "b": 0.5}},
)


def canonical():
    return schedrate.Problem(**CANONICAL)


def test_ebar_is_exact_fraction():
    p = canonical()
    assert p.v_sum == 3
    assert p.ebar() == Fraction(2, 3)
    assert p.strong_converse()


def test_markov_and_mixture_rates():
    markov = schedrate.Problem(
        CANONICAL["alphabet"],
        [1, 2],
        {
            "kind": "markov",
            "initial": {"a": 5 / 6, "b": 1 / 6},
            "transition": {"a": {"a": 0.9, "b": 0.1}, "b": {"a": 0.5, "b": 0.5}},
        },
    )
    assert markov.ebar() == Fraction(4, 9)
    mixture = schedrate.Problem(
        CANONICAL["alphabet"],
        [1, 2],
        {
            "kind": "mixture",
            "components": [
                {"weight": 0.5, "process": {"kind": "iid", "probs": {"a": 0.5, "b": 0.5}}},
                {"weight": 0.5, "process": {"kind": "iid", "probs": {"a": 0.75, "b": 0.25}}},
            ],
        },
    )
    assert mixture.ebar() == Fraction(2, 3)
    assert mixture.ebar_lower() == Fraction(1, 2)
    assert not mixture.strong_converse()


def test_sum_distribution_is_binomial():
    min_sum, masses = schedrate.sum_distribution(canonical(), 4)
    assert min_sum == 4
    # T_4 = 4 + 2k with k ~ Binomial(4, 1/2)
    expected = {4: 1, 6: 4, 8: 6, 10: 4, 12: 1}
    for k, mass in enumerate(masses):
        assert mass == pytest.approx(expected.get(min_sum + k, 0) / 16, abs=1e-15)


def test_schedulers_and_lemma_bounds():
    p = canonical()
    jobs = ["b", "a", "b", "b", "a"]
    total = Fraction(11)
    for strategy in ("brute-force", "eft", "lpt"):
        _, span = schedrate.schedule(p, jobs, strategy)
        assert total / 3 <= span <= total / 3 + 3
    _, opt = schedrate.schedule(p, jobs, "brute-force")
    _, lpt = schedrate.schedule(p, jobs, "lpt")
    assert opt <= lpt


def test_second_order_helpers():
    assert schedrate.normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-9)
    p = canonical()
    r = schedrate.r_n_plus(p, 64, 0.1)
    assert isinstance(r, Fraction)
    # T_64 = 64 + 2K, K ~ Binomial(64, 1/2); smallest s with P(T_64 > s) <= 0.1
    from math import comb

    def tail(k):
        return sum(comb(64, j) for j in range(k + 1, 65)) / 2**64

    k = next(k for k in range(65) if tail(k) <= 0.1)
    assert r == Fraction(64 + 2 * k, 64 * 3)
    assert schedrate.berry_esseen_error_bound(p, 64) == pytest.approx(0.125)


def test_run_config_and_errors():
    config = {
        "problem": {
            "alphabet": [{"symbol": "a", "time": 1}, {"symbol": "b", "time": 3}],
            "machines": ["1", "2"],
            "process": {"kind": "iid", "probs": {"a": 0.5, "b": 0.5}},
        },
        "experiment": {"kind": "second-order", "n_grid": [64, 256], "epsilon": 0.1},
    }
    text = json.dumps(config)
    out = schedrate.run(text)
    lines = [line for line in out.splitlines() if not line.startswith("#")]
    assert lines[0] == "n,epsilon,r_n_plus,cost_lo,cost_hi,prediction,residual"
    assert len(lines) == 3
    assert schedrate.canonical_config(schedrate.canonical_config(text)) == schedrate.canonical_config(text)

    config["experiment"] = {"kind": "converse", "n_grid": [10], "gap": "2/3"}
    with pytest.raises(ValueError, match="gap out of range"):
        schedrate.run(json.dumps(config))
    config["problem"]["process"]["probs"]["b"] = 0.4
    with pytest.raises(schedrate.ConfigError, match="sums to 0.9"):
        schedrate.run(json.dumps(config))

import numpy as np
import pytest

from offeropt import GeneratorConfig, ValidationError, generate_arrays, generate_instance
from offeropt.generate import offer_counts


def test_same_config_same_instance():
    config = GeneratorConfig(n=25, k=4, seed=99)
    first = generate_instance(config)
    second = generate_instance(config)
    assert first[0] == second[0]
    assert first[1] == second[1]


def test_different_seeds_differ():
    a, _ = generate_instance(GeneratorConfig(n=10, k=2, seed=1))
    b, _ = generate_instance(GeneratorConfig(n=10, k=2, seed=2))
    assert a != b


def test_empty_population():
    subs, catalog = generate_instance(GeneratorConfig(n=0, k=3, seed=0))
    assert subs == []
    assert catalog.counts == (0, 0, 0)


def test_even_split_of_offer_counts():
    _, catalog = generate_instance(GeneratorConfig(n=100, k=5, seed=0, coverage=0.5))
    assert catalog.counts == (10, 10, 10, 10, 10)
    assert catalog.total_count == 50


def test_remainder_goes_to_lowest_indices():
    assert offer_counts(10, 3, 1.0) == [4, 3, 3]
    assert offer_counts(7, 4, 1.0) == [2, 2, 2, 1]
    assert offer_counts(3, 5, 1.0) == [1, 1, 1, 0, 0]


def test_value_ladder_is_geometric():
    _, catalog = generate_instance(
        GeneratorConfig(n=1, k=4, seed=0, delta_base=3.0, delta_multiplier=2.0)
    )
    assert catalog.values == (3.0, 6.0, 12.0, 24.0)


def test_parameters_respect_ranges():
    config = GeneratorConfig(
        n=200, k=2, seed=7, p_range=(20.0, 30.0), alpha_range=(0.1, 0.2), gamma_range=(0.0, 0.05)
    )
    subs, _ = generate_instance(config)
    assert all(20.0 <= s.p <= 30.0 for s in subs)
    assert all(0.1 <= s.alpha <= 0.2 for s in subs)
    assert all(0.0 <= s.gamma <= 0.05 for s in subs)
    assert [s.id for s in subs] == list(range(200))


def test_arrays_agree_with_objects():
    config = GeneratorConfig(n=50, k=3, seed=31)
    subs, catalog = generate_instance(config)
    p, alpha, gamma, catalog2 = generate_arrays(config)
    assert catalog == catalog2
    assert np.array_equal(p, [s.p for s in subs])
    assert np.array_equal(alpha, [s.alpha for s in subs])
    assert np.array_equal(gamma, [s.gamma for s in subs])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=-1, k=1, seed=0),
        dict(n=1, k=0, seed=0),
        dict(n=1, k=1, seed=-1),
        dict(n=1, k=1, seed=0, coverage=0.0),
        dict(n=1, k=1, seed=0, coverage=1.5),
        dict(n=1, k=1, seed=0, alpha_range=(0.5, 1.2)),
        dict(n=1, k=1, seed=0, p_range=(10.0, 5.0)),
        dict(n=1, k=1, seed=0, delta_base=0.0),
        dict(n=1, k=1, seed=0, delta_multiplier=-1.0),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        GeneratorConfig(**kwargs)

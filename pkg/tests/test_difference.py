import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from steiner.design import is_additive, verify_design
from steiner.difference import (FAMILY_NAMES, DevelopmentMode, DifferenceFamily, develop, differences,
                                paper_family, paper_mode, validate_df)
from steiner.errors import InvalidFamily, ModeMismatch, UnknownFamilyName
from steiner.field import default_field, roots_of_unity

V1, VK, ONE = DevelopmentMode.CYCLIC_V1, DevelopmentMode.CYCLIC_VK, DevelopmentMode.ONE_ROTATIONAL

# (p, n, |G|, |H|, k, mode, a valid family as exponents of G's generator)
SMALL_CONFIGS = [
    (2, 3, 7, 1, 3, V1, ((0, 1, 3),)),
    (3, 3, 13, 1, 3, V1, ((0, 1, 4), (0, 2, 7))),
    (3, 2, 8, 2, 3, ONE, ((0, 1, 3),)),
    (2, 4, 15, 3, 3, VK, ((0, 1, 4), (0, 2, 8))),
    (2, 4, 15, 3, 4, ONE, ((0, 1, 3, 7),)),
]


def make_family(cfg, blocks) -> DifferenceFamily:
    p, n, m, h, k, _, _ = cfg
    f = default_field(p, n)
    return DifferenceFamily(roots_of_unity(f, m), roots_of_unity(f, h), k, 1, tuple(blocks))


# -- differences -------------------------------------------------------------------

def test_52_family_differences_hit_each_allowed_element_once():
    f = paper_family("52-4-1")
    delta = differences(f)
    assert sum(delta.values()) == 48
    assert set(delta.values()) == {1}
    assert set(delta) == set(f.group.elements) - set(f.forbidden.elements)


def test_121_family_differences_hit_each_nonidentity_once():
    f = paper_family("121-4-1-1")
    delta = differences(f)
    assert sum(delta.values()) == 120 and set(delta.values()) == {1}
    assert set(delta) == set(f.group.elements) - {1}


def test_two_element_block_differences():
    fld = default_field(2, 4)
    g = roots_of_unity(fld, 15)
    fam = DifferenceFamily(g, roots_of_unity(fld, 1), 2, 1, ((0, 1),))
    assert differences(fam) == Counter({g.power(1): 1, g.power(-1): 1})


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_difference_multiset_size(name):
    f = paper_family(name)
    assert sum(differences(f).values()) == len(f.base_blocks) * f.k * (f.k - 1)


# -- validation ------------------------------------------------------------------

@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_stored_families_validate(name):
    ok, defect = validate_df(paper_family(name))
    assert ok and defect == {}


def _recomputed_defect(f, blocks):
    n = f.group.n
    delta = Counter(f.group.power((x - y) % n) for b in blocks for x in b for y in b if x != y)
    want = Counter({g: 1 for g in f.group.elements if g not in f.forbidden})
    return {g: delta[g] - want[g] for g in set(delta) | set(want) if delta[g] != want[g]}


def test_multiplying_a_whole_block_by_g_keeps_the_52_family_valid():
    # ratios x*y^-1 inside a block do not change when the block is scaled
    f = paper_family("52-4-1")
    blocks = list(f.base_blocks)
    blocks[0] = tuple(e + 1 for e in blocks[0])
    moved = DifferenceFamily(f.group, f.forbidden, 4, 1, tuple(blocks))
    assert _recomputed_defect(f, blocks) == {}
    assert validate_df(moved) == (True, {})


def test_moving_one_element_breaks_the_52_family():
    f = paper_family("52-4-1")
    blocks = list(f.base_blocks)
    blocks[0] = (blocks[0][0] + 1,) + blocks[0][1:]
    bad = DifferenceFamily(f.group, f.forbidden, 4, 1, tuple(blocks))
    ok, defect = validate_df(bad)
    assert not ok and defect
    assert defect == _recomputed_defect(f, blocks)


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(FAMILY_NAMES), t=st.integers(0, 200),
       bump=st.integers(0, 3))
def test_validity_is_translate_invariant(name, t, bump):
    f = paper_family(name)
    if bump:
        blocks = list(f.base_blocks)
        blocks[0] = (blocks[0][0] + bump,) + blocks[0][1:]
        if len(set(e % f.group.n for e in blocks[0])) < f.k:
            return
        f = DifferenceFamily(f.group, f.forbidden, f.k, 1, tuple(blocks))
    assert validate_df(f)[0] == validate_df(f.shifted(t))[0]


# -- development -----------------------------------------------------------------

def test_52_family_develops_to_221_blocks():
    d = develop(paper_family("52-4-1"), ONE)
    assert (d.v, d.b) == (52, 4 * 51 + 17)


def test_121_family_develops_to_1210_blocks():
    d = develop(paper_family("121-4-1-1"), V1)
    assert (d.v, d.b) == (121, 1210)


def test_cyclic_vk_family_develops_to_steiner_triple_system():
    cfg = SMALL_CONFIGS[3]
    d = develop(make_family(cfg, cfg[6]), VK)
    assert (d.v, d.b) == (15, 2 * 15 + 5)
    assert oracles.is_steiner(d.points, d.blocks)


@pytest.mark.parametrize("name", FAMILY_NAMES)
def test_stored_families_round_trip_to_additive_designs(name):
    f = paper_family(name)
    d = develop(f, paper_mode(name))
    assert verify_design(d).is_2_design and is_additive(d)
    extra = d.b - len(f.base_blocks) * f.group.n
    assert extra == (0 if paper_mode(name) is V1 else f.group.n // f.forbidden.n)
    assert len(set(d.blocks)) == d.b


def test_one_rotational_zero_lies_exactly_in_coset_blocks():
    f = paper_family("52-4-1")
    d = develop(f, ONE)
    n_translates = len(f.base_blocks) * f.group.n
    assert all(0 not in b for b in d.blocks[:n_translates])
    assert all(0 in b for b in d.blocks[n_translates:])


def test_mode_mismatch_and_invalid_family():
    with pytest.raises(ModeMismatch):
        develop(paper_family("52-4-1"), V1)
    cfg = SMALL_CONFIGS[0]
    with pytest.raises(InvalidFamily):
        develop(make_family(cfg, ((0, 1, 2),)), V1)


def test_family_3_blocks_come_from_its_two_seeds():
    f = paper_family("121-4-1-3")
    assert len(f.base_blocks) == 10
    assert f.base_blocks[0] == (0, 1, 52, 93) and f.base_blocks[1] == (0, 4, 15, 78)
    assert f.group.generator == f.field.exp(2)


def test_unknown_family_name():
    with pytest.raises(UnknownFamilyName):
        paper_family("bogus")


def test_family_json_round_trip():
    f = paper_family("52-4-1")
    assert DifferenceFamily.from_json(f.to_json()) == f


# -- coverage equivalence on random small families --------------------------------------

def _random_family(rng: random.Random):
    cfg = rng.choice(SMALL_CONFIGS)
    m, k = cfg[2], cfg[4]
    blocks = [list(b) for b in cfg[6]]
    roll = rng.random()
    if roll < 0.5:
        # automorphisms of G keep a family valid: x -> x^t, then translate
        t = rng.choice([u for u in range(1, m) if _coprime(u, m)])
        shifts = [rng.randrange(m) for _ in blocks]
        blocks = [[(e * t + s) % m for e in b] for b, s in zip(blocks, shifts)]
    else:
        b = rng.randrange(len(blocks))
        blocks[b] = rng.sample(range(m), k)
    return cfg, blocks


def _coprime(a: int, b: int) -> bool:
    while b:
        a, b = b, a % b
    return a == 1


def test_difference_family_iff_developed_design_covers_pairs_once():
    rng = random.Random(2024)
    outcomes = Counter()
    for _ in range(50):
        cfg, blocks = _random_family(rng)
        fam = make_family(cfg, blocks)
        d = develop(fam, cfg[5], check=False)
        covered_once = oracles.is_steiner(d.points, d.blocks)
        ok = validate_df(fam)[0]
        assert ok == covered_once, (cfg[:6], blocks)
        outcomes[ok] += 1
    assert outcomes[True] >= 10 and outcomes[False] >= 10

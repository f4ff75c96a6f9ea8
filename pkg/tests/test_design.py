import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from steiner.design import (Design, Embedding, Resolution, admissible_field_orders, admissible_primes,
                            canonical_representative, is_additive, is_projective_line,
                            least_admissible_field_orders, line_identification, load_design,
                            pg_point_line_design, save_json, verify_design, verify_resolution)
from steiner.difference import paper_design
from steiner.errors import (DesignParametersInadmissible, IndexOutOfRange, MalformedBlock,
                            MissingEmbedding, NonCanonicalRepresentative, NonInjectiveEmbedding,
                            SizeBudgetExceeded)
from steiner.field import default_field, prime_factors
from steiner.iso import designs_isomorphic
from steiner.rank import incidence_matrix, p_rank

# 3-rank of PG(4,3) lines from dense elimination (oracles.rank_mod_p)
PG43_RANK3 = 106
# blocks that are not GF(3)-lines under the identity embedding, per 121 family
NON_LINE_BLOCKS = {1: 1210, 2: 1210, 3: 1210, 4: 1210}
# power map c -> c^t turning every block of the first 121 family into a line
F1_LINE_POWER = 61


@pytest.fixture(scope="module")
def d52():
    return paper_design("52-4-1")


@pytest.fixture(scope="module")
def d121():
    return {i: paper_design(f"121-4-1-{i}")[0] for i in range(1, 5)}


def random_relabel(d: Design, seed: int) -> Design:
    rng = random.Random(seed)
    image = list(d.points)
    rng.shuffle(image)
    return d.relabel(dict(zip(d.points, image)))


# -- verify_design ---------------------------------------------------------------

def test_52_design_is_a_steiner_system(d52):
    d, _ = d52
    rep = verify_design(d)
    assert (d.v, d.k, d.b) == (52, 4, 221)
    assert rep.is_2_design and rep.lambda_observed == (1, 1)
    assert rep.replication == 17 and rep.replication_integral


def test_121_design_is_a_steiner_system(d121):
    d = d121[1]
    assert (d.v, d.b) == (121, 1210)
    assert verify_design(d).is_2_design


def test_deleting_a_block_uncovers_six_pairs(d52):
    d, _ = d52
    cut = Design.make(d.points, d.blocks[1:], 4)
    rep = verify_design(cut)
    assert not rep.is_2_design
    assert len(rep.failures) == 6
    assert {pair for pair, _ in rep.failures} == set(itertools.combinations(d.blocks[0], 2))


def test_verify_agrees_with_pair_count_oracle(d52):
    d, _ = d52
    assert oracles.is_steiner(d.points, d.blocks)
    rng = random.Random(3)
    blocks = list(d.blocks)
    blocks[5] = tuple(sorted(rng.sample(d.points, 4)))
    assert verify_design(Design.make(d.points, blocks, 4)).is_2_design \
        == oracles.is_steiner(d.points, blocks)


def test_malformed_blocks_rejected():
    with pytest.raises(MalformedBlock):
        verify_design(Design.make(range(7), [(0, 1, 2), (0, 3)], 3))
    with pytest.raises(MalformedBlock):
        verify_design(Design.make(range(7), [(0, 1, 9)], 3))


def test_non_integral_replication_is_flagged():
    rep = verify_design(Design.make(range(8), [(0, 1, 2)], 3))
    assert not rep.replication_integral and rep.replication.denominator == 2


# -- admissibility ---------------------------------------------------------------

@pytest.mark.parametrize("v,k,primes", [(52, 4, {2}), (121, 4, {3, 13}), (105, 5, {5})])
def test_admissible_primes_examples(v, k, primes):
    assert admissible_primes(v, k) == primes


def test_admissible_primes_rejects_bad_parameters():
    with pytest.raises(DesignParametersInadmissible):
        admissible_primes(53, 4)
    with pytest.raises(DesignParametersInadmissible):
        admissible_primes(5, 5)


def test_admissible_field_order_examples():
    assert admissible_field_orders(52, 4, 51, 30)[0] == 2**8
    assert admissible_field_orders(100, 4, 100, 64) == []
    assert least_admissible_field_orders(88, 4, 87, 30) == {2: 2**28, 7: 7**7}


@settings(max_examples=150, deadline=None)
@given(k=st.integers(3, 6), m=st.integers(2, 60), modulus=st.integers(2, 120))
def test_admissible_orders_are_prime_powers_congruent_to_one(k, m, modulus):
    v = k + m * (k - 1)
    primes = admissible_primes(v, k)
    assert primes == set(prime_factors(m))
    orders = admissible_field_orders(v, k, modulus, 24)
    assert orders == sorted(orders)
    for q in orders:
        assert q % modulus == 1
        rho = prime_factors(q)
        assert len(rho) == 1 and rho[0] in primes


# -- additivity ------------------------------------------------------------------

def test_52_design_is_additive_in_gf256(d52):
    d, _ = d52
    assert d.embedding.field.spec.poly == (1, 0, 1, 1, 1, 0, 0, 0, 1)
    assert is_additive(d)


def test_121_family_2_is_additive_in_gf243(d121):
    assert d121[2].embedding.field.spec.poly == (1, 2, 0, 0, 0, 1)
    assert is_additive(d121[2])


def test_swapping_two_embedded_labels_breaks_additivity(d52):
    d, _ = d52
    emap = dict(d.embedding.map)
    emap[0], emap[1] = emap[1], emap[0]
    assert not is_additive(replace(d, embedding=Embedding(d.embedding.field, emap)))


def test_additivity_needs_an_injective_embedding(d52):
    d, _ = d52
    with pytest.raises(MissingEmbedding):
        is_additive(replace(d, embedding=None))
    emap = dict(d.embedding.map)
    emap[0] = emap[1]
    with pytest.raises(NonInjectiveEmbedding):
        is_additive(replace(d, embedding=Embedding(d.embedding.field, emap)))


@pytest.mark.parametrize("name", ["52-4-1", "121-4-1-1", "121-4-1-2", "121-4-1-3", "121-4-1-4"])
def test_embedded_points_sum_to_zero(name):
    d, _ = paper_design(name)
    f = d.embedding.field
    r = verify_design(d).replication
    # the sum equals (1 - r) x for every point x, which vanishes when p | r - 1
    assert (r - 1) % f.p == 0
    assert f.sum(d.embedding.map.values()) == 0


# -- resolution ------------------------------------------------------------------

def test_52_resolution_has_17_classes_of_13(d52):
    d, res = d52
    assert len(res.classes) == 17 and {len(c) for c in res.classes} == {13}
    assert verify_resolution(d, res)


def test_resolution_of_a_toy_design():
    d = Design.make(range(6), [(0, 1, 2), (3, 4, 5)], 3)
    assert verify_resolution(d, Resolution(((0, 1),)))
    assert not verify_resolution(d, Resolution(((0,), (1,))))


def test_moving_a_block_between_classes_breaks_resolution(d52):
    d, res = d52
    classes = [list(c) for c in res.classes]
    classes[1].append(classes[0].pop())
    assert not verify_resolution(d, Resolution(tuple(map(tuple, classes))))


def test_resolution_index_out_of_range(d52):
    d, _ = d52
    with pytest.raises(IndexOutOfRange):
        verify_resolution(d, Resolution(((0, 9999),)))


# -- p-rank ----------------------------------------------------------------------

def test_52_design_has_2_rank_41(d52):
    assert p_rank(d52[0], 2) == 41


def test_identity_incidence_has_full_rank():
    d = Design.make(range(9), [(i,) for i in range(9)], 1)
    assert p_rank(d, 2) == 9 and p_rank(d, 3) == 9 and p_rank(d, 5) == 9


def test_pg43_3_rank_matches_dense_oracle():
    d = pg_point_line_design(4, 3)
    assert oracles.rank_mod_p(incidence_matrix(d), 3) == PG43_RANK3
    assert p_rank(d, 3) == PG43_RANK3


@pytest.mark.parametrize("name,p", [("52-4-1", 2), ("121-4-1-2", 3), ("121-4-1-4", 3)])
def test_rank_invariant_under_relabelling_and_bounded(name, p):
    d, _ = paper_design(name)
    r = p_rank(d, p)
    assert r <= min(d.v, d.b)
    e = random_relabel(d, 11)
    shuffled = Design.make(e.points, random.Random(5).sample(list(e.blocks), e.b), e.k)
    assert p_rank(shuffled, p) == r


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), p=st.sampled_from([2, 3, 5]))
def test_rank_agrees_with_dense_oracle_on_random_incidence(seed, p):
    rng = random.Random(seed)
    v, b, k = rng.randint(4, 14), rng.randint(1, 20), 3
    blocks = [rng.sample(range(v), k) for _ in range(b)]
    d = Design.make(range(v), blocks, k)
    assert p_rank(d, p) == oracles.rank_mod_p(incidence_matrix(d), p)


# -- PG(n,p) ---------------------------------------------------------------------

@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2), (4, 3)])
def test_pg_point_line_designs_verify(n, p):
    d = pg_point_line_design(n, p)
    v = (p ** (n + 1) - 1) // (p - 1)
    assert (d.v, d.k) == (v, p + 1)
    assert verify_design(d).is_2_design


def test_pg82_has_43435_lines():
    d = pg_point_line_design(8, 2)
    assert (d.v, d.k, d.b) == (511, 3, 43435)


def test_pg_budget():
    with pytest.raises(SizeBudgetExceeded):
        pg_point_line_design(9, 3)


# -- projective lines ------------------------------------------------------------

def test_power_map_turns_family_1_into_lines(d121):
    d = d121[1]
    f = d.embedding.field
    assert line_identification(d, 3) == F1_LINE_POWER
    emb = d.embedding.map
    assert all(is_projective_line([f.pow(emb[x], F1_LINE_POWER) for x in blk], f, 3)
               for blk in d.blocks)


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_non_line_block_counts(d121, i):
    d = d121[i]
    f = d.embedding.field
    emb = d.embedding.map
    bad = sum(not is_projective_line([emb[x] for x in blk], f, 3) for blk in d.blocks)
    assert bad == NON_LINE_BLOCKS[i]


@pytest.mark.parametrize("i", [2, 3, 4])
def test_no_power_map_turns_other_families_into_lines(d121, i):
    assert line_identification(d121[i], 3) is None


def test_constructed_line_is_recognised():
    f = default_field(3, 5)
    a, b = f.exp(2 * 7), f.exp(2 * 40)
    blk = [a, b, canonical_representative(f.add(a, b), f, 3),
           canonical_representative(f.sub(a, b), f, 3)]
    assert is_projective_line(blk, f, 3)
    with pytest.raises(NonCanonicalRepresentative):
        is_projective_line([f.exp(1), a, b, blk[2]], f, 3)


# -- isomorphism -----------------------------------------------------------------

def test_family_1_is_pg43(d121):
    res = designs_isomorphic(d121[1], pg_point_line_design(4, 3))
    assert res.isomorphic
    pg = pg_point_line_design(4, 3)
    image = {tuple(sorted(res.witness[x] for x in blk)) for blk in d121[1].blocks}
    assert image == set(pg.blocks)


@pytest.mark.parametrize("i,j", list(itertools.combinations(range(1, 5), 2)))
def test_121_families_pairwise_non_isomorphic(d121, i, j):
    assert not designs_isomorphic(d121[i], d121[j])


def test_design_isomorphic_to_its_relabelling(d52):
    d, _ = d52
    e = random_relabel(d, 1)
    res = designs_isomorphic(d, e)
    assert res.isomorphic
    assert {tuple(sorted(res.witness[x] for x in b)) for b in d.blocks} == set(e.blocks)


def _small_designs():
    return [pg_point_line_design(2, 2), pg_point_line_design(2, 3), pg_point_line_design(3, 2),
            paper_design("52-4-1")[0]]


@settings(max_examples=25, deadline=None)
@given(i=st.integers(0, 3), j=st.integers(0, 3), seed=st.integers(0, 10**6))
def test_isomorphism_reflexive_and_symmetric(i, j, seed):
    ds = _small_designs()
    a, b = ds[i], random_relabel(ds[j], seed)
    assert designs_isomorphic(a, random_relabel(a, seed + 1)).isomorphic
    assert designs_isomorphic(a, b).isomorphic == designs_isomorphic(b, a).isomorphic == (i == j)


def test_isomorphism_search_without_invariant_prefilters():
    a = pg_point_line_design(3, 2)
    assert designs_isomorphic(a, random_relabel(a, 4), use_invariants=False).isomorphic


# -- serialization ---------------------------------------------------------------

def test_design_json_round_trip(tmp_path, d52):
    d, _ = d52
    save_json(d, tmp_path / "d.json")
    e = load_design(tmp_path / "d.json")
    assert e == d and is_additive(e)

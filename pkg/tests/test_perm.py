import random
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permbase import InputError, Permutation, ResourceError
from permbase.chain import build_chain, rebase
from permbase.group import (GroupHandle, check_group_invariants, coset_action,
                            format_group_text, load_group, parse_group_text,
                            pointwise_stabilizer, save_group)
from permbase import library


def perms(max_degree=9):
    return st.integers(1, max_degree).flatmap(
        lambda n: st.permutations(range(n)).map(Permutation))


def perm_pairs(max_degree=9):
    return st.integers(1, max_degree).flatmap(
        lambda n: st.tuples(*[st.permutations(range(n)).map(Permutation)] * 3))


def brute_closure(gens, n):
    """Element set of <gens> by breadth-first closure."""
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    arrs = [g.images for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for a in arrs:
                y = tuple(int(a[i]) for i in x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


# --- permutations --------------------------------------------------------------

@given(perms())
def test_inverse_cancels(p):
    assert (p * p.inverse()).is_identity()
    assert (p.inverse() * p).is_identity()


@given(perm_pairs())
def test_product_is_associative(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)


@given(perm_pairs())
def test_product_acts_left_to_right(t):
    a, b, _ = t
    assert all((a * b)(i) == b(a(i)) for i in range(a.degree))


@given(perms(), st.integers(-30, 30))
def test_power_matches_repeated_product(p, k):
    q = Permutation.identity(p.degree)
    step = p if k >= 0 else p.inverse()
    for _ in range(abs(k)):
        q = q * step
    assert p ** k == q


@given(perms())
def test_order_and_cycle_type(p):
    assert (p ** p.order()).is_identity()
    assert sum(p.cycle_type()) == p.degree
    assert all(not (p ** d).is_identity() for d in range(1, p.order()))


@given(perm_pairs())
def test_conjugation_relabels_cycles(t):
    x, g, _ = t
    y = x.conjugate(g)
    assert y.cycle_type() == x.cycle_type()
    assert sorted(y.cycles()) == sorted(
        tuple(min_rotation(tuple(g(a) for a in c))) for c in x.cycles())


def min_rotation(c):
    i = c.index(min(c))
    return c[i:] + c[:i]


def test_rejects_non_bijection():
    with pytest.raises(InputError):
        Permutation([0, 0, 1])
    with pytest.raises(InputError):
        Permutation([0, 3, 1])
    with pytest.raises(InputError):
        Permutation.from_cycles(4, [(0, 1, 0)])


def test_degree_mismatch_in_product():
    with pytest.raises(InputError):
        Permutation([1, 0]) * Permutation([1, 0, 2])


def test_from_cycles_and_repr():
    p = Permutation.from_cycles(5, [(0, 2, 4)])
    assert p.images.tolist() == [2, 1, 4, 3, 0]
    assert p.order() == 3
    assert repr(p) == "Permutation(degree=5, (0 2 4))"


# --- stabilizer chains -----------------------------------------------------------

def test_empty_generating_set_is_trivial():
    assert build_chain([], degree=4).order == 1


def test_s4_from_transposition_and_four_cycle():
    gens = [Permutation.from_cycles(4, [(0, 1)]), Permutation.from_cycles(4, [(0, 1, 2, 3)])]
    assert build_chain(gens).order == 24


def test_degree_mismatch_rejected():
    with pytest.raises(InputError):
        GroupHandle.from_generators([Permutation([1, 0]), Permutation([1, 2, 0])])


def test_m24_order(shipped):
    M24 = shipped("M24")
    assert M24.degree == 24 and M24.order == 244823040
    assert M24.order == np.prod(M24.chain.orbit_lengths, dtype=object)
    check_group_invariants(M24)


def test_m24_five_point_stabilizer(shipped):
    assert pointwise_stabilizer(shipped("M24"), [0, 1, 2, 3, 4]).order == 48


def test_membership_basics():
    A4 = library.alternating(4)
    assert A4.contains(Permutation.identity(4))
    assert not A4.contains(Permutation.from_cycles(4, [(0, 1)]))
    with pytest.raises(InputError):
        A4.contains(Permutation.identity(5))


def test_random_words_are_members(shipped):
    G = shipped("M12")
    rng = random.Random(3)
    for _ in range(1000):
        w = Permutation.identity(G.degree)
        for _ in range(rng.randint(1, 12)):
            w = w * rng.choice(G.generators)
        assert G.contains(w)


@pytest.mark.parametrize("gens,n", [
    ([[1, 0, 2, 3, 4, 5], [1, 2, 0, 3, 4, 5]], 6),
    ([[1, 2, 3, 4, 0, 5, 6], [0, 2, 4, 1, 3, 5, 6]], 7),
    ([[1, 0, 3, 2, 5, 4, 7, 6], [2, 3, 0, 1, 6, 7, 4, 5], [0, 1, 4, 5, 2, 3, 6, 7]], 8),
    ([[1, 2, 0, 4, 5, 3, 6, 7], [3, 4, 5, 0, 1, 2, 7, 6]], 8),
])
def test_membership_agrees_with_brute_force(gens, n):
    gens = [Permutation(g) for g in gens]
    G = GroupHandle.from_generators(gens, degree=n)
    elems = brute_closure(gens, n)
    assert G.order == len(elems)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p = rng.permutation(n)
        assert G.contains(Permutation(p)) == (tuple(p.tolist()) in elems)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7).flatmap(
    lambda n: st.lists(st.permutations(range(n)), min_size=1, max_size=3)))
def test_chain_order_matches_closure(rows):
    n = len(rows[0])
    gens = [Permutation(r) for r in rows]
    G = GroupHandle.from_generators(gens, degree=n, seed=1)
    assert G.order == len(brute_closure(gens, n))
    assert factorial(n) % G.order == 0
    assert all(G.contains(g) for g in gens)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7).flatmap(
    lambda n: st.tuples(st.lists(st.permutations(range(n)), min_size=1, max_size=3),
                        st.lists(st.integers(0, n - 1), max_size=n))))
def test_pointwise_stabilizer_by_brute_force(data):
    rows, pts = data
    n = len(rows[0])
    gens = [Permutation(r) for r in rows]
    G = GroupHandle.from_generators(gens, degree=n)
    S = pointwise_stabilizer(G, pts)
    fixing = [e for e in brute_closure(gens, n) if all(e[p] == p for p in pts)]
    assert S.order == len(fixing)
    assert G.order % S.order == 0


def test_pointwise_stabilizer_examples():
    S4 = library.symmetric(4)
    assert pointwise_stabilizer(S4, [0]).order == 6
    assert pointwise_stabilizer(S4, [0, 0]).order == 6
    assert pointwise_stabilizer(S4, range(4)).order == 1
    with pytest.raises(InputError):
        pointwise_stabilizer(S4, [4])


def test_rebase_puts_prefix_first(shipped):
    G = shipped("M12")
    ch = rebase(G.chain, [5, 7], seed=2)
    assert ch.base[:2] == [5, 7]
    assert ch.order == G.order


# --- random elements ---------------------------------------------------------------

def test_random_element_of_trivial_group():
    T = GroupHandle.from_generators([], degree=3)
    rng = random.Random(0)
    assert all(T.random_element(rng).is_identity() for _ in range(20))


def test_s3_random_elements_are_uniform():
    S3 = library.symmetric(3)
    rng = random.Random(11)
    draws = 100000
    counts = {}
    for _ in range(draws):
        k = S3.random_element(rng).images.tobytes()
        counts[k] = counts.get(k, 0) + 1
    assert len(counts) == 6
    sigma = (draws * (1 / 6) * (5 / 6)) ** 0.5
    assert all(abs(c - draws / 6) < 5 * sigma for c in counts.values())


def test_random_elements_are_members(shipped):
    G = shipped("M11")
    rng = random.Random(5)
    assert all(G.contains(G.random_element(rng)) for _ in range(200))


# --- coset actions --------------------------------------------------------------------

def test_s4_on_cosets_of_point_stabilizer():
    S4 = library.symmetric(4)
    res = coset_action(S4, pointwise_stabilizer(S4, [0]))
    assert res.index == 4 and res.faithful
    assert res.quotient_group.order == 24 and res.quotient_group.is_transitive()


@pytest.mark.parametrize("big,small,index", [("S6", "PGL2_5", 6), ("S8", "S4wrS2", 35),
                                             ("M12", "M11", 12)])
def test_coset_action_examples(shipped, big, small, index):
    G, H = shipped(big), shipped(small)
    res = coset_action(G, H)
    Q = res.quotient_group
    assert res.index == index and res.index * H.order == G.order
    assert Q.is_transitive()
    stab = pointwise_stabilizer(Q, [0])
    assert stab.order == H.order
    again = coset_action(Q, stab)
    assert again.index == Q.degree and again.quotient_group.order == Q.order


def test_coset_action_images_agree_with_generators(shipped):
    G, H = shipped("S6"), shipped("PGL2_5")
    res = coset_action(G, H)
    for g, img in zip(G.generators, res.images_of_generators):
        assert res.image(g) == img
    rng = random.Random(1)
    a, b = G.random_element(rng), G.random_element(rng)
    assert res.image(a * b) == res.image(a) * res.image(b)


def test_coset_action_rejects_non_subgroup_and_budget():
    S4, A4 = library.symmetric(4), library.alternating(4)
    other = GroupHandle.from_generators([Permutation.from_cycles(4, [(0, 1)])])
    with pytest.raises(InputError):
        coset_action(A4, other)
    with pytest.raises(ResourceError):
        coset_action(S4, GroupHandle.from_generators([], degree=4), index_budget=10)


def test_unfaithful_coset_action_is_reported():
    S4 = library.symmetric(4)
    res = coset_action(S4, library.alternating(4))
    assert res.index == 2 and not res.faithful


# --- group files ------------------------------------------------------------------------

def test_group_file_round_trip(tmp_path, shipped):
    G = shipped("M11")
    path = tmp_path / "m11.grp"
    save_group(G, path)
    H = load_group(path)
    assert H.name == "M11" and H.degree == 12 and H.order == 7920
    assert [g.images.tolist() for g in H.generators] == [g.images.tolist() for g in G.generators]
    assert format_group_text(H.degree, H.name, H.generators) == path.read_text()


def test_empty_generator_list_gives_trivial_group():
    degree, name, gens = parse_group_text("degree: 5\nname: one\n")
    assert (degree, name, gens) == (5, "one", [])
    assert GroupHandle.from_generators(gens, degree=degree).order == 1


@pytest.mark.parametrize("text,fragment", [
    ("degree: 3\nname: x\n0 0 1\n", ":3:"),
    ("degree: 3\n0 1\n", "expected 3 images"),
    ("0 1 2\n", "before 'degree:'"),
    ("degree: three\n", "bad degree"),
    ("degree: 2\n0 a\n", "non-integer"),
    ("name: x\n", "missing 'degree:'"),
])
def test_parse_errors_carry_line_numbers(text, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_group_text(text)


def test_transitive_corpus_counts(corpus):
    by_degree = {}
    for G in corpus:
        assert G.is_transitive()
        by_degree[G.degree] = by_degree.get(G.degree, 0) + 1
    assert by_degree == {1: 1, 2: 1, 3: 2, 4: 5, 5: 5, 6: 16, 7: 7, 8: 50}


def test_shipped_orders_without_hints():
    # load_group without an order hint runs the deterministic closure check
    for name, order in library.KNOWN_ORDERS.items():
        path = library.DATA_DIR / f"{name}.grp"
        if path.exists():
            assert load_group(path).order == order, name

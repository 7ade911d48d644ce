import pytest

from addenergy.generate import SplitMix64
from addenergy.groups import (
    F2n,
    Fpn,
    GroupError,
    InvalidElementError,
    OverflowElementError,
    Zint,
    Zmod,
    is_prime,
    parse_group,
)

VARIANTS = [F2n(4), F2n(20), Fpn(3, 2), Fpn(7, 3), Zmod(1), Zmod(97), Zint()]


def random_element(group, rng):
    if isinstance(group, Zint):
        return rng.below(2_000_001) - 1_000_000
    return group.unindex(rng.below(group.order))


@pytest.mark.parametrize("group", VARIANTS, ids=str)
def test_group_laws(group):
    rng = SplitMix64(7)
    for _ in range(300):
        a = random_element(group, rng)
        b = random_element(group, rng)
        c = random_element(group, rng)
        assert group.add(group.add(a, b), c) == group.add(a, group.add(b, c))
        assert group.add(a, b) == group.add(b, a)
        assert group.add(a, group.neg(a)) == group.zero
        assert group.sub(a, a) == group.zero


@pytest.mark.parametrize("group", VARIANTS, ids=str)
def test_codec_roundtrip(group):
    rng = SplitMix64(11)
    for _ in range(1000):
        a = random_element(group, rng)
        assert group.parse(group.format(a)) == a


def test_codec_examples():
    assert F2n(8).parse("0x2a") == 0b00101010
    assert F2n(8).format(0b00101010) == "0x2a"
    assert F2n(4).parse("0101") == 0b0101
    assert Fpn(3, 2).parse("1,2") == (1, 2)
    assert Fpn(3, 2).format((1, 2)) == "1,2"
    assert Zint().parse("-17") == -17
    assert Zmod(7).parse("12") == 5  # parsing canonicalizes residues


def test_group_law_examples():
    assert F2n(4).add(0b0101, 0b0011) == 0b0110
    assert Zmod(7).add(5, 4) == 2
    assert Fpn(3, 2).add((1, 2), (2, 2)) == (0, 1)
    assert F2n(4).neg(0b0101) == 0b0101
    assert Zmod(7).neg(5) == 2
    assert Zint().neg(-3) == 3


def test_construction_errors():
    with pytest.raises(GroupError):
        F2n(0)
    with pytest.raises(GroupError):
        F2n(64)
    with pytest.raises(GroupError):
        Fpn(4, 2)  # not prime
    with pytest.raises(GroupError):
        Fpn(2, 2)  # needs an odd prime
    with pytest.raises(GroupError):
        Fpn(3, 50)  # order beyond 2^63
    with pytest.raises(GroupError):
        Zmod(0)


def test_invalid_elements():
    with pytest.raises(InvalidElementError):
        F2n(4).check(16)
    with pytest.raises(InvalidElementError):
        Fpn(3, 2).check((1, 3))
    with pytest.raises(InvalidElementError):
        Fpn(3, 2).check((1,))
    with pytest.raises(InvalidElementError):
        Zmod(7).check(7)
    with pytest.raises(InvalidElementError):
        F2n(8).parse("0x100")
    with pytest.raises(InvalidElementError):
        Fpn(3, 2).parse("1,3")


def test_zint_overflow_detection():
    z = Zint()
    big = (1 << 63) - 1
    with pytest.raises(OverflowElementError):
        z.add(big, 1)
    with pytest.raises(OverflowElementError):
        z.neg(-(1 << 63))
    assert z.add(big, -1) == big - 1


def test_order_queries():
    assert F2n(10).order == 1024
    assert Fpn(3, 4).order == 81
    assert Zmod(12).order == 12
    assert Zint().order is None
    assert not Zint().is_finite
    with pytest.raises(GroupError):
        list(Zint().elements())


def test_index_roundtrip():
    for group in (F2n(6), Fpn(3, 3), Zmod(29)):
        for i in range(group.order):
            assert group.index(group.unindex(i)) == i


def test_parse_group():
    assert parse_group("f2 n=20") == F2n(20)
    assert parse_group("fp p=3 n=2") == Fpn(3, 2)
    assert parse_group("zmod m=7") == Zmod(7)
    assert parse_group("z") == Zint()
    with pytest.raises(GroupError):
        parse_group("q8")
    with pytest.raises(GroupError):
        parse_group("f2")


def test_is_prime():
    primes = {2, 3, 5, 7, 11, 13, 97, 7919, (1 << 61) - 1}
    for p in primes:
        assert is_prime(p)
    for n in (0, 1, 4, 9, 91, 7917, (1 << 61) - 2):
        assert not is_prime(n)

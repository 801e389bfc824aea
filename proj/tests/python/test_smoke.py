from fractions import Fraction

import pytest

import gencomp


def test_seeded_vectors():
    assert gencomp.seeded_bits(0, 32) == "10010001010111110101111011001110"
    assert gencomp.seeded_bits(42, 32) == "10000101010011100001101100111111"


def test_densities_are_fractions():
    member = [n < 12 for n in range(16)]
    d = gencomp.prefix_density(member, 16)
    assert isinstance(d, Fraction) and d == Fraction(3, 4)
    assert gencomp.gap_census(member, 4) == [None, None, None, 1]
    assert gencomp.gap_density_upper(3, 1) == Fraction(3, 4)
    full = [n not in range(12, 16) for n in range(64)]
    assert gencomp.density_threshold(full, 6, 4, 64) == 32


def test_codings():
    x = 7
    bits = gencomp.seeded_bits(x, 8)
    assert gencomp.encode_R(x, 12) == int(bits[2])
    assert gencomp.encode_Rtilde(x, 8) == int(bits[2])
    assert gencomp.decode_R({2: 1}, 1, 100) == 1
    assert gencomp.decode_R({}, 1, 100) is None
    assert gencomp.decode_Rtilde({12: 0}, 3, 100) == 0
    with pytest.raises(gencomp.GencompError, match="corrupt"):
        gencomp.decode_R({2: 0, 6: 1}, 1, 16)


def test_relations():
    assert gencomp.stage_interval(2) == (5, 1029)
    assert gencomp.universal_rel(0, 2) and not gencomp.universal_rel(2, 0)
    assert gencomp.embed_relation([[True, True], [False, True]])[1] == "2"
    assert gencomp.cantor_unpair(gencomp.cantor_pair(3, 4)) == (3, 4)


def test_operator_compile():
    assert "label-liar" in gencomp.functional_names()
    axioms = gencomp.compile_functional("echo", element_bound=2, max_label=1)
    assert (3, (3,)) in axioms  # (1,1) -> code 3 reads itself


def test_run_and_verify():
    report, trace, passed = gencomp.run({
        "version": 1, "scenario": "single-diagonal", "stages": 5,
        "strategies": [{"adversary": "silent", "selector": "leftmost"}],
    })
    assert passed
    assert report["results"]["strategies"][0]["markers"] == 4
    assert all(ok for _, ok, _ in gencomp.verify(trace))
    trace["log"][3]["strategies"][0]["marker"] = {"sigma": "1"}
    assert not all(ok for _, ok, _ in gencomp.verify(trace))
    with pytest.raises(gencomp.GencompError, match="parse error"):
        gencomp.run({"version": 1, "scenario": "single-diagonal", "colour": 1})
    assert any(name == "trap-springer" for name, _ in gencomp.catalog())

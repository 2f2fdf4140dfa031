import pytest

from noumenal.sabotage import SABOTAGES, base_for, demonstrate, sabotaged_theory
from noumenal.verify import catalogue_ids, verify_theory

CASES = [(name, kind) for name, s in SABOTAGES.items() for kind in s.kinds]


def test_registry_is_documented():
    assert len(SABOTAGES) >= 10
    ids = set(catalogue_ids())
    for s in SABOTAGES.values():
        assert s.description and s.expects
        assert set(s.expects) <= ids
        assert s.target in ("theory", "model")


@pytest.mark.parametrize("name,kind", CASES, ids=[f"{n}-{k}" for n, k in CASES])
def test_sabotage_is_caught_with_a_witness(name, kind):
    results = demonstrate(name, kind)
    for r in results:
        assert r.status == "fail", (r.id, r.status, r.reason)
        assert r.witness, r.id


@pytest.mark.parametrize("name,kind", [("swapped_product", "classical"), ("phase_sensitive", "quantum"),
                                       ("unpadded_action", "quantum")])
def test_witness_replays_identically(name, kind):
    a = [r.to_dict() for r in demonstrate(name, kind)]
    b = [r.to_dict() for r in demonstrate(name, kind)]
    assert a == b


def test_sound_bases_pass_the_expected_checks():
    from noumenal.core import SamplingBudget
    from noumenal.verify import CATALOGUE
    from noumenal.verify.context import TheoryContext
    from noumenal.verify.runner import run_check

    checks = {c.id: c for c in CATALOGUE}
    for kind in ("classical", "quantum"):
        base = base_for("swapped_product", kind)
        budget = SamplingBudget("sampled", sample_count=100, seed=1)
        ctx = TheoryContext(base, budget)
        for cid in ("S5.req3.interchange", "S5.req1.no-signalling", "S3.def2.faithful"):
            assert run_check(checks[cid], ctx, budget).status == "pass"


def test_unknown_sabotage_names_the_known_ones():
    with pytest.raises(KeyError, match="swapped_product"):
        sabotaged_theory("nope", base_for("swapped_product", "classical"))


def test_kind_restriction():
    with pytest.raises(ValueError):
        demonstrate("phase_sensitive", "classical")


def test_sabotaged_theory_keeps_its_data():
    base = base_for("swapped_product", "classical")
    broken = sabotaged_theory("swapped_product", base)
    assert broken.name == "classical_3x3+swapped_product"
    assert broken.universe == base.universe
    assert not verify_theory(broken).passed

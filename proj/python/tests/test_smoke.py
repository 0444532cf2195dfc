import os
import pathlib

import pytest

import tsocb

CORPUS = pathlib.Path(os.environ.get("TSOCB_CORPUS", pathlib.Path(__file__).resolve().parents[2] / "corpus"))

ENDS_IN_A = (CORPUS / "ends_in_a.dfa").read_text()
EVEN = (CORPUS / "even_length.dfa").read_text()


def test_parse_round_trip():
    p = tsocb.parse_program((CORPUS / "message_passing.tso").read_text())
    assert p.threads == ["t1", "t2"]
    assert p.vars == ["x", "y", "f"]
    assert p.target == ("t2", "done")
    assert p.validate() == []
    assert tsocb.parse_program(p.render()) == p


def test_parse_error_has_position():
    with pytest.raises(tsocb.ParseError) as info:
        tsocb.parse_program("domain nat\nthread t { regs a init q0\n  q0 -> q1 : read y a\n}\n")
    assert info.value.line == 3
    assert info.value.column == 19
    assert isinstance(info.value, ValueError)


def test_litmus_verdicts():
    p = tsocb.message_passing_litmus()
    assert tsocb.check_reach(p, 1)["reachable"] is False
    report = tsocb.check_reach(p, 2)
    assert report["reachable"] is True
    assert report["target"] == {"thread": "t2", "state": "done"}
    assert len(report["witness"]) > 0
    assert tsocb.simulate(p, k=1)["reachable"] is False
    assert tsocb.simulate(p, k=2)["reachable"] is True
    assert tsocb.simulate(p, buffer_bound=1, domain_bound=1)["reachable"] is True


def test_explicit_target_and_budget():
    p = tsocb.message_passing_litmus()
    assert tsocb.check_reach(p, 1, ("t1", "s0"))["witness"] == []
    assert tsocb.check_reach(p, 3, max_states=3)["outcome"] == "bound_exhausted"
    with pytest.raises(ValueError):
        tsocb.check_reach(p, 1, ("nobody", "s0"))


def test_generators():
    bakery, k = tsocb.gen_bakery(2)
    assert k == 4
    assert {"ticket_1", "ticket_2", "chosen_1", "chosen_2"} <= set(bakery.vars)
    assert tsocb.parse_program(bakery.render()) == bakery

    inter, k = tsocb.gen_intersection([ENDS_IN_A, EVEN])
    assert tsocb.dfa_intersection_nonempty([ENDS_IN_A, EVEN])
    assert tsocb.check_reach(inter, k)["reachable"] is True

    text = (CORPUS / "send_recv.dlcs").read_text()
    prog, k = tsocb.gen_dlcs(text)
    assert k == 0
    assert len(prog.vars) == 2
    assert tsocb.dlcs_reach(text) == "reachable"

    with pytest.raises(tsocb.ModelError):
        tsocb.gen_intersection([ENDS_IN_A, "dfa alphabet a c states q init q final q\n"])


def test_canonical_text_is_stable():
    once = tsocb.canonical_dfa(ENDS_IN_A)
    assert tsocb.canonical_dfa(once) == once
    text = tsocb.canonical_dlcs((CORPUS / "send_recv.dlcs").read_text())
    assert tsocb.canonical_dlcs(text) == text


def test_quick_selftest():
    suites = tsocb.selftest(seed=2)
    assert len(suites) == 7
    assert all(s["passed"] for s in suites)

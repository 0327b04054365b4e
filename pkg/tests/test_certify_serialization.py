import json
from fractions import Fraction

import pytest

from contractsynth.core.errors import RejectedInputError
from contractsynth.core.logic import TRUE, Add, Cmp, IntConst, Sort, Var
from contractsynth.core.solver import Unknown
from contractsynth.services.skolem import (
    CertificateReport,
    Finding,
    GuardedSkolem,
    QuantifiedCheck,
    SkolemBundle,
    SkolemCase,
    certify_all,
    dumps,
    loads,
)
from contractsynth.services.skolem.serialization import bundle_to_dict

x = Var("x", Sort.INT)
y = Var("y", Sort.INT)

CHECK = QuantifiedCheck("extend", 0, (x,), (y,), TRUE, Cmp(">", y, x))


def skolem(*cases):
    return GuardedSkolem("extend", 0, (x,), (y,), list(cases))


def successor():
    return skolem(SkolemCase(TRUE, {"y": Add((x, IntConst(1)))}))


def bundle():
    return SkolemBundle(
        "comparator",
        0,
        {"x": -2, "r": Fraction(1, 2), "p": True},
        {"x": Sort.INT, "r": Sort.REAL, "p": Sort.BOOL},
        [
            skolem(
                SkolemCase(Cmp(">", x, IntConst(0)), {"y": Add((x, IntConst(2)))}),
                SkolemCase(Cmp("<=", x, IntConst(0)), {"y": IntConst(1)}),
            )
        ],
    )


def test_bundle_survives_json():
    original = bundle()
    assert loads(dumps(original)) == original


def test_bundle_document_layout():
    doc = json.loads(dumps(bundle()))
    assert doc["version"] == 1 and doc["k"] == 0
    assert doc["init_model"][1] == {"name": "r", "sort": "Real", "value": "(/ 1.0 2.0)"}
    case = doc["skolems"][0]["cases"][0]
    assert case == {"guard": "(> x 0)", "assigns": {"y": "(+ x 2)"}}


def _mutated(change):
    doc = bundle_to_dict(bundle())
    change(doc)
    return json.dumps(doc)


@pytest.mark.parametrize(
    "change",
    [
        lambda d: d.update(version=2),
        lambda d: d.update(k=-1),
        lambda d: d.update(skolems=[]),
        lambda d: d["skolems"][0].update(kind="middle"),
        lambda d: d["init_model"][0].update(sort="String"),
        lambda d: d["skolems"][0]["cases"][0]["assigns"].clear(),
        lambda d: d["skolems"][0]["cases"][0]["assigns"].update(y="true"),
        lambda d: d["skolems"][0]["cases"][0].update(guard="(> x unknown)"),
        lambda d: d.update(extra=True),
        lambda d: d.update(k=1),
        lambda d: d["skolems"][0].update(kind="base"),
        lambda d: d["skolems"].append(dict(d["skolems"][0])),
    ],
)
def test_malformed_documents_are_rejected(change):
    with pytest.raises(RejectedInputError):
        loads(_mutated(change))


def test_bundle_needs_every_skolem_of_its_depth():
    base = GuardedSkolem("base", 0, (x,), (y,), [SkolemCase(TRUE, {"y": x})])
    extend = GuardedSkolem("extend", 1, (x,), (y,), successor().cases)
    full = SkolemBundle("c", 1, {}, {}, [base, extend])
    assert [s.tag for s in loads(dumps(full)).skolems] == ["base_0", "extend_1"]
    doc = bundle_to_dict(full)
    del doc["skolems"][1]
    with pytest.raises(RejectedInputError) as info:
        loads(json.dumps(doc))
    assert "extend_1" in str(info.value)


def test_skolems_must_pair_with_their_checks():
    base_check = QuantifiedCheck("base", 0, (x,), (y,), TRUE, Cmp(">", y, x))
    with pytest.raises(RejectedInputError):
        certify_all(None, [CHECK], [])
    with pytest.raises(RejectedInputError):
        certify_all(None, [base_check, CHECK], [successor()])
    with pytest.raises(RejectedInputError):
        certify_all(None, [base_check], [successor()])
    with pytest.raises(RejectedInputError):
        certify_all(None, [CHECK], [GuardedSkolem("extend", 0, (y,), (x,), [])])


def test_non_json_is_rejected():
    with pytest.raises(RejectedInputError):
        loads("{not json")


def test_report_text():
    report = CertificateReport(
        [
            Finding("base_0", "case 0", True),
            Finding("base_0", "coverage", Unknown("timeout")),
            Finding("extend_1", "case 0", False),
        ],
        init_ok=True,
    )
    assert not report.ok
    assert len(report.failures()) == 2
    assert report.to_text().splitlines() == [
        "initial state: ok",
        "base_0 case 0: ok",
        "base_0 coverage: unknown (timeout)",
        "extend_1 case 0: FAILED",
        "NOT CERTIFIED (2 failing)",
    ]


def test_failed_initial_state_fails_the_report():
    assert not CertificateReport([], init_ok=False).ok
    assert CertificateReport([]).ok


def test_sound_skolem_is_certified(session):
    report = certify_all(session, [CHECK], [successor()], init_ok=True)
    assert report.ok
    assert report.to_text().splitlines()[-1] == "CERTIFIED"


def test_wrong_witness_is_caught(session):
    report = certify_all(session, [CHECK], [skolem(SkolemCase(TRUE, {"y": x}))])
    assert [f.subject for f in report.failures()] == ["case 0"]


def test_missing_coverage_is_caught(session):
    partial = skolem(SkolemCase(Cmp(">", x, IntConst(0)), {"y": Add((x, IntConst(1)))}))
    report = certify_all(session, [CHECK], [partial])
    assert [f.subject for f in report.failures()] == ["coverage"]


def test_loaded_bundle_certifies(session):
    restored = loads(dumps(SkolemBundle("c", 0, {}, {}, [successor()])))
    assert certify_all(session, [CHECK], restored.skolems).ok

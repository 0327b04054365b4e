"""JSON persistence of synthesized Skolems.

Guards, assignment terms and initial values are stored as SMT-LIB text and
re-parsed against the declared symbol sorts on load.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping

from marshmallow import Schema, ValidationError, fields, validate, validates_schema

from ...core.errors import RejectedInputError
from ...core.logic import Model, Sort, Var
from ...core.smtlib import parse_expr, parse_formula, parse_value, print_value, read_sexpr, to_smtlib
from .types import GuardedSkolem, SkolemCase, skolem_tags

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

_SORTS = [s.value for s in Sort]


class SymbolSchema(Schema):
    name = fields.String(required=True, validate=validate.Length(min=1))
    sort = fields.String(required=True, validate=validate.OneOf(_SORTS))


class ValueSchema(SymbolSchema):
    value = fields.String(required=True)


class CaseSchema(Schema):
    guard = fields.String(required=True)
    assigns = fields.Dict(keys=fields.String(), values=fields.String(), required=True)


class SkolemSchema(Schema):
    kind = fields.String(required=True, validate=validate.OneOf(["base", "extend"]))
    depth = fields.Integer(required=True, validate=validate.Range(min=0))
    universals = fields.List(fields.Nested(SymbolSchema), required=True)
    existentials = fields.List(fields.Nested(SymbolSchema), required=True)
    cases = fields.List(fields.Nested(CaseSchema), required=True)


class BundleSchema(Schema):
    version = fields.Integer(required=True, validate=validate.Equal(FORMAT_VERSION))
    contract = fields.String(required=True)
    k = fields.Integer(required=True, validate=validate.Range(min=0))
    init_model = fields.List(fields.Nested(ValueSchema), required=True)
    skolems = fields.List(fields.Nested(SkolemSchema), required=True, validate=validate.Length(min=1))

    @validates_schema
    def validate_skolem_sequence(self, data: Dict[str, Any], **kwargs: Any) -> None:
        expected = skolem_tags(data["k"])
        found = [f"{s['kind']}_{s['depth']}" for s in data["skolems"]]
        if found != expected:
            raise ValidationError(
                f"k={data['k']} needs skolems {expected}, found {found}", "skolems"
            )


@dataclass
class SkolemBundle:
    """Everything needed to rebuild an implementation: initial state plus the Skolem list."""

    contract: str
    k: int
    init_model: Model
    init_sorts: Mapping[str, Sort]
    skolems: List[GuardedSkolem] = field(default_factory=list)

    @classmethod
    def from_result(cls, contract: str, state, result) -> "SkolemBundle":
        """Bundle a realizable result; ``state`` gives the sorts of the initial model."""
        sorts = {v.name: v.sort for v in state}
        return cls(contract, result.k, dict(result.init_model), sorts, list(result.skolems))


def _symbols(variables) -> List[Dict[str, str]]:
    return [{"name": v.name, "sort": v.sort.value} for v in variables]


def bundle_to_dict(bundle: SkolemBundle) -> Dict[str, Any]:
    return {
        "version": FORMAT_VERSION,
        "contract": bundle.contract,
        "k": bundle.k,
        "init_model": [
            {"name": name, "sort": sort.value, "value": print_value(bundle.init_model[name], sort)}
            for name, sort in bundle.init_sorts.items()
        ],
        "skolems": [
            {
                "kind": sk.kind,
                "depth": sk.depth,
                "universals": _symbols(sk.universals),
                "existentials": _symbols(sk.existentials),
                "cases": [
                    {
                        "guard": to_smtlib(case.guard),
                        "assigns": {name: to_smtlib(term) for name, term in case.assigns.items()},
                    }
                    for case in sk.cases
                ],
            }
            for sk in bundle.skolems
        ],
    }


def dumps(bundle: SkolemBundle) -> str:
    return json.dumps(bundle_to_dict(bundle), indent=2)


def _vars(entries) -> tuple:
    return tuple(Var(e["name"], Sort(e["sort"])) for e in entries)


def bundle_from_dict(data: Mapping[str, Any]) -> SkolemBundle:
    try:
        doc = BundleSchema().load(data)
    except ValidationError as exc:
        raise RejectedInputError(f"invalid skolem document: {exc.messages}") from exc
    init_sorts = {e["name"]: Sort(e["sort"]) for e in doc["init_model"]}
    init_model = {
        e["name"]: parse_value(read_sexpr(e["value"]), Sort(e["sort"])) for e in doc["init_model"]
    }
    skolems = []
    for entry in doc["skolems"]:
        universals = _vars(entry["universals"])
        existentials = _vars(entry["existentials"])
        sorts = {v.name: v.sort for v in universals}
        names = {v.name for v in existentials}
        cases = []
        for raw in entry["cases"]:
            if set(raw["assigns"]) != names:
                tag = f"{entry['kind']}_{entry['depth']}"
                raise RejectedInputError(f"case of {tag} does not assign every existential")
            assigns = {}
            for var in existentials:
                term = parse_expr(raw["assigns"][var.name], sorts)
                if term.sort is not var.sort:
                    raise RejectedInputError(f"assignment to {var.name} has sort {term.sort.value}")
                assigns[var.name] = term
            cases.append(SkolemCase(parse_formula(raw["guard"], sorts), assigns))
        skolems.append(GuardedSkolem(entry["kind"], entry["depth"], universals, existentials, cases))
    logger.debug("loaded %d skolems for %s", len(skolems), doc["contract"])
    return SkolemBundle(doc["contract"], doc["k"], init_model, init_sorts, skolems)


def loads(text: str) -> SkolemBundle:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RejectedInputError(f"skolem document is not JSON: {exc}") from exc
    return bundle_from_dict(data)

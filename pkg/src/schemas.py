from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from operators import DiffOp, ExpFunction
from poly_core import MultiPoly, RatFun, VarClass, VarId, format_rational


class PolyTerm(BaseModel):
    exps: List[Tuple[int, int, int]]  # (varclass, index, power)
    coeff: str  # "p/q"


class RatFunPayload(BaseModel):
    num: List[PolyTerm]
    den: List[PolyTerm]


class OperatorTerm(BaseModel):
    dmono: List[int]
    coeff: RatFunPayload


class OperatorPayload(BaseModel):
    dim: int
    terms: List[OperatorTerm]


class PolyPayload(BaseModel):
    terms: List[PolyTerm]


class FunctionPayload(BaseModel):
    dim: int
    coeff: RatFunPayload


class Provenance(BaseModel):
    seed: Optional[int] = None
    mode: Optional[str] = None
    minors_examined: Optional[int] = None
    workers: Optional[int] = None


class Report(BaseModel):
    command: str
    verb: str
    ok: bool = True
    text: str
    result: Dict[str, Any] = Field(default_factory=dict)
    provenance: Provenance = Field(default_factory=Provenance)
    elapsed: float = 0.0


# --- encoding ---

def poly_to_json(p: MultiPoly) -> List[PolyTerm]:
    return [
        PolyTerm(
            exps=[(v.cls.value, v.index, e) for v, e in sorted(exps.items())],
            coeff=format_rational(c),
        )
        for exps, c in p.terms()
    ]


def ratfun_to_json(r: RatFun) -> RatFunPayload:
    return RatFunPayload(num=poly_to_json(r.num), den=poly_to_json(r.den))


def diffop_to_json(op: DiffOp) -> OperatorPayload:
    return OperatorPayload(
        dim=op.dim,
        terms=[OperatorTerm(dmono=list(mono), coeff=ratfun_to_json(c)) for mono, c in op.sorted_terms()],
    )


def function_to_json(f: ExpFunction) -> FunctionPayload:
    return FunctionPayload(dim=f.dim, coeff=ratfun_to_json(f.coeff))


def value_to_json(value) -> Dict[str, Any]:
    """Structured form of any result value, tagged by kind"""
    if isinstance(value, DiffOp):
        return {"kind": "operator", **diffop_to_json(value).model_dump()}
    if isinstance(value, MultiPoly):
        return {"kind": "poly", **PolyPayload(terms=poly_to_json(value)).model_dump()}
    if isinstance(value, RatFun):
        return {"kind": "ratfun", **ratfun_to_json(value).model_dump()}
    if isinstance(value, ExpFunction):
        return {"kind": "function", **function_to_json(value).model_dump()}
    raise TypeError(f"No JSON form for {type(value).__name__}")


# --- decoding ---

def poly_from_json(terms) -> MultiPoly:
    parsed = [PolyTerm.model_validate(t) for t in terms]
    return MultiPoly.from_terms(
        ({VarId(VarClass(cls), index): e for cls, index, e in t.exps}, Fraction(t.coeff))
        for t in parsed
    )


def ratfun_from_json(payload) -> RatFun:
    parsed = RatFunPayload.model_validate(payload)
    return RatFun.from_parts(
        poly_from_json([t.model_dump() for t in parsed.num]),
        poly_from_json([t.model_dump() for t in parsed.den]),
    )


def diffop_from_json(payload) -> DiffOp:
    parsed = OperatorPayload.model_validate(payload)
    return DiffOp(parsed.dim, {
        tuple(t.dmono): ratfun_from_json(t.coeff.model_dump()) for t in parsed.terms
    })


def value_from_json(payload: Dict[str, Any]):
    kind = payload.get("kind")
    if kind == "operator":
        return diffop_from_json(payload)
    if kind == "poly":
        return poly_from_json(payload["terms"])
    if kind == "ratfun":
        return ratfun_from_json(payload)
    if kind == "function":
        return ExpFunction(payload["dim"], ratfun_from_json(payload["coeff"]))
    raise ValueError(f"Unknown payload kind {kind!r}")

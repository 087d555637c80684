"""JSON documents, format ``hlx/1``.

Every document is an object with ``format_version``, ``kind`` and ``field``
next to the payload keys.  Nested algebras inherit the document's field.
Rationals are strings ``"p/q"`` in lowest terms, prime-field scalars are
integers, and emitted text is canonical: sorted keys, compact separators,
one trailing newline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .exactlin import Field, FieldMismatch, Matrix, Subspace
from .homlie import DimensionMismatch, HomLieAlgebra, LinearMap
from .pairact import HomAction, Pair

__all__ = [
    "FORMAT_VERSION",
    "SchemaError",
    "Document",
    "parse",
    "emit",
    "encode",
    "load",
    "dump",
    "KINDS",
    "WitnessData",
    "witness_data",
    "canonical",
]

FORMAT_VERSION = "hlx/1"
KINDS = ("algebra", "pair", "extension", "factorset", "witness", "report")
_HEADER = ("format_version", "kind", "field")


class SchemaError(ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


@dataclass
class Document:
    kind: str
    field: Field
    payload: dict
    value: object = dc_field(default=None, compare=False)

    def as_json(self) -> dict:
        out = dict(self.payload)
        out["format_version"] = FORMAT_VERSION
        out["kind"] = self.kind
        out["field"] = self.field.descriptor
        return out


# ----------------------------------------------------------------------------
# scalar and shape helpers
# ----------------------------------------------------------------------------


def _fmt(f: Field, x):
    if f.p == 0:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x) % f.p


def _scalar(f: Field, raw, path):
    if f.p == 0:
        if not isinstance(raw, str):
            raise SchemaError(path, f"rational scalars must be strings, got {type(raw).__name__}")
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(path, f"not a rational number: {raw!r}") from None
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise SchemaError(path, f"prime-field scalars must be integers, got {type(raw).__name__}")
    return raw % f.p


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing key")
    return obj[key]


def _check_keys(obj, allowed, path):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise SchemaError(f"{path}.{extra[0]}", "unexpected key")


def _int(raw, path, lo=0):
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < lo:
        raise SchemaError(path, f"expected an integer >= {lo}")
    return raw


def _list(raw, n, path, what="entries"):
    if not isinstance(raw, list):
        raise SchemaError(path, "expected a list")
    if n is not None and len(raw) != n:
        raise SchemaError(path, f"expected {n} {what}, got {len(raw)}")
    return raw


def _vector(f, raw, n, path):
    return tuple(_scalar(f, x, f"{path}[{i}]") for i, x in enumerate(_list(raw, n, path)))


def _rows(f, raw, r, c, path):
    rows = _list(raw, r, path, "rows")
    return [_vector(f, row, c, f"{path}[{i}]") for i, row in enumerate(rows)]


def _tensor(f, raw, a, b, c, path):
    outer = _list(raw, a, path)
    return [_rows(f, row, b, c, f"{path}[{i}]") for i, row in enumerate(outer)]


def _enc_vec(f, v):
    return [_fmt(f, x) for x in v]


def _enc_rows(f, m: Matrix):
    return [_enc_vec(f, r) for r in m.data]


# ----------------------------------------------------------------------------
# payload codecs
# ----------------------------------------------------------------------------


def _enc_algebra(L: HomLieAlgebra) -> dict:
    f = L.field
    out = {
        "dim": L.dim,
        "bracket": [[_enc_vec(f, v) for v in row] for row in L.bracket],
        "alpha": _enc_rows(f, L.alpha),
    }
    if L.name:
        out["name"] = L.name
    return out


def _dec_algebra(f, obj, path) -> HomLieAlgebra:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    _check_keys(obj, ("dim", "bracket", "alpha", "name") + _HEADER, path)
    n = _int(_get(obj, "dim", path), f"{path}.dim")
    bracket = _tensor(f, _get(obj, "bracket", path), n, n, n, f"{path}.bracket")
    alpha = _rows(f, _get(obj, "alpha", path), n, n, f"{path}.alpha")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise SchemaError(f"{path}.name", "expected a string")
    return HomLieAlgebra.from_tensor(f, bracket, Matrix.from_rows(f, alpha, n), name)


def _enc_basis(f, s: Subspace):
    return [_enc_vec(f, v) for v in s.basis]


def _dec_subspace(f, raw, n, path) -> Subspace:
    vecs = [_vector(f, v, n, f"{path}[{i}]") for i, v in enumerate(_list(raw, None, path))]
    return Subspace.span(f, n, vecs)


def _enc_extension(e) -> dict:
    f = e.field
    out = {
        "domain": _enc_algebra(e.domain),
        "codomain": _enc_algebra(e.codomain),
        "sigma": _enc_rows(f, e.sigma.matrix),
        "action": [[_enc_vec(f, v) for v in row] for row in e.action.tensor],
        "target": _enc_basis(f, e.target),
    }
    if e.name:
        out["name"] = e.name
    return out


def _dec_extension(f, obj, path):
    from .extension import RelCentralExt

    _check_keys(obj, ("domain", "codomain", "sigma", "action", "target", "name") + _HEADER, path)
    M = _dec_algebra(f, _get(obj, "domain", path), f"{path}.domain")
    L = _dec_algebra(f, _get(obj, "codomain", path), f"{path}.codomain")
    sig = _rows(f, _get(obj, "sigma", path), L.dim, M.dim, f"{path}.sigma")
    act = _tensor(f, _get(obj, "action", path), L.dim, M.dim, M.dim, f"{path}.action")
    target = _dec_subspace(f, _get(obj, "target", path), L.dim, f"{path}.target")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise SchemaError(f"{path}.name", "expected a string")
    return RelCentralExt(M, L, LinearMap(M, L, Matrix.from_rows(f, sig, M.dim)),
                         HomAction.from_tensor(L, M, act), target, name)


def _enc_pair(p: Pair) -> dict:
    return {"algebra": _enc_algebra(p.ambient), "ideal": _enc_basis(p.field, p.ideal)}


def _dec_pair(f, obj, path) -> Pair:
    _check_keys(obj, ("algebra", "ideal") + _HEADER, path)
    L = _dec_algebra(f, _get(obj, "algebra", path), f"{path}.algebra")
    return Pair(L, _dec_subspace(f, _get(obj, "ideal", path), L.dim, f"{path}.ideal"))


def _enc_factorset(fs) -> dict:
    f = fs.base.field
    return {
        "base": _enc_algebra(fs.base),
        "kernel": _enc_algebra(fs.kernel_space),
        "support": _enc_basis(f, fs.support),
        "tensor": [[_enc_vec(f, v) for v in row] for row in fs.tensor],
    }


def _dec_factorset(f, obj, path):
    from .factorset import FactorSet

    _check_keys(obj, ("base", "kernel", "support", "tensor") + _HEADER, path)
    L = _dec_algebra(f, _get(obj, "base", path), f"{path}.base")
    K = _dec_algebra(f, _get(obj, "kernel", path), f"{path}.kernel")
    M = _dec_subspace(f, _get(obj, "support", path), L.dim, f"{path}.support")
    t = _tensor(f, _get(obj, "tensor", path), L.dim, L.dim, K.dim, f"{path}.tensor")
    return FactorSet.from_tensor(L, K, t, M)


@dataclass(frozen=True)
class WitnessData:
    """Detached maps: ``gamma`` always, ``beta_prime`` and ``beta`` when present."""

    gamma: Matrix
    beta_prime: Matrix | None = None
    beta: Matrix | None = None


def _matrix_any(f, raw, path) -> Matrix:
    rows = _list(raw, None, path, "rows")
    if not rows:
        return Matrix.zeros(f, 0, 0)
    width = len(_list(rows[0], None, f"{path}[0]"))
    return Matrix.from_rows(f, _rows(f, rows, len(rows), width, path), width)


def _dec_matrix(f, obj, key, path, required: bool):
    if key not in obj:
        if required:
            raise SchemaError(f"{path}.{key}", "missing key")
        return None
    raw = obj[key]
    if isinstance(raw, dict):
        _check_keys(raw, ("rows", "cols", "data"), f"{path}.{key}")
        r = _int(_get(raw, "rows", f"{path}.{key}"), f"{path}.{key}.rows")
        c = _int(_get(raw, "cols", f"{path}.{key}"), f"{path}.{key}.cols")
        data = _rows(f, _get(raw, "data", f"{path}.{key}"), r, c, f"{path}.{key}.data")
        return Matrix.from_rows(f, data, c)
    return _matrix_any(f, raw, f"{path}.{key}")


def _enc_matrix(f, m: Matrix):
    # shape is explicit so that empty matrices keep their dimensions
    return {"rows": m.rows, "cols": m.cols, "data": _enc_rows(f, m)}


def _enc_witness(w) -> dict:
    f = w.gamma.field
    out = {"gamma": _enc_matrix(f, w.gamma)}
    if w.beta_prime is not None:
        out["beta_prime"] = _enc_matrix(f, w.beta_prime)
    if w.beta is not None:
        out["beta"] = _enc_matrix(f, w.beta)
    return out


def _dec_witness(f, obj, path) -> WitnessData:
    _check_keys(obj, ("gamma", "beta_prime", "beta") + _HEADER, path)
    return WitnessData(_dec_matrix(f, obj, "gamma", path, True), _dec_matrix(f, obj, "beta_prime", path, False),
                       _dec_matrix(f, obj, "beta", path, False))


def _check_report(obj, path):
    def walk(x, p):
        if isinstance(x, float):
            raise SchemaError(p, "floats are not allowed")
        if isinstance(x, dict):
            for k, v in x.items():
                walk(v, f"{p}.{k}")
        elif isinstance(x, list):
            for i, v in enumerate(x):
                walk(v, f"{p}[{i}]")
    walk(obj, path)
    return dict((k, v) for k, v in obj.items() if k not in _HEADER)


_DECODERS = {
    "algebra": _dec_algebra,
    "pair": _dec_pair,
    "extension": _dec_extension,
    "factorset": _dec_factorset,
    "witness": _dec_witness,
    "report": lambda f, obj, path: _check_report(obj, path),
}


# ----------------------------------------------------------------------------
# public surface
# ----------------------------------------------------------------------------


def parse(data: bytes | str) -> Document:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError("$", f"not UTF-8: {exc}") from None
    try:
        obj = json.loads(data, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    except _FloatSeen:
        raise SchemaError("$", "floats are not allowed") from None
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    version = _get(obj, "format_version", "$")
    if version != FORMAT_VERSION:
        raise SchemaError("$.format_version", f"unsupported version {version!r}")
    kind = _get(obj, "kind", "$")
    if kind not in KINDS:
        raise SchemaError("$.kind", f"unknown kind {kind!r}")
    desc = _get(obj, "field", "$")
    try:
        f = Field.from_descriptor(desc) if isinstance(desc, str) else None
    except ValueError:
        f = None
    if f is None:
        raise SchemaError("$.field", f"bad field descriptor {desc!r}")
    try:
        value = _DECODERS[kind](f, obj, "$")
    except DimensionMismatch as exc:
        raise SchemaError("$", str(exc)) from None
    doc = encode(value, f) if kind != "report" else Document("report", f, value, value)
    return doc


class _FloatSeen(Exception):
    pass


def _no_float(text):
    raise _FloatSeen(text)


def emit(doc: Document) -> bytes:
    text = json.dumps(doc.as_json(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def encode(value, field: Field | None = None) -> Document:
    """Wrap a library object as a Document."""
    from .extension import RelCentralExt
    from .factorset import FactorSet

    if isinstance(value, HomLieAlgebra):
        return Document("algebra", value.field, _enc_algebra(value), value)
    if isinstance(value, Pair):
        return Document("pair", value.field, _enc_pair(value), value)
    if isinstance(value, RelCentralExt):
        return Document("extension", value.field, _enc_extension(value), value)
    if isinstance(value, FactorSet):
        return Document("factorset", value.base.field, _enc_factorset(value), value)
    if isinstance(value, WitnessData):
        return Document("witness", value.gamma.field, _enc_witness(value), value)
    if isinstance(value, dict):
        if field is None:
            raise ValueError("report documents need a field")
        return Document("report", field, value, value)
    raise TypeError(f"cannot encode {type(value).__name__}")


def witness_data(w) -> WitnessData:
    """From an IsoclinismWitness or ExtMorphism."""
    if hasattr(w, "beta_prime"):
        return WitnessData(w.gamma.matrix, w.beta_prime)
    from .isoclinism import morphism_to_witness
    from .extension import InvalidWitness

    try:
        bp = morphism_to_witness(w).beta_prime
    except InvalidWitness:
        bp = None
    return WitnessData(w.gamma.matrix, bp, w.beta.matrix)


def dump(value, field: Field | None = None) -> bytes:
    return emit(encode(value, field))


def load(data: bytes | str, kind: str | None = None, field: Field | None = None):
    """Parse and return the decoded library object, checking kind and field if given."""
    doc = parse(data)
    if kind is not None and doc.kind != kind:
        raise SchemaError("$.kind", f"expected {kind!r}, got {doc.kind!r}")
    if field is not None and doc.field != field:
        raise FieldMismatch(f"document is over {doc.field.descriptor}, expected {field.descriptor}")
    return doc.value


def canonical(data: bytes | str) -> bytes:
    return emit(parse(data))

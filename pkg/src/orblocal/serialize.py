"""JSON schemas for scenarios, charts, germs, and reports.

Rationals travel as strings "p/q" or "n" so nothing is ever rounded;
matrices are row-major nested arrays of such strings; polynomial maps are
arrays (one per output coordinate) of {"coef": rational, "exps": [int,...]}
terms.  Schema violations raise SchemaError carrying the JSON path of the
offending field; mathematical failures (non-invertible generators, broken
equivariance, ...) propagate as the library's own exceptions.
"""

from __future__ import annotations

from fractions import Fraction

from .ratlin import Matrix, MultiPoly, vec
from .groups import GroupHom, verify_homomorphism
from .charts import ChartEmbedding, LocalChart, build_chart
from .germs import MapGerm, build_germ
from .onedim import (
    AssemblyEnd,
    AssemblyPiece,
    OneOrbifoldComponent,
    RetractionScenario,
    BOUNDARY,
    MIRROR,
    GLUE,
    LOOP,
    INTERVAL,
)


class SchemaError(ValueError):
    """Input does not match the schema; carries the JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__("at %s: %s" % (path, message))
        self.path = path
        self.reason = message


def rat_str(x: Fraction) -> str:
    return str(x)


def parse_rational(v, path: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise SchemaError(path, "expected a rational string or integer, got %r" % (v,))
    try:
        q = Fraction(v)
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(path, "bad rational %r (%s)" % (v, e)) from None
    return q


def parse_vector(v, path: str) -> tuple[Fraction, ...]:
    if not isinstance(v, list):
        raise SchemaError(path, "expected an array of rationals")
    return tuple(parse_rational(x, "%s[%d]" % (path, i)) for i, x in enumerate(v))


def vector_json(v) -> list[str]:
    return [rat_str(x) for x in v]


def parse_matrix(v, path: str) -> Matrix:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise SchemaError(path, "expected a nested array of rationals (rows)")
    rows = [parse_vector(r, "%s[%d]" % (path, i)) for i, r in enumerate(v)]
    if any(len(r) != len(rows[0]) for r in rows):
        raise SchemaError(path, "rows have unequal lengths")
    return Matrix(rows)


def matrix_json(m: Matrix) -> list[list[str]]:
    return [[rat_str(x) for x in row] for row in m.entries]


def parse_poly(v, num_vars: int, path: str) -> MultiPoly:
    if not isinstance(v, list):
        raise SchemaError(path, "expected an array of output coordinates")
    coords = []
    for i, coord in enumerate(v):
        cpath = "%s[%d]" % (path, i)
        if not isinstance(coord, list):
            raise SchemaError(cpath, "expected an array of terms")
        d = {}
        for j, term in enumerate(coord):
            tpath = "%s[%d]" % (cpath, j)
            if not isinstance(term, dict) or set(term) != {"coef", "exps"}:
                raise SchemaError(tpath, 'expected {"coef": ..., "exps": [...]}')
            coef = parse_rational(term["coef"], tpath + ".coef")
            exps = term["exps"]
            if (not isinstance(exps, list)
                    or any(not isinstance(e, int) or isinstance(e, bool) or e < 0
                           for e in exps)):
                raise SchemaError(tpath + ".exps", "expected nonnegative integers")
            if len(exps) != num_vars:
                raise SchemaError(tpath + ".exps",
                                  "expected %d exponents, got %d" % (num_vars, len(exps)))
            key = tuple(exps)
            if key in d:
                raise SchemaError(tpath + ".exps", "duplicate exponent vector")
            d[key] = d.get(key, Fraction(0)) + coef
        coords.append(d)
    return MultiPoly(num_vars, coords)


def poly_json(p: MultiPoly) -> list[list[dict]]:
    return [
        [{"coef": rat_str(c), "exps": list(e)} for e, c in coord]
        for coord in p.coords
    ]


def parse_chart(v, path: str) -> LocalChart:
    if not isinstance(v, dict):
        raise SchemaError(path, "expected a chart object")
    if "dim" not in v or not isinstance(v["dim"], int) or v["dim"] < 1:
        raise SchemaError(path + ".dim", "expected a positive integer")
    boundary = v.get("boundary", False)
    if not isinstance(boundary, bool):
        raise SchemaError(path + ".boundary", "expected a boolean")
    gens_json = v.get("generators", [])
    if not isinstance(gens_json, list):
        raise SchemaError(path + ".generators", "expected an array of matrices")
    gens = [parse_matrix(g, "%s.generators[%d]" % (path, i))
            for i, g in enumerate(gens_json)]
    return build_chart(v["dim"], gens, boundary=boundary)


def chart_json(c: LocalChart) -> dict:
    return {
        "dim": c.dim,
        "boundary": c.boundary,
        "generators": [matrix_json(g) for g in c.group.generators],
    }


def parse_theta(v, source: LocalChart, target: LocalChart, path: str) -> GroupHom:
    if not isinstance(v, list):
        raise SchemaError(path, "expected an array of target element matrices")
    images = [parse_matrix(m, "%s[%d]" % (path, i)) for i, m in enumerate(v)]
    if len(images) != len(source.group.generator_indices):
        raise SchemaError(path, "expected %d generator images, got %d"
                          % (len(source.group.generator_indices), len(images)))
    return verify_homomorphism(source.group, target.group, images)


def parse_germ_payload(v, path: str) -> tuple[MapGerm, tuple, list]:
    """Parse a germ scenario payload: (germ, target point p, preimage lifts)."""
    if not isinstance(v, dict):
        raise SchemaError(path, "expected a germ scenario object")
    for key in ("source", "target", "theta_gen_images", "lift", "p"):
        if key not in v:
            raise SchemaError("%s.%s" % (path, key), "missing required field")
    source = parse_chart(v["source"], path + ".source")
    target = parse_chart(v["target"], path + ".target")
    theta = parse_theta(v["theta_gen_images"], source, target,
                        path + ".theta_gen_images")
    lift = parse_poly(v["lift"], source.dim, path + ".lift")
    base = parse_vector(v["base_point"], path + ".base_point") \
        if "base_point" in v else None
    germ = build_germ(source, target, lift, theta, base)
    p = parse_vector(v["p"], path + ".p")
    lifts_json = v.get("preimage_lifts", [])
    if not isinstance(lifts_json, list):
        raise SchemaError(path + ".preimage_lifts", "expected an array of points")
    lifts = [parse_vector(x, "%s.preimage_lifts[%d]" % (path, i))
             for i, x in enumerate(lifts_json)]
    return germ, p, lifts


def germ_payload_json(germ: MapGerm, p, lifts) -> dict:
    return {
        "source": chart_json(germ.source),
        "target": chart_json(germ.target),
        "theta_gen_images": [
            matrix_json(germ.theta.apply_matrix(g))
            for g in germ.source.group.generators
        ],
        "lift": poly_json(germ.lift),
        "base_point": vector_json(germ.base_point),
        "p": vector_json(p),
        "preimage_lifts": [vector_json(x) for x in lifts],
    }


def parse_obstruction_payload(v, path: str):
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an obstruction scenario object")
    for key in ("source", "target", "theta_gen_images"):
        if key not in v:
            raise SchemaError("%s.%s" % (path, key), "missing required field")
    source = parse_chart(v["source"], path + ".source")
    target = parse_chart(v["target"], path + ".target")
    theta = parse_theta(v["theta_gen_images"], source, target,
                        path + ".theta_gen_images")
    return source, target, theta


def parse_component(v, path: str) -> OneOrbifoldComponent:
    if not isinstance(v, dict) or "shape" not in v:
        raise SchemaError(path, 'expected {"shape": ...}')
    shape = v["shape"]
    if shape == LOOP:
        return OneOrbifoldComponent(LOOP)
    if shape == INTERVAL:
        ends = v.get("ends")
        if (not isinstance(ends, list) or len(ends) != 2
                or any(e not in (BOUNDARY, MIRROR) for e in ends)):
            raise SchemaError(path + ".ends",
                              'expected two of "boundary"/"mirror"')
        return OneOrbifoldComponent(INTERVAL, tuple(ends))
    raise SchemaError(path + ".shape", 'expected "loop" or "interval"')


def component_json(c: OneOrbifoldComponent) -> dict:
    if c.shape == LOOP:
        return {"shape": LOOP}
    return {"shape": INTERVAL, "ends": list(c.ends)}


def parse_end(v, path: str) -> AssemblyEnd:
    if not isinstance(v, dict) or "kind" not in v:
        raise SchemaError(path, 'expected {"kind": ...}')
    kind = v["kind"]
    if kind not in (BOUNDARY, MIRROR, GLUE):
        raise SchemaError(path + ".kind", "unknown end kind %r" % (kind,))
    token = v.get("token")
    if token is not None and not isinstance(token, str):
        raise SchemaError(path + ".token", "expected a string")
    order = v.get("isotropy_order", 2 if kind == MIRROR else 1)
    if not isinstance(order, int) or order < 1:
        raise SchemaError(path + ".isotropy_order", "expected a positive integer")
    chart_index = v.get("chart")
    if chart_index is not None and not isinstance(chart_index, int):
        raise SchemaError(path + ".chart", "expected an integer chart index")
    point = parse_vector(v["point"], path + ".point") if "point" in v else None
    is_base = v.get("is_base", False)
    if not isinstance(is_base, bool):
        raise SchemaError(path + ".is_base", "expected a boolean")
    try:
        return AssemblyEnd(kind, token=token, isotropy_order=order,
                           chart_index=chart_index, point=point, is_base=is_base)
    except ValueError as e:
        raise SchemaError(path, str(e)) from None


def parse_piece(v, path: str) -> AssemblyPiece:
    if not isinstance(v, dict) or "ends" not in v:
        raise SchemaError(path, 'expected {"name": ..., "ends": [...]}')
    name = v.get("name", "piece")
    if not isinstance(name, str):
        raise SchemaError(path + ".name", "expected a string")
    ends = v["ends"]
    if not isinstance(ends, list) or len(ends) != 2:
        raise SchemaError(path + ".ends", "expected exactly two ends")
    chart_index = v.get("chart")
    if chart_index is not None and not isinstance(chart_index, int):
        raise SchemaError(path + ".chart", "expected an integer chart index")
    e0 = parse_end(ends[0], path + ".ends[0]")
    e1 = parse_end(ends[1], path + ".ends[1]")
    return AssemblyPiece(name, (e0, e1), chart_index)


def parse_atlas_payload(v, path: str) -> RetractionScenario:
    """Parse a retraction/parity atlas: charts, target, p, germs, pieces."""
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an atlas object")
    charts_json = v.get("charts")
    if not isinstance(charts_json, list) or not charts_json:
        raise SchemaError(path + ".charts", "expected a nonempty array of charts")
    charts = [parse_chart(c, "%s.charts[%d]" % (path, i))
              for i, c in enumerate(charts_json)]
    if "target" not in v:
        raise SchemaError(path + ".target", "missing required field")
    target = parse_chart(v["target"], path + ".target")
    if "p" not in v:
        raise SchemaError(path + ".p", "missing required field")
    p = parse_vector(v["p"], path + ".p")
    germs = []
    for i, g in enumerate(v.get("germs", [])):
        gpath = "%s.germs[%d]" % (path, i)
        if not isinstance(g, dict) or "chart" not in g:
            raise SchemaError(gpath, 'expected {"chart": index, "lift": ...}')
        ci = g["chart"]
        if not isinstance(ci, int) or not (0 <= ci < len(charts)):
            raise SchemaError(gpath + ".chart", "chart index out of range")
        source = charts[ci]
        theta = parse_theta(g.get("theta_gen_images", []), source, target,
                            gpath + ".theta_gen_images")
        lift = parse_poly(g.get("lift"), source.dim, gpath + ".lift")
        germ = build_germ(source, target, lift, theta)
        lifts = [parse_vector(x, "%s.preimage_lifts[%d]" % (gpath, j))
                 for j, x in enumerate(g.get("preimage_lifts", []))]
        germs.append((ci, germ, lifts))
    pieces = [parse_piece(pc, "%s.pieces[%d]" % (path, i))
              for i, pc in enumerate(v.get("pieces", []))]
    for i, e in enumerate(v.get("embeddings", [])):
        epath = "%s.embeddings[%d]" % (path, i)
        parse_embedding(e, charts, epath)
    return RetractionScenario(atlas=charts, p=p, germs=germs, pieces=pieces)


def parse_embedding(v, charts: list[LocalChart], path: str) -> ChartEmbedding:
    """Parse and verify a declared chart embedding (indices into the atlas)."""
    from .charts import verify_embedding
    if not isinstance(v, dict):
        raise SchemaError(path, "expected an embedding object")
    for key in ("source", "target", "linear", "translate", "theta_gen_images"):
        if key not in v:
            raise SchemaError("%s.%s" % (path, key), "missing required field")
    si, ti = v["source"], v["target"]
    for label, idx in (("source", si), ("target", ti)):
        if not isinstance(idx, int) or not (0 <= idx < len(charts)):
            raise SchemaError("%s.%s" % (path, label), "chart index out of range")
    linear = parse_matrix(v["linear"], path + ".linear")
    translate = parse_vector(v["translate"], path + ".translate")
    theta = parse_theta(v["theta_gen_images"], charts[si], charts[ti],
                        path + ".theta_gen_images")
    emb = ChartEmbedding(charts[si], charts[ti], linear, translate, theta)
    return verify_embedding(emb)


def end_json(e: AssemblyEnd) -> dict:
    out: dict = {"kind": e.kind}
    if e.token is not None:
        out["token"] = e.token
    if e.isotropy_order != (2 if e.kind == MIRROR else 1):
        out["isotropy_order"] = e.isotropy_order
    if e.chart_index is not None:
        out["chart"] = e.chart_index
    if e.point is not None:
        out["point"] = vector_json(e.point)
    if e.is_base:
        out["is_base"] = True
    return out


def piece_json(p: AssemblyPiece) -> dict:
    out: dict = {"name": p.name, "ends": [end_json(e) for e in p.ends]}
    if p.chart_index is not None:
        out["chart"] = p.chart_index
    return out


KNOWN_KINDS = ("chart", "germ", "obstruction", "atlas", "component-list")


def parse_scenario(doc, path: str = "$") -> dict:
    """Validate the scenario wrapper; returns kind/name/anchor/payload."""
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected a scenario object")
    kind = doc.get("kind")
    if kind not in KNOWN_KINDS:
        raise SchemaError(path + ".kind", "expected one of %s" % (KNOWN_KINDS,))
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise SchemaError(path + ".name", "expected a string")
    anchor = doc.get("anchor", "")
    if not isinstance(anchor, str):
        raise SchemaError(path + ".anchor", "expected a string")
    if "payload" not in doc:
        raise SchemaError(path + ".payload", "missing required field")
    return {"kind": kind, "name": name, "anchor": anchor, "payload": doc["payload"]}

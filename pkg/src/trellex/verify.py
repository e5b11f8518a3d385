"""The invariant battery behind ``trellex verify-all``.

Each check returns a detail dict or raises; failures are classified as
verdict failures (a theorem-backed check failed) or input errors.
Fixture files are JSON objects with a ``kind`` of ``construction`` or
``trellis``.
"""

from __future__ import annotations

import traceback
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import ff
from .construction import default_spec, ec_theorem_main_report, micro_spec
from .conv import ConvolutionalCode, cc_bounds, cc_search_profile
from .errors import BoundViolated, InputError, InputParseError, TrellexError, VerdictFailure
from .expander import cycle_graph, mixing_sweep, xg_complete, xg_gamma, xg_random_regular
from .io import construction_from_json, read_json
from .trellis import (
    TrellisCode,
    analogue_column_bound,
    from_convolutional,
    parse_trellis,
    random_deterministic_trellis,
    tc_bounds,
    tc_example1,
)


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "verdict_failure", "input_error", "error"
    detail: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _require(cond: bool, message: str):
    if not cond:
        raise BoundViolated(message)


def check_field_axioms() -> dict:
    fields = [ff.make_field(2), ff.make_field(3), ff.make_field(2, 2), ff.make_field(2, 3), ff.make_field(3, 2)]
    for f in fields:
        x = np.arange(f.q)
        a, b, c = np.meshgrid(x, x, x, indexing="ij")
        _require((f.add(f.add(a, b), c) == f.add(a, f.add(b, c))).all(), f"{f}: addition not associative")
        _require((f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))).all(), f"{f}: multiplication not associative")
        _require((f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))).all(), f"{f}: not distributive")
        _require((f.mul(x[1:], f.inv(x[1:])) == 1).all(), f"{f}: bad inverses")
        _require((f.add(x, f.neg(x)) == 0).all(), f"{f}: bad negation")
    return {"fields": [repr(f) for f in fields]}


def check_convolutional_baseline() -> dict:
    f = ff.make_field(2)
    code = ConvolutionalCode.from_polys(f, [[[1, 0, 1], [1, 1, 1]]])
    col = code.column_distances(5)
    free = code.free_distance()
    _require(col == [2, 3, 3, 4, 4, 5] and free == 5, f"baseline profile {col}, d_f {free}")
    prof = cc_bounds(code)
    return {"column": col, "free": free, "is_MDP": prof.is_mdp}


def check_mdp_search() -> dict:
    res = cc_search_profile(2, 1, 1, ff.make_field(2, 2), budget=1 << 16)
    _require(res.exhaustive and not res.chain_violations, "chain property failed during the search")
    _require(res.profile == (2, 3, 4), f"best profile {res.profile}")
    free = res.code.free_distance()
    _require(free == 4, f"free distance {free}")
    return {"profile": list(res.profile), "free": free, "evaluated": res.evaluated}


def check_example1() -> dict:
    ex = tc_example1(8, 4, 2, 1)
    rep = tc_bounds(ex.code, 1, with_free=False, M=4)
    _require(len(ex.codebook) == 16 and rep.column[1] == 4, "example distances")
    _require(Fraction(4) > analogue_column_bound(8, 2, 4, 1) == Fraction(11, 3), "example does not beat the convolutional analogue")
    _require(rep.column_bound_int[1] == 4 and rep.ok, "column bound not tight")
    return {"codebook": len(ex.codebook), "column": rep.column, "column_bound": str(rep.column_bound[1])}


def check_trellis_battery(seed: int, count: int = 30) -> dict:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        q = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        M = int(rng.integers(2, min(q**n, 6) + 1))
        V = int(rng.integers(1, 9))
        t = random_deterministic_trellis(V, q, n, M, rng)
        rep = tc_bounds(t, 4)
        _require(rep.ok, f"trellis bound verdicts {rep.verdicts}")
    code = ConvolutionalCode.from_polys(ff.make_field(2), [[[1, 0, 1], [1, 1, 1]]])
    t = from_convolutional(code)
    _require(t.column_distances(5) == code.column_distances(5), "linear consistency (column)")
    _require(t.free_distance() == code.free_distance(), "linear consistency (free)")
    return {"presentations": count}


def check_spectral(seed: int) -> dict:
    out = {}
    for n in (1, 2, 8, 32, 64):
        g = xg_complete(n)
        _require(xg_gamma(g).gamma <= 1e-12, f"gamma(K_{n},{n}) nonzero")
    _require(abs(xg_gamma(cycle_graph(3)).gamma - 0.5) <= 1e-9, "6-cycle gamma")
    for n, d in ((6, 3), (10, 4), (16, 5)):
        g = xg_random_regular(n, d, seed)
        sweep = mixing_sweep(g, xg_gamma(g).gamma, 1000, seed)
        _require(sweep["failures"] == 0, f"mixing inequality failed on ({n}, {d})")
        out[f"{n}_{d}"] = sweep["worst_slack"]
    return {"worst_slack": out}


def check_micro() -> dict:
    rep = ec_theorem_main_report(micro_spec(), horizon=2)
    _require(rep["passed"], f"micro verdicts {rep['verdicts']}")
    return {"verdicts": rep["verdicts"], "packed_column": rep["packed_column"]}


def check_default(seed: int) -> dict:
    rep = ec_theorem_main_report(default_spec(), horizon=1, samples=200, seed=seed)
    _require(rep["passed"], f"default verdicts {rep['verdicts']}")
    return {"dim_B": rep["dim_B"], "packed_column": rep["packed_column"]}


def run_fixture(path: Path, seed: int) -> dict:
    obj = read_json(path)
    kind = obj.get("kind")
    if kind == "construction":
        spec, override = construction_from_json(obj, path.parent, seed)
        rep = ec_theorem_main_report(spec, int(obj.get("horizon", 1)), samples=int(obj.get("samples", 200)),
                                     seed=seed, override_G0=override)
        _require(rep["passed"], f"verdicts {rep['verdicts']}")
        return {"verdicts": rep["verdicts"]}
    if kind == "trellis":
        text = obj["text"] if "text" in obj else (path.parent / obj["file"]).read_text()
        t = TrellisCode(parse_trellis(text), int(obj.get("initial", 0)))
        rep = tc_bounds(t, int(obj.get("j", 2)))
        _require(rep.ok, f"verdicts {rep.verdicts}")
        return {"flags": t.flags.__dict__, "column": rep.column}
    raise InputParseError(f"{path.name}: unknown fixture kind {kind!r}")


BUILTIN: list[tuple[str, Callable[[int], dict]]] = [
    ("field_axioms", lambda s: check_field_axioms()),
    ("convolutional_baseline", lambda s: check_convolutional_baseline()),
    ("mdp_search", lambda s: check_mdp_search()),
    ("example1", lambda s: check_example1()),
    ("trellis_bounds", check_trellis_battery),
    ("spectral_and_mixing", check_spectral),
    ("construction_micro", lambda s: check_micro()),
    ("construction_default", check_default),
]


def _run(name: str, fn: Callable[[], dict]) -> CheckResult:
    try:
        return CheckResult(name, "pass", fn())
    except VerdictFailure as exc:
        detail = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("witness", "decomposition"):
            if getattr(exc, attr, None) is not None:
                detail[attr] = getattr(exc, attr)
        return CheckResult(name, "verdict_failure", detail)
    except InputError as exc:
        return CheckResult(name, "input_error", {"error": type(exc).__name__, "message": str(exc)})
    except (TrellexError, AssertionError) as exc:
        status = "verdict_failure" if isinstance(exc, AssertionError) else "error"
        return CheckResult(name, status, {"error": type(exc).__name__, "message": str(exc)})
    except Exception as exc:  # noqa: BLE001  surfaced in the report instead of crashing the battery
        return CheckResult(name, "error", {"error": type(exc).__name__, "message": str(exc),
                                           "trace": traceback.format_exc(limit=3)})


def verify_all(fixtures: str | Path | None = None, seed: int = 7, builtin: bool = True) -> dict:
    results = []
    if builtin:
        results += [_run(name, lambda fn=fn: fn(seed)) for name, fn in BUILTIN]
    if fixtures is not None:
        d = Path(fixtures)
        if not d.is_dir():
            raise InputParseError(f"fixture directory {d} does not exist")
        for path in sorted(d.glob("*.json")):
            results.append(_run(f"fixture:{path.name}", lambda p=path: run_fixture(p, seed)))
    statuses = {r.status for r in results}
    if "verdict_failure" in statuses:
        code = 2
    elif statuses - {"pass"}:
        code = 1
    else:
        code = 0
    return {"checks": [r.to_json() for r in results], "passed": code == 0, "exit_code": code}

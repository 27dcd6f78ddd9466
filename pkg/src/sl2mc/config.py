"""Plain-text experiment configuration: a strict key-tree grammar.

The file is a sequence of entries::

    entry  := KEY value | KEY list | KEY block
    block  := '{' entry* '}'
    list   := '[' scalar (',' scalar)* ']' | '[' ']'
    scalar := integer | float | bare-word

Comments run from '#' to end of line.  Repeated keys inside a block are
collected in order (used for ensemble atoms).  Unknown keys are errors,
never ignored; floats are printed back with 17 significant digits so a
round trip is bit exact.

Example::

    model { kind harmonic_chain  masses [0.5, 1.5]  weights [0.5, 0.5] }
    lambdas [0.1, 0.05, 0.025]
    chain { steps 2000000  burn_in 10000  replicas 200  seed 777  theta0 0.3  bins 256 }
    test_functions [cos2, sin2sq]
    outputs { svg true }
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


from .fourier import FourierDensity
from .models import AndersonEdge, HarmonicChain, KronigPenney, ModelSpec
from .sl2 import Ensemble, QPolynomial, TracelessGenerator

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "format_float",
    "TEST_FUNCTIONS",
    "ensemble_to_config",
]


class ConfigError(ValueError):
    pass


def format_float(x: float) -> str:
    """17 significant digits: parses back to the identical float64."""
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"[{}\[\],]|[^\s{}\[\],#]+")


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        out.extend(_TOKEN.findall(line))
    return out


def _scalar(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        pass
    return tok


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ConfigError("unexpected end of config")
        self.pos += 1
        return tok

    def parse_block(self, closing: str | None) -> list[tuple[str, object]]:
        entries: list[tuple[str, object]] = []
        while True:
            tok = self.peek()
            if tok is None:
                if closing is None:
                    return entries
                raise ConfigError("missing '}'")
            if tok == closing:
                self.take()
                return entries
            if tok in "{}[],":
                raise ConfigError(f"expected a key, found {tok!r}")
            key = self.take()
            entries.append((key, self.parse_value()))

    def parse_value(self):
        tok = self.peek()
        if tok == "{":
            self.take()
            return self.parse_block("}")
        if tok == "[":
            self.take()
            items = []
            while True:
                tok = self.peek()
                if tok is None:
                    raise ConfigError("missing ']'")
                if tok == "]":
                    self.take()
                    return items
                if tok == ",":
                    self.take()
                    continue
                if tok in "{}[":
                    raise ConfigError("lists hold scalars only")
                items.append(_scalar(self.take()))
        if tok is None or tok in "{}[],":
            raise ConfigError(f"expected a value, found {tok!r}")
        return _scalar(self.take())


def _as_dict(entries: list[tuple[str, object]], context: str) -> dict:
    out: dict = {}
    for key, value in entries:
        if key in out:
            raise ConfigError(f"duplicate key {key!r} in {context}")
        out[key] = value
    return out


def _check_keys(d: dict, allowed: set[str], context: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {context}")


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------

TEST_FUNCTIONS: dict[str, FourierDensity] = {
    "cos2": FourierDensity.from_trig(0.0, (1.0,)),
    "sin2": FourierDensity.from_trig(0.0, (), (1.0,)),
    "cos4": FourierDensity.from_trig(0.0, (0.0, 1.0)),
    "sin4": FourierDensity.from_trig(0.0, (), (0.0, 1.0)),
    "sin2sq": FourierDensity.from_trig(0.5, (0.0, -0.5)),  # sin^2(2 theta)
}


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (one ensemble or model)."""

    model: dict | None  # kind + atom data; coupling filled per lambda
    ensemble: Ensemble | None
    lambdas: tuple[float, ...]
    steps: int
    burn_in: int
    replicas: int
    seed: int
    theta0: float
    bins: int
    test_functions: tuple[str, ...]
    correlate_theta0s: tuple[float, ...]
    correlate_f: str
    correlate_horizon: int | None
    measure_center: float
    measure_radius: float | None  # None means lambda**(1/4)
    gamma_rel_tol: float
    sigma_rel_tol: float
    slope_tol: float
    hyperbolic_sigma_ratio: float
    svg: bool

    def make_model(self, lam: float) -> ModelSpec:
        if self.model is None:
            raise ConfigError("config has no model section")
        kind = self.model["kind"]
        if kind == "harmonic_chain":
            return HarmonicChain(self.model["masses"], self.model["weights"], lam)
        if kind == "anderson_edge":
            return AndersonEdge(self.model["w"], self.model["potentials"], self.model["weights"], lam)
        if kind == "kronig_penney":
            return KronigPenney(
                self.model["l"], self.model["side"], self.model["potentials"], self.model["weights"], lam
            )
        raise ConfigError(f"unknown model kind {kind!r}")


_TOP_KEYS = {
    "model",
    "ensemble",
    "lambdas",
    "chain",
    "test_functions",
    "correlate",
    "measure",
    "compare",
    "outputs",
}
_CHAIN_KEYS = {"steps", "burn_in", "replicas", "seed", "theta0", "bins"}
_MODEL_KEYS = {"kind", "masses", "weights", "potentials", "w", "l", "side"}
_CORR_KEYS = {"theta0s", "f", "horizon"}
_MEASURE_KEYS = {"center", "radius"}
_COMPARE_KEYS = {"gamma_rel_tol", "sigma_rel_tol", "slope_tol", "hyperbolic_sigma_ratio"}
_OUTPUT_KEYS = {"svg"}


def _parse_generator(triple, context: str) -> TracelessGenerator:
    if not isinstance(triple, list) or len(triple) != 3:
        raise ConfigError(f"{context}: generators are triples [a, b, c]")
    return TracelessGenerator(*(float(x) for x in triple))


def _parse_ensemble(entries: list[tuple[str, object]]) -> Ensemble:
    atoms = []
    for key, value in entries:
        if key != "atom":
            raise ConfigError(f"ensemble blocks hold 'atom' entries, found {key!r}")
        if not isinstance(value, list) or (value and isinstance(value[0], (int, float, str))):
            raise ConfigError("each atom must be a block")
        a = _as_dict(value, "atom")
        _check_keys(a, {"weight", "p", "q0", "q1", "q2"}, "atom")
        if "weight" not in a or "p" not in a:
            raise ConfigError("atom needs 'weight' and 'p'")
        coeffs = []
        for j in range(3):
            key_j = f"q{j}"
            if key_j in a:
                while len(coeffs) < j:
                    coeffs.append(TracelessGenerator.ZERO)
                coeffs.append(_parse_generator(a[key_j], key_j))
        q = QPolynomial(tuple(coeffs))
        atoms.append((float(a["weight"]), _parse_generator(a["p"], "p"), q))
    if not atoms:
        raise ConfigError("ensemble needs at least one atom")
    return Ensemble.from_atoms(atoms)


def parse_config(text: str) -> ExperimentConfig:
    top = _as_dict(_Parser(_tokenize(text)).parse_block(None), "top level")
    _check_keys(top, _TOP_KEYS, "top level")

    if ("model" in top) == ("ensemble" in top):
        raise ConfigError("config needs exactly one of 'model' or 'ensemble'")

    model = None
    ensemble = None
    if "model" in top:
        m = _as_dict(top["model"], "model")
        _check_keys(m, _MODEL_KEYS, "model")
        if "kind" not in m:
            raise ConfigError("model needs 'kind'")
        kind = m["kind"]
        needed = {
            "harmonic_chain": {"kind", "masses", "weights"},
            "anderson_edge": {"kind", "w", "potentials", "weights"},
            "kronig_penney": {"kind", "l", "side", "potentials", "weights"},
        }.get(kind)
        if needed is None:
            raise ConfigError(f"unknown model kind {kind!r}")
        if set(m) != needed:
            raise ConfigError(f"model kind {kind!r} takes keys {sorted(needed)}, got {sorted(m)}")
        model = {k: (tuple(v) if isinstance(v, list) else v) for k, v in m.items()}
    else:
        ensemble = _parse_ensemble(top["ensemble"])

    if "lambdas" not in top or not isinstance(top["lambdas"], list) or not top["lambdas"]:
        raise ConfigError("config needs a non-empty 'lambdas' list")
    lambdas = tuple(float(x) for x in top["lambdas"])
    if min(lambdas) <= 0.0:
        raise ConfigError("lambdas must be positive")
    if list(lambdas) != sorted(lambdas, reverse=True):
        raise ConfigError("lambdas must be sorted descending")

    chain = _as_dict(top.get("chain", []), "chain")
    _check_keys(chain, _CHAIN_KEYS, "chain")
    steps = int(chain.get("steps", 2_000_000))
    burn_in = int(chain.get("burn_in", 10_000))
    replicas = int(chain.get("replicas", 200))
    seed = int(chain.get("seed", 0))
    theta0 = float(chain.get("theta0", 0.0))
    bins = int(chain.get("bins", 256))
    if not (steps > burn_in >= 0 and replicas >= 1 and bins >= 8):
        raise ConfigError("need steps > burn_in >= 0, replicas >= 1, bins >= 8")
    if not (0 <= seed < 2**64):
        raise ConfigError("seed must fit in 64 bits")
    if not (0.0 <= theta0 < math.pi):
        raise ConfigError("theta0 must lie in [0, pi)")

    tf = top.get("test_functions", ["cos2", "sin2", "cos4", "sin4", "sin2sq"])
    if not isinstance(tf, list):
        raise ConfigError("test_functions must be a list")
    for name in tf:
        if name not in TEST_FUNCTIONS:
            raise ConfigError(f"unknown test function {name!r}")

    corr = _as_dict(top.get("correlate", []), "correlate")
    _check_keys(corr, _CORR_KEYS, "correlate")
    theta0s = tuple(float(x) for x in corr.get("theta0s", []))
    corr_f = corr.get("f", "cos2")
    if corr_f not in TEST_FUNCTIONS:
        raise ConfigError(f"unknown correlate function {corr_f!r}")
    horizon = corr.get("horizon")
    if horizon is not None:
        horizon = int(horizon)
        if horizon < 1:
            raise ConfigError("horizon must be >= 1")

    meas = _as_dict(top.get("measure", []), "measure")
    _check_keys(meas, _MEASURE_KEYS, "measure")
    center = float(meas.get("center", 0.0))
    radius = meas.get("radius")
    radius = float(radius) if radius is not None else None

    comp = _as_dict(top.get("compare", []), "compare")
    _check_keys(comp, _COMPARE_KEYS, "compare")

    out = _as_dict(top.get("outputs", []), "outputs")
    _check_keys(out, _OUTPUT_KEYS, "outputs")
    svg = out.get("svg", "false")
    if svg not in ("true", "false"):
        raise ConfigError("outputs.svg must be true or false")

    return ExperimentConfig(
        model=model,
        ensemble=ensemble,
        lambdas=lambdas,
        steps=steps,
        burn_in=burn_in,
        replicas=replicas,
        seed=seed,
        theta0=theta0,
        bins=bins,
        test_functions=tuple(tf),
        correlate_theta0s=theta0s,
        correlate_f=corr_f,
        correlate_horizon=horizon,
        measure_center=center,
        measure_radius=radius,
        gamma_rel_tol=float(comp.get("gamma_rel_tol", 0.15)),
        sigma_rel_tol=float(comp.get("sigma_rel_tol", 0.25)),
        slope_tol=float(comp.get("slope_tol", 0.1)),
        hyperbolic_sigma_ratio=float(comp.get("hyperbolic_sigma_ratio", 0.2)),
        svg=(svg == "true"),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def ensemble_to_config(ens: Ensemble) -> str:
    """Serialize an ensemble back to the config grammar (round-trips)."""
    lines = ["ensemble {"]
    for w, p, q in ens.atoms():
        parts = [
            f"weight {format_float(w)}",
            f"p [{format_float(p.a)}, {format_float(p.b)}, {format_float(p.c)}]",
        ]
        for j, g in enumerate(q.coefficients):
            parts.append(f"q{j} [{format_float(g.a)}, {format_float(g.b)}, {format_float(g.c)}]")
        lines.append("  atom { " + "  ".join(parts) + " }")
    lines.append("}")
    return "\n".join(lines)

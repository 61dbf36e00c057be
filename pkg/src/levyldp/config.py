"""Model configuration files: INI sections with strict key checking.

Layout:

    [chain]
    states = up down
    Q =
        -1  1
         1 -1

    [state up]
    a1 = 1.0
    a = 0.5
    c = 3.0
    gamma0 = 1.0:0.2

    [defaults]
    eps_list = 0.2 0.1 0.05 0.025
    delta_rule = equal
    seed = 20260801
    u_grid = -2:2:0.1
    lambda_grid = -1:1:0.25

`gamma0` lists size:intensity atoms separated by commas or whitespace and may
be empty.  `delta_rule` is `equal` or `ratio:<r>`.  Grids are lo:hi:step with
an integral number of steps.  Unknown sections or keys are hard errors, and
`dumps` emits a canonical form that re-parses to an identical configuration.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

import numpy as np

from .chain import ChainModel
from .errors import ConfigError
from .exp_gen import DeltaRule, equal_rule, ratio_rule
from .jump_model import JumpModel

CHAIN_KEYS = {"states", "q"}
STATE_KEYS = {"a1", "a", "c", "gamma0"}
DEFAULT_KEYS = {"eps_list", "delta_rule", "seed", "u_grid", "lambda_grid"}


def _fmt(x: float) -> str:
    # shortest decimal form that round-trips the double exactly
    return repr(float(x))


def _float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: expected a number, got {text!r}") from exc


def _floats(text: str) -> list[float]:
    parts = text.replace(",", " ").split()
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"expected numbers, got {text!r}") from exc


def _parse_grid(text: str, key: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key} must be lo:hi:step, got {text!r}")
    lo, hi, step = (_float(p, key) for p in parts)
    if step <= 0.0 or hi < lo:
        raise ConfigError(f"{key} needs hi >= lo and step > 0, got {text!r}")
    count = (hi - lo) / step
    n = round(count)
    if abs(count - n) > 1e-9:
        raise ConfigError(f"{key}: step {step:g} does not divide [{lo:g}, {hi:g}]")
    return np.linspace(lo, hi, n + 1)


def parse_delta_rule(text: str) -> DeltaRule:
    if text == "equal":
        return equal_rule
    if text.startswith("ratio:"):
        r = _float(text.split(":", 1)[1], "delta_rule ratio")
        if not 0.5 <= r <= 2.0:
            raise ConfigError(f"delta_rule ratio {r:g} outside [0.5, 2]")
        return ratio_rule(r)
    raise ConfigError(f"delta_rule must be 'equal' or 'ratio:<r>', got {text!r}")


@dataclass(frozen=True)
class ModelConfig:
    """Parsed model file: chain, per-state jump data, and run defaults."""

    states: tuple[str, ...]
    Q: np.ndarray
    a1: np.ndarray
    a: np.ndarray
    c: np.ndarray
    gamma0: tuple[np.ndarray, ...]
    eps_list: tuple[float, ...]
    delta_rule: str
    seed: int
    u_grid_spec: tuple[float, float, float]
    lambda_grid_spec: tuple[float, float, float]

    @property
    def n(self) -> int:
        return len(self.states)

    def chain_model(self) -> ChainModel:
        return ChainModel(Q=self.Q)

    def jump_model(self) -> JumpModel:
        return JumpModel(a1=self.a1, a=self.a, c=self.c, gamma0=self.gamma0)

    def u_grid(self) -> np.ndarray:
        lo, hi, step = self.u_grid_spec
        return _parse_grid(f"{_fmt(lo)}:{_fmt(hi)}:{_fmt(step)}", "u_grid")

    def lambda_grid(self) -> np.ndarray:
        lo, hi, step = self.lambda_grid_spec
        return _parse_grid(f"{_fmt(lo)}:{_fmt(hi)}:{_fmt(step)}", "lambda_grid")

    def rule(self) -> DeltaRule:
        return parse_delta_rule(self.delta_rule)

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError as exc:
            raise ConfigError(f"unknown state label {label!r}") from exc


def _read_parser(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), comment_prefixes=("#",)
    )
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return parser


def parse_config(text: str) -> ModelConfig:
    parser = _read_parser(text)
    sections = set(parser.sections())
    if "chain" not in sections or "defaults" not in sections:
        raise ConfigError("config requires [chain] and [defaults] sections")

    chain_sec = parser["chain"]
    unknown = set(chain_sec) - CHAIN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [chain]: {sorted(unknown)}")
    if "states" not in chain_sec or "q" not in chain_sec:
        raise ConfigError("[chain] requires 'states' and 'Q'")
    states = tuple(chain_sec["states"].split())
    if len(states) != len(set(states)) or not states:
        raise ConfigError("state labels must be nonempty and unique")
    n = len(states)

    rows = [r for r in chain_sec["q"].replace(";", "\n").splitlines() if r.strip()]
    Q = [_floats(r) for r in rows]
    if len(Q) != n or any(len(r) != n for r in Q):
        raise ConfigError(
            f"Q must be {n}x{n} to match the {n} state labels, got "
            f"{len(Q)} rows of lengths {[len(r) for r in Q]}"
        )
    Q = np.array(Q)

    expected_state_sections = {f"state {label}" for label in states}
    extra = sections - {"chain", "defaults"} - expected_state_sections
    if extra:
        raise ConfigError(f"unknown sections: {sorted(extra)}")
    missing = expected_state_sections - sections
    if missing:
        raise ConfigError(f"missing sections: {sorted(missing)}")

    a1 = np.empty(n)
    a = np.empty(n)
    c = np.empty(n)
    gamma0 = []
    for i, label in enumerate(states):
        sec = parser[f"state {label}"]
        unknown = set(sec) - STATE_KEYS
        if unknown:
            raise ConfigError(f"unknown keys in [state {label}]: {sorted(unknown)}")
        for key in ("a1", "a", "c"):
            if key not in sec:
                raise ConfigError(f"[state {label}] requires '{key}'")
        a1[i] = _float(sec["a1"], f"[state {label}] a1")
        a[i] = _float(sec["a"], f"[state {label}] a")
        c[i] = _float(sec["c"], f"[state {label}] c")
        atom_text = sec.get("gamma0", "").replace(",", " ").split()
        atoms = []
        for item in atom_text:
            pieces = item.split(":")
            if len(pieces) != 2:
                raise ConfigError(f"[state {label}] gamma0 atom must be size:intensity, got {item!r}")
            atoms.append(
                (_float(pieces[0], "gamma0 size"), _float(pieces[1], "gamma0 intensity"))
            )
        gamma0.append(np.array(atoms, dtype=float).reshape(-1, 2))

    def_sec = parser["defaults"]
    unknown = set(def_sec) - DEFAULT_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in [defaults]: {sorted(unknown)}")
    for key in DEFAULT_KEYS:
        if key not in def_sec:
            raise ConfigError(f"[defaults] requires '{key}'")
    eps_list = tuple(_floats(def_sec["eps_list"]))
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ConfigError("eps_list must contain positive values")
    parse_delta_rule(def_sec["delta_rule"])  # validate form
    try:
        seed = int(def_sec["seed"])
    except ValueError as exc:
        raise ConfigError(f"seed must be an integer, got {def_sec['seed']!r}") from exc
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")

    def grid_spec(key: str) -> tuple[float, float, float]:
        parts = def_sec[key].split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key} must be lo:hi:step")
        spec = tuple(_float(p, key) for p in parts)
        _parse_grid(def_sec[key], key)  # validate divisibility
        return spec

    return ModelConfig(
        states=states,
        Q=Q,
        a1=a1,
        a=a,
        c=c,
        gamma0=tuple(gamma0),
        eps_list=eps_list,
        delta_rule=def_sec["delta_rule"],
        seed=seed,
        u_grid_spec=grid_spec("u_grid"),
        lambda_grid_spec=grid_spec("lambda_grid"),
    )


def load_config(path: str) -> ModelConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def dumps(cfg: ModelConfig) -> str:
    """Canonical serialization; parse_config(dumps(cfg)) reproduces cfg exactly."""
    out = io.StringIO()
    out.write("[chain]\n")
    out.write("states = " + " ".join(cfg.states) + "\n")
    out.write("Q =\n")
    for row in cfg.Q:
        out.write("    " + " ".join(_fmt(v) for v in row) + "\n")
    out.write("\n")
    for i, label in enumerate(cfg.states):
        out.write(f"[state {label}]\n")
        out.write(f"a1 = {_fmt(cfg.a1[i])}\n")
        out.write(f"a = {_fmt(cfg.a[i])}\n")
        out.write(f"c = {_fmt(cfg.c[i])}\n")
        atoms = ", ".join(f"{_fmt(v)}:{_fmt(g)}" for v, g in cfg.gamma0[i])
        out.write(f"gamma0 = {atoms}\n\n")
    out.write("[defaults]\n")
    out.write("eps_list = " + " ".join(_fmt(e) for e in cfg.eps_list) + "\n")
    out.write(f"delta_rule = {cfg.delta_rule}\n")
    out.write(f"seed = {cfg.seed}\n")
    out.write("u_grid = " + ":".join(_fmt(v) for v in cfg.u_grid_spec) + "\n")
    out.write("lambda_grid = " + ":".join(_fmt(v) for v in cfg.lambda_grid_spec) + "\n")
    return out.getvalue()

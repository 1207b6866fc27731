"""KAM linear program, targets, scores and epsilon-DF classification.

For DMU ``l`` the program perturbs the unit to a neighbor with inputs
``x_l + eps_in`` and outputs ``y_l - eps_out`` and maximizes the weighted
slacks that bring that neighbor back onto the VRS frontier::

    max   w_in . s_in + w_out . s_out
    s.t.  X^T lam + s_in  = x_l + eps_in
          Y^T lam - s_out = y_l - eps_out
          sum(lam) = 1
          x_l - s_in >= 0
          y_l + s_out - 2 eps_out >= 0
          lam, s_in, s_out >= 0

With ``eps = 0`` this is the additive VRS model (0-KAM); a zero optimum marks
the unit technically efficient.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis import neighbor_distance
from .dataset import Dataset, validate_dataset
from .lp_solver import LinearProgram, LpContractError, LpStatus, solve

log = logging.getLogger(__name__)


class KamError(Exception):
    pass


class ConfigurationError(KamError, ValueError):
    """Invalid policy or a policy that cannot be applied to the data."""


class DegenerateScoreError(KamError, ArithmeticError):
    pass


class InvalidDatasetError(KamError, ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(i.message for i in self.issues))


class InternalSolverError(KamError, RuntimeError):
    """The solver disagreed with a program that is feasible by construction."""


# --------------------------------------------------------------------------
# policies
# --------------------------------------------------------------------------

class EpsilonMode(str, enum.Enum):
    ABSOLUTE = "absolute"
    PROPORTIONAL = "proportional"


class WeightMode(str, enum.Enum):
    UNIT = "unit"
    INVERSE_DATA = "inverse"
    EXPLICIT = "explicit"


class DeltaMode(str, enum.Enum):
    TENTH = "tenth"
    PER_FACTOR = "per-factor"
    EXPLICIT = "explicit"


def _nonneg_vector(values, what) -> np.ndarray:
    v = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ConfigurationError(f"{what} must be finite and >= 0, got {v.tolist()}")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class EpsilonPolicy:
    mode: EpsilonMode
    absolute: tuple[np.ndarray, np.ndarray] | None = None
    scale: float | None = None

    def __post_init__(self):
        mode = EpsilonMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is EpsilonMode.PROPORTIONAL:
            if self.scale is None or self.absolute is not None:
                raise ConfigurationError("proportional epsilon takes a scale and no vectors")
            if not np.isfinite(self.scale) or self.scale < 0:
                raise ConfigurationError(f"epsilon scale must be >= 0, got {self.scale}")
            object.__setattr__(self, "scale", float(self.scale))
        else:
            if self.absolute is None or self.scale is not None:
                raise ConfigurationError("absolute epsilon takes (eps_in, eps_out) and no scale")
            e_in, e_out = self.absolute
            object.__setattr__(
                self,
                "absolute",
                (_nonneg_vector(e_in, "eps_in"), _nonneg_vector(e_out, "eps_out")),
            )

    @classmethod
    def proportional(cls, eps: float) -> "EpsilonPolicy":
        return cls(EpsilonMode.PROPORTIONAL, scale=eps)

    @classmethod
    def absolute_vectors(cls, eps_in: Sequence[float], eps_out: Sequence[float]) -> "EpsilonPolicy":
        return cls(EpsilonMode.ABSOLUTE, absolute=(eps_in, eps_out))

    def to_dict(self) -> dict:
        if self.mode is EpsilonMode.PROPORTIONAL:
            return {"mode": self.mode.value, "scale": self.scale}
        return {
            "mode": self.mode.value,
            "eps_in": self.absolute[0].tolist(),
            "eps_out": self.absolute[1].tolist(),
        }


@dataclass(frozen=True, eq=False)
class WeightPolicy:
    mode: WeightMode = WeightMode.UNIT
    explicit: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        mode = WeightMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if (mode is WeightMode.EXPLICIT) != (self.explicit is not None):
            raise ConfigurationError("explicit weight vectors are required iff mode is explicit")
        if self.explicit is not None:
            w_in, w_out = (np.array(w, dtype=float).reshape(-1) for w in self.explicit)
            for name, w in (("input", w_in), ("output", w_out)):
                if not np.all(np.isfinite(w)) or np.any(w <= 0):
                    raise ConfigurationError(f"explicit {name} weights must be > 0, got {w.tolist()}")
                w.setflags(write=False)
            object.__setattr__(self, "explicit", (w_in, w_out))

    def to_dict(self) -> dict:
        out = {"mode": self.mode.value}
        if self.explicit is not None:
            out["w_in"] = self.explicit[0].tolist()
            out["w_out"] = self.explicit[1].tolist()
        return out


@dataclass(frozen=True)
class DeltaRule:
    mode: DeltaMode = DeltaMode.TENTH
    explicit: float | None = None

    def __post_init__(self):
        mode = DeltaMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if (mode is DeltaMode.EXPLICIT) != (self.explicit is not None):
            raise ConfigurationError("an explicit delta is required iff the delta rule is explicit")
        if self.explicit is not None and not (np.isfinite(self.explicit) and self.explicit >= 0):
            raise ConfigurationError(f"delta must be >= 0, got {self.explicit}")

    def to_dict(self) -> dict:
        out = {"mode": self.mode.value}
        if self.explicit is not None:
            out["delta"] = float(self.explicit)
        return out


@dataclass(frozen=True)
class KamConfig:
    epsilon: EpsilonPolicy
    weights: WeightPolicy = field(default_factory=WeightPolicy)
    delta: DeltaRule = field(default_factory=DeltaRule)
    tech_efficiency_tolerance: float = 1e-7
    score_tolerance: float = 1e-9

    def __post_init__(self):
        if not (self.tech_efficiency_tolerance > 0 and self.score_tolerance > 0):
            raise ConfigurationError("tolerances must be > 0")

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon.to_dict(),
            "weights": self.weights.to_dict(),
            "delta": self.delta.to_dict(),
            "tech_efficiency_tolerance": self.tech_efficiency_tolerance,
            "score_tolerance": self.score_tolerance,
        }


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def resolve_epsilon(policy: EpsilonPolicy, d: Dataset, l: int) -> tuple[np.ndarray, np.ndarray]:
    if policy.mode is EpsilonMode.PROPORTIONAL:
        return policy.scale * d.inputs[l], policy.scale * d.outputs[l]
    e_in, e_out = policy.absolute
    if e_in.size != d.m or e_out.size != d.p:
        raise ConfigurationError(
            f"absolute epsilon has {e_in.size} input and {e_out.size} output components; "
            f"dataset has m={d.m}, p={d.p}"
        )
    return e_in.copy(), e_out.copy()


def resolve_weights(policy: WeightPolicy, d: Dataset, l: int) -> tuple[np.ndarray, np.ndarray]:
    if policy.mode is WeightMode.UNIT:
        return np.ones(d.m), np.ones(d.p)
    if policy.mode is WeightMode.EXPLICIT:
        w_in, w_out = policy.explicit
        if w_in.size != d.m or w_out.size != d.p:
            raise ConfigurationError(
                f"explicit weights have {w_in.size}/{w_out.size} components; "
                f"dataset has m={d.m}, p={d.p}"
            )
        return w_in.copy(), w_out.copy()
    x, y = d.inputs[l], d.outputs[l]
    for label, vals, names in (("input", x, d.input_names), ("output", y, d.output_names)):
        zero = np.flatnonzero(vals == 0)
        if zero.size:
            raise ConfigurationError(
                f"inverse-data weights undefined: DMU {d.dmu_names[l]!r} has zero {label} "
                f"{names[zero[0]]!r}"
            )
    return 1.0 / x, 1.0 / y


def build_kam_lp(d: Dataset, l: int, eps_in, eps_out, w_in, w_out) -> LinearProgram:
    """Assemble the program with variables ordered (lam, s_in, s_out)."""
    n, m, p = d.n, d.m, d.p
    eps_in, eps_out, w_in, w_out = (np.asarray(v, dtype=float) for v in (eps_in, eps_out, w_in, w_out))
    for name, v, size in (("eps_in", eps_in, m), ("eps_out", eps_out, p), ("w_in", w_in, m), ("w_out", w_out, p)):
        if v.shape != (size,):
            raise LpContractError(f"{name} has shape {v.shape}, expected ({size},)")
    x_l, y_l = d.inputs[l], d.outputs[l]
    nv = n + m + p

    c = np.zeros(nv)
    c[n : n + m] = w_in
    c[n + m :] = w_out

    eq = []
    for j in range(m):
        a = np.zeros(nv)
        a[:n] = d.inputs[:, j]
        a[n + j] = 1.0
        eq.append((a, x_l[j] + eps_in[j]))
    for k in range(p):
        a = np.zeros(nv)
        a[:n] = d.outputs[:, k]
        a[n + m + k] = -1.0
        eq.append((a, y_l[k] - eps_out[k]))
    a = np.zeros(nv)
    a[:n] = 1.0
    eq.append((a, 1.0))

    ge = []
    for j in range(m):
        a = np.zeros(nv)
        a[n + j] = -1.0
        ge.append((a, -x_l[j]))
    for k in range(p):
        a = np.zeros(nv)
        a[n + m + k] = 1.0
        ge.append((a, 2.0 * eps_out[k] - y_l[k]))

    return LinearProgram(nv, c, eq, ge)


def compute_target(x_l, y_l, s_in, s_out, eps_in, eps_out):
    x_t = np.asarray(x_l) - np.asarray(s_in) + np.asarray(eps_in)
    y_t = np.asarray(y_l) + np.asarray(s_out) - np.asarray(eps_out)
    return x_t, y_t


def weighted_productivity(x, y, w_in, w_out) -> float:
    """``w_out . y / w_in . x``; raises DegenerateScoreError on a zero input aggregate."""
    agg_in = float(np.dot(w_in, x))
    if agg_in <= 0:
        raise DegenerateScoreError(f"weighted input aggregate is {agg_in}")
    return float(np.dot(w_out, y)) / agg_in


def compute_score(x_l, y_l, x_t, y_t, w_in, w_out) -> float:
    """Weighted productivity of the unit over that of its target."""
    actual = weighted_productivity(x_l, y_l, w_in, w_out)
    target = weighted_productivity(x_t, y_t, w_in, w_out)
    if target <= 0:
        raise DegenerateScoreError(f"target weighted output is {target * float(np.dot(w_in, x_t))}")
    return actual / target


def delta_value(rule: DeltaRule, eps: float, m: int, p: int) -> float:
    if rule.mode is DeltaMode.EXPLICIT:
        return float(rule.explicit)
    if rule.mode is DeltaMode.TENTH:
        return 0.1 * eps
    return eps / (m + p)


def classify(ka0: float, ka_eps: float, delta: float, technically_efficient: bool,
             score_tolerance: float = 1e-9) -> bool:
    return bool(technically_efficient and (ka0 - ka_eps) <= delta + score_tolerance)


@dataclass(frozen=True, eq=False)
class KamEvaluation:
    dmu_index: int
    dmu_name: str
    lambdas: np.ndarray
    input_slacks: np.ndarray
    output_slacks: np.ndarray
    target_inputs: np.ndarray
    target_outputs: np.ndarray
    ka0: float
    ka_eps: float
    technically_efficient: bool
    kam_efficient: bool
    neighbor_distance: float
    objective: float
    zero_objective: float
    delta: float

    def to_dict(self) -> dict:
        return {
            "dmu": self.dmu_name,
            "index": self.dmu_index,
            "ka0": self.ka0,
            "ka_eps": self.ka_eps,
            "technically_efficient": self.technically_efficient,
            "kam_efficient": self.kam_efficient,
            "delta": self.delta,
            "neighbor_distance": self.neighbor_distance,
            "objective": self.objective,
            "zero_objective": self.zero_objective,
            "lambda": self.lambdas.tolist(),
            "input_slacks": self.input_slacks.tolist(),
            "output_slacks": self.output_slacks.tolist(),
            "target_inputs": self.target_inputs.tolist(),
            "target_outputs": self.target_outputs.tolist(),
        }


def _solve_kam(d, l, eps_in, eps_out, w_in, w_out, backend):
    lp = build_kam_lp(d, l, eps_in, eps_out, w_in, w_out)
    out = solve(lp, backend=backend)
    if out.status is not LpStatus.OPTIMAL:
        raise InternalSolverError(
            f"DMU {d.dmu_names[l]!r}: KAM program reported {out.status.value} "
            f"(eps_in={eps_in.tolist()}, eps_out={eps_out.tolist()})"
        )
    n, m = d.n, d.m
    v = out.values
    return out.objective_value, v[:n], v[n : n + m], v[n + m :]


def evaluate(d: Dataset, l: int, cfg: KamConfig, *, backend: str | None = None) -> KamEvaluation:
    """Run 0-KAM and eps-KAM for DMU ``l`` and classify it."""
    w_in, w_out = resolve_weights(cfg.weights, d, l)
    eps_in, eps_out = resolve_epsilon(cfg.epsilon, d, l)
    x_l, y_l = d.inputs[l], d.outputs[l]

    zero_in, zero_out = np.zeros(d.m), np.zeros(d.p)
    obj0, lam0, s0_in, s0_out = _solve_kam(d, l, zero_in, zero_out, w_in, w_out, backend)
    x0, y0 = compute_target(x_l, y_l, s0_in, s0_out, zero_in, zero_out)
    ka0 = compute_score(x_l, y_l, x0, y0, w_in, w_out)
    tech = obj0 <= cfg.tech_efficiency_tolerance
    if tech:
        # a zero-slack optimum leaves the unit as its own target
        ka0 = 1.0

    if np.any(eps_in) or np.any(eps_out):
        obj, lam, s_in, s_out = _solve_kam(d, l, eps_in, eps_out, w_in, w_out, backend)
    else:
        obj, lam, s_in, s_out = obj0, lam0, s0_in, s0_out
    x_t, y_t = compute_target(x_l, y_l, s_in, s_out, eps_in, eps_out)
    ka_eps = compute_score(x_l, y_l, x_t, y_t, w_in, w_out)

    if cfg.epsilon.mode is EpsilonMode.PROPORTIONAL:
        eps_scalar = cfg.epsilon.scale
    else:
        eps_scalar = float(max(eps_in.max(initial=0.0), eps_out.max(initial=0.0)))
    delta = delta_value(cfg.delta, eps_scalar, d.m, d.p)
    kam_eff = classify(ka0, ka_eps, delta, tech, cfg.score_tolerance)

    log.debug(
        "DMU %s: obj0=%.3g obj=%.6g ka0=%.6f ka_eps=%.6f", d.dmu_names[l], obj0, obj, ka0, ka_eps
    )
    return KamEvaluation(
        dmu_index=l,
        dmu_name=d.dmu_names[l],
        lambdas=lam,
        input_slacks=s_in,
        output_slacks=s_out,
        target_inputs=x_t,
        target_outputs=y_t,
        ka0=float(ka0),
        ka_eps=float(ka_eps),
        technically_efficient=bool(tech),
        kam_efficient=kam_eff,
        neighbor_distance=neighbor_distance(eps_in, eps_out),
        objective=float(obj),
        zero_objective=float(obj0),
        delta=float(delta),
    )


def evaluate_all(d: Dataset, cfg: KamConfig, *, backend: str | None = None) -> list[KamEvaluation]:
    issues = validate_dataset(d)
    if issues:
        raise InvalidDatasetError(issues)
    return [evaluate(d, l, cfg, backend=backend) for l in range(d.n)]

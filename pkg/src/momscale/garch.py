"""GARCH(1,1) with a two-component zero-mean gaussian mixture innovation.

    sigma2[t] = alpha0 + alpha1 * x[t-1]**2 + beta1 * sigma2[t-1]
    x[t]      = chi[t] * sqrt(sigma2[t])
    chi ~ a * N(0, var1) + b * N(0, var2)

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64). The same
(spec, T, seed) always yields a bit-identical series. Other implementations
are expected to agree only statistically.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidSpec, NonStationaryInit
from .series import ReturnSeries

REFERENCE_MIXTURE = dict(a=0.9818, b=0.0182, var1=0.833, var2=9.986)
REFERENCE_GARCH = dict(alpha0=1e-5, alpha1=0.5, beta1=0.0)
DEFAULT_T = 4536


@dataclass(frozen=True)
class MixtureSpec:
    a: float = REFERENCE_MIXTURE["a"]
    b: float = REFERENCE_MIXTURE["b"]
    var1: float = REFERENCE_MIXTURE["var1"]
    var2: float = REFERENCE_MIXTURE["var2"]

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or abs(self.a + self.b - 1.0) > 1e-12:
            raise InvalidSpec(f"mixture weights must be >= 0 and sum to 1, got a={self.a}, b={self.b}")
        if not (self.var1 > 0 and self.var2 > 0):
            raise InvalidSpec(f"component variances must be positive, got {self.var1}, {self.var2}")


@dataclass(frozen=True)
class GarchSpec:
    alpha0: float = REFERENCE_GARCH["alpha0"]
    alpha1: float = REFERENCE_GARCH["alpha1"]
    beta1: float = REFERENCE_GARCH["beta1"]
    burn_in: int = 500
    init_var: float | str = "unconditional"

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise InvalidSpec(f"alpha0 must be positive, got {self.alpha0}")
        if self.alpha1 < 0 or self.beta1 < 0:
            raise InvalidSpec("alpha1 and beta1 must be non-negative")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise InvalidSpec(f"burn_in must be a non-negative integer, got {self.burn_in}")
        if isinstance(self.init_var, str):
            if self.init_var != "unconditional":
                raise InvalidSpec(f"init_var must be a positive number or 'unconditional', got {self.init_var!r}")
            if self.alpha1 + self.beta1 >= 1:
                raise NonStationaryInit(
                    f"alpha1 + beta1 = {self.alpha1 + self.beta1} >= 1 has no unconditional variance"
                )
        elif not self.init_var > 0:
            raise InvalidSpec(f"init_var must be positive, got {self.init_var}")

    @property
    def initial_variance(self) -> float:
        if self.init_var == "unconditional":
            return self.alpha0 / (1.0 - self.alpha1 - self.beta1)
        return float(self.init_var)


def mixture_variance(m: MixtureSpec) -> float:
    return m.a * m.var1 + m.b * m.var2


def sample_mixture(m: MixtureSpec, rng: np.random.Generator, size: int | None = None):
    """Draw chi from the mixture: one float when ``size`` is None, else an array."""
    n = 1 if size is None else int(size)
    pick_first = rng.random(n) < m.a
    z = rng.standard_normal(n)
    chi = z * np.where(pick_first, math.sqrt(m.var1), math.sqrt(m.var2))
    return float(chi[0]) if size is None else chi


def simulate_path(g: GarchSpec, m: MixtureSpec, T: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (x, sigma2) for the T retained steps.

    x[0] = chi[0] * sigma0 with sigma0^2 taken from ``init_var``. The first
    ``burn_in`` steps are simulated and then dropped.
    """
    if T < 1:
        raise InvalidSpec(f"T must be >= 1, got {T}")
    total = int(T) + int(g.burn_in)
    rng = np.random.default_rng(seed)
    chi = sample_mixture(m, rng, total).tolist()

    a0, a1, b1 = float(g.alpha0), float(g.alpha1), float(g.beta1)
    x = [0.0] * total
    s2 = [0.0] * total
    v = g.initial_variance
    s2[0] = v
    x[0] = chi[0] * math.sqrt(v)
    prev_x = x[0]
    for t in range(1, total):
        v = a0 + a1 * prev_x * prev_x + b1 * v
        prev_x = chi[t] * math.sqrt(v)
        s2[t] = v
        x[t] = prev_x

    x_arr = np.asarray(x[g.burn_in:], dtype=np.float64)
    s2_arr = np.asarray(s2[g.burn_in:], dtype=np.float64)
    # with a user-supplied init_var below alpha0 only step 0 may undercut the floor
    floor_ok = s2_arr[1:] >= a0 if g.burn_in == 0 else s2_arr >= a0
    if not np.all(floor_ok):
        raise AssertionError("conditional variance fell below alpha0")
    return x_arr, s2_arr


def simulate(g: GarchSpec, m: MixtureSpec, T: int = DEFAULT_T, seed: int = 0) -> ReturnSeries:
    x, _ = simulate_path(g, m, T, seed)
    return ReturnSeries.synthetic(x, label=f"garch-dn seed={seed}")


def spec_to_json(g: GarchSpec, m: MixtureSpec, seed: int) -> str:
    doc = {"alpha0": g.alpha0, "alpha1": g.alpha1, "beta1": g.beta1,
           **asdict(m), "burn_in": g.burn_in, "seed": seed}
    if g.init_var != "unconditional":
        doc["init_var"] = g.init_var
    return json.dumps(doc)


def spec_from_json(text: str) -> tuple[GarchSpec, MixtureSpec, int]:
    doc = json.loads(text)
    g = GarchSpec(alpha0=doc["alpha0"], alpha1=doc["alpha1"], beta1=doc["beta1"],
                  burn_in=int(doc.get("burn_in", 500)), init_var=doc.get("init_var", "unconditional"))
    m = MixtureSpec(a=doc["a"], b=doc["b"], var1=doc["var1"], var2=doc["var2"])
    return g, m, int(doc.get("seed", 0))

"""Method registry, hyperparameter grids and feature-space pipelines.

Linear mode fits on standardized features. Nonlinear mode uses a Gaussian
kernel on the standardized features: SVDD and OC-SVM work on the kernel
matrix directly, ESVDD and the subspace methods on the NPT embedding.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..kernels import LINEAR, KernelSpec, compute_gram, cross_kernel
from ..npt import embed_test, fit_npt
from ..subspace import SubspaceConfig, initial_dual, principal_directions, train_subspace
from ..svdd import fit_esvdd, fit_ocsvm, solve_svdd_dual, sphere_from_dual
from .standardize import StandardizeStats, standardize_apply, standardize_fit

MODES = ("linear", "nonlinear")
SUBSPACE_FAMILIES = ("S-SVDD", "NS-SVDD")
PLAIN_FAMILIES = ("OCSVM", "SVDD", "ESVDD")

_NAME_RE = re.compile(r"^(S-SVDD|NS-SVDD)psi([1-4])-(min|max)$|^(OCSVM|SVDD|ESVDD)$", re.IGNORECASE)
_CANON = {f.upper(): f for f in SUBSPACE_FAMILIES + PLAIN_FAMILIES}


@dataclass(frozen=True)
class MethodSpec:
    name: str
    family: str
    variant: str | None = None
    direction: str | None = None

    @property
    def is_subspace(self):
        return self.family in SUBSPACE_FAMILIES

    @property
    def optimizer(self):
        return "newton" if self.family == "NS-SVDD" else "gradient"


def parse_method(name) -> MethodSpec:
    """Parse ``<family>[psi<k>]-<min|max>`` (whitespace and a literal psi symbol tolerated)."""
    raw = re.sub(r"\s+", "", str(name)).replace("ψ", "psi").replace("Ψ", "psi")
    m = _NAME_RE.match(raw)
    if not m:
        raise ConfigError(f"unknown method {name!r}")
    if m.group(4):
        fam = _CANON[m.group(4).upper()]
        return MethodSpec(fam, fam)
    fam = _CANON[m.group(1).upper()]
    k, direction = m.group(2), m.group(3).lower()
    return MethodSpec(f"{fam}psi{k}-{direction}", fam, f"psi{k}", direction)


ALL_METHODS = tuple(
    [f"{fam}psi{k}-{dr}" for fam in SUBSPACE_FAMILIES for dr in ("min", "max") for k in range(1, 5)]
    + list(PLAIN_FAMILIES))


@dataclass(frozen=True)
class HyperGrid:
    C_values: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    d_values: tuple = (1, 2, 3, 4, 5, 10)
    beta_values: tuple = (1e-2, 1e-1, 1.0, 1e1, 1e2)
    sigma_values: tuple = (1e-1, 1.0, 1e1, 1e2, 1e3)

    def __post_init__(self):
        for k in ("C_values", "d_values", "beta_values", "sigma_values"):
            v = tuple(sorted(set(getattr(self, k))))
            if not v:
                raise ConfigError(f"grid axis {k} is empty")
            object.__setattr__(self, k, v)
        if any(int(d) != d or d < 1 for d in self.d_values):
            raise ConfigError("d values must be positive integers")
        object.__setattr__(self, "d_values", tuple(int(d) for d in self.d_values))
        if any(c <= 0 for c in self.C_values) or any(b < 0 for b in self.beta_values):
            raise ConfigError("C must be positive and beta nonnegative")
        if any(not s > 0 for s in self.sigma_values):
            raise ConfigError("sigma values must be positive")

    _KEYS = {"C": "C_values", "d": "d_values", "beta": "beta_values", "sigma": "sigma_values"}

    @classmethod
    def from_dict(cls, d):
        kw = {}
        for k, v in d.items():
            name = cls._KEYS.get(k, k)
            if name not in cls._KEYS.values():
                raise ConfigError(f"unknown grid key {k!r}")
            kw[name] = tuple(v) if isinstance(v, (list, tuple)) else (v,)
        return cls(**kw)

    def to_dict(self):
        return {"C": list(self.C_values), "d": list(self.d_values),
                "beta": list(self.beta_values), "sigma": list(self.sigma_values)}


@dataclass(frozen=True)
class Params:
    C: float
    d: int | None = None
    beta: float | None = None
    sigma: float | None = None

    def key(self):
        """Tie-break order: smaller d, then C, beta and sigma."""
        return (self.d or 0, self.C, self.beta or 0.0, self.sigma or 0.0)

    def to_dict(self):
        return {k: v for k, v in (("C", self.C), ("d", self.d), ("beta", self.beta),
                                  ("sigma", self.sigma)) if v is not None}

    @classmethod
    def from_dict(cls, d):
        return cls(C=float(d["C"]), d=None if d.get("d") is None else int(d["d"]),
                   beta=None if d.get("beta") is None else float(d["beta"]),
                   sigma=None if d.get("sigma") is None else float(d["sigma"]))


def grid_cells(method: MethodSpec, grid: HyperGrid, mode):
    """All cells for ``method`` sorted by the tie-break key.

    The regularizer is absent for psi1, so only the smallest beta is listed.
    """
    if mode not in MODES:
        raise ConfigError(f"kernel mode must be one of {MODES}, got {mode!r}")
    sigmas = grid.sigma_values if mode == "nonlinear" else (None,)
    if method.is_subspace:
        betas = grid.beta_values[:1] if method.variant == "psi1" else grid.beta_values
        cells = [Params(C, d, b, s) for d, C, b, s in
                 itertools.product(grid.d_values, grid.C_values, betas, sigmas)]
    else:
        cells = [Params(C, None, None, s) for C, s in itertools.product(grid.C_values, sigmas)]
    return sorted(cells, key=Params.key)


class FeatureSpace:
    """Fitting features for one set of target samples plus transforms for new data.

    ``indices`` records which dataset samples the space was built from, so
    fitting instrumentation can see exactly what enters a fit.
    """

    def __init__(self, X_target, mode, sigma=None, stats: StandardizeStats | None = None,
                 indices=None):
        if mode not in MODES:
            raise ConfigError(f"kernel mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self.stats = stats if stats is not None else standardize_fit(X_target)
        self.Xs = standardize_apply(self.stats, X_target)
        self.indices = None if indices is None else np.asarray(indices)
        self.emb = None
        if mode == "linear":
            self.kernel = LINEAR
            self.G = self.Xs.T @ self.Xs
            self.feats = self.Xs
        else:
            if sigma is None:
                raise ConfigError("nonlinear mode needs sigma")
            self.kernel = KernelSpec("gaussian", float(sigma))
            self.G = compute_gram(self.Xs, self.kernel)
            self.emb = fit_npt(self.G, self.kernel, check=False)
            self.feats = self.emb.train_phi
        self._q0 = None
        self._alphas = {}

    def view(self, Z):
        """Standardized samples, kernel columns and embedded features of raw ``Z``."""
        Zs = standardize_apply(self.stats, Z)
        K = cross_kernel(self.Xs, Zs, self.kernel)
        feats = Zs if self.emb is None else embed_test(self.emb, K)
        return EvalView(Zs, K, feats)

    def q0(self, d):
        if self._q0 is None:
            self._q0 = principal_directions(self.feats)
        return self._q0[:d]

    def first_alphas(self, d, C):
        key = (d, C)
        if key not in self._alphas:
            self._alphas[key] = initial_dual(self.feats, self.q0(d), C)
        return self._alphas[key]


@dataclass(frozen=True)
class EvalView:
    Zs: np.ndarray
    K: np.ndarray
    feats: np.ndarray


@dataclass(frozen=True)
class FittedModel:
    method: MethodSpec
    params: Params
    model: object

    def predict(self, view: EvalView):
        fam = self.method.family
        if fam == "OCSVM":
            a = self.model.alphas
            return view.K.T @ a >= self.model.rho - 1e-9
        if fam == "SVDD":
            sp = self.model
            kzz = (view.Zs * view.Zs).sum(0) if sp.kernel.kind == "linear" else 1.0
            d2 = np.maximum(kzz - 2.0 * (view.K.T @ sp.center_coeffs) + sp.center_norm_sq, 0.0)
            return d2 <= sp.radius_sq + 1e-9
        return self.model.predict(view.feats)


def fit_in_space(method: MethodSpec, params: Params, space: FeatureSpace, seed=None) -> FittedModel:
    fam = method.family
    if fam == "OCSVM":
        model = fit_ocsvm(space.G, params.C, space.Xs, space.kernel, check=False)
    elif fam == "SVDD":
        sol = solve_svdd_dual(space.G, params.C, check=False)
        model = sphere_from_dual(space.G, sol, space.Xs, space.kernel)
    elif fam == "ESVDD":
        model = fit_esvdd(space.feats, params.C)
    else:
        cfg = SubspaceConfig(d=params.d, C=params.C, beta=params.beta or 0.0, variant=method.variant,
                             direction=method.direction, optimizer=method.optimizer)
        if cfg.d > space.feats.shape[0]:
            raise ConfigError(f"d={cfg.d} exceeds feature dimensionality {space.feats.shape[0]}")
        model = train_subspace(space.feats, cfg, seed, q0=space.q0(cfg.d),
                               alphas0=space.first_alphas(cfg.d, cfg.C))
    return FittedModel(method, params, model)

"""Versioned, deterministic JSON for trained pipelines."""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InputError
from .evaluation.methods import FeatureSpace, FittedModel, Params, parse_method
from .evaluation.standardize import StandardizeStats
from .kernels import KernelSpec
from .npt import CenteringStats, NptEmbedding
from .subspace import SubspaceConfig, SubspaceModel
from .svdd import ESVDDModel, OCSVMModel, SphereModel

FORMAT = "ocdesc-model"
VERSION = 1


def _arr(a):
    return np.asarray(a, dtype=np.float64).tolist()


def _sphere(sp: SphereModel, refs=True):
    d = {"center_coeffs": _arr(sp.center_coeffs), "radius_sq": sp.radius_sq,
         "center_norm_sq": sp.center_norm_sq, "radius_fallback": sp.radius_fallback,
         "kernel": sp.kernel.to_dict()}
    if refs:
        d["training_refs"] = _arr(sp.training_refs)
    return d


def _load_sphere(d, refs=None):
    return SphereModel(center_coeffs=np.asarray(d["center_coeffs"], dtype=np.float64),
                       radius_sq=float(d["radius_sq"]), kernel=KernelSpec.from_dict(d["kernel"]),
                       training_refs=np.asarray(d["training_refs"] if refs is None else refs,
                                                dtype=np.float64),
                       center_norm_sq=float(d["center_norm_sq"]),
                       radius_fallback=bool(d["radius_fallback"]))


def _model_payload(fm: FittedModel):
    m = fm.model
    fam = fm.method.family
    if fam == "OCSVM":
        return {"alphas": _arr(m.alphas), "rho": m.rho, "objective": m.objective, "nu": m.nu,
                "rho_fallback": m.rho_fallback}
    if fam == "SVDD":
        return _sphere(m, refs=False)
    if fam == "ESVDD":
        return {"whitener": _arr(m.whitener), "eps": m.eps, "sphere": _sphere(m.sphere)}
    c = m.config
    return {"Q": _arr(m.Q), "sphere": _sphere(m.sphere),
            "config": {"d": c.d, "C": c.C, "beta": c.beta, "variant": c.variant,
                       "direction": c.direction, "optimizer": c.optimizer, "eta": c.eta,
                       "iters": c.iters, "newton_ridge": c.newton_ridge},
            "training_loss_trace": _arr(m.training_loss_trace),
            "orthonormality_trace": _arr(m.orthonormality_trace)}


def pipeline_to_dict(space: FeatureSpace, fm: FittedModel, extra=None):
    emb = space.emb
    d = {
        "format": FORMAT,
        "version": VERSION,
        "method": fm.method.name,
        "mode": space.mode,
        "params": fm.params.to_dict(),
        "kernel": space.kernel.to_dict(),
        "standardization": space.stats.to_dict(),
        "train_refs": _arr(space.Xs),
        "npt": None if emb is None else {
            "eigvals": _arr(emb.eigvals), "eigvecs": _arr(emb.eigvecs),
            "row_means": _arr(emb.centering_stats.row_means),
            "grand_mean": emb.centering_stats.grand_mean, "rank_tol": emb.rank_tol},
        "model": _model_payload(fm),
    }
    if extra:
        d["extra"] = extra
    return d


def dumps(obj):
    """Canonical JSON text (sorted keys, fixed separators, repr-exact floats)."""
    def check(o):
        if isinstance(o, float) and not math.isfinite(o):
            raise InputError("model contains non-finite values")
        if isinstance(o, dict):
            for v in o.values():
                check(v)
        elif isinstance(o, list):
            for v in o:
                check(v)
    check(obj)
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def save_pipeline(path, space, fm, extra=None):
    text = dumps(pipeline_to_dict(space, fm, extra))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def pipeline_from_dict(d):
    """Rebuild ``(space, fitted_model)``; ``fitted_model.predict(space.view(Z))`` scores raw ``Z``."""
    if d.get("format") != FORMAT:
        raise InputError("not an ocdesc model file")
    if d.get("version") != VERSION:
        raise InputError(f"unsupported model version {d.get('version')!r}")
    method = parse_method(d["method"])
    params = Params.from_dict(d["params"])
    space = FeatureSpace.__new__(FeatureSpace)
    space.mode = d["mode"]
    space.kernel = KernelSpec.from_dict(d["kernel"])
    space.stats = StandardizeStats.from_dict(d["standardization"])
    space.Xs = np.asarray(d["train_refs"], dtype=np.float64)
    space.indices = None
    space.emb = None
    space._q0 = None
    space._alphas = {}
    if d["npt"] is not None:
        n = d["npt"]
        w = np.asarray(n["eigvals"], dtype=np.float64)
        U = np.asarray(n["eigvecs"], dtype=np.float64)
        space.emb = NptEmbedding(train_phi=np.sqrt(w)[:, None] * U.T, eigvals=w, eigvecs=U,
                                 centering_stats=CenteringStats(
                                     np.asarray(n["row_means"], dtype=np.float64),
                                     float(n["grand_mean"])),
                                 kernel=space.kernel, rank_tol=float(n["rank_tol"]))
    space.feats = space.Xs if space.emb is None else space.emb.train_phi
    space.G = None
    p = d["model"]
    fam = method.family
    if fam == "OCSVM":
        model = OCSVMModel(alphas=np.asarray(p["alphas"], dtype=np.float64), rho=float(p["rho"]),
                           kernel=space.kernel, training_refs=space.Xs,
                           objective=float(p["objective"]), nu=float(p["nu"]),
                           rho_fallback=bool(p["rho_fallback"]))
    elif fam == "SVDD":
        model = _load_sphere(p, refs=space.Xs)
    elif fam == "ESVDD":
        model = ESVDDModel(whitener=np.asarray(p["whitener"], dtype=np.float64),
                           sphere=_load_sphere(p["sphere"]), eps=float(p["eps"]))
    else:
        model = SubspaceModel(Q=np.asarray(p["Q"], dtype=np.float64),
                              sphere=_load_sphere(p["sphere"]),
                              config=SubspaceConfig(**p["config"]),
                              training_loss_trace=np.asarray(p["training_loss_trace"]),
                              orthonormality_trace=np.asarray(p["orthonormality_trace"]))
    return space, FittedModel(method, params, model)


def load_pipeline(path):
    with open(path, encoding="utf-8") as fh:
        return pipeline_from_dict(json.load(fh))

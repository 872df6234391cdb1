"""Suite-wide audit: every train_subspace call checks QQ' = I after each round."""
import functools

import numpy as np

ORTH_TOL = 1e-8
runs = {"count": 0, "rounds": 0, "worst": 0.0}


def install():
    import ocdesc
    import ocdesc.evaluation.methods as methods
    import ocdesc.subspace as subspace

    inner = subspace.train_subspace
    if getattr(inner, "_audited", False):
        return

    @functools.wraps(inner)
    def audited(*args, **kwargs):
        model = inner(*args, **kwargs)
        trace = np.asarray(model.orthonormality_trace)
        runs["count"] += 1
        runs["rounds"] += trace.size
        if trace.size:
            runs["worst"] = max(runs["worst"], float(trace.max()))
            assert trace.max() < ORTH_TOL, f"orthonormality error {trace.max():.3e}"
        return model

    audited._audited = True
    for mod in (subspace, methods, ocdesc):
        mod.train_subspace = audited

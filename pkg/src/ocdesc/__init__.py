"""One-class description toolkit: SVDD family models, subspace SVDD, the
nonlinear projection trick, an evaluation harness and tweet text features."""
from .errors import (ConfigError, ConvergenceError, DegenerateDataError, InfeasibleError, InputError,
                     NumericError, OcdescError, SearchError)
from .kernels import KernelSpec, compute_gram
from .npt import center_gram, embed_test, fit_npt
from .subspace import SubspaceConfig, predict_subspace, train_subspace
from .svdd import decision, fit_esvdd, fit_ocsvm, fit_svdd, solve_svdd_dual, sphere_from_dual

__version__ = "0.1.0"

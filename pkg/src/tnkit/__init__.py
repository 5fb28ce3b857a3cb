"""Tensor networks for efficient regression and compact layers.

Submodules:

* :mod:`tnkit.tensor` -- dense tensors, tensorization, Kronecker products
* :mod:`tnkit.decomp` -- CP, Tucker and tensor-train decompositions
* :mod:`tnkit.tkrr` -- tensorized kernel ridge regression and its dense baseline
* :mod:`tnkit.ttlayer` -- fully-connected layers with tensor-train weights
* :mod:`tnkit.flops`, :mod:`tnkit.metrics` -- FLOP counting, timing, reports
* :mod:`tnkit.storage` -- binary containers
* :mod:`tnkit.data`, :mod:`tnkit.bench`, :mod:`tnkit.cli` -- data and benchmarks
"""

__version__ = "0.1.0"

from .errors import (BaselineInfeasible, ConfigError, DimensionError, FormatError,
                     RankError, SizeError, SolverError, TnkitError, TrainingError)
from .tensor import (MAX_ELEMENTS, DenseTensor, fold, inner_product, kronecker,
                     outer_product, tensorize, unfold, untensorize, vec)
from .decomp import (CPDecomp, TTDecomp, TuckerDecomp, cp_fit, hosvd_fit, parameter_count,
                     reconstruct, tt_svd_fit)
from .tkrr import (Dataset, FeatureMap, TkrrModel, build_feature_network, build_phi,
                   predict, ridge_direct_solve, tkrr_fit)
from .ttlayer import (TTLayer, compress_dense_layer, init_factorized_layer,
                      train_factorized, tt_layer_backward, tt_layer_forward)
from .flops import FlopCounter, count_scope, flop_scope
from .metrics import EfficiencyReport, analytic_flops, build_report, time_run

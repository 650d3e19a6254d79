"""ladderlab: exact computations in the sl_n web calculus."""

from .qring import LaurentPoly, RatFun, qbinom, qint, ratfun_normalize, specialize
from .weights import (
    GlWeight,
    Path,
    PositiveRoot,
    SlWeight,
    canonical_sequence,
    elementary_data,
    enumerate_paths,
    inversion_set,
    is_dominant_sum,
    pairing_A,
    sl_coords,
)
from .webs import (
    Ladder,
    Rung,
    RungClass,
    Tilt,
    classify_rung,
    double_ladder,
    elementary_ladder,
    flip,
    light_ladder,
    neutral_sort,
    strip_trivial,
)
from .evaluation import (
    EvalMatrix,
    TensorBasis,
    check_relation,
    ell,
    eval_ladder,
    eval_rung,
    hom_rank,
    merge_matrix,
    split_matrix,
    triangularity_report,
)

__version__ = "0.1.0"

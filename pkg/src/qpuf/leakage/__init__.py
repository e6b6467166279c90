from qpuf.leakage.bound import (
    BoundNotApplicable,
    LeakageBound,
    check_masses,
    leakage_bound,
    log2_f_c,
    monotonicity_probe,
)
from qpuf.leakage.exact import coset_function, exact_leakage, bound_terms
from qpuf.leakage.subcode import (
    DEFAULT_CAP,
    EnumerationTooLarge,
    LinearSubcode,
    WeightHistogram,
    linear_subcode,
    naive_histogram,
    resource_estimate,
    subcode_rows,
    weight_histogram,
)

f_c = log2_f_c

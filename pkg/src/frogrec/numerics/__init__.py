from .autodiff import (
    Parameter,
    Tensor,
    add,
    as_tensor,
    clip,
    concat,
    exp,
    get_default_dtype,
    index_select,
    log,
    log1p,
    matmul,
    mean,
    mul,
    neighbor_max,
    no_grad,
    power,
    precision,
    relu,
    reshape,
    set_default_dtype,
    sigmoid,
    softmax,
    spmm,
    sum_,
    take_rows,
    tanh,
    transpose,
)
from .gradcheck import GradCheckResult, grad_check
from .init import init_params, zeros
from .optim import AdamState, adam_step

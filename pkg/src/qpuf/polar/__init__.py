"""Quaternary polar codes with the RS4 kernel."""

from qpuf.polar.code import KERNEL, KERNEL_ID, encode, generator_matrix, generator_rows, kernel_matrix
from qpuf.polar.construction import CodeConstruction, genie_construct
from qpuf.polar.decoder import (
    DecoderConfig,
    llr_init,
    llr_table,
    llr_update,
    llr_update_f0,
    llr_update_f1,
    llr_update_f2,
    llr_update_f3,
    scl_decode,
    scl_decode_best,
)

__all__ = [
    "KERNEL", "KERNEL_ID", "encode", "generator_matrix", "generator_rows", "kernel_matrix",
    "CodeConstruction", "genie_construct", "DecoderConfig", "llr_init", "llr_table",
    "llr_update", "llr_update_f0", "llr_update_f1", "llr_update_f2", "llr_update_f3",
    "scl_decode", "scl_decode_best",
]

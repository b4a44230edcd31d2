"""expsumlab: exponential sums over Z/qZ with composite moduli.

Library layers, bottom up:

- zmod: exact modular arithmetic (inverses, CRT, primitive roots, dlogs)
- spectral: unitary DFT for arbitrary length, multiplicative convolution
- trace: trace-function tables (characters, Kloosterman, CRT products)
- corrlab: the internal dual-route exponential sums and pair correlations
- coeffs: divisor-function and tau coefficient sieves
- experiments: correlation/discrepancy experiments and exponent ladders
- cli: every operation as a reproducible subcommand
"""

__version__ = "0.1.0"

from .spectral import ComplexTable, dft_normalized, idft_normalized, mult_convolve
from .trace import (
    AffinePullback,
    ArtinSchreier,
    CRTProduct,
    HyperKloosterman,
    Kummer,
    PointwiseProduct,
    RawTable,
    Scale,
    TraceTable,
    hyper_kloosterman_composite,
    hyper_kloosterman_table,
    kloosterman_factorize,
    kloosterman_sum,
    realize,
)
from .zmod import Modulus, Residue, crt_combine, discrete_log, mod_inverse, primitive_root

__all__ = [
    "ComplexTable", "dft_normalized", "idft_normalized", "mult_convolve",
    "AffinePullback", "ArtinSchreier", "CRTProduct", "HyperKloosterman",
    "Kummer", "PointwiseProduct", "RawTable", "Scale", "TraceTable",
    "hyper_kloosterman_composite", "hyper_kloosterman_table",
    "kloosterman_factorize", "kloosterman_sum", "realize",
    "Modulus", "Residue", "crt_combine", "discrete_log", "mod_inverse",
    "primitive_root", "__version__",
]

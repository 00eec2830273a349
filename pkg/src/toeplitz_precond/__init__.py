"""Band, circulant and band-times-circulant preconditioners for real non-symmetric Toeplitz systems."""

from .approx import TrigPolynomial, interpolate, remez
from .banded import BACKEND
from .core import GeneratingSymbol, ToeplitzMatrix, fourier_coefficients, load_matrix_file, save_matrix_file
from .errors import ToeplitzError
from .estimate import analyze, auto_band_preconditioner, auto_circulant_preconditioner, fourier_expansion
from .krylov import SolveConfig, SolveReport, experiment, pcgn, pgmres
from .precond import (BandPreconditioner, CirculantPreconditioner, CompositePreconditioner, RootSpec,
                      band_times_circulant, build_elimination_poly, circulant_optimal, circulant_strang)

__all__ = [
    "BACKEND", "BandPreconditioner", "CirculantPreconditioner", "CompositePreconditioner", "GeneratingSymbol",
    "RootSpec", "SolveConfig", "SolveReport", "ToeplitzError", "ToeplitzMatrix", "TrigPolynomial", "analyze",
    "auto_band_preconditioner", "auto_circulant_preconditioner", "band_times_circulant", "build_elimination_poly",
    "circulant_optimal", "circulant_strang", "experiment", "fourier_coefficients", "fourier_expansion",
    "interpolate", "load_matrix_file", "pcgn", "pgmres", "remez", "save_matrix_file",
]

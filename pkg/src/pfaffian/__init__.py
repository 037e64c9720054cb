"""Flat meromorphic connections: exact calculus, residues, normal forms and monodromy."""
from .scalars import RATIONAL_BACKEND, ExactScalar, LaurentPoly, Q, WeightVector
from .exterior import MatrixKForm, PolyMap, ScalarKForm, bracket, d, divide_by, pullback, wedge
from .connection import (Connection, EulerConnection, MatrixSeries, PolarComponent,
                         flatness_residual, gauge, local_solution)
from .logpole import (is_logarithmic, residue, residue_commutativity, resonance_report,
                      saito_decompose)
from .normalform import ClosedLogForm, nabla, nabla_solve, poincare_dulac
from .blowup import BlowupChart, blowup_pullback, exceptional_residue
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["RATIONAL_BACKEND", "ExactScalar", "LaurentPoly", "Q", "WeightVector",
           "MatrixKForm", "PolyMap", "ScalarKForm", "bracket", "d", "divide_by", "pullback",
           "wedge", "Connection", "EulerConnection", "MatrixSeries", "PolarComponent",
           "flatness_residual", "gauge", "local_solution", "is_logarithmic", "residue",
           "residue_commutativity", "resonance_report", "saito_decompose", "ClosedLogForm",
           "nabla", "nabla_solve", "poincare_dulac", "BlowupChart", "blowup_pullback",
           "exceptional_residue", "KERNEL_BACKEND"]

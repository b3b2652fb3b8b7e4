from .base import (
    CriterionResult,
    KernelModel,
    KernelTables,
    Model,
    OperatorFields,
    TheoryConstants,
)
from .bsp import BathKernel, BSPModel, BSPParams
from .emv import SIGMA_KINDS, ConstantSigma, EMVModel, EMVParams, ExpDecaySigma
from .kingman import KingmanModel, KingmanParams

__all__ = [
    "BathKernel",
    "BSPModel",
    "BSPParams",
    "ConstantSigma",
    "CriterionResult",
    "EMVModel",
    "EMVParams",
    "ExpDecaySigma",
    "KernelModel",
    "KernelTables",
    "KingmanModel",
    "KingmanParams",
    "Model",
    "OperatorFields",
    "SIGMA_KINDS",
    "TheoryConstants",
]

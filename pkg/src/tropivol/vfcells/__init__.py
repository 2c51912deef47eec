"""Valued-field cells and the dimensional integral over them."""
from .padic import PadicConstant, inverse_truncated, mul_truncated
from .cells import (FREE_UNIT, DefinableSet, DimFunction, FixedDigits, FreeUnit, OracleResult, Piece,
                    VFCell, VFPoint, apply_affine_map, cell_vol, contains, coordinates, evaluate, meet,
                    permute_coordinates, product, product_cell, sample_point, sample_points, shift,
                    truncate, truncated_value, union, vol, vol_truncation_oracle)
from .integrate import (CheckResult, CovResult, ProjectionResult, cov_check, fiber, fubini_check,
                        inner_function, integrate, integrate_threshold, level_set, projection_check,
                        pull_back, superlevel_set)

__all__ = [name for name in dir() if not name.startswith("_")]

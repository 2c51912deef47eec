"""Exact dimensional (max-plus) motivic integration over cells of a discretely
valued field, with the Poincare-polynomial motivic measure and base-change
conductors of tori."""

__version__ = "0.1.0"

"""Valuation-theory toolkit: value calculus, valued-field models, normal forms
for Artin-Schreier and Kummer type polynomials, and extension invariants."""

__version__ = "0.1.0"

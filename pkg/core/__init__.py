"""
Core Package - Finite Category Theory
=====================================
Finite categories, fibrations, 2-categories, double categories and double
fibrations, the elements and fibers constructions, and the equivalence
round trips between them. Independent of the command line.
"""

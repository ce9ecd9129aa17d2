"""Sandpile dynamics, monoid presentations, dimension groups, and
shift-equivalence certificates for finite directed multigraphs."""

__version__ = "0.1.0"

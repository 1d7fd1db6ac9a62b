"""Pre- and post-selected measurement statistics: ABL, its POVM form, a pointer oracle and hydrogen Zeeman levels."""

__version__ = "0.1.0"

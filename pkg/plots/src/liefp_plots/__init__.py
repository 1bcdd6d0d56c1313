"""Figure generation for liefp exports; consumes only the documented file
formats (b3/omega marginal CSVs, moment CSVs)."""

__version__ = "0.1.0"

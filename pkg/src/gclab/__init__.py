"""gclab: numeric verification workbench for generalized complex geometry."""

__version__ = "0.1.0"

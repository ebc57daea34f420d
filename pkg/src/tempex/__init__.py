"""tempex: temporally extend web-archive collections into longitudinal
snapshot tuples and analyze term changes across administration windows."""

__version__ = "0.1.0"

"""tridyson: eigenvalue processes of a tridiagonal matrix process and the identities behind them."""
__version__ = "0.1.0"
__author__ = "tridyson developers"

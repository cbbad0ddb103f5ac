"""Exact tools for the dynamics of birational maps of rational surfaces."""
__version__ = "0.1.0"

from .catalog import catalog, catalog_bd_sigma_tau, catalog_df_epsilon, catalog_henon, catalog_quadratic_involution
from .exact import INF, finite

__all__ = [
    "INF",
    "catalog",
    "catalog_bd_sigma_tau",
    "catalog_df_epsilon",
    "catalog_henon",
    "catalog_quadratic_involution",
    "finite",
]

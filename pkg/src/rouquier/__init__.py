"""Rouquier complexes in the bimodule model of the Hecke category."""

"""Exact multitask decision-tree costs, hitting-set realizations and mystery bins."""
from .boolfn import FunctionFamily, TruthTable, bundle
from .costs import CostTable
from .dtree import depth, multitask_cost, optimal_tree
from .ecf import cstar, is_ecf, random_ecf, validate_ecf
from .setsys import WeightedSetSystem, hs_cost_table, intro_system, min_hitting_set, realize_ecf

__version__ = "0.1.0"

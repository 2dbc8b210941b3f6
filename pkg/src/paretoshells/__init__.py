"""Lower shells, upper shells and upper approximations of Pareto fronts."""

__version__ = "0.1.0"

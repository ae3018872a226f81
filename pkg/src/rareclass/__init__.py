"""Rare-event binary classification toolkit.

Downsampling for unbalanced training sets, maximum-likelihood logistic
regression with stepwise AIC selection, random forests with out-of-bag
estimates, and threshold-swept FAR / TS / ROC evaluation.
"""

__version__ = "0.1.0"

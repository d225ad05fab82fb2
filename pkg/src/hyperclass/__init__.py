"""Hierarchy-aware text classification with Poincare-ball label
embeddings and hyperbolic distance-weighted cross entropy.

Two-stage pipeline: `hierarchy.train_label_embeddings` places the label
tree in the Poincare ball; `training.train_classifier` fits a text
encoder + head whose per-sample cross entropy is weighted by the ball
distance between the projected representation and the true label's
embedding.
"""

__version__ = "0.1.0"

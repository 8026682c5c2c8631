"""Built-in learners and cross-validation used to score procedure effects."""

from .cart import CartTree, train_cart
from .encode import Encoder, fit_encoder, transform
from .evaluate import (EvalConfig, EvalReport, compare_performance,
                       cross_validate, infer_task)
from .knn import predict_knn
from .logreg import LogisticModel, loss_and_grad, train_logreg

__all__ = ["CartTree", "train_cart", "Encoder", "fit_encoder", "transform",
           "EvalConfig", "EvalReport", "compare_performance", "cross_validate",
           "infer_task", "predict_knn", "LogisticModel", "loss_and_grad",
           "train_logreg"]

"""Minimal neural-network core: batched LSTM and dense classifiers with
hand-rolled backprop, Adam, and a binary parameter format."""

from .activations import selu, sigmoid, softmax
from .dense import DenseNetwork
from .gradcheck import gradient_check
from .loss import weighted_cross_entropy
from .lstm import LstmNetwork, lstm_param_count
from .optim import Adam, TrainConfig, lr_at
from .serialize import load_model, save_model
from .train import train

__all__ = [
    "Adam",
    "DenseNetwork",
    "LstmNetwork",
    "TrainConfig",
    "gradient_check",
    "load_model",
    "lr_at",
    "lstm_param_count",
    "save_model",
    "selu",
    "sigmoid",
    "softmax",
    "train",
    "weighted_cross_entropy",
]

"""Numpy convolutional Q-network with hand-written backward passes."""

from coverage_scout.nn.checkpoint import load_checkpoint, load_network, save_checkpoint
from coverage_scout.nn.layers import Conv2DLayer, ReLU, TConv2DLayer
from coverage_scout.nn.optim import Adam, adam_step
from coverage_scout.nn.qnet import QNetwork, copy_weights, qnet_forward
from coverage_scout.nn.tensor import Tensor

__all__ = [
    "Adam",
    "Conv2DLayer",
    "QNetwork",
    "ReLU",
    "TConv2DLayer",
    "Tensor",
    "adam_step",
    "copy_weights",
    "load_checkpoint",
    "load_network",
    "qnet_forward",
    "save_checkpoint",
]

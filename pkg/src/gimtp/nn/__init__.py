from gimtp.nn.checkpoint import Checkpoint, load_checkpoint, restore_into, save_checkpoint
from gimtp.nn.layers import Dense, GruCell, TimeDense, run_gru
from gimtp.nn.params import ParameterStore
from gimtp.nn.tensor import Tensor, broadcast_shape, concat

__all__ = [
    "Checkpoint",
    "Dense",
    "GruCell",
    "ParameterStore",
    "Tensor",
    "TimeDense",
    "broadcast_shape",
    "concat",
    "load_checkpoint",
    "restore_into",
    "run_gru",
    "save_checkpoint",
]

# Experiments package initialization

from .convergence import reference_posterior, run_convergence_study, spliced_distribution
from .synthetic_task import OrderingResult, RingTask, run_ordering_experiment, train_ring_model

__all__ = [
    'reference_posterior',
    'run_convergence_study',
    'spliced_distribution',
    'OrderingResult',
    'RingTask',
    'run_ordering_experiment',
    'train_ring_model'
]

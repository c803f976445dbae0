"""Maze pairs for unsplittable flow on a path with delta-large tasks."""

from .construct import construct_thin_pair, k_of, k_prime, min_segment_cover
from .dp import MazeDP, solve
from .generators import GeneratorSpec, generate
from .maze import (MUTATIONS, REFERENCE, MazePair, MTask, Rules, gen_mtasks, is_k_thin,
                   is_weakly_feasible, ncrit)
from .model import (GuardExceeded, Instance, InstanceError, Task, check_feasible, exact_opt,
                    load_instance, dump_instance, preprocess)
from .oracles import best_maze_pair_bruteforce, run_lemma_suite
from .render import RenderSpec, render
from .search import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GeneratorSpec", "GuardExceeded", "Instance", "InstanceError", "MTask", "MUTATIONS",
    "MazeDP", "MazePair", "REFERENCE", "RenderSpec", "Rules", "Task", "best_maze_pair_bruteforce",
    "check_feasible", "construct_thin_pair", "dump_instance", "exact_opt", "gen_mtasks", "generate",
    "is_k_thin", "is_weakly_feasible", "k_of", "k_prime", "load_instance", "min_segment_cover", "ncrit",
    "preprocess", "render", "run_lemma_suite", "solve",
]

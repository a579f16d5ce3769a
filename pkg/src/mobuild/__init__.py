"""mobuild: grid-world mobile construction simulation and benchmarking.

A robot navigates a 1/2/3D grid world under partial observation and
uncertain motion, dropping bricks to realize a goal design. The package
provides the environment, design generators, a handcrafted scan-match
agent plus baselines, a reproducible benchmark harness, and an
interactive play service.
"""
from .core import (
    Design,
    Dim,
    GridState,
    LANDMARK,
    ObservationPacket,
    OUTSIDE,
    Pose,
    iou,
    load_design,
    observe,
    save_design,
)
from .env import Action, EnvConfig, Environment, EpisodeOver, StepOutcome, legal_actions
from .designs import DesignSpec, dynamic_test_groups, generate, sample_training_design
from .agents import (
    Agent,
    BeliefPose,
    GreedyDropAgent,
    HandcraftedAgent,
    PriorityActionSpace,
    RandomAgent,
    feature_match,
    localize,
    make_agent,
    plan,
)
from .records import EpisodeRecord, EpisodeRecorder, replay, run_episode
from .bench import BenchResult, RunConfig, emit_report, run, run_dynamic, run_static

__version__ = "0.1.0"

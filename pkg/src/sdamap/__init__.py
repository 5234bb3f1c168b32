"""Level-map generation from evolved self-driving bit automata."""

from sdamap.evolve import (
    EaConfig,
    ExperimentResult,
    RunResult,
    experiment_config,
    run_ea,
    run_experiment,
)
from sdamap.kernel import BuildStats, Evaluator, evaluate
from sdamap.mapgen import (
    BuilderConfig,
    LevelMap,
    Room,
    RoomKind,
    RoomProposal,
    Side,
    build_map,
    propose_room,
    resolve_offset,
)
from sdamap.render import RenderStyle, render_image, save_map_figure, save_trace_figure
from sdamap.sda import (
    SdaGenome,
    SdaStream,
    StateRecord,
    mutate,
    random_genome,
    two_point_crossover,
)
from sdamap.textio import (
    ParseError,
    parse_genome,
    parse_map_text,
    parse_mask,
    render_map_text,
    serialize_genome,
    serialize_mask,
)

__all__ = [
    "BuildStats",
    "BuilderConfig",
    "EaConfig",
    "Evaluator",
    "ExperimentResult",
    "LevelMap",
    "ParseError",
    "RenderStyle",
    "Room",
    "RoomKind",
    "RoomProposal",
    "RunResult",
    "SdaGenome",
    "SdaStream",
    "Side",
    "StateRecord",
    "build_map",
    "evaluate",
    "experiment_config",
    "mutate",
    "parse_genome",
    "parse_map_text",
    "parse_mask",
    "propose_room",
    "random_genome",
    "render_image",
    "render_map_text",
    "resolve_offset",
    "run_ea",
    "run_experiment",
    "save_map_figure",
    "save_trace_figure",
    "serialize_genome",
    "serialize_mask",
    "two_point_crossover",
]

__version__ = "0.1.0"

from gimtp.data.groups import GroupConfig, KING_ADJACENCY, N_SLOTS, build_group, slot_for
from gimtp.data.labels import (
    IntentionMatrix,
    LabelThresholds,
    LAT_CLASSES,
    LON_CLASSES,
    label_window,
)
from gimtp.data.synth import (
    Maneuver,
    ScenarioSpec,
    VehicleSpec,
    scenario_from_dict,
    synth_generate,
    write_csv,
)
from gimtp.data.tracks import FrameIndex, Track, VehicleState, load_csv
from gimtp.data.windows import (
    GroupWindow,
    N_FEATURES,
    WindowConfig,
    label_intentions,
    make_windows,
)

__all__ = [
    "FrameIndex",
    "GroupConfig",
    "GroupWindow",
    "IntentionMatrix",
    "KING_ADJACENCY",
    "LAT_CLASSES",
    "LON_CLASSES",
    "LabelThresholds",
    "Maneuver",
    "N_FEATURES",
    "N_SLOTS",
    "ScenarioSpec",
    "Track",
    "VehicleSpec",
    "VehicleState",
    "WindowConfig",
    "build_group",
    "label_intentions",
    "label_window",
    "load_csv",
    "make_windows",
    "scenario_from_dict",
    "slot_for",
    "synth_generate",
    "write_csv",
]

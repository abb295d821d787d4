"""boxseg: tilted-box weak supervision for segmentation.

Six clicks per object (two for orientation, four extreme points) become a
tilted bounding box; boxes alone produce a weak "box ground truth"; a rough
segmentation is matched against the boxes and refined by a graph search
over boundary-normal columns; the refined masks replace the weak labels to
form the fine ground truth.
"""

from .annotations import (
    AnnotatedObject,
    ImageAnnotation,
    annotation_from_dict,
    annotation_to_dict,
    load_annotation,
    save_annotation,
)
from .boxgt import BACKGROUND, IGNORE, OBJECT, BoxGtConfig, LabelMap, rasterize_box_gt
from .geometry import (
    AssistiveGrid,
    ClickSequence,
    Point2,
    TiltedBox,
    assistive_grid,
    box_from_clicks,
    same_angle_bounding_box,
    same_angle_iou,
)
from .graphsearch import (
    ColumnGraph,
    Contour,
    DomainCell,
    GsConfig,
    build_column_graph,
    compute_domain_cells,
    contour_to_mask,
    refine_component,
    solve_closed_path,
)
from .metrics import PixelScore, aggregate, dilate_erode_to_max_f1, pixel_f1
from .pipeline import (
    FineGroundTruth,
    MatchConfig,
    MatchResult,
    PipelineConfig,
    assemble_fine_gt,
    match,
    run_image,
)
from .segmenter import (
    InstanceMask,
    ProbabilityMap,
    RoughSegmentation,
    baseline_segment,
    binarize_and_label,
    export_probability_map,
    import_probability_map,
)
from .synth import SynthConfig, SynthScene, generate, generate_dataset

__all__ = [
    "AnnotatedObject", "ImageAnnotation", "annotation_from_dict",
    "annotation_to_dict", "load_annotation", "save_annotation",
    "BACKGROUND", "IGNORE", "OBJECT", "BoxGtConfig", "LabelMap", "rasterize_box_gt",
    "AssistiveGrid", "ClickSequence", "Point2", "TiltedBox", "assistive_grid",
    "box_from_clicks", "same_angle_bounding_box", "same_angle_iou",
    "ColumnGraph", "Contour", "DomainCell", "GsConfig", "build_column_graph",
    "compute_domain_cells", "contour_to_mask", "refine_component", "solve_closed_path",
    "PixelScore", "aggregate", "dilate_erode_to_max_f1", "pixel_f1",
    "FineGroundTruth", "MatchConfig", "MatchResult", "PipelineConfig",
    "assemble_fine_gt", "match", "run_image",
    "InstanceMask", "ProbabilityMap", "RoughSegmentation", "baseline_segment",
    "binarize_and_label", "export_probability_map", "import_probability_map",
    "SynthConfig", "SynthScene", "generate", "generate_dataset",
]

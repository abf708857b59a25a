"""ocrkit: scoring and synthetic data engines for multi-format OCR benchmarks."""

from .charts import (
    ApReport,
    ChartGenConfig,
    ChartParseError,
    ChartStruct,
    Series,
    ap_report,
    chart_ap,
    gen_chart_struct,
    parse_chart_output,
    serialize_chart_struct,
)
from .corpus import (
    Corpus,
    CorpusFormatError,
    Sample,
    TaskKind,
    dedup_filter,
    load_records,
    mix_stages,
    save_records,
)
from .finegrained import (
    BBox,
    ColorPrompt,
    CropSpec,
    FrameSpec,
    NormBox,
    color_frame_spec,
    crop_regions,
    denormalize_box,
    normalize_box,
    reading_order_serialize,
)
from .geometry import (
    GeomScene,
    SceneConfig,
    TikzDoc,
    TikzParseError,
    emit_tikz,
    gen_scene,
    parse_tikz_subset,
)
from .metrics import (
    MetricReport,
    TokenSeq,
    bleu,
    edit_distance_norm,
    meteor,
    prf,
    score_corpus,
    score_texts,
    tokenize,
)
from .pagecompose import (
    MultiPageSample,
    PageSpec,
    PasteLayout,
    compose_multipage,
    paste_handwriting_lines,
    token_count,
)
from .tiling import ImageDims, StitchSpec, TilePlan, plan_tiles, stitch_pages
from .validators import (
    ValidationReport,
    validate_kern,
    validate_mathpix_markdown,
    validate_smiles,
    validate_tikz,
)

__version__ = "0.1.0"

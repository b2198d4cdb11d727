"""Message embedding in images, block perceptual hashing, and the
manipulation-vs-compression discrimination experiments."""

__version__ = "0.1.0"

from .compression import (
    ALGORITHMS,
    CompressionResult,
    compress,
    compress_dct,
    compress_dwt,
    compress_klt,
    compress_quadtree,
    compress_spline,
)
from .embedding import (
    EmbedderConfig,
    Message,
    QrPlacement,
    SCHEMES,
    calibrate_strength,
    choose_qr_scale,
    embed,
    embed_dct_qim,
    embed_dwt_qim,
    embed_iwt,
    embed_qr_lsb,
    extract,
    extract_dct_qim,
    extract_dwt_qim,
    extract_iwt,
    extract_qr_lsb,
    make_qr,
    qim_embed,
    qim_extract,
)
from .exceptions import (
    CapacityError,
    ExtractionError,
    PlacementError,
    StegohashError,
    UnsupportedImageError,
)
from .experiments import (
    ExperimentConfig,
    ExperimentRecord,
    classify_change,
    generate_message,
    manipulate_message,
    run_compression_experiment,
    run_manipulation_experiment,
)
from .imagecore import (
    Channel,
    RasterImage,
    clip_round,
    load_png,
    merge_channels,
    save_png,
    split_channels,
    to_grayscale,
)
from .perceptual import MetricReport, RobustHash, block_hash, hamming_distance, psnr
from .transforms import (
    IntegerBands,
    WaveletBands,
    dct2_block,
    haar_dwt,
    haar_lift,
    haar_unlift,
    idct2_block,
    ihaar_dwt,
    iwt_forward,
    iwt_inverse,
)

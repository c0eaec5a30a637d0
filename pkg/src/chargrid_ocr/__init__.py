"""Post-processing for character-grid OCR networks.

Decode dense per-pixel network outputs into character boxes and words,
encode ground truth into the same targets, and score results with the
location-aware word recognition rate.
"""
from .annotations import CharAnnotation, GroundTruthPage, WordAnnotation
from .charset import Charset, default_charset
from .codec import (
    WidthTable,
    approximate_char_boxes,
    decode_word_offset,
    encode_page,
    encode_word_offset,
)
from .detect import (
    CandidateBox,
    Candidates,
    CharBox,
    extract_candidates,
    graphcore_filter,
    nms,
    nms_bruteforce,
)
from .geometry import Rect, iou, overlap_fraction_of_smaller
from .grids import Grid, GridFormatError, NetworkOutput, grid_read, grid_write
from .metrics import CorpusReport, MatchResult, match_words, wrr_corpus, wrr_document
from .synth import NoiseConfig, PageConfig, corrupt_output, generate_page
from .words import (
    Word,
    WordProposal,
    assemble_word,
    assign_class,
    cluster_words,
    decode_page,
    predicted_word_center,
    word_proposal,
)

__version__ = "0.1.0"

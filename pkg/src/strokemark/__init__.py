"""Blind watermarking for binary text images via stroke-thickness modulation."""

from .channel import AttackSpec, EvalReport, apply_attack, attack_suite
from .core import CoreDescriptor, extract_core, rlc
from .corpus import default_glyphset, make_corpus, render_page
from .embed import EmbedConfig, EmbedPlan, EmbedReport, embed_page
from .errors import StrokeMarkError
from .extract import ExtractConfig, extract_page, extract_with_report
from .image import BinaryImage, GrayImage, binarize, load_image, save_image, to_gray
from .metrics import QualityMetrics, accuracy, psnr, ssim
from .payload import frame, scramble, unframe

__version__ = "0.1.0"

__all__ = [
    "AttackSpec",
    "BinaryImage",
    "CoreDescriptor",
    "EmbedConfig",
    "EmbedPlan",
    "EmbedReport",
    "EvalReport",
    "ExtractConfig",
    "GrayImage",
    "QualityMetrics",
    "StrokeMarkError",
    "accuracy",
    "apply_attack",
    "attack_suite",
    "binarize",
    "default_glyphset",
    "embed_page",
    "extract_core",
    "extract_page",
    "extract_with_report",
    "frame",
    "load_image",
    "make_corpus",
    "psnr",
    "render_page",
    "rlc",
    "save_image",
    "scramble",
    "ssim",
    "to_gray",
    "unframe",
]

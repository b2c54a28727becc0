"""User-facing pipeline driver and corpus harness."""
from .corpus import (CLASSES, ClassScore, CorpusManifest, CorpusSummary, ManifestEntry,
                     ManifestMismatch, load_manifest, parse_manifest, run_corpus)
from .main import Options, analyze_file, build_parser, main, run
from .report import ContractResult, FileError, PropertyResult, Report

__all__ = [
    "CLASSES", "ClassScore", "CorpusManifest", "CorpusSummary", "ManifestEntry",
    "ManifestMismatch", "load_manifest", "parse_manifest", "run_corpus", "Options",
    "analyze_file", "build_parser", "main", "run", "ContractResult", "FileError",
    "PropertyResult", "Report",
]

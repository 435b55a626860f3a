"""Evaluation metrics: identification quality, annotator agreement,
readability/compression, generation quality, and corpus-level statistics."""
from .identification import (  # noqa: F401
    CategoryRow,
    IdentificationReport,
    build_identification_report,
    category_f1,
    class_f1,
    group_exact_pct,
    group_partial_pct,
)
from .agreement import (  # noqa: F401
    AgreementReport,
    DegenerateRatingsError,
    build_agreement_report,
    cohen_kappa,
    fleiss_kappa,
)
from .textstats import compression_ratio, fkgl, split_sentences, syllable_count  # noqa: F401
from .generation import GenerationReport, build_generation_report, sari  # noqa: F401
from .corpus_stats import (  # noqa: F401
    CategoryStats,
    CorpusStats,
    corpus_stats,
    multi_sentence_rate,
    op_sentence_ids,
)

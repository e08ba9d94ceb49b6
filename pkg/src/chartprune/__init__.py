"""Chart parsing with begin/end pruning constraints.

Spans are end-exclusive throughout: a constituent over tokens i..k-1 is the
span [i, k).  Scores are natural-log probabilities.
"""

from .bench import (
    BenchSentence,
    EvalReport,
    RunResult,
    SentenceRecord,
    benchmark,
    eval_report,
    write_stats_tsv,
)
from .cky import Chart, chart_stats, parse
from .constraints import (
    BeginEndConstraints,
    allow_all,
    conjoin,
    constraints_from_file,
    constraints_to_file,
    empty_constraints,
    from_probs,
    gold_constraints,
    pcfg_allowable,
    pcfg_filter,
    tag_allowable_be,
    tag_allowable_cc,
    tag_filter,
)
from .ctf import (
    CoarseMap,
    ctf_predicate,
    default_coarse_map,
    inside_outside,
    project,
    read_coarse_map,
    write_coarse_map,
)
from .errors import DataError
from .evalmetrics import ParsevalScores, TaggingScores, parseval, tagging_scores
from .items import PcfgItem, TagItem
from .nn import EncoderConfig, SequenceModel, TrainConfig
from .pcfg import Pcfg, Rule, extract_pcfg, read_pcfg, read_pcfg_file, write_pcfg
from .supertag import (
    FrequencySupertagModel,
    NeuralSupertagModel,
    artificial_tokens,
    gold_assignment,
    relabel,
    sentence_grammar,
    topk,
    train_neural_supertagger,
)
from .tag_extract import (
    HeadRules,
    TagCorpus,
    TagSentence,
    corpus_grammar,
    extract_spinal,
    read_head_rules,
)
from .tag_grammar import (
    ElementaryTree,
    TagGrammar,
    TagNode,
    read_tag_grammar,
    tag_grammar,
    write_tag_grammar,
)
from .tag_parser import TagChart, best_derivation, tag_chart_stats, tag_parse
from .tagger import (
    BoundaryModel,
    load_boundary_model,
    predict_corpus,
    train_boundary_model,
)
from .trees import (
    Tree,
    binarize,
    debinarize,
    pos_sequence,
    read_treebank,
    read_trees,
    spans,
    strip_word_layer,
    tree,
    write_tree,
    write_treebank,
)

__all__ = [
    "BeginEndConstraints",
    "BenchSentence",
    "BoundaryModel",
    "Chart",
    "CoarseMap",
    "DataError",
    "ElementaryTree",
    "EncoderConfig",
    "EvalReport",
    "FrequencySupertagModel",
    "HeadRules",
    "NeuralSupertagModel",
    "ParsevalScores",
    "Pcfg",
    "PcfgItem",
    "Rule",
    "RunResult",
    "SentenceRecord",
    "SequenceModel",
    "TagChart",
    "TagCorpus",
    "TagGrammar",
    "TagItem",
    "TagNode",
    "TagSentence",
    "TaggingScores",
    "TrainConfig",
    "Tree",
    "allow_all",
    "artificial_tokens",
    "benchmark",
    "best_derivation",
    "binarize",
    "chart_stats",
    "conjoin",
    "constraints_from_file",
    "constraints_to_file",
    "corpus_grammar",
    "ctf_predicate",
    "debinarize",
    "default_coarse_map",
    "empty_constraints",
    "eval_report",
    "extract_pcfg",
    "extract_spinal",
    "from_probs",
    "gold_assignment",
    "gold_constraints",
    "inside_outside",
    "load_boundary_model",
    "parse",
    "parseval",
    "pcfg_allowable",
    "pcfg_filter",
    "pos_sequence",
    "predict_corpus",
    "project",
    "read_coarse_map",
    "read_head_rules",
    "read_pcfg",
    "read_pcfg_file",
    "read_tag_grammar",
    "read_treebank",
    "read_trees",
    "relabel",
    "sentence_grammar",
    "spans",
    "strip_word_layer",
    "tag_allowable_be",
    "tag_allowable_cc",
    "tag_chart_stats",
    "tag_filter",
    "tag_grammar",
    "tag_parse",
    "tagging_scores",
    "topk",
    "train_boundary_model",
    "train_neural_supertagger",
    "tree",
    "write_coarse_map",
    "write_pcfg",
    "write_stats_tsv",
    "write_tag_grammar",
    "write_tree",
    "write_treebank",
]

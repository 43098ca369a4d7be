from .autodiff import Tensor, backward, grad_check
from .baselines.bow import BowVocabulary, Codebook, bow_encode, fit_vocabulary, kmeans_fit
from .baselines.linear import LogisticModel, train_linear_classifier
from .baselines.statistics import StatVector, aggregate_stats
from .baselines.votes import VoteResults, candidate_score_from_answers, vote_baselines
from .errors import HireNetError, ContractViolation, DegenerateInputError, LookupContractError, \
    UnsupportedVariantError, NumericError, TrainingDivergedError, CorpusParseError, CorpusValidationError, \
    CheckpointError
from .harness.attention_export import AttentionReport, export_attention, salience_localization, summarize_attention
from .harness.baseline_runs import run_bow_baseline, run_stats_baseline, run_vote_baselines
from .harness.evaluation import Evaluation, evaluate
from .harness.fusion_runs import fit_fusion, run_fusion
from .harness.ladder import LadderReport, LadderSettings, run_ladder
from .harness.metrics import Metrics, compute_metrics
from .harness.training import TrainReport, fit, train
from .interview_data.corpus_io import load_corpus, save_corpus
from .interview_data.describe import describe_corpus
from .interview_data.generator import generate_corpus, oracle_label
from .interview_data.interview_models import Annotation, GeneratorSpec, Interview, QAPair
from .interview_data.protocol import aggregate_annotations, split_corpus
from .lib.attention import AttentionTrace, average_pool, context_attention, self_attention
from .lib.checkpoint import load_checkpoint, save_checkpoint
from .lib.config import HireNetConfig, OptimizerSettings
from .lib.encoders import bigru_run, encode_token_sequence, gru_step
from .lib.fusion import FusionModel, early_fusion, late_fusion
from .lib.hirenet import Prediction, bce_loss, forward_interview
from .lib.parameters import HireNetParams, init_model

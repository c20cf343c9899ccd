"""Main-event-centered extractive multi-document summarization.

The engine picks the sentence that best represents a news cluster's main
event, then greedily grows a summary around it by maximizing a monotone
submodular objective (topical coverage + cluster diversity + a learned
co-occurrence bias toward the main-event sentence).  Extracted sentences
can optionally be rewritten by an external HTTP service.
"""

from eventsum.corpus import Document, DocumentCluster, SentenceRecord, load_cluster, save_cluster, segment_sentences
from eventsum.simgraph import EmbeddingStore, SimilarityMatrix, load_embeddings, save_embeddings, pairwise_variance, sim, similarity_matrix
from eventsum.apcluster import Clustering, affinity_propagation, clustering_purity
from eventsum.cooc import CoocModel, CoocModelPair, Triplet, coc_score, evaluate_pairs, init_model_pair, load_model, loss_gradient, pair_features, save_model, train, triplet_loss
from eventsum.objective import ObjectiveConfig, ObjectiveContext, SentenceSelection, coverage, diversity, main_bias, make_context, marginal_gain, objective_value
from eventsum.extract import BudgetConfig, ExtractResult, brute_force_extract, budget, greedy_extract, lead_sentence_tagger, main_event_candidates, select_main_event
from eventsum.rouge import RougeScore, rouge_l, rouge_n, tokenize
from eventsum.tuning import GridSpec, grid_search

__version__ = "0.1.0"

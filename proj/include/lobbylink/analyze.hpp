#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lobbylink/corpus.hpp"
#include "lobbylink/providers.hpp"
#include "lobbylink/scorer.hpp"

namespace lobbylink::analyze {

/// Attached to every analysis report.
inline constexpr const char* kLinkCaveat =
    "Links mark convergent views between an MEP and a lobby; they are not evidence of influence.";

struct DiscoveredLink {
  std::string mep_id;
  std::string lobby_id;
  double score = 0;
  std::optional<vectors::MaxMatch> provenance;

  bool operator==(const DiscoveredLink&) const = default;
};

/// Pairs scoring >= threshold, by descending score then (mep, lobby). Only
/// ss and ent matrices are accepted.
std::vector<DiscoveredLink> extract_links(const scorer::ScoreMatrix& scores, double threshold);

// ------------------------------------------------------------ debates

struct DebateRank {
  std::string debate_id;
  std::string title;
  std::size_t links = 0;
  int speech_count = 0;
  double rate = 0;  // links / speech_count
};

/// Links are credited to the debate of their matched MEP document. Links
/// whose document has no debate are skipped and reported in `warnings`.
/// With `lobby_filter`, only links of those lobbies count.
std::vector<DebateRank> debate_rank(const std::vector<DiscoveredLink>& links, const corpus::Corpus& corpus,
                                    const std::set<std::string>* lobby_filter = nullptr,
                                    std::vector<std::string>* warnings = nullptr);

// ------------------------------------------------------------ focus

enum class FocusCounting { distinct_meps, link_records };

struct FocusMatrix {
  std::vector<std::string> rows;     // lobby or cluster ids
  std::vector<std::string> columns;  // group ids
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> normalized;
};

/// f(l, p) = n(l, p) / m_p, and f_hat = f / max_p f(l, p) (zero rows stay
/// zero). n(l, p) counts distinct linked MEPs of group p, or every link
/// record under FocusCounting::link_records.
FocusMatrix focus_matrix(const std::vector<DiscoveredLink>& links, const std::vector<std::string>& lobbies,
                         const corpus::Corpus& corpus, const std::vector<corpus::PoliticalGroup>& groups,
                         FocusCounting counting = FocusCounting::distinct_meps);

struct ClusterAssignment {
  std::map<std::string, std::string> cluster_of;  // lobby -> cluster
  std::map<std::string, std::string> label;       // cluster -> label
};

/// Cluster rows: mean of the member lobbies' rows (raw and normalised).
/// Clusters are listed in id order; clusters without rows in `lobby_focus`
/// are skipped.
FocusMatrix cluster_focus(const FocusMatrix& lobby_focus, const ClusterAssignment& clusters);

/// Columns reordered by ascending ideology score of their group.
FocusMatrix order_columns_by_ideology(const FocusMatrix& m, const std::vector<corpus::PoliticalGroup>& groups,
                                      corpus::IdeologyDimension dim = corpus::IdeologyDimension::ideo);

/// sum_p w_p * score_p / sum_p w_p for aligned weights and scores; throws
/// degenerate when the weights sum to zero.
double weighted_ideology(const std::vector<double>& focus_row, const std::vector<double>& group_scores);

/// Group scores aligned to `columns`.
std::vector<double> group_scores(const std::vector<std::string>& columns,
                                 const std::vector<corpus::PoliticalGroup>& groups, corpus::IdeologyDimension dim);

// ------------------------------------------------------------ clustering

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
  double inertia = 0;
  int iterations = 0;
};

/// k-means++ seeding from a seeded mt19937_64, then Lloyd iterations until
/// every centroid moves less than `tolerance` or `max_iterations` is hit.
/// Ties go to the lowest centroid index. Throws precondition when n < k.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                    int max_iterations = 300, double tolerance = 1e-6);

/// Clusters lobbies by their vectors; labels come from `labels` when given,
/// otherwise "cluster-<i>".
ClusterAssignment cluster_lobbies(const std::vector<std::string>& lobby_ids,
                                  const std::vector<std::vector<double>>& vectors, std::size_t k,
                                  std::uint64_t seed, const std::map<std::string, std::string>& labels = {});

// ------------------------------------------------------------ PCA

struct PcaResult {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // rows, orthonormal
  std::vector<double> explained_variance;       // non-increasing
  double total_variance = 0;
  std::vector<std::vector<double>> projections;  // one row per input row
};

/// Covariance eigendecomposition of mean-centred rows. Each component is
/// signed so its largest-magnitude coordinate is positive.
PcaResult pca(const std::vector<std::vector<double>>& rows, std::size_t n_components);

// ------------------------------------------------------------ correlation

struct SpearmanResult {
  double rho = 0;
  double p_value = 1;
  std::string p_method;  // "t-approximation", "exact-permutation", "monte-carlo-permutation"
};

/// Average ranks (1-based, ties averaged).
std::vector<double> average_ranks(const std::vector<double>& x);

/// Rank correlation with a two-sided p-value: t approximation for n >= 20,
/// exact permutation for n <= 8, otherwise 1e5 seeded random permutations.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed = 0);

struct CorrelationRow {
  std::size_t component = 0;
  corpus::IdeologyDimension dimension = corpus::IdeologyDimension::ideo;
  SpearmanResult result;
  bool significant = false;  // p < 0.0001
};

/// Spearman correlation of every PCA coordinate with every ideology
/// dimension of the rows' weighted ideology.
std::vector<CorrelationRow> correlation_table(const FocusMatrix& focus, const PcaResult& pca,
                                              const std::vector<corpus::PoliticalGroup>& groups,
                                              std::uint64_t seed = 0);

// ------------------------------------------------------------ inspection

/// Both texts with shared non-stopword vocabulary marked, the cosine and,
/// when given, the NLI verdict.
std::string inspect_match(const DiscoveredLink& link, const corpus::Corpus& corpus,
                          const std::optional<providers::NliTriple>& nli = std::nullopt);

}  // namespace lobbylink::analyze

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lobbylink/textprep.hpp"

namespace lobbylink::classify {

double sigmoid(double z);

/// A term and its signed weight, as listed by the top-terms queries.
struct WeightedTerm {
  std::string term;
  double weight = 0;

  bool operator==(const WeightedTerm&) const = default;
};

/// Sorts by descending weight, ties by term, and keeps the first k. Throws
/// invalid_argument when k exceeds the number of terms.
std::vector<WeightedTerm> top_k(std::vector<WeightedTerm> terms, std::size_t k);

// ------------------------------------------------------------ position papers

/// Weak label: the URL contains "position", case-insensitively.
bool weak_position_label(std::string_view url);

struct PositionExample {
  std::string text;
  std::string url;
};

struct PositionTrainingOptions {
  int iterations = 200;
  double step = 0.5;
  double l2 = 1e-4;
  double threshold = 0.5;
  int min_df = 2;
};

/// L2-regularised logistic regression over TF-IDF unigram features.
class PositionPaperModel {
 public:
  const textprep::TfidfModel& tfidf() const { return tfidf_; }
  const std::vector<double>& weights() const { return weights_; }  // one per vocabulary term
  double bias() const { return bias_; }
  double threshold() const { return threshold_; }

  double probability(std::string_view text) const;
  bool is_position_paper(std::string_view text) const { return probability(text) >= threshold_; }

  std::vector<WeightedTerm> top_terms(std::size_t k) const;

  void save(std::ostream& out) const;
  static PositionPaperModel load(std::istream& in);

 private:
  friend PositionPaperModel train_position_classifier(const std::vector<PositionExample>&,
                                                      const PositionTrainingOptions&);
  textprep::TfidfModel tfidf_;
  std::vector<double> weights_;
  double bias_ = 0;
  double threshold_ = 0.5;
};

/// Full-batch gradient descent on the weakly labelled examples; throws
/// precondition when only one label occurs.
PositionPaperModel train_position_classifier(const std::vector<PositionExample>& docs,
                                             const PositionTrainingOptions& options = {});

// ------------------------------------------------------------ authorship

struct AuthorshipConfig {
  std::uint32_t bucket_count = 1u << 20;
  std::size_t embed_dim = 64;
  int epochs = 10;
  double lr = 0.2;
  int max_ngram = 2;
  std::uint64_t seed = 0;
};

struct LabeledSentence {
  std::string lobby_id;
  std::string text;
};

/// Hashed bag of n-grams, averaged through a shared embedding table and fed
/// to one logistic head per lobby.
class AuthorshipModel {
 public:
  const AuthorshipConfig& config() const { return config_; }
  const std::vector<std::string>& lobby_ids() const { return lobby_ids_; }

  /// P(l | text) for every lobby; heads are independent, so the values need
  /// not sum to 1.
  std::map<std::string, double> predict(std::string_view text) const;
  /// Same as predict(text).at(lobby) without computing the other heads.
  double probability(std::string_view lobby_id, std::string_view text) const;

  /// Training n-grams ranked by their contribution to the lobby's logit.
  std::vector<WeightedTerm> top_terms(std::string_view lobby_id, std::size_t k) const;

  /// Row of the shared table; rows never touched by training keep their
  /// seeded initial value.
  std::vector<double> embedding_row(std::uint32_t bucket) const;

  void save(std::ostream& out) const;
  static AuthorshipModel load(std::istream& in);

  /// Builds a model from explicit parts (hand-constructed heads in tests).
  static AuthorshipModel from_parts(AuthorshipConfig config, std::vector<std::string> lobby_ids,
                                    std::vector<std::vector<double>> head_weights, std::vector<double> head_bias);

 private:
  friend AuthorshipModel train_authorship(const std::vector<LabeledSentence>&, const AuthorshipConfig&);

  std::vector<double> hidden(std::string_view text) const;
  std::size_t head_index(std::string_view lobby_id) const;

  AuthorshipConfig config_;
  std::vector<std::string> lobby_ids_;  // sorted
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  std::unordered_map<std::uint32_t, std::vector<double>> rows_;  // trained rows only
  std::vector<std::string> vocabulary_;                           // sorted training n-grams
};

/// Hash bucket of one n-gram.
std::uint32_t authorship_bucket(std::string_view gram, const AuthorshipConfig& config);
/// Seeded initial value of a table row: uniform in [-1/dim, 1/dim].
std::vector<double> initial_row(std::uint32_t bucket, const AuthorshipConfig& config);

/// Deterministic training with the one-vs-all logistic loss: per-sentence
/// updates, visiting sentences each epoch in an order derived from their
/// content and the seed.
/// Throws precondition when fewer than two lobbies are present.
AuthorshipModel train_authorship(const std::vector<LabeledSentence>& sentences, const AuthorshipConfig& config = {});

/// Deterministic 80/20 split keyed on a hash of (lobby, sentence index).
std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> split_train_test(
    const std::vector<LabeledSentence>& sentences, double test_fraction = 0.2, std::uint64_t seed = 0);

}  // namespace lobbylink::classify

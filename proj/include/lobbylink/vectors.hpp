#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lobbylink::vectors {

inline constexpr double kUnitTolerance = 1e-6;
inline constexpr std::size_t kDefaultDim = 384;
inline constexpr std::size_t kDefaultMaxTokens = 256;

/// Unit-norm dense vector. Construction validates |norm - 1| <= 1e-6.
class Embedding {
 public:
  /// Scales `raw` to unit norm; throws degenerate for an all-zero vector.
  static Embedding normalize(std::vector<double> raw);
  /// Wraps values that are already unit norm; throws invariant_violation
  /// otherwise.
  static Embedding from_unit(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double dot(const Embedding& other) const;

  bool operator==(const Embedding&) const = default;

 private:
  explicit Embedding(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

/// Row-major matrix of unit rows keyed by unique document ids.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dim = kDefaultDim);

  void add(std::string id, const Embedding& e, bool truncated = false);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t dim() const { return dim_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const double* row(std::size_t r) const { return data_.data() + r * dim_; }
  std::span<const double> row_span(std::size_t r) const { return {row(r), dim_}; }
  const std::vector<double>& data() const { return data_; }
  bool truncated(std::size_t r) const { return truncated_[r] != 0; }
  std::optional<std::size_t> find(std::string_view id) const;

  /// Rows for `ids` in the given order; unknown ids throw dangling_reference.
  VectorIndex subset(const std::vector<std::string>& ids) const;

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<double> data_;
  std::vector<std::uint8_t> truncated_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// The maximising (left, right) pair and its dot product.
struct MaxMatch {
  double score = 0.0;
  std::string left_doc;
  std::string right_doc;
  bool truncated_input = false;  // either document was cut to max_tokens

  bool operator==(const MaxMatch&) const = default;
};

/// Total order used everywhere a best pair is chosen: higher score first,
/// then lexicographically smaller (left_doc, right_doc).
bool ranks_before(const MaxMatch& a, const MaxMatch& b);

struct SearchOptions {
  std::size_t block = 64;
  unsigned workers = 1;
};

/// Exact maximum over all n_left x n_right pairs, computed block by block.
MaxMatch max_inner_product(const VectorIndex& left, const VectorIndex& right, SearchOptions opt = {});

using PairPredicate = std::function<bool(const std::string& left_doc, const std::string& right_doc)>;

/// Maximum over admissible pairs only; nullopt when none is admissible.
std::optional<MaxMatch> max_inner_product_filtered(const VectorIndex& left, const VectorIndex& right,
                                                   const PairPredicate& admissible, SearchOptions opt = {});

/// The k best pairs in ranks_before order (all pairs when k exceeds them).
std::vector<MaxMatch> top_pairs(const VectorIndex& left, const VectorIndex& right, std::size_t k,
                                SearchOptions opt = {});

/// Number of pairs whose dot product is >= threshold.
std::size_t count_pairs_at_least(const VectorIndex& left, const VectorIndex& right, double threshold,
                                 SearchOptions opt = {});

// ------------------------------------------------------------ embedding

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(std::string_view text) = 0;
  virtual std::size_t dim() const = 0;
  /// Short identifier recorded in vector stores and run manifests.
  virtual std::string tag() const = 0;
};

/// Deterministic stand-in encoder: unigrams and within-sentence bigrams are
/// feature-hashed into d signed buckets with a seeded hash, counted and
/// L2-normalised.
Embedding reference_embed(std::string_view text, std::size_t d = kDefaultDim, std::uint64_t seed = 0);

class ReferenceEmbedder final : public EmbeddingProvider {
 public:
  explicit ReferenceEmbedder(std::size_t d = kDefaultDim, std::uint64_t seed = 0) : d_(d), seed_(seed) {}
  Embedding embed(std::string_view text) override { return reference_embed(text, d_, seed_); }
  std::size_t dim() const override { return d_; }
  std::string tag() const override;

 private:
  std::size_t d_;
  std::uint64_t seed_;
};

struct PooledEmbedding {
  Embedding embedding;
  bool pooled = false;      // sentence-sum branch taken
  bool truncated = false;   // some sentence exceeded max_tokens
  std::size_t sentence_count = 1;
};

/// Texts of at most max_tokens tokens are embedded directly; longer texts are
/// split into sentences whose embeddings are summed and renormalised.
PooledEmbedding pool_long_text(std::string_view text, EmbeddingProvider& provider,
                               std::size_t max_tokens = kDefaultMaxTokens);

// ------------------------------------------------------------ store file

enum class StoreFormat { text, binary };

struct VectorStore {
  std::string provider_tag;
  VectorIndex index;
};

void save_store(const std::filesystem::path& path, const VectorIndex& index, const std::string& provider_tag,
                StoreFormat format);
VectorStore load_store(const std::filesystem::path& path);

}  // namespace lobbylink::vectors

#include <cmath>

#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/simd/kernels.hpp"
#include "lobbylink/textprep.hpp"
#include "lobbylink/vectors.hpp"

namespace lobbylink::vectors {
namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Embedding Embedding::normalize(std::vector<double> raw) {
  const double n = l2_norm(raw);
  if (!(n > 1e-12) || !std::isfinite(n)) throw Error(ErrorKind::degenerate, "degenerate embedding: zero vector");
  for (double& x : raw) x /= n;
  return Embedding(std::move(raw));
}

Embedding Embedding::from_unit(std::vector<double> values) {
  const double n = l2_norm(values);
  if (!(std::abs(n - 1.0) <= kUnitTolerance))
    throw Error(ErrorKind::invariant_violation, "embedding norm " + std::to_string(n) + " is not 1");
  return Embedding(std::move(values));
}

double Embedding::dot(const Embedding& other) const {
  if (other.dim() != dim()) throw Error(ErrorKind::invalid_argument, "dimension mismatch in dot product");
  return simd::active().dot(values_.data(), other.values_.data(), values_.size());
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::invalid_argument, "vector dimension must be positive");
}

void VectorIndex::add(std::string id, const Embedding& e, bool truncated) {
  if (e.dim() != dim_)
    throw Error(ErrorKind::invalid_argument, "row '" + id + "' has dimension " + std::to_string(e.dim()) +
                                                 ", index expects " + std::to_string(dim_));
  if (!index_.emplace(id, ids_.size()).second) throw Error(ErrorKind::duplicate_id, "duplicate vector id '" + id + "'");
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), e.values().begin(), e.values().end());
  truncated_.push_back(truncated ? 1 : 0);
}

std::optional<std::size_t> VectorIndex::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VectorIndex VectorIndex::subset(const std::vector<std::string>& ids) const {
  VectorIndex out(dim_);
  for (const auto& id : ids) {
    auto r = find(id);
    if (!r) throw Error(ErrorKind::dangling_reference, "no vector for document '" + id + "'");
    out.index_.emplace(id, out.ids_.size());
    out.ids_.push_back(id);
    out.data_.insert(out.data_.end(), row(*r), row(*r) + dim_);
    out.truncated_.push_back(truncated_[*r]);
  }
  if (out.index_.size() != out.ids_.size()) throw Error(ErrorKind::duplicate_id, "subset repeats an id");
  return out;
}

Embedding reference_embed(std::string_view text, std::size_t d, std::uint64_t seed) {
  if (d < 8) throw Error(ErrorKind::invalid_argument, "reference embedder needs d >= 8");
  std::vector<double> acc(d, 0.0);
  std::size_t features = 0;
  for (const auto& sentence : textprep::split_sentences(text)) {
    for (const auto& gram : textprep::ngrams(textprep::tokenize(sentence), 2)) {
      const std::uint64_t h = seeded_hash(gram, seed);
      acc[h % d] += (h >> 63) ? -1.0 : 1.0;
      ++features;
    }
  }
  if (features == 0) throw Error(ErrorKind::invalid_argument, "reference embedder: text has no tokens");
  return Embedding::normalize(std::move(acc));
}

std::string ReferenceEmbedder::tag() const {
  return "reference:d=" + std::to_string(d_) + ":seed=" + std::to_string(seed_);
}

PooledEmbedding pool_long_text(std::string_view text, EmbeddingProvider& provider, std::size_t max_tokens) {
  if (max_tokens == 0) throw Error(ErrorKind::invalid_argument, "max_tokens must be positive");
  const auto spans = textprep::tokenize_with_spans(text);
  if (spans.empty()) throw Error(ErrorKind::invalid_argument, "cannot embed empty text");
  if (spans.size() <= max_tokens) return {provider.embed(text), false, false, 1};

  std::vector<double> sum(provider.dim(), 0.0);
  bool truncated = false;
  std::size_t used = 0;
  for (const auto& sentence : textprep::split_sentences(text)) {
    const auto sentence_spans = textprep::tokenize_with_spans(sentence);
    if (sentence_spans.empty()) continue;
    std::string_view piece(sentence);
    if (sentence_spans.size() > max_tokens) {
      piece = piece.substr(0, sentence_spans[max_tokens - 1].end);
      truncated = true;
    }
    const Embedding e = provider.embed(piece);
    if (e.dim() != sum.size()) throw Error(ErrorKind::invalid_argument, "provider returned the wrong dimension");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += e.values()[i];
    ++used;
  }
  return {Embedding::normalize(std::move(sum)), true, truncated, used};
}

}  // namespace lobbylink::vectors

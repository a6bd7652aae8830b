#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "lobbylink/classify.hpp"
#include "lobbylink/error.hpp"

namespace lobbylink::classify {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<WeightedTerm> top_k(std::vector<WeightedTerm> terms, std::size_t k) {
  if (k > terms.size())
    throw Error(ErrorKind::invalid_argument,
                "k = " + std::to_string(k) + " exceeds the vocabulary size " + std::to_string(terms.size()));
  auto cmp = [](const WeightedTerm& a, const WeightedTerm& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.term < b.term;
  };
  std::partial_sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(k), terms.end(), cmp);
  terms.resize(k);
  return terms;
}

bool weak_position_label(std::string_view url) {
  std::string lower(url);
  for (char& c : lower)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return lower.find("position") != std::string::npos;
}

double PositionPaperModel::probability(std::string_view text) const {
  if (!tfidf_.fitted()) throw Error(ErrorKind::not_fitted, "position classifier is not trained");
  const auto x = tfidf_.transform(textprep::tokenize(text));
  return sigmoid(x.dot(weights_) + bias_);
}

std::vector<WeightedTerm> PositionPaperModel::top_terms(std::size_t k) const {
  std::vector<WeightedTerm> all;
  all.reserve(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i)
    all.push_back({tfidf_.term(static_cast<std::uint32_t>(i)), weights_[i]});
  return top_k(std::move(all), k);
}

PositionPaperModel train_position_classifier(const std::vector<PositionExample>& docs,
                                             const PositionTrainingOptions& options) {
  std::vector<textprep::TokenSequence> tokens;
  std::vector<double> y;
  std::size_t positives = 0;
  for (const auto& d : docs) {
    tokens.push_back(textprep::tokenize(d.text));
    const bool label = weak_position_label(d.url);
    positives += label;
    y.push_back(label ? 1.0 : 0.0);
  }
  if (positives == 0 || positives == docs.size())
    throw Error(ErrorKind::precondition, "position classifier needs both weak labels; got " +
                                             std::to_string(positives) + " positive of " +
                                             std::to_string(docs.size()));
  if (!(options.threshold > 0.0 && options.threshold < 1.0))
    throw Error(ErrorKind::invalid_argument, "decision threshold must lie in (0, 1)");

  PositionPaperModel m;
  m.tfidf_ = textprep::TfidfModel::fit(tokens, options.min_df);
  m.threshold_ = options.threshold;
  std::vector<textprep::SparseVector> x;
  x.reserve(tokens.size());
  for (const auto& t : tokens) x.push_back(m.tfidf_.transform(t));

  const std::size_t v = m.tfidf_.vocabulary_size();
  const double n = static_cast<double>(docs.size());
  m.weights_.assign(v, 0.0);
  std::vector<double> grad(v);
  for (int it = 0; it < options.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = sigmoid(x[i].dot(m.weights_) + m.bias_) - y[i];
      for (std::size_t k = 0; k < x[i].size(); ++k) grad[x[i].indices[k]] += r * x[i].values[k];
      grad_b += r;
    }
    for (std::size_t j = 0; j < v; ++j) m.weights_[j] -= options.step * (grad[j] / n + options.l2 * m.weights_[j]);
    m.bias_ -= options.step * grad_b / n;
  }
  return m;
}

void PositionPaperModel::save(std::ostream& out) const {
  char buf[64];
  out << "#lobbylink-position v1 terms=" << weights_.size();
  std::snprintf(buf, sizeof buf, " bias=%.17g", bias_);
  out << buf;
  std::snprintf(buf, sizeof buf, " threshold=%.17g", threshold_);
  out << buf << '\n';
  for (double w : weights_) {
    std::snprintf(buf, sizeof buf, "%.17g", w);
    out << buf << '\n';
  }
  tfidf_.save(out);
}

PositionPaperModel PositionPaperModel::load(std::istream& in) {
  std::string line;
  PositionPaperModel m;
  std::size_t n = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "#lobbylink-position v1 terms=%zu bias=%lf threshold=%lf", &n, &m.bias_,
                  &m.threshold_) != 3)
    throw Error(ErrorKind::parse, "position model: malformed header");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(ErrorKind::parse, "position model: truncated weights");
    try {
      m.weights_.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "position model: bad weight on line " + std::to_string(i + 2));
    }
  }
  m.tfidf_ = textprep::TfidfModel::load(in);
  if (m.tfidf_.vocabulary_size() != n) throw Error(ErrorKind::parse, "position model: vocabulary size mismatch");
  return m;
}

}  // namespace lobbylink::classify

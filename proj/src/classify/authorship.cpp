#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "lobbylink/classify.hpp"
#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"

namespace lobbylink::classify {
namespace {

std::vector<std::string> grams_of(std::string_view text, int max_ngram) {
  return textprep::ngrams(textprep::tokenize(text), max_ngram);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_config(const AuthorshipConfig& c) {
  if (c.bucket_count == 0 || c.embed_dim == 0 || c.epochs < 0 || !(c.lr > 0) || c.max_ngram < 1)
    throw Error(ErrorKind::invalid_argument, "invalid authorship configuration");
}

}  // namespace

std::uint32_t authorship_bucket(std::string_view gram, const AuthorshipConfig& config) {
  return static_cast<std::uint32_t>(seeded_hash(gram, config.seed) % config.bucket_count);
}

std::vector<double> initial_row(std::uint32_t bucket, const AuthorshipConfig& config) {
  const double scale = 1.0 / static_cast<double>(config.embed_dim);
  std::uint64_t state = mix64(mix64(config.seed ^ 0x5eed5eed5eed5eedULL) + bucket);
  std::vector<double> row(config.embed_dim);
  for (auto& x : row) {
    state = mix64(state);
    x = (2.0 * unit_interval(state) - 1.0) * scale;
  }
  return row;
}

std::vector<double> AuthorshipModel::embedding_row(std::uint32_t bucket) const {
  auto it = rows_.find(bucket);
  return it != rows_.end() ? it->second : initial_row(bucket, config_);
}

std::vector<double> AuthorshipModel::hidden(std::string_view text) const {
  std::vector<double> h(config_.embed_dim, 0.0);
  const auto grams = grams_of(text, config_.max_ngram);
  if (grams.empty()) return h;
  for (const auto& g : grams) {
    const auto row = embedding_row(authorship_bucket(g, config_));
    for (std::size_t j = 0; j < h.size(); ++j) h[j] += row[j];
  }
  for (double& x : h) x /= static_cast<double>(grams.size());
  return h;
}

std::size_t AuthorshipModel::head_index(std::string_view lobby_id) const {
  auto it = std::lower_bound(lobby_ids_.begin(), lobby_ids_.end(), lobby_id);
  if (it == lobby_ids_.end() || *it != lobby_id)
    throw Error(ErrorKind::dangling_reference, "no authorship head for lobby '" + std::string(lobby_id) + "'");
  return static_cast<std::size_t>(it - lobby_ids_.begin());
}

std::map<std::string, double> AuthorshipModel::predict(std::string_view text) const {
  const auto h = hidden(text);
  std::map<std::string, double> out;
  for (std::size_t l = 0; l < lobby_ids_.size(); ++l) out[lobby_ids_[l]] = sigmoid(dot(weights_[l], h) + bias_[l]);
  return out;
}

double AuthorshipModel::probability(std::string_view lobby_id, std::string_view text) const {
  const std::size_t l = head_index(lobby_id);
  return sigmoid(dot(weights_[l], hidden(text)) + bias_[l]);
}

std::vector<WeightedTerm> AuthorshipModel::top_terms(std::string_view lobby_id, std::size_t k) const {
  const std::size_t l = head_index(lobby_id);
  std::vector<WeightedTerm> all;
  all.reserve(vocabulary_.size());
  for (const auto& term : vocabulary_)
    all.push_back({term, dot(weights_[l], embedding_row(authorship_bucket(term, config_)))});
  return top_k(std::move(all), k);
}

AuthorshipModel AuthorshipModel::from_parts(AuthorshipConfig config, std::vector<std::string> lobby_ids,
                                            std::vector<std::vector<double>> head_weights,
                                            std::vector<double> head_bias) {
  check_config(config);
  if (lobby_ids.size() != head_weights.size() || lobby_ids.size() != head_bias.size())
    throw Error(ErrorKind::invalid_argument, "one weight vector and bias per lobby expected");
  std::vector<std::size_t> order(lobby_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lobby_ids[a] < lobby_ids[b]; });
  AuthorshipModel m;
  m.config_ = config;
  for (auto i : order) {
    if (head_weights[i].size() != config.embed_dim)
      throw Error(ErrorKind::invalid_argument, "head weight vector has the wrong dimension");
    if (!m.lobby_ids_.empty() && m.lobby_ids_.back() == lobby_ids[i])
      throw Error(ErrorKind::duplicate_id, "duplicate lobby '" + lobby_ids[i] + "'");
    m.lobby_ids_.push_back(lobby_ids[i]);
    m.weights_.push_back(head_weights[i]);
    m.bias_.push_back(head_bias[i]);
  }
  return m;
}

AuthorshipModel train_authorship(const std::vector<LabeledSentence>& sentences, const AuthorshipConfig& config) {
  check_config(config);
  std::set<std::string> lobby_set;
  for (const auto& s : sentences) lobby_set.insert(s.lobby_id);
  if (lobby_set.size() < 2)
    throw Error(ErrorKind::precondition, "authorship training needs at least two lobbies, got " +
                                             std::to_string(lobby_set.size()));

  AuthorshipModel m;
  m.config_ = config;
  m.lobby_ids_.assign(lobby_set.begin(), lobby_set.end());
  const std::size_t L = m.lobby_ids_.size(), D = config.embed_dim;
  m.weights_.assign(L, std::vector<double>(D, 0.0));
  m.bias_.assign(L, 0.0);

  // Compact the touched buckets into local rows.
  std::map<std::uint32_t, std::size_t> local;
  std::set<std::string> vocab;
  std::vector<std::vector<std::size_t>> sent_rows(sentences.size());
  std::vector<std::size_t> label(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    label[i] = m.head_index(sentences[i].lobby_id);
    for (auto& g : grams_of(sentences[i].text, config.max_ngram)) {
      const auto b = authorship_bucket(g, config);
      auto it = local.emplace(b, local.size()).first;
      sent_rows[i].push_back(it->second);
      vocab.insert(std::move(g));
    }
  }
  std::vector<std::vector<double>> table(local.size());
  for (const auto& [bucket, r] : local) table[r] = initial_row(bucket, config);

  // Per-sentence updates in a canonical order: each epoch visits sentences
  // sorted by a seeded hash of (epoch, lobby, text), so the result does not
  // depend on the order the caller supplied them in.
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(sentences.size());
  std::vector<double> h(D), dh(D);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < sentences.size(); ++i)
      keyed[i] = {seeded_hash(sentences[i].lobby_id + "\x1f" + sentences[i].text,
                              mix64(config.seed + static_cast<std::uint64_t>(epoch))),
                  i};
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      const auto& x = sentences[a.second];
      const auto& y = sentences[b.second];
      return x.lobby_id != y.lobby_id ? x.lobby_id < y.lobby_id : x.text < y.text;
    });

    for (const auto& [key, i] : keyed) {
      const auto& rows = sent_rows[i];
      std::fill(h.begin(), h.end(), 0.0);
      for (auto r : rows)
        for (std::size_t j = 0; j < D; ++j) h[j] += table[r][j];
      if (!rows.empty())
        for (double& x : h) x /= static_cast<double>(rows.size());

      std::fill(dh.begin(), dh.end(), 0.0);
      for (std::size_t l = 0; l < L; ++l) {
        const double g = sigmoid(dot(m.weights_[l], h) + m.bias_[l]) - (label[i] == l ? 1.0 : 0.0);
        for (std::size_t j = 0; j < D; ++j) {
          dh[j] += g * m.weights_[l][j];
          m.weights_[l][j] -= config.lr * g * h[j];
        }
        m.bias_[l] -= config.lr * g;
      }
      if (rows.empty()) continue;
      const double share = config.lr / static_cast<double>(rows.size());
      for (auto r : rows)
        for (std::size_t j = 0; j < D; ++j) table[r][j] -= share * dh[j];
    }
  }

  for (const auto& [bucket, r] : local) m.rows_.emplace(bucket, std::move(table[r]));
  m.vocabulary_.assign(vocab.begin(), vocab.end());
  return m;
}

std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> split_train_test(
    const std::vector<LabeledSentence>& sentences, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::invalid_argument, "test fraction must lie in [0, 1)");
  std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> out;
  std::map<std::string, std::size_t> seen;
  for (const auto& s : sentences) {
    const std::size_t k = seen[s.lobby_id]++;
    const double u = unit_interval(seeded_hash(s.lobby_id + "\x1f" + std::to_string(k), seed));
    (u < test_fraction ? out.second : out.first).push_back(s);
  }
  return out;
}

// File layout: a header, one "head" line per lobby, one "row" line per
// trained table row (sorted by bucket), one "term" line per vocabulary entry.

void AuthorshipModel::save(std::ostream& out) const {
  char buf[40];
  auto reals = [&](const std::vector<double>& v) {
    for (double x : v) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << '\t' << buf;
    }
  };
  out << "#lobbylink-authorship v1 buckets=" << config_.bucket_count << " dim=" << config_.embed_dim
      << " seed=" << config_.seed << " max_ngram=" << config_.max_ngram << " epochs=" << config_.epochs;
  std::snprintf(buf, sizeof buf, "%.17g", config_.lr);
  out << " lr=" << buf << '\n';
  for (std::size_t l = 0; l < lobby_ids_.size(); ++l) {
    out << "head\t" << lobby_ids_[l];
    reals({bias_[l]});
    reals(weights_[l]);
    out << '\n';
  }
  std::vector<std::uint32_t> buckets;
  for (const auto& [b, row] : rows_) buckets.push_back(b);
  std::sort(buckets.begin(), buckets.end());
  for (auto b : buckets) {
    out << "row\t" << b;
    reals(rows_.at(b));
    out << '\n';
  }
  for (const auto& t : vocabulary_) out << "term\t" << t << '\n';
}

AuthorshipModel AuthorshipModel::load(std::istream& in) {
  std::string line;
  AuthorshipModel m;
  auto& c = m.config_;
  unsigned long long seed = 0;
  if (!std::getline(in, line) ||
      std::sscanf(line.c_str(), "#lobbylink-authorship v1 buckets=%u dim=%zu seed=%llu max_ngram=%d epochs=%d lr=%lf",
                  &c.bucket_count, &c.embed_dim, &seed, &c.max_ngram, &c.epochs, &c.lr) != 6)
    throw Error(ErrorKind::parse, "authorship model: malformed header");
  c.seed = seed;
  check_config(c);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, '\t');) f.push_back(part);
    auto fail = [&] { throw Error(ErrorKind::parse, "authorship model: malformed line " + std::to_string(lineno)); };
    try {
      if (f[0] == "head") {
        if (f.size() != c.embed_dim + 3) fail();
        if (!m.lobby_ids_.empty() && !(m.lobby_ids_.back() < f[1])) fail();
        m.lobby_ids_.push_back(f[1]);
        m.bias_.push_back(std::stod(f[2]));
        std::vector<double> w;
        for (std::size_t j = 3; j < f.size(); ++j) w.push_back(std::stod(f[j]));
        m.weights_.push_back(std::move(w));
      } else if (f[0] == "row") {
        if (f.size() != c.embed_dim + 2) fail();
        std::vector<double> r;
        for (std::size_t j = 2; j < f.size(); ++j) r.push_back(std::stod(f[j]));
        m.rows_.emplace(static_cast<std::uint32_t>(std::stoul(f[1])), std::move(r));
      } else if (f[0] == "term" && f.size() == 2) {
        m.vocabulary_.push_back(f[1]);
      } else {
        fail();
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail();
    }
  }
  if (m.lobby_ids_.size() < 2) throw Error(ErrorKind::parse, "authorship model: fewer than two heads");
  return m;
}

}  // namespace lobbylink::classify

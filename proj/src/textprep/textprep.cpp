#include "lobbylink/textprep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "lobbylink/error.hpp"
#include "unicode.hpp"

namespace lobbylink::textprep {

using detail::decode_utf8;

std::vector<TokenSpan> tokenize_with_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  std::string current;
  std::size_t begin = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const char32_t cp = decode_utf8(text, pos);
    if (detail::is_alnum(cp)) {
      if (current.empty()) begin = at;
      detail::append_utf8(current, detail::to_lower(cp));
    } else if (!current.empty()) {
      out.push_back({std::move(current), begin, at});
      current.clear();
    }
  }
  if (!current.empty()) out.push_back({std::move(current), begin, text.size()});
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  for (auto& span : tokenize_with_spans(text)) tokens.push_back(std::move(span.token));
  return tokens;
}

std::string fold_for_matching(std::string_view text) {
  std::string out;
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    if (detail::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (!detail::is_alnum(cp)) continue;  // punctuation is deleted, not spaced
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    const char32_t lower = detail::to_lower(cp);
    if (auto base = detail::strip_diacritic(lower); !base.empty())
      out.append(base);
    else
      detail::append_utf8(out, lower);
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "e.g.", "i.e.", "etc.", "mr.", "mrs.", "ms.", "dr.", "prof.", "no.", "nr.", "art.", "vs.",
    "cf.", "st.", "jr.", "sr.", "inc.", "ltd.", "co.", "fig.", "para.", "approx.", "al.", "p."};

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

bool protected_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !ascii_space(text[start - 1])) --start;
  std::string word;
  for (std::size_t i = start; i <= dot; ++i) {
    const char c = text[i];
    if (word.empty() && (c == '(' || c == '"' || c == '\'')) continue;
    word.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c + 32 : c));
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const auto piece = trim(text.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < text.size() && (text[end] == '"' || text[end] == '\'' || text[end] == ')' ||
                                 text[end] == ']'))
      ++end;
    std::size_t next = end;
    while (next < text.size() && ascii_space(text[next])) ++next;
    if (next == end || next >= text.size()) continue;
    std::size_t probe = next;
    const char32_t cp = decode_utf8(text, probe);
    const bool opens = detail::is_upper(cp) || (cp >= '0' && cp <= '9');
    if (!opens) continue;
    if (c == '.' && protected_abbreviation(text, i)) continue;
    emit(end);
    start = next;
    i = next - 1;
  }
  emit(text.size());
  return out;
}

std::vector<std::string> ngrams(const TokenSequence& tokens, int max_n) {
  if (max_n < 1) throw Error(ErrorKind::invalid_argument, "ngrams: max_n must be >= 1");
  std::vector<std::string> out;
  for (int n = 1; n <= max_n; ++n) {
    if (tokens.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (int k = 1; k < n; ++k) {
        gram.append(kNgramSeparator);
        gram.append(tokens[i + k]);
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

double SparseVector::dot(const std::vector<double>& dense) const {
  double s = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) s += values[i] * dense[indices[i]];
  return s;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

TfidfModel TfidfModel::fit(const std::vector<TokenSequence>& corpus, int min_df) {
  if (corpus.empty()) throw Error(ErrorKind::precondition, "tfidf_fit: empty corpus");
  if (min_df < 1) throw Error(ErrorKind::invalid_argument, "tfidf_fit: min_df must be >= 1");
  std::map<std::string, std::uint32_t, std::less<>> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto term : seen) ++df[std::string(term)];
  }
  TfidfModel m;
  m.fitted_ = true;
  m.n_docs_ = corpus.size();
  m.min_df_ = min_df;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, count] : df) {
    if (count < static_cast<std::uint32_t>(min_df)) continue;
    m.index_.emplace(term, static_cast<std::uint32_t>(m.terms_.size()));
    m.terms_.push_back(term);
    m.df_.push_back(count);
    m.idf_.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  return m;
}

std::int64_t TfidfModel::index_of(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector TfidfModel::transform(const TokenSequence& tokens) const {
  if (!fitted_) throw Error(ErrorKind::not_fitted, "tfidf_transform called before fit");
  std::map<std::uint32_t, double> counts;
  for (const auto& t : tokens) {
    auto it = index_.find(t);
    if (it != index_.end()) counts[it->second] += 1.0;
  }
  SparseVector v;
  double sq = 0.0;
  for (const auto& [idx, c] : counts) {
    const double w = c * idf_[idx];
    v.indices.push_back(idx);
    v.values.push_back(w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& w : v.values) w *= inv;
  }
  return v;
}

void TfidfModel::save(std::ostream& out) const {
  if (!fitted_) throw Error(ErrorKind::not_fitted, "cannot save an unfitted tfidf model");
  out << "#lobbylink-tfidf v1 n_docs=" << n_docs_ << " min_df=" << min_df_ << '\n';
  char buf[64];
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", idf_[i]);
    out << terms_[i] << '\t' << df_[i] << '\t' << buf << '\n';
  }
}

TfidfModel TfidfModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#lobbylink-tfidf v1", 0) != 0)
    throw Error(ErrorKind::parse, "tfidf model: missing header");
  TfidfModel m;
  m.fitted_ = true;
  if (std::sscanf(line.c_str(), "#lobbylink-tfidf v1 n_docs=%zu min_df=%d", &m.n_docs_, &m.min_df_) != 2)
    throw Error(ErrorKind::parse, "tfidf model: malformed header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw Error(ErrorKind::parse, "tfidf model: malformed line " + std::to_string(lineno));
    std::string term = line.substr(0, t1);
    if (!m.terms_.empty() && !(m.terms_.back() < term))
      throw Error(ErrorKind::parse, "tfidf model: terms not sorted at line " + std::to_string(lineno));
    m.index_.emplace(term, static_cast<std::uint32_t>(m.terms_.size()));
    m.terms_.push_back(std::move(term));
    m.df_.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(t1 + 1, t2 - t1 - 1))));
    m.idf_.push_back(std::stod(line.substr(t2 + 1)));
  }
  return m;
}

}  // namespace lobbylink::textprep

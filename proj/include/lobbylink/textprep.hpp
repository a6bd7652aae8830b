#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lobbylink::textprep {

/// Ordered lowercase tokens; never contains an empty token.
using TokenSequence = std::vector<std::string>;

/// Separator joining the words of an n-gram. The tokenizer never emits it.
inline constexpr std::string_view kNgramSeparator = "\x1f";

struct TokenSpan {
  std::string token;
  std::size_t begin = 0;  // byte offset into the source text
  std::size_t end = 0;
};

/// Splits on runs of non-alphanumeric code points and lowercases. Letters
/// outside ASCII are kept; case folding covers Latin-1, Latin Extended-A,
/// Greek and Cyrillic.
TokenSequence tokenize(std::string_view text);
std::vector<TokenSpan> tokenize_with_spans(std::string_view text);

/// Case- and accent-folded text for fuzzy name comparison: lowercase,
/// diacritics mapped to their base letter, punctuation deleted, whitespace
/// collapsed to single spaces.
std::string fold_for_matching(std::string_view text);

/// Rule-based splitter: breaks after '.', '!' or '?' when followed by
/// whitespace and then an uppercase letter or digit. A '.' closing one of the
/// protected abbreviations ("e.g.", "Mr.", "No.", ...) never breaks.
std::vector<std::string> split_sentences(std::string_view text);

/// All contiguous n-grams for n = 1..max_n, ordered by n then position.
std::vector<std::string> ngrams(const TokenSequence& tokens, int max_n);

/// Sorted, strictly increasing indices with no stored zeros.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t size() const { return indices.size(); }
  double dot(const std::vector<double>& dense) const;
  double norm() const;
};

/// Smoothed TF-IDF: idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw term counts,
/// L2-normalised output.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(const std::vector<TokenSequence>& corpus, int min_df = 2);

  SparseVector transform(const TokenSequence& tokens) const;

  bool fitted() const { return fitted_; }
  std::size_t vocabulary_size() const { return terms_.size(); }
  std::size_t document_count() const { return n_docs_; }
  int min_df() const { return min_df_; }

  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::uint32_t index) const { return terms_.at(index); }
  /// Index of a term, or -1 when out of vocabulary.
  std::int64_t index_of(std::string_view term) const;
  std::uint32_t df(std::uint32_t index) const { return df_.at(index); }
  double idf(std::uint32_t index) const { return idf_.at(index); }

  /// Flat file: a header line, then "term<TAB>df<TAB>idf" per term.
  void save(std::ostream& out) const;
  static TfidfModel load(std::istream& in);

 private:
  bool fitted_ = false;
  std::size_t n_docs_ = 0;
  int min_df_ = 1;
  std::vector<std::string> terms_;  // sorted
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
};

}  // namespace lobbylink::textprep

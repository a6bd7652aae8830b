#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lobbylink/classify.hpp"
#include "lobbylink/corpus.hpp"
#include "lobbylink/providers.hpp"
#include "lobbylink/vectors.hpp"

namespace lobbylink::scorer {

enum class Method { random, prolificacy, nationality, class_, ss, ent };
const char* to_string(Method m);
Method parse_method(std::string_view name);

struct ScoreEntry {
  std::optional<double> score;                 // nullopt = ABSENT
  std::optional<vectors::MaxMatch> provenance;  // ss and ent
  std::string note;                            // ABSENT reason or exactness note

  bool absent() const { return !score.has_value(); }
  bool operator==(const ScoreEntry&) const = default;
};

/// Scores of one method over every (MEP, lobby) pair. Rows and columns are
/// kept in sorted id order, so the matrix does not depend on the order in
/// which entities were enumerated.
class ScoreMatrix {
 public:
  ScoreMatrix(Method method, std::vector<std::string> meps, std::vector<std::string> lobbies);

  Method method() const { return method_; }
  const std::vector<std::string>& meps() const { return meps_; }
  const std::vector<std::string>& lobbies() const { return lobbies_; }
  std::size_t rows() const { return meps_.size(); }
  std::size_t cols() const { return lobbies_.size(); }

  ScoreEntry& at(std::size_t i, std::size_t j) { return entries_[i * lobbies_.size() + j]; }
  const ScoreEntry& at(std::size_t i, std::size_t j) const { return entries_[i * lobbies_.size() + j]; }
  /// Throws dangling_reference for unknown ids.
  const ScoreEntry& at(std::string_view mep, std::string_view lobby) const;
  std::optional<std::size_t> mep_index(std::string_view id) const;
  std::optional<std::size_t> lobby_index(std::string_view id) const;

  bool operator==(const ScoreMatrix&) const = default;

 private:
  Method method_;
  std::vector<std::string> meps_;
  std::vector<std::string> lobbies_;
  std::vector<ScoreEntry> entries_;
};

/// Per-owner document vectors.
using OwnerVectors = std::map<std::string, vectors::VectorIndex, std::less<>>;

/// Splits a store of document vectors by owner, keeping only documents of
/// the given kinds. Owners without such documents get no entry. Throws
/// dangling_reference when a selected document has no vector.
OwnerVectors group_by_owner(const corpus::Corpus& corpus, const vectors::VectorIndex& store,
                            const std::vector<std::string>& owners, const std::set<corpus::DocKind>& kinds);

/// Uniform [0, 1) per pair from a seeded hash of the two ids.
ScoreMatrix score_random(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                         std::uint64_t seed);

ScoreMatrix score_prolificacy(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& mep_kinds,
                              const std::set<corpus::DocKind>& lobby_kinds);

/// 1 when country codes match, 0 otherwise, ABSENT when either is unknown.
ScoreMatrix score_nationality(const corpus::Corpus& corpus);

/// Mean authorship probability of the lobby over the MEP's documents.
ScoreMatrix score_class(const classify::AuthorshipModel& model, const corpus::Corpus& corpus,
                        const std::set<corpus::DocKind>& mep_kinds, unsigned workers = 1);

struct PairScoringOptions {
  vectors::SearchOptions search;  // blocking inside one (MEP, lobby) pair
  unsigned workers = 1;           // threads over MEP rows
};

/// Maximum inner product over the MEP's and the lobby's documents.
ScoreMatrix score_ss(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                     const OwnerVectors& mep_vectors, const OwnerVectors& lobby_vectors,
                     const PairScoringOptions& options = {});

/// NLI judgement for (lobby document, MEP document): the lobby document is
/// the premise and the MEP document the hypothesis.
using NliJudge = std::function<providers::NliTriple(const std::string& lobby_doc, const std::string& mep_doc)>;

struct EntOptions {
  std::size_t k = 10;
  PairScoringOptions pairs;
};

struct EntStats {
  std::size_t judged = 0;         // NLI judgements requested
  std::size_t top_rejected = 0;   // pairs whose best cosine match was inadmissible
  std::size_t absent_after_extension = 0;
};

/// Best cosine over admissible pairs (p_ent > p_con). Candidates are walked
/// in descending cosine order through the top k and then once more through
/// the top 2k; the first admissible one is the answer. When none of the 2k
/// is admissible the entry is ABSENT with an exactness note.
ScoreMatrix score_ent(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                      const OwnerVectors& mep_vectors, const OwnerVectors& lobby_vectors, const NliJudge& judge,
                      const EntOptions& options = {}, EntStats* stats = nullptr);

// ------------------------------------------------------------ score file

/// Header "#lobbylink-scores v1 method=M manifest=PATH", then one tab
/// separated line per pair: mep, lobby, method, score|ABSENT,
/// left_doc,right_doc|-, note|-.
void save_scores(const std::filesystem::path& path, const ScoreMatrix& m, const std::string& manifest_ref);
ScoreMatrix load_scores(const std::filesystem::path& path);

}  // namespace lobbylink::scorer

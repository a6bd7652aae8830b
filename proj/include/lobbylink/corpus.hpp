#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lobbylink::corpus {

enum class DocKind { speech, speech_summary, position_paper, paper_summary, amendment_summary, other };

const char* to_string(DocKind kind);
/// Accepts canonical names and the short aliases used on the command line
/// (speeches, speeches_summ, papers, papers_summ, amendments_summ).
DocKind parse_doc_kind(std::string_view name);

struct Document {
  std::string doc_id;
  std::string owner_id;
  DocKind kind = DocKind::other;
  std::string text;
  std::optional<std::string> debate_id;
  std::optional<std::string> source_url;
  std::optional<std::string> language;

  bool operator==(const Document&) const = default;
};

struct Mep {
  std::string mep_id;
  std::string name;
  std::string country;
  std::string group_id;

  bool operator==(const Mep&) const = default;
};

enum class LobbyCategory { trade_business, trade_union, ngo };

const char* to_string(LobbyCategory c);
LobbyCategory parse_lobby_category(std::string_view name);

struct Lobby {
  std::string lobby_id;
  std::string name;
  std::string country;  // empty when unknown
  LobbyCategory category = LobbyCategory::ngo;
  std::optional<std::string> acronym;
  std::optional<std::string> cluster_id;
  std::optional<std::string> goals_phrase;

  bool operator==(const Lobby&) const = default;
};

struct IdeologyScores {
  double ideo = 0, econ = 0, soc = 0, eu = 0;

  bool operator==(const IdeologyScores&) const = default;
};

enum class IdeologyDimension { ideo, econ, soc, eu };
double component(const IdeologyScores& s, IdeologyDimension d);
const char* to_string(IdeologyDimension d);

struct PoliticalGroup {
  std::string group_id;
  std::string name;
  IdeologyScores ideology;
  int member_count = 1;

  bool operator==(const PoliticalGroup&) const = default;
};

/// A national party's CHES scores and size, aggregated into its group.
struct Party {
  std::string party_id;
  std::string group_id;
  double size = 0;
  IdeologyScores scores;

  bool operator==(const Party&) const = default;
};

struct Debate {
  std::string debate_id;
  std::string title;
  int speech_count = 0;  // derived from the documents that cite the debate

  bool operator==(const Debate&) const = default;
};

struct TweetRecord {
  std::string author_id;
  std::string tweet_id;
  bool is_pure_retweet = false;
  std::optional<std::string> referenced_author_id;
  std::int64_t timestamp = 0;

  bool operator==(const TweetRecord&) const = default;
};

struct MeetingRecord {
  std::string mep_id;
  std::string lobby_name;

  bool operator==(const MeetingRecord&) const = default;
};

enum class LinkKind { retweet, meeting };
const char* to_string(LinkKind k);
LinkKind parse_link_kind(std::string_view name);

using MepLobbyPair = std::pair<std::string, std::string>;  // (mep_id, lobby_id)

struct ValidationLinkSet {
  LinkKind kind = LinkKind::retweet;
  std::set<MepLobbyPair> links;

  bool contains(const std::string& mep, const std::string& lobby) const {
    return links.count({mep, lobby}) > 0;
  }
  bool operator==(const ValidationLinkSet&) const = default;
};

struct EntitySet {
  std::vector<Mep> meps;
  std::vector<Lobby> lobbies;
  std::vector<Debate> debates;
};

struct GroupTable {
  std::vector<PoliticalGroup> groups;
  std::vector<Party> parties;
};

// --- JSONL ingestion. Every loader reports the 1-based line number of the
// first malformed record and rejects duplicate ids within the file.

std::vector<Document> load_documents(const std::filesystem::path& path);
EntitySet load_entities(const std::filesystem::path& path);
GroupTable load_groups(const std::filesystem::path& path);
std::vector<TweetRecord> load_tweets(const std::filesystem::path& path);
std::vector<MeetingRecord> load_meetings(const std::filesystem::path& path);
ValidationLinkSet load_links(const std::filesystem::path& path);

void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs);
void write_entities(const std::filesystem::path& path, const EntitySet& entities);
void write_groups(const std::filesystem::path& path, const GroupTable& groups);
void write_tweets(const std::filesystem::path& path, const std::vector<TweetRecord>& tweets);
void write_meetings(const std::filesystem::path& path, const std::vector<MeetingRecord>& meetings);
void write_links(const std::filesystem::path& path, const ValidationLinkSet& links);

/// Immutable, referentially checked view over one corpus directory.
class Corpus {
 public:
  Corpus(std::vector<Document> documents, EntitySet entities, GroupTable groups);

  /// Loads documents.jsonl, entities.jsonl and groups.jsonl from `dir`.
  static Corpus load_directory(const std::filesystem::path& dir);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Mep>& meps() const { return meps_; }
  const std::vector<Lobby>& lobbies() const { return lobbies_; }
  const std::vector<PoliticalGroup>& groups() const { return groups_; }
  const std::vector<Debate>& debates() const { return debates_; }

  const Document* find_document(std::string_view doc_id) const;
  const Document& document(std::string_view doc_id) const;  // throws dangling_reference
  const Mep* find_mep(std::string_view id) const;
  const Lobby* find_lobby(std::string_view id) const;
  const PoliticalGroup* find_group(std::string_view id) const;
  const Debate* find_debate(std::string_view id) const;

  /// Documents owned by `owner_id` whose kind is in `kinds`, in file order.
  std::vector<const Document*> documents_of(std::string_view owner_id,
                                            const std::set<DocKind>& kinds) const;

  /// Throws dangling_reference when a link names an unknown MEP or lobby.
  void check_links(const ValidationLinkSet& links) const;

 private:
  std::vector<Document> documents_;
  std::vector<Mep> meps_;
  std::vector<Lobby> lobbies_;
  std::vector<PoliticalGroup> groups_;
  std::vector<Debate> debates_;
  std::map<std::string, std::size_t, std::less<>> doc_index_, mep_index_, lobby_index_,
      group_index_, debate_index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> docs_by_owner_;
};

/// Size-weighted mean of party scores per group, per dimension.
std::map<std::string, IdeologyScores> aggregate_group_ideology(const std::vector<Party>& parties);

/// Undirected link (m, l) iff some pure retweet by m references l or by l
/// references m. Records naming accounts outside both sets are skipped.
ValidationLinkSet build_retweet_links(const std::vector<TweetRecord>& tweets,
                                      const std::set<std::string>& meps,
                                      const std::set<std::string>& lobbies);

struct UnmatchedMeeting {
  std::string mep_id;
  std::string lobby_name;
  std::string best_lobby_id;  // empty when the register is empty
  double best_score = 0.0;
  std::string reason;
};

struct MeetingMatchResult {
  ValidationLinkSet links{LinkKind::meeting, {}};
  std::vector<UnmatchedMeeting> unmatched;
};

/// 0.5 * token-set Jaccard + 0.5 * normalised Levenshtein similarity, both on
/// fold_for_matching() output. Two empty strings score 1.
double name_similarity(std::string_view a, std::string_view b);

MeetingMatchResult match_meeting_lobbies(const std::vector<MeetingRecord>& meetings,
                                         const std::vector<Lobby>& lobbies,
                                         const std::set<std::string>& known_meps,
                                         double threshold = 0.90);

}  // namespace lobbylink::corpus

#include "lobbylink/corpus.hpp"

#include <algorithm>

#include "jsonl.hpp"

namespace lobbylink::corpus {

using detail::fail;
using detail::for_each_record;
using detail::json;
using detail::opt_string;
using detail::ordered_json;
using detail::req_number;
using detail::req_string;
using detail::Where;

namespace {

struct KindName {
  DocKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {DocKind::speech, "speech"},
    {DocKind::speech_summary, "speech_summary"},
    {DocKind::position_paper, "position_paper"},
    {DocKind::paper_summary, "paper_summary"},
    {DocKind::amendment_summary, "amendment_summary"},
    {DocKind::other, "other"},
    // command-line aliases
    {DocKind::speech, "speeches"},
    {DocKind::speech_summary, "speeches_summ"},
    {DocKind::position_paper, "papers"},
    {DocKind::paper_summary, "papers_summ"},
    {DocKind::amendment_summary, "amendments_summ"},
};

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\v\f") == std::string_view::npos;
}

IdeologyScores read_scores(const json& j, const Where& w) {
  IdeologyScores s{req_number(j, "ideo", w), req_number(j, "econ", w), req_number(j, "soc", w),
                   req_number(j, "eu", w)};
  for (double v : {s.ideo, s.econ, s.soc, s.eu})
    if (!(v >= 0.0 && v <= 10.0)) fail(ErrorKind::parse, w, "ideology score outside [0, 10]");
  return s;
}

ordered_json scores_json(const IdeologyScores& s) {
  return ordered_json{{"ideo", s.ideo}, {"econ", s.econ}, {"soc", s.soc}, {"eu", s.eu}};
}

template <typename Map>
void index_unique(Map& index, const std::string& id, std::size_t pos, const char* what) {
  if (!index.emplace(id, pos).second)
    throw Error(ErrorKind::duplicate_id, std::string("duplicate ") + what + " id '" + id + "'");
}

}  // namespace

const char* to_string(DocKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name.data();
  return "other";
}

DocKind parse_doc_kind(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw Error(ErrorKind::invalid_argument, "unknown document kind '" + std::string(name) + "'");
}

const char* to_string(LobbyCategory c) {
  switch (c) {
    case LobbyCategory::trade_business: return "trade_business";
    case LobbyCategory::trade_union: return "trade_union";
    case LobbyCategory::ngo: return "ngo";
  }
  return "ngo";
}

LobbyCategory parse_lobby_category(std::string_view name) {
  if (name == "trade_business") return LobbyCategory::trade_business;
  if (name == "trade_union") return LobbyCategory::trade_union;
  if (name == "ngo") return LobbyCategory::ngo;
  throw Error(ErrorKind::invalid_argument, "unknown lobby category '" + std::string(name) + "'");
}

double component(const IdeologyScores& s, IdeologyDimension d) {
  switch (d) {
    case IdeologyDimension::ideo: return s.ideo;
    case IdeologyDimension::econ: return s.econ;
    case IdeologyDimension::soc: return s.soc;
    case IdeologyDimension::eu: return s.eu;
  }
  return s.ideo;
}

const char* to_string(IdeologyDimension d) {
  switch (d) {
    case IdeologyDimension::ideo: return "ideo";
    case IdeologyDimension::econ: return "econ";
    case IdeologyDimension::soc: return "soc";
    case IdeologyDimension::eu: return "eu";
  }
  return "ideo";
}

const char* to_string(LinkKind k) { return k == LinkKind::retweet ? "retweet" : "meeting"; }

LinkKind parse_link_kind(std::string_view name) {
  if (name == "retweet") return LinkKind::retweet;
  if (name == "meeting") return LinkKind::meeting;
  throw Error(ErrorKind::invalid_argument, "unknown link kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- loaders

std::vector<Document> load_documents(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::map<std::string, std::size_t, std::less<>> seen;
  for_each_record(path, [&](const json& j, const Where& w) {
    Document d;
    d.doc_id = req_string(j, "doc_id", w);
    d.owner_id = req_string(j, "owner_id", w);
    try {
      d.kind = parse_doc_kind(req_string(j, "kind", w));
    } catch (const Error& e) {
      fail(ErrorKind::parse, w, e.what());
    }
    d.text = req_string(j, "text", w);
    if (blank(d.text)) fail(ErrorKind::parse, w, "document '" + d.doc_id + "' has empty text");
    d.debate_id = opt_string(j, "debate_id", w);
    d.source_url = opt_string(j, "source_url", w);
    d.language = opt_string(j, "language", w);
    if (!seen.emplace(d.doc_id, docs.size()).second)
      fail(ErrorKind::duplicate_id, w, "duplicate doc_id '" + d.doc_id + "'");
    docs.push_back(std::move(d));
  });
  return docs;
}

EntitySet load_entities(const std::filesystem::path& path) {
  EntitySet out;
  std::set<std::string, std::less<>> ids;
  std::set<std::string, std::less<>> debate_ids;
  for_each_record(path, [&](const json& j, const Where& w) {
    const std::string type = req_string(j, "type", w);
    if (type == "mep") {
      Mep m{req_string(j, "mep_id", w), req_string(j, "name", w), req_string(j, "country", w),
            req_string(j, "group_id", w)};
      if (!ids.insert(m.mep_id).second) fail(ErrorKind::duplicate_id, w, "duplicate entity id '" + m.mep_id + "'");
      out.meps.push_back(std::move(m));
    } else if (type == "lobby") {
      Lobby l;
      l.lobby_id = req_string(j, "lobby_id", w);
      l.name = req_string(j, "name", w);
      l.country = opt_string(j, "country", w).value_or("");
      try {
        l.category = parse_lobby_category(req_string(j, "category", w));
      } catch (const Error& e) {
        fail(ErrorKind::parse, w, e.what());
      }
      l.acronym = opt_string(j, "acronym", w);
      l.cluster_id = opt_string(j, "cluster_id", w);
      l.goals_phrase = opt_string(j, "goals_phrase", w);
      if (!ids.insert(l.lobby_id).second) fail(ErrorKind::duplicate_id, w, "duplicate entity id '" + l.lobby_id + "'");
      out.lobbies.push_back(std::move(l));
    } else if (type == "debate") {
      Debate d{req_string(j, "debate_id", w), req_string(j, "title", w), 0};
      if (auto it = j.find("speech_count"); it != j.end()) {
        if (!it->is_number_integer() || it->get<int>() < 1)
          fail(ErrorKind::parse, w, "speech_count must be a positive integer");
        d.speech_count = it->get<int>();
      }
      if (!debate_ids.insert(d.debate_id).second) fail(ErrorKind::duplicate_id, w, "duplicate debate id '" + d.debate_id + "'");
      out.debates.push_back(std::move(d));
    } else {
      fail(ErrorKind::parse, w, "unknown entity type '" + type + "'");
    }
  });
  return out;
}

GroupTable load_groups(const std::filesystem::path& path) {
  GroupTable out;
  std::set<std::string, std::less<>> group_ids, party_ids;
  std::set<std::string> explicit_ideology;
  for_each_record(path, [&](const json& j, const Where& w) {
    const std::string type = req_string(j, "type", w);
    if (type == "group") {
      PoliticalGroup g;
      g.group_id = req_string(j, "group_id", w);
      g.name = req_string(j, "name", w);
      auto mc = j.find("member_count");
      if (mc == j.end() || !mc->is_number_integer() || mc->get<int>() < 1)
        fail(ErrorKind::parse, w, "member_count must be a positive integer");
      g.member_count = mc->get<int>();
      if (auto it = j.find("ideology"); it != j.end()) {
        if (!it->is_object()) fail(ErrorKind::parse, w, "ideology must be an object");
        g.ideology = read_scores(*it, w);
        explicit_ideology.insert(g.group_id);
      }
      if (!group_ids.insert(g.group_id).second) fail(ErrorKind::duplicate_id, w, "duplicate group id '" + g.group_id + "'");
      out.groups.push_back(std::move(g));
    } else if (type == "party") {
      Party p{req_string(j, "party_id", w), req_string(j, "group_id", w), req_number(j, "size", w),
              read_scores(j, w)};
      if (!(p.size > 0)) fail(ErrorKind::parse, w, "party size must be positive");
      if (!party_ids.insert(p.party_id).second) fail(ErrorKind::duplicate_id, w, "duplicate party id '" + p.party_id + "'");
      out.parties.push_back(std::move(p));
    } else {
      fail(ErrorKind::parse, w, "unknown group record type '" + type + "'");
    }
  });
  for (const auto& p : out.parties)
    if (!group_ids.count(p.group_id))
      throw Error(ErrorKind::dangling_reference, "party '" + p.party_id + "' names unknown group '" + p.group_id + "'");
  const auto aggregated = aggregate_group_ideology(out.parties);
  for (auto& g : out.groups) {
    if (explicit_ideology.count(g.group_id)) continue;
    auto it = aggregated.find(g.group_id);
    if (it == aggregated.end())
      throw Error(ErrorKind::parse, path.string() + ": group '" + g.group_id + "' has neither ideology nor parties");
    g.ideology = it->second;
  }
  return out;
}

std::vector<TweetRecord> load_tweets(const std::filesystem::path& path) {
  std::vector<TweetRecord> out;
  std::set<std::string, std::less<>> ids;
  for_each_record(path, [&](const json& j, const Where& w) {
    TweetRecord t;
    t.author_id = req_string(j, "author_id", w);
    t.tweet_id = req_string(j, "tweet_id", w);
    auto pr = j.find("is_pure_retweet");
    if (pr == j.end() || !pr->is_boolean()) fail(ErrorKind::parse, w, "missing boolean 'is_pure_retweet'");
    t.is_pure_retweet = pr->get<bool>();
    t.referenced_author_id = opt_string(j, "referenced_author_id", w);
    auto ts = j.find("timestamp");
    if (ts == j.end() || !ts->is_number_integer()) fail(ErrorKind::parse, w, "missing integer 'timestamp'");
    t.timestamp = ts->get<std::int64_t>();
    if (t.is_pure_retweet && !t.referenced_author_id)
      fail(ErrorKind::parse, w, "pure retweet without referenced_author_id");
    if (!ids.insert(t.tweet_id).second) fail(ErrorKind::duplicate_id, w, "duplicate tweet_id '" + t.tweet_id + "'");
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<MeetingRecord> load_meetings(const std::filesystem::path& path) {
  std::vector<MeetingRecord> out;
  for_each_record(path, [&](const json& j, const Where& w) {
    out.push_back({req_string(j, "mep_id", w), req_string(j, "lobby_name", w)});
  });
  return out;
}

ValidationLinkSet load_links(const std::filesystem::path& path) {
  ValidationLinkSet out;
  bool first = true;
  for_each_record(path, [&](const json& j, const Where& w) {
    LinkKind kind;
    try {
      kind = parse_link_kind(req_string(j, "kind", w));
    } catch (const Error& e) {
      fail(ErrorKind::parse, w, e.what());
    }
    if (first) {
      out.kind = kind;
      first = false;
    } else if (kind != out.kind) {
      fail(ErrorKind::parse, w, "mixed link kinds in one file");
    }
    MepLobbyPair p{req_string(j, "mep_id", w), req_string(j, "lobby_id", w)};
    if (!out.links.insert(p).second)
      fail(ErrorKind::duplicate_id, w, "duplicate link (" + p.first + ", " + p.second + ")");
  });
  return out;
}

// ---------------------------------------------------------------- writers

void write_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
  detail::JsonlWriter out(path);
  for (const auto& d : docs) {
    ordered_json j{{"doc_id", d.doc_id}, {"owner_id", d.owner_id}, {"kind", to_string(d.kind)}, {"text", d.text}};
    if (d.debate_id) j["debate_id"] = *d.debate_id;
    if (d.source_url) j["source_url"] = *d.source_url;
    if (d.language) j["language"] = *d.language;
    out.write(j);
  }
}

void write_entities(const std::filesystem::path& path, const EntitySet& entities) {
  detail::JsonlWriter out(path);
  for (const auto& m : entities.meps)
    out.write({{"type", "mep"}, {"mep_id", m.mep_id}, {"name", m.name}, {"country", m.country}, {"group_id", m.group_id}});
  for (const auto& l : entities.lobbies) {
    ordered_json j{{"type", "lobby"}, {"lobby_id", l.lobby_id}, {"name", l.name}};
    if (!l.country.empty()) j["country"] = l.country;
    j["category"] = to_string(l.category);
    if (l.acronym) j["acronym"] = *l.acronym;
    if (l.cluster_id) j["cluster_id"] = *l.cluster_id;
    if (l.goals_phrase) j["goals_phrase"] = *l.goals_phrase;
    out.write(j);
  }
  for (const auto& d : entities.debates) {
    ordered_json j{{"type", "debate"}, {"debate_id", d.debate_id}, {"title", d.title}};
    if (d.speech_count > 0) j["speech_count"] = d.speech_count;
    out.write(j);
  }
}

void write_groups(const std::filesystem::path& path, const GroupTable& groups) {
  detail::JsonlWriter out(path);
  for (const auto& g : groups.groups)
    out.write({{"type", "group"}, {"group_id", g.group_id}, {"name", g.name},
               {"member_count", g.member_count}, {"ideology", scores_json(g.ideology)}});
  for (const auto& p : groups.parties)
    out.write({{"type", "party"}, {"party_id", p.party_id}, {"group_id", p.group_id}, {"size", p.size},
               {"ideo", p.scores.ideo}, {"econ", p.scores.econ}, {"soc", p.scores.soc}, {"eu", p.scores.eu}});
}

void write_tweets(const std::filesystem::path& path, const std::vector<TweetRecord>& tweets) {
  detail::JsonlWriter out(path);
  for (const auto& t : tweets) {
    ordered_json j{{"author_id", t.author_id}, {"tweet_id", t.tweet_id}, {"is_pure_retweet", t.is_pure_retweet}};
    if (t.referenced_author_id) j["referenced_author_id"] = *t.referenced_author_id;
    j["timestamp"] = t.timestamp;
    out.write(j);
  }
}

void write_meetings(const std::filesystem::path& path, const std::vector<MeetingRecord>& meetings) {
  detail::JsonlWriter out(path);
  for (const auto& m : meetings) out.write({{"mep_id", m.mep_id}, {"lobby_name", m.lobby_name}});
}

void write_links(const std::filesystem::path& path, const ValidationLinkSet& links) {
  detail::JsonlWriter out(path);
  for (const auto& [m, l] : links.links)
    out.write({{"kind", to_string(links.kind)}, {"mep_id", m}, {"lobby_id", l}});
}

// ---------------------------------------------------------------- Corpus

Corpus::Corpus(std::vector<Document> documents, EntitySet entities, GroupTable groups)
    : documents_(std::move(documents)),
      meps_(std::move(entities.meps)),
      lobbies_(std::move(entities.lobbies)),
      groups_(std::move(groups.groups)),
      debates_(std::move(entities.debates)) {
  for (std::size_t i = 0; i < groups_.size(); ++i) index_unique(group_index_, groups_[i].group_id, i, "group");
  for (std::size_t i = 0; i < meps_.size(); ++i) index_unique(mep_index_, meps_[i].mep_id, i, "MEP");
  for (std::size_t i = 0; i < lobbies_.size(); ++i) {
    if (mep_index_.count(lobbies_[i].lobby_id))
      throw Error(ErrorKind::duplicate_id, "id '" + lobbies_[i].lobby_id + "' is both an MEP and a lobby");
    index_unique(lobby_index_, lobbies_[i].lobby_id, i, "lobby");
  }
  for (std::size_t i = 0; i < debates_.size(); ++i) index_unique(debate_index_, debates_[i].debate_id, i, "debate");
  for (const auto& m : meps_)
    if (!group_index_.count(m.group_id))
      throw Error(ErrorKind::dangling_reference, "MEP '" + m.mep_id + "' names unknown group '" + m.group_id + "'");

  std::map<std::string, std::pair<int, int>> per_debate;  // (speeches, summaries)
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& d = documents_[i];
    index_unique(doc_index_, d.doc_id, i, "document");
    if (!mep_index_.count(d.owner_id) && !lobby_index_.count(d.owner_id))
      throw Error(ErrorKind::dangling_reference,
                  "document '" + d.doc_id + "' names unknown owner '" + d.owner_id + "'");
    docs_by_owner_[d.owner_id].push_back(i);
    if (d.debate_id) {
      if (!debate_index_.count(*d.debate_id))
        throw Error(ErrorKind::dangling_reference,
                    "document '" + d.doc_id + "' names unknown debate '" + *d.debate_id + "'");
      if (d.kind == DocKind::speech) ++per_debate[*d.debate_id].first;
      if (d.kind == DocKind::speech_summary) ++per_debate[*d.debate_id].second;
    }
  }
  // A speech and its summary describe the same underlying speech.
  for (auto& debate : debates_) {
    const auto [speeches, summaries] = per_debate[debate.debate_id];
    const int count = std::max(speeches, summaries);
    if (debate.speech_count > 0 && debate.speech_count != count)
      throw Error(ErrorKind::precondition, "debate '" + debate.debate_id + "' declares " +
                                               std::to_string(debate.speech_count) + " speeches but documents give " +
                                               std::to_string(count));
    debate.speech_count = count;
  }
}

Corpus Corpus::load_directory(const std::filesystem::path& dir) {
  return Corpus(load_documents(dir / "documents.jsonl"), load_entities(dir / "entities.jsonl"),
                load_groups(dir / "groups.jsonl"));
}

namespace {
template <typename T, typename Map>
const T* lookup(const std::vector<T>& v, const Map& index, std::string_view id) {
  auto it = index.find(id);
  return it == index.end() ? nullptr : &v[it->second];
}
}  // namespace

const Document* Corpus::find_document(std::string_view id) const { return lookup(documents_, doc_index_, id); }
const Mep* Corpus::find_mep(std::string_view id) const { return lookup(meps_, mep_index_, id); }
const Lobby* Corpus::find_lobby(std::string_view id) const { return lookup(lobbies_, lobby_index_, id); }
const PoliticalGroup* Corpus::find_group(std::string_view id) const { return lookup(groups_, group_index_, id); }
const Debate* Corpus::find_debate(std::string_view id) const { return lookup(debates_, debate_index_, id); }

const Document& Corpus::document(std::string_view doc_id) const {
  const Document* d = find_document(doc_id);
  if (!d) throw Error(ErrorKind::dangling_reference, "unknown document '" + std::string(doc_id) + "'");
  return *d;
}

std::vector<const Document*> Corpus::documents_of(std::string_view owner_id,
                                                  const std::set<DocKind>& kinds) const {
  std::vector<const Document*> out;
  auto it = docs_by_owner_.find(owner_id);
  if (it == docs_by_owner_.end()) return out;
  for (std::size_t i : it->second)
    if (kinds.count(documents_[i].kind)) out.push_back(&documents_[i]);
  return out;
}

void Corpus::check_links(const ValidationLinkSet& links) const {
  for (const auto& [m, l] : links.links) {
    if (!find_mep(m)) throw Error(ErrorKind::dangling_reference, "link names unknown MEP '" + m + "'");
    if (!find_lobby(l)) throw Error(ErrorKind::dangling_reference, "link names unknown lobby '" + l + "'");
  }
}

}  // namespace lobbylink::corpus

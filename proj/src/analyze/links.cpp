#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lobbylink/analyze.hpp"
#include "lobbylink/error.hpp"
#include "lobbylink/textprep.hpp"

namespace lobbylink::analyze {

std::vector<DiscoveredLink> extract_links(const scorer::ScoreMatrix& scores, double threshold) {
  if (scores.method() != scorer::Method::ss && scores.method() != scorer::Method::ent)
    throw Error(ErrorKind::invalid_argument, std::string("link extraction needs ss or ent scores, got ") +
                                                 scorer::to_string(scores.method()));
  std::vector<DiscoveredLink> out;
  for (std::size_t i = 0; i < scores.rows(); ++i)
    for (std::size_t j = 0; j < scores.cols(); ++j) {
      const auto& e = scores.at(i, j);
      if (e.score && *e.score >= threshold)
        out.push_back({scores.meps()[i], scores.lobbies()[j], *e.score, e.provenance});
    }
  std::sort(out.begin(), out.end(), [](const DiscoveredLink& a, const DiscoveredLink& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.mep_id != b.mep_id ? a.mep_id < b.mep_id : a.lobby_id < b.lobby_id;
  });
  return out;
}

std::vector<DebateRank> debate_rank(const std::vector<DiscoveredLink>& links, const corpus::Corpus& corpus,
                                    const std::set<std::string>* lobby_filter, std::vector<std::string>* warnings) {
  std::map<std::string, std::size_t> count;
  for (const auto& l : links) {
    if (lobby_filter && !lobby_filter->count(l.lobby_id)) continue;
    if (!l.provenance) {
      if (warnings) warnings->push_back("link (" + l.mep_id + ", " + l.lobby_id + ") has no provenance");
      continue;
    }
    const auto& doc = corpus.document(l.provenance->left_doc);
    if (!doc.debate_id) {
      if (warnings) warnings->push_back("document '" + doc.doc_id + "' belongs to no debate");
      continue;
    }
    ++count[*doc.debate_id];
  }
  std::vector<DebateRank> out;
  for (const auto& d : corpus.debates()) {
    DebateRank r{d.debate_id, d.title, count.count(d.debate_id) ? count[d.debate_id] : 0, d.speech_count, 0.0};
    r.rate = d.speech_count > 0 ? static_cast<double>(r.links) / d.speech_count : 0.0;
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const DebateRank& a, const DebateRank& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    return a.title != b.title ? a.title < b.title : a.debate_id < b.debate_id;
  });
  return out;
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> s = {
      "a",    "about", "all",  "also", "an",   "and",   "are",  "as",    "at",   "be",   "been", "but",
      "by",   "can",   "for",  "from", "has",  "have",  "i",    "in",    "into", "is",   "it",   "its",
      "more", "must",  "not",  "of",   "on",   "or",    "our",  "should", "so",  "than", "that", "the",
      "their", "there", "these", "they", "this", "to",  "was",  "we",    "were", "which", "will", "with",
      "would", "you"};
  return s;
}

std::string mark_shared(const std::string& text, const std::set<std::string>& shared) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& span : textprep::tokenize_with_spans(text)) {
    out.append(text, pos, span.begin - pos);
    if (shared.count(span.token)) {
      out += "[" + text.substr(span.begin, span.end - span.begin) + "]";
    } else {
      out.append(text, span.begin, span.end - span.begin);
    }
    pos = span.end;
  }
  out.append(text, pos, std::string::npos);
  return out;
}

}  // namespace

std::string inspect_match(const DiscoveredLink& link, const corpus::Corpus& corpus,
                          const std::optional<providers::NliTriple>& nli) {
  if (!link.provenance)
    throw Error(ErrorKind::dangling_reference, "link (" + link.mep_id + ", " + link.lobby_id + ") has no provenance");
  const auto& left = corpus.document(link.provenance->left_doc);
  const auto& right = corpus.document(link.provenance->right_doc);

  std::set<std::string> a, b, shared;
  for (auto& t : textprep::tokenize(left.text))
    if (!stopwords().count(t)) a.insert(t);
  for (auto& t : textprep::tokenize(right.text))
    if (!stopwords().count(t)) b.insert(t);
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(shared, shared.end()));

  std::ostringstream out;
  char buf[160];
  out << "MEP: " << link.mep_id << "\nLobby: " << link.lobby_id << '\n';
  std::snprintf(buf, sizeof buf, "cosine: %.6f", link.provenance->score);
  out << buf << '\n';
  if (nli) {
    std::snprintf(buf, sizeof buf, "nli: p_ent=%.6f p_neutral=%.6f p_con=%.6f", nli->entail, nli->neutral,
                  nli->contradict);
    out << buf << '\n'
        << "verdict: " << (nli->admissible() ? "passes entailment filter" : "excluded by entailment") << '\n';
  }
  out << "shared vocabulary:";
  for (const auto& t : shared) out << ' ' << t;
  out << "\n\n--- MEP document " << left.doc_id << " (" << corpus::to_string(left.kind) << ")\n"
      << mark_shared(left.text, shared) << "\n\n--- Lobby document " << right.doc_id << " ("
      << corpus::to_string(right.kind) << ")\n"
      << mark_shared(right.text, shared) << "\n\n"
      << kLinkCaveat << '\n';
  return out.str();
}

}  // namespace lobbylink::analyze

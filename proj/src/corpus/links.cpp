#include <algorithm>
#include <numeric>

#include "lobbylink/corpus.hpp"
#include "lobbylink/error.hpp"
#include "lobbylink/textprep.hpp"
#include "../textprep/unicode.hpp"

namespace lobbylink::corpus {

std::map<std::string, IdeologyScores> aggregate_group_ideology(const std::vector<Party>& parties) {
  struct Acc {
    double size = 0;
    IdeologyScores sum;
  };
  std::map<std::string, Acc> acc;
  for (const auto& p : parties) {
    if (!(p.size > 0))
      throw Error(ErrorKind::precondition, "party '" + p.party_id + "' has non-positive size");
    auto& a = acc[p.group_id];
    a.size += p.size;
    a.sum.ideo += p.size * p.scores.ideo;
    a.sum.econ += p.size * p.scores.econ;
    a.sum.soc += p.size * p.scores.soc;
    a.sum.eu += p.size * p.scores.eu;
  }
  std::map<std::string, IdeologyScores> out;
  for (const auto& [group, a] : acc) {
    if (!(a.size > 0)) throw Error(ErrorKind::precondition, "group '" + group + "' has zero total size");
    out[group] = {a.sum.ideo / a.size, a.sum.econ / a.size, a.sum.soc / a.size, a.sum.eu / a.size};
  }
  return out;
}

ValidationLinkSet build_retweet_links(const std::vector<TweetRecord>& tweets,
                                      const std::set<std::string>& meps,
                                      const std::set<std::string>& lobbies) {
  for (const auto& m : meps)
    if (lobbies.count(m)) throw Error(ErrorKind::precondition, "id '" + m + "' is both an MEP and a lobby");
  ValidationLinkSet out{LinkKind::retweet, {}};
  for (const auto& t : tweets) {
    if (!t.is_pure_retweet || !t.referenced_author_id) continue;
    const auto& a = t.author_id;
    const auto& r = *t.referenced_author_id;
    if (meps.count(a) && lobbies.count(r))
      out.links.emplace(a, r);
    else if (lobbies.count(a) && meps.count(r))
      out.links.emplace(r, a);
  }
  return out;
}

namespace {

std::u32string decode(std::string_view s) {
  std::u32string out;
  std::size_t pos = 0;
  while (pos < s.size()) out.push_back(textprep::detail::decode_utf8(s, pos));
  return out;
}

std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::set<std::string> words(const std::string& folded) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start < folded.size()) {
    auto end = folded.find(' ', start);
    if (end == std::string::npos) end = folded.size();
    if (end > start) out.insert(folded.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

double name_similarity(std::string_view a, std::string_view b) {
  const std::string fa = textprep::fold_for_matching(a);
  const std::string fb = textprep::fold_for_matching(b);
  const auto wa = words(fa), wb = words(fb);
  std::size_t common = 0;
  for (const auto& w : wa) common += wb.count(w);
  const std::size_t uni = wa.size() + wb.size() - common;
  const double jaccard = uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
  const auto ua = decode(fa), ub = decode(fb);
  const std::size_t longest = std::max(ua.size(), ub.size());
  const double edit = longest == 0 ? 1.0
                                   : 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
  return 0.5 * jaccard + 0.5 * edit;
}

MeetingMatchResult match_meeting_lobbies(const std::vector<MeetingRecord>& meetings,
                                         const std::vector<Lobby>& lobbies,
                                         const std::set<std::string>& known_meps, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::invalid_argument, "fuzzy threshold must lie in [0, 1]");
  std::vector<const Lobby*> by_id;
  for (const auto& l : lobbies) by_id.push_back(&l);
  std::sort(by_id.begin(), by_id.end(), [](auto* x, auto* y) { return x->lobby_id < y->lobby_id; });

  MeetingMatchResult out;
  for (const auto& m : meetings) {
    const Lobby* best = nullptr;
    double best_score = -1.0;
    for (const Lobby* l : by_id) {
      double s = name_similarity(m.lobby_name, l->name);
      if (l->acronym) s = std::max(s, name_similarity(m.lobby_name, *l->acronym));
      if (s > best_score) {  // strict: the lowest lobby_id keeps ties
        best_score = s;
        best = l;
      }
    }
    if (!known_meps.count(m.mep_id)) {
      out.unmatched.push_back({m.mep_id, m.lobby_name, best ? best->lobby_id : "", std::max(best_score, 0.0),
                               "unknown-mep"});
      continue;
    }
    if (best && best_score >= threshold) {
      out.links.links.emplace(m.mep_id, best->lobby_id);
    } else {
      out.unmatched.push_back({m.mep_id, m.lobby_name, best ? best->lobby_id : "", std::max(best_score, 0.0),
                               "below-threshold"});
    }
  }
  return out;
}

}  // namespace lobbylink::corpus

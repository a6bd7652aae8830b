#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "lobbylink/error.hpp"
#include "lobbylink/fixture.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/pipeline.hpp"
#include "lobbylink/scorer.hpp"

namespace lobbylink::fixture {
namespace {

using corpus::DocKind;

// SplitMix64 stream; portable, unlike the std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x6c6f6262796c6e6bULL)) {}
  std::uint64_t next() { return mix64(state_++); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double uniform() { return unit_interval(next()); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

std::string pad(std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return buf;
}

/// Distinct pronounceable pseudo-words of three CV syllables.
class WordMaker {
 public:
  explicit WordMaker(Rng& rng) : rng_(rng) {}
  std::string make(std::size_t syllables = 3) {
    static const std::string cons = "bdfgklmprstvz";
    static const std::string vows = "aeiou";
    for (;;) {
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) {
        w += cons[rng_.below(cons.size())];
        w += vows[rng_.below(vows.size())];
      }
      if (used_.insert(w).second) return w;
    }
  }
  std::vector<std::string> make_many(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(make());
    return out;
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {
      "agenda",   "budget",   "committee", "council",  "delegation", "draft",     "framework", "hearing",
      "mandate",  "minutes",  "motion",    "plenary",  "procedure",  "programme", "question",  "rapporteur",
      "schedule", "session",  "timetable", "vote",     "colleagues", "citizens",  "partners",  "members",
      "report",   "proposal", "dialogue",  "progress", "position",   "review",    "summit",    "statement"};
  return w;
}

/// Plain parliamentary sentence over filler vocabulary only.
std::string generic_sentence(Rng& rng) {
  static const std::vector<std::string> frames = {
      "The %s of this %s deserves a careful %s before the %s.",
      "Our %s expects a clear %s on the %s and the %s.",
      "This %s should follow the %s agreed in the %s last %s.",
      "We welcome the %s and thank the %s for the %s on the %s."};
  const auto& f = rng.pick(frames);
  std::string out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == '%' && i + 1 < f.size() && f[i + 1] == 's') {
      out += rng.pick(filler_words());
      ++i;
      ++k;
    } else {
      out += f[i];
    }
  }
  return out;
}

struct GroupDef {
  const char* id;
  const char* name;
  corpus::IdeologyScores ideology;
};

const std::vector<GroupDef>& group_defs() {
  static const std::vector<GroupDef> g = {
      {"GUE/NGL", "European United Left/Nordic Green Left", {1.65, 1.39, 3.31, 3.49}},
      {"Greens/EFA", "Greens/European Free Alliance", {3.21, 3.22, 2.21, 5.61}},
      {"S&D", "Progressive Alliance of Socialists and Democrats", {3.83, 3.90, 3.83, 6.18}},
      {"ALDE", "Alliance of Liberals and Democrats for Europe", {6.09, 6.70, 4.00, 6.05}},
      {"EFDD", "Europe of Freedom and Direct Democracy", {6.55, 5.43, 5.63, 1.40}},
      {"EPP", "European People's Party", {6.69, 6.32, 6.38, 5.89}},
      {"ECR", "European Conservatives and Reformists", {7.21, 5.90, 7.28, 3.33}},
      {"ENF", "Europe of Nations and Freedom", {9.32, 6.14, 8.89, 1.31}},
      {"NI", "Non-attached Members", {9.76, 4.06, 9.54, 1.18}}};
  return g;
}

const std::vector<std::string>& countries() {
  static const std::vector<std::string> c = {"BE", "DE", "FR", "IT", "NL", "PL", "ES", "SE", "AT", "IE"};
  return c;
}

struct LobbyText {
  std::vector<std::string> signature;
  std::size_t topic = 0;
  std::vector<std::string> paper_ids;
  std::vector<std::vector<std::string>> paper_sentences;  // per paper
};

/// One sentence mixing the lobby's signature vocabulary with its topic.
std::string paper_sentence(Rng& rng, const std::vector<std::string>& sig, const std::vector<std::string>& topic) {
  static const std::vector<std::string> openers = {"We call for", "We support", "Europe needs", "We propose",
                                                   "The Union should adopt"};
  std::vector<std::string> words;
  for (int i = 0; i < 4; ++i) words.push_back(rng.pick(sig));
  for (int i = 0; i < 4; ++i) words.push_back(rng.pick(topic));
  rng.shuffle(words);
  std::string s = rng.pick(openers);
  for (std::size_t i = 0; i < words.size(); ++i) {
    s += ' ' + words[i];
    if (i == 3) s += " and";
  }
  s += " measures across the " + rng.pick(topic) + " sector.";
  return s;
}

/// Inserts "not" after the sentence's first word.
std::string negate_first_sentence(const std::string& sentence) {
  const auto sp = sentence.find(' ');
  return sentence.substr(0, sp) + " not" + sentence.substr(sp);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

PlantedCorpus planted_corpus(const PlantedSpec& spec) {
  if (spec.topics == 0 || spec.lobbies == 0 || spec.meps == 0)
    throw Error(ErrorKind::invalid_argument, "planted corpus needs topics, lobbies and MEPs");
  if (spec.links_per_mep > spec.lobbies)
    throw Error(ErrorKind::invalid_argument, "more links per MEP than lobbies");
  if (spec.contradictions > spec.meps)
    throw Error(ErrorKind::invalid_argument, "more contradictions than MEPs");

  Rng rng(spec.seed);
  WordMaker words(rng);
  PlantedCorpus pc;
  const auto& gdefs = group_defs();

  std::vector<std::vector<std::string>> topic_words;
  for (std::size_t t = 0; t < spec.topics; ++t) topic_words.push_back(words.make_many(12));

  std::vector<std::string> topic_debate;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    topic_debate.push_back("debate-t" + pad(t, 2));
    pc.entities.debates.push_back({topic_debate.back(), "Debate on " + topic_words[t][0] + " policy", 0});
  }
  pc.entities.debates.push_back({"debate-general", "General statements", 0});

  // Lobbies and their papers.
  static const std::vector<std::string> suffixes = {"Association", "Federation", "Alliance", "Network", "Council"};
  std::vector<LobbyText> lt(spec.lobbies);
  for (std::size_t l = 0; l < spec.lobbies; ++l) {
    corpus::Lobby lobby;
    lobby.lobby_id = "lobby-" + pad(l, 3);
    const std::string stem = capitalize(words.make(2));
    const std::string field = capitalize(words.make(2));
    const auto& suffix = suffixes[l % suffixes.size()];
    lobby.name = stem + " " + field + " " + suffix;
    lobby.acronym = std::string{stem[0], field[0], suffix[0]} + (l % 7 == 0 ? "E" : "");
    lobby.country = l % 16 == 5 ? "" : rng.pick(countries());
    lobby.category = static_cast<corpus::LobbyCategory>(l % 3);
    lt[l].topic = l % spec.topics;
    lobby.cluster_id = "topic-" + pad(lt[l].topic, 2);
    lobby.goals_phrase = "promoting " + topic_words[lt[l].topic][1] + " and " + topic_words[lt[l].topic][2];
    lt[l].signature = words.make_many(6);
    pc.entities.lobbies.push_back(lobby);

    const std::size_t papers = 1 + rng.below(4);
    for (std::size_t p = 0; p < papers; ++p) {
      std::vector<std::string> sents = {paper_sentence(rng, lt[l].signature, topic_words[lt[l].topic]),
                                        paper_sentence(rng, lt[l].signature, topic_words[lt[l].topic])};
      corpus::Document d;
      d.doc_id = lobby.lobby_id + "-paper-" + std::to_string(p);
      d.owner_id = lobby.lobby_id;
      d.kind = DocKind::position_paper;
      d.text = join(sents);
      d.source_url = "https://example.org/" + lobby.lobby_id + "/position-" + std::to_string(p) + ".pdf";
      d.language = "en";
      lt[l].paper_ids.push_back(d.doc_id);
      lt[l].paper_sentences.push_back(sents);
      pc.documents.push_back(std::move(d));
    }
    if (l % 4 == 0) {
      corpus::Document d;
      d.doc_id = lobby.lobby_id + "-other-0";
      d.owner_id = lobby.lobby_id;
      d.kind = DocKind::other;
      d.text = "Members can download the " + topic_words[lt[l].topic][3] + " handbook. " + generic_sentence(rng);
      d.source_url = "https://example.org/" + lobby.lobby_id + "/handbook.pdf";
      d.language = "en";
      pc.documents.push_back(std::move(d));
    }
  }

  // Groups and MEPs.
  std::vector<int> group_members(gdefs.size(), 0);
  std::vector<std::size_t> mep_group(spec.meps);
  for (std::size_t m = 0; m < spec.meps; ++m) {
    mep_group[m] = m % gdefs.size();
    ++group_members[mep_group[m]];
    corpus::Mep mep;
    mep.mep_id = "mep-" + pad(m, 3);
    mep.name = capitalize(words.make(2)) + " " + capitalize(words.make(3));
    mep.country = rng.pick(countries());
    mep.group_id = gdefs[mep_group[m]].id;
    pc.entities.meps.push_back(mep);
  }
  for (std::size_t g = 0; g < gdefs.size(); ++g)
    pc.groups.groups.push_back({gdefs[g].id, gdefs[g].name, gdefs[g].ideology, std::max(group_members[g], 1)});

  // Planted links: each MEP favours lobbies whose topic aligns with its group.
  std::vector<std::set<std::size_t>> linked(spec.meps);
  std::vector<std::set<std::size_t>> mep_topics(spec.meps);
  std::int64_t clock = 1500000000;
  std::size_t speech_no = 0;
  auto add_speech = [&](std::size_t m, const std::string& debate, const std::string& text) {
    corpus::Document d;
    d.doc_id = "speech-" + pad(speech_no++, 4);
    d.owner_id = pc.entities.meps[m].mep_id;
    d.kind = DocKind::speech;
    d.text = text;
    d.debate_id = debate;
    d.language = "en";
    pc.documents.push_back(std::move(d));
    return pc.documents.back().doc_id;
  };
  for (std::size_t m = 0; m < spec.meps; ++m) {
    std::vector<std::size_t> aligned, rest;
    for (std::size_t l = 0; l < spec.lobbies; ++l)
      (lt[l].topic % gdefs.size() == mep_group[m] ? aligned : rest).push_back(l);
    while (linked[m].size() < spec.links_per_mep) {
      const auto& pool = (!aligned.empty() && rng.uniform() < 0.6) ? aligned : rest;
      if (pool.empty()) continue;
      linked[m].insert(rng.pick(pool));
    }
    const auto& mep_id = pc.entities.meps[m].mep_id;
    for (auto l : linked[m]) {
      const auto& lobby_id = pc.entities.lobbies[l].lobby_id;
      pc.planted.links.insert({mep_id, lobby_id});
      mep_topics[m].insert(lt[l].topic);
      // The speech restates most of one paper of the lobby.
      const auto p = rng.below(lt[l].paper_sentences.size());
      const auto& tw = topic_words[lt[l].topic];
      std::string text = "Colleagues.";
      for (const auto& src : lt[l].paper_sentences[p]) text += " " + src.substr(0, src.rfind(" measures")) + " now.";
      text += " The " + rng.pick(tw) + " file matters.";
      if (rng.uniform() < 0.5) text += " " + generic_sentence(rng);
      add_speech(m, topic_debate[lt[l].topic], text);

      corpus::TweetRecord t;
      const bool reverse = rng.below(4) == 0;
      t.author_id = reverse ? lobby_id : mep_id;
      t.referenced_author_id = reverse ? mep_id : lobby_id;
      t.is_pure_retweet = true;
      t.tweet_id = "tw-" + pad(pc.tweets.size(), 5);
      t.timestamp = clock += 3600;
      pc.tweets.push_back(t);

      if (rng.uniform() < 0.6) {
        std::string name = pc.entities.lobbies[l].name;
        switch (rng.below(4)) {
          case 0:
            std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
            break;
          case 1: name = name + "."; break;
          case 2: {
            const auto sp = name.find(' ');
            name = name.substr(0, sp) + "," + name.substr(sp);
            break;
          }
          default: {
            // Accent on the first vowel.
            const auto v = name.find_first_of("aeiou");
            if (v != std::string::npos) {
              static const std::map<char, std::string> accent = {
                  {'a', "\xc3\xa1"}, {'e', "\xc3\xa9"}, {'i', "\xc3\xad"}, {'o', "\xc3\xb3"}, {'u', "\xc3\xba"}};
              name = name.substr(0, v) + accent.at(name[v]) + name.substr(v + 1);
            }
          }
        }
        pc.meetings.push_back({mep_id, name});
      }
    }
    for (std::size_t g = 0; g < spec.generic_speeches; ++g)
      add_speech(m, "debate-general", generic_sentence(rng) + " " + generic_sentence(rng));
  }

  // Contradictions: a distinct MEP restates an unlinked lobby's paper with
  // one inserted negation.
  std::vector<std::size_t> meps_order(spec.meps);
  for (std::size_t i = 0; i < spec.meps; ++i) meps_order[i] = i;
  rng.shuffle(meps_order);
  std::set<std::size_t> used_lobbies;
  for (std::size_t c = 0; c < spec.contradictions; ++c) {
    const auto m = meps_order[c];
    std::vector<std::size_t> candidates;
    for (std::size_t l = 0; l < spec.lobbies; ++l)
      if (!linked[m].count(l) && !mep_topics[m].count(lt[l].topic) && !used_lobbies.count(l))
        candidates.push_back(l);
    if (candidates.empty())
      throw Error(ErrorKind::precondition, "no unlinked lobby left for a contradiction");
    const auto l = rng.pick(candidates);
    used_lobbies.insert(l);
    const auto p = rng.below(lt[l].paper_ids.size());
    const auto& s = lt[l].paper_sentences[p];
    const auto doc = add_speech(m, topic_debate[lt[l].topic], negate_first_sentence(s[0]) + " " + s[1]);
    pc.contradictions.push_back({pc.entities.meps[m].mep_id, pc.entities.lobbies[l].lobby_id, doc, lt[l].paper_ids[p]});
  }

  // Tweets that must not create links: quotes, unknown accounts.
  for (std::size_t i = 0; i < spec.noise_retweets; ++i) {
    corpus::TweetRecord quote;
    quote.author_id = pc.entities.meps[rng.below(spec.meps)].mep_id;
    quote.referenced_author_id = pc.entities.lobbies[rng.below(spec.lobbies)].lobby_id;
    quote.is_pure_retweet = false;
    quote.tweet_id = "tw-" + pad(pc.tweets.size(), 5);
    quote.timestamp = clock += 60;
    pc.tweets.push_back(quote);
    corpus::TweetRecord stray;
    stray.author_id = pc.entities.meps[rng.below(spec.meps)].mep_id;
    stray.referenced_author_id = "account-" + pad(i, 3);
    stray.is_pure_retweet = true;
    stray.tweet_id = "tw-" + pad(pc.tweets.size(), 5);
    stray.timestamp = clock += 60;
    pc.tweets.push_back(stray);
  }
  // Meetings with unknown organisations and unknown MEPs.
  for (std::size_t i = 0; i < 10; ++i)
    pc.meetings.push_back({pc.entities.meps[rng.below(spec.meps)].mep_id,
                           capitalize(words.make(3)) + " " + capitalize(words.make(3)) + " Institute"});
  for (std::size_t i = 0; i < 3; ++i)
    pc.meetings.push_back({"mep-unknown-" + pad(i, 2), pc.entities.lobbies[rng.below(spec.lobbies)].name});
  return pc;
}

void write_contradictions(const std::filesystem::path& path, const std::vector<Contradiction>& cs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& c : cs) {
    nlohmann::ordered_json j;
    j["mep_id"] = c.mep_id;
    j["lobby_id"] = c.lobby_id;
    j["mep_doc"] = c.mep_doc;
    j["lobby_doc"] = c.lobby_doc;
    out << j.dump() << '\n';
  }
}

std::vector<Contradiction> load_contradictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::vector<Contradiction> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("mep_id").get<std::string>(), j.at("lobby_id").get<std::string>(),
                     j.at("mep_doc").get<std::string>(), j.at("lobby_doc").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

void write_planted_fixture(const std::filesystem::path& dir, const PlantedSpec& spec) {
  std::filesystem::create_directories(dir);
  const auto pc = planted_corpus(spec);
  corpus::write_documents(dir / "documents.jsonl", pc.documents);
  corpus::write_entities(dir / "entities.jsonl", pc.entities);
  corpus::write_groups(dir / "groups.jsonl", pc.groups);
  corpus::write_tweets(dir / "tweets.jsonl", pc.tweets);
  corpus::write_meetings(dir / "meetings.jsonl", pc.meetings);
  corpus::write_links(dir / "planted_links.jsonl", pc.planted);
  write_contradictions(dir / "contradictions.jsonl", pc.contradictions);

  // Record every NLI judgement that Ent scoring asks for on this corpus.
  const corpus::Corpus c(pc.documents, pc.entities, pc.groups);
  vectors::ReferenceEmbedder embedder;
  const auto store = pipeline::embed_documents(c, {DocKind::speech, DocKind::position_paper}, embedder);
  std::vector<std::string> meps, lobbies;
  for (const auto& m : c.meps()) meps.push_back(m.mep_id);
  for (const auto& l : c.lobbies()) lobbies.push_back(l.lobby_id);
  const auto mv = scorer::group_by_owner(c, store, meps, {DocKind::speech});
  const auto lv = scorer::group_by_owner(c, store, lobbies, {DocKind::position_paper});
  auto cache = std::make_shared<providers::ResponseCache>();
  providers::InferenceClient client(cache, std::make_unique<providers::BuiltinBackend>(vectors::kDefaultDim, 0));
  scorer::score_ent(meps, lobbies, mv, lv, pipeline::client_judge(c, client));
  cache->save(dir / "nli_cache.txt");
}

std::vector<PositionDoc> position_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  static const std::vector<std::string> stance = {"we",      "urge",     "believe",    "recommend", "our",
                                                  "support", "call",     "priorities", "demand",    "stance",
                                                  "advocate", "policymakers", "should",  "propose",   "concerns"};
  static const std::vector<std::string> manual = {"install", "click",  "step",     "configure", "menu",
                                                  "select",  "button", "download", "screen",    "settings",
                                                  "guide",   "press",  "login",    "account",   "troubleshooting"};
  static const std::vector<std::string> shared = {"energy", "market",   "emissions", "transport", "data",
                                                  "health", "industry", "water",     "farming",   "trade"};
  std::vector<PositionDoc> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool truth = i % 2 == 0;
    const auto& vocab = truth ? stance : manual;
    std::string text;
    for (int s = 0; s < 3; ++s) {
      std::string sent;
      for (int w = 0; w < 9; ++w) {
        const auto& word = rng.uniform() < 0.6 ? rng.pick(vocab) : rng.pick(shared);
        sent += (sent.empty() ? capitalize(word) : " " + word);
      }
      text += (text.empty() ? "" : " ") + sent + ".";
    }
    // One in twenty URLs carries the wrong weak label.
    const bool weak = (i % 20 == 7) ? !truth : truth;
    const std::string url = "https://example.org/docs/" + std::string(weak ? "position-" : "manual-") +
                            std::to_string(i) + ".pdf";
    out.push_back({{text, url}, truth});
  }
  return out;
}

std::vector<classify::LabeledSentence> authorship_corpus(std::size_t lobbies, std::size_t sentences_per_lobby,
                                                         std::uint64_t seed) {
  Rng rng(seed);
  WordMaker words(rng);
  std::vector<classify::LabeledSentence> out;
  for (std::size_t l = 0; l < lobbies; ++l) {
    const std::string id = l == 0 ? "climate" : "lobby-" + pad(l, 2);
    const auto vocab = words.make_many(30);
    for (std::size_t s = 0; s < sentences_per_lobby; ++s) {
      std::vector<std::string> ws;
      for (int w = 0; w < 8; ++w) ws.push_back(rng.pick(vocab));
      if (l == 0 && rng.uniform() < 0.8) ws[rng.below(ws.size())] = "fossil";
      out.push_back({id, join(ws)});
    }
  }
  return out;
}

}  // namespace lobbylink::fixture

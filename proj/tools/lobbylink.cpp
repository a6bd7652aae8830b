// lobbylink command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lobbylink/analyze.hpp"
#include "lobbylink/classify.hpp"
#include "lobbylink/corpus.hpp"
#include "lobbylink/error.hpp"
#include "lobbylink/eval.hpp"
#include "lobbylink/fixture.hpp"
#include "lobbylink/pipeline.hpp"
#include "lobbylink/providers.hpp"
#include "lobbylink/scorer.hpp"
#include "lobbylink/textprep.hpp"
#include "lobbylink/vectors.hpp"

namespace fs = std::filesystem;
using namespace lobbylink;
using pipeline::Settings;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument:
      return 2;
    case ErrorKind::parse:
    case ErrorKind::duplicate_id:
    case ErrorKind::dangling_reference:
    case ErrorKind::io:
    case ErrorKind::precondition:
    case ErrorKind::not_fitted:
      return 3;
    case ErrorKind::offline_miss:
    case ErrorKind::timeout:
    case ErrorKind::malformed_response:
    case ErrorKind::provider_error:
    case ErrorKind::invariant_violation:
      return 4;
    case ErrorKind::degenerate:
      return 5;
  }
  return kExitOther;
}

void report_error(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << std::endl;
}

// ------------------------------------------------------------ option plumbing

/// Options of one subcommand, captured as strings so the flag layer can be
/// merged with config file, environment and defaults.
struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::vector<std::string> positional;
  std::string config;

  void option(const std::string& key, const std::string& help) {
    app->add_option("--" + key, values[key], help);
  }
  void flag(const std::string& key, const std::string& help) { app->add_flag("--" + key, switches[key], help); }

  Settings settings() const {
    Settings s(config);
    for (const auto& [k, v] : values)
      if (app->count("--" + k)) s.set_flag(k, v);
    for (const auto& [k, v] : switches)
      if (app->count("--" + k)) s.set_flag(k, v ? "true" : "false");
    return s;
  }
};

Command& add_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds, const std::string& name,
                     const std::string& help) {
  cmds.push_back(std::make_unique<Command>());
  auto& c = *cmds.back();
  c.app = root.add_subcommand(name, help);
  c.app->add_option("--config", c.config, "JSON file of option defaults");
  c.option("seed", "seed for every stochastic component (default 0)");
  c.option("workers", "worker threads (default 1)");
  return c;
}

std::string required(Settings& s, const std::string& key) {
  const auto v = s.str(key, "");
  if (v.empty()) throw Error(ErrorKind::invalid_argument, "--" + key + " is required");
  return v;
}

std::uint64_t seed_of(Settings& s) { return static_cast<std::uint64_t>(s.integer("seed", 0)); }

unsigned workers_of(Settings& s) {
  const auto w = s.integer("workers", 1);
  if (w < 1) throw Error(ErrorKind::invalid_argument, "--workers must be at least 1");
  return static_cast<unsigned>(w);
}

std::size_t positive(Settings& s, const std::string& key, long long fallback) {
  const auto v = s.integer(key, fallback);
  if (v < 1) throw Error(ErrorKind::invalid_argument, "--" + key + " must be positive");
  return static_cast<std::size_t>(v);
}

double unit_open(Settings& s, const std::string& key, double fallback) {
  const double v = s.real(key, fallback);
  if (!(v > 0 && v <= 1)) throw Error(ErrorKind::invalid_argument, "--" + key + " must lie in (0, 1]");
  return v;
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  return {dir / "documents.jsonl", dir / "entities.jsonl", dir / "groups.jsonl"};
}

std::vector<std::string> mep_ids(const corpus::Corpus& c) {
  std::vector<std::string> out;
  for (const auto& m : c.meps()) out.push_back(m.mep_id);
  return out;
}

std::vector<std::string> lobby_ids(const corpus::Corpus& c) {
  std::vector<std::string> out;
  for (const auto& l : c.lobbies()) out.push_back(l.lobby_id);
  return out;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Inference client over the cache files named by --cache (comma separated).
/// With --offline there is no backend and every miss is an error.
struct ClientSetup {
  std::shared_ptr<providers::ResponseCache> cache = std::make_shared<providers::ResponseCache>();
  std::unique_ptr<providers::InferenceClient> client;
  std::vector<fs::path> cache_files;
  std::string endpoint;
};

ClientSetup make_client(Settings& s, std::size_t dim) {
  ClientSetup cs;
  std::stringstream list(s.str("cache", ""));
  for (std::string p; std::getline(list, p, ',');)
    if (!p.empty()) {
      cs.cache->load(p);
      cs.cache_files.emplace_back(p);
    }
  std::unique_ptr<providers::Backend> backend;
  if (s.flag("offline", false)) {
    cs.endpoint = "offline";
  } else {
    cs.endpoint = s.str("provider", "builtin");
    const auto timeout_ms = s.integer("timeout-ms", 30000);
    backend = providers::make_backend(cs.endpoint, dim, seed_of(s), std::chrono::milliseconds(timeout_ms));
  }
  cs.client = std::make_unique<providers::InferenceClient>(cs.cache, std::move(backend), dim);
  return cs;
}

void finish_client(Settings& s, const ClientSetup& cs, std::vector<fs::path>& outputs) {
  const auto out = s.str("cache-out", "");
  if (!out.empty()) {
    cs.cache->save(out);
    outputs.emplace_back(out);
  }
  const auto st = cs.client->stats();
  std::cerr << "inference: " << st.hits << " cache hits, " << st.misses << " misses, " << st.round_trips
            << " round trips (" << cs.endpoint << ")\n";
}

// ------------------------------------------------------------ ingest

int cmd_ingest(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path out = required(s, "out");
  const double fuzzy = unit_open(s, "fuzzy", 0.90);
  const auto c = corpus::Corpus::load_directory(dir);
  fs::create_directories(out);
  std::vector<fs::path> inputs = corpus_files(dir), outputs;
  const auto meps = mep_ids(c), lobbies = lobby_ids(c);
  const std::set<std::string> mep_set(meps.begin(), meps.end()), lobby_set(lobbies.begin(), lobbies.end());

  nlohmann::ordered_json summary;
  summary["documents"] = c.documents().size();
  summary["meps"] = c.meps().size();
  summary["lobbies"] = c.lobbies().size();
  summary["groups"] = c.groups().size();
  summary["debates"] = c.debates().size();
  if (fs::exists(dir / "tweets.jsonl")) {
    inputs.push_back(dir / "tweets.jsonl");
    const auto links = corpus::build_retweet_links(corpus::load_tweets(dir / "tweets.jsonl"), mep_set, lobby_set);
    corpus::write_links(out / "retweet_links.jsonl", links);
    outputs.push_back(out / "retweet_links.jsonl");
    summary["retweet_links"] = links.links.size();
  }
  if (fs::exists(dir / "meetings.jsonl")) {
    inputs.push_back(dir / "meetings.jsonl");
    const auto r = corpus::match_meeting_lobbies(corpus::load_meetings(dir / "meetings.jsonl"), c.lobbies(),
                                                 mep_set, fuzzy);
    corpus::write_links(out / "meeting_links.jsonl", r.links);
    auto um = open_out(out / "unmatched_meetings.jsonl");
    for (const auto& u : r.unmatched) {
      nlohmann::ordered_json j;
      j["mep_id"] = u.mep_id;
      j["lobby_name"] = u.lobby_name;
      j["best_lobby_id"] = u.best_lobby_id;
      j["best_score"] = u.best_score;
      j["reason"] = u.reason;
      um << j.dump() << '\n';
    }
    um.close();
    outputs.push_back(out / "meeting_links.jsonl");
    outputs.push_back(out / "unmatched_meetings.jsonl");
    summary["meeting_links"] = r.links.links.size();
    summary["unmatched_meetings"] = r.unmatched.size();
  }
  summary["manifest"] = "manifest.json";
  open_out(out / "summary.json") << summary.dump(2) << '\n';
  outputs.push_back(out / "summary.json");
  pipeline::write_manifest(out, "ingest", s.resolved(), inputs, outputs);
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ classifiers

int cmd_train_position(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path out = required(s, "out");
  classify::PositionTrainingOptions opt;
  opt.iterations = static_cast<int>(positive(s, "iterations", opt.iterations));
  opt.step = s.real("step", opt.step);
  opt.l2 = s.real("l2", opt.l2);
  opt.threshold = unit_open(s, "decision-threshold", opt.threshold);
  opt.min_df = static_cast<int>(positive(s, "min-df", opt.min_df));
  const auto c = corpus::Corpus::load_directory(dir);
  std::vector<classify::PositionExample> docs;
  std::set<std::string> lobbies;
  for (const auto& l : c.lobbies()) lobbies.insert(l.lobby_id);
  for (const auto& d : c.documents())
    if (lobbies.count(d.owner_id) && d.source_url) docs.push_back({d.text, *d.source_url});
  const auto model = classify::train_position_classifier(docs, opt);
  auto f = open_out(out);
  model.save(f);
  f.close();
  pipeline::write_manifest(out, "train-position", s.resolved(), corpus_files(dir), {out});
  std::size_t weak = 0, predicted = 0;
  for (const auto& d : docs) {
    weak += classify::weak_position_label(d.url);
    predicted += model.is_position_paper(d.text);
  }
  std::cout << "{\"documents\":" << docs.size() << ",\"weak_positive\":" << weak
            << ",\"predicted_positive\":" << predicted << "}\n";
  return kExitOk;
}

std::vector<classify::LabeledSentence> lobby_sentences(const corpus::Corpus& c, const std::set<corpus::DocKind>& kinds) {
  std::vector<classify::LabeledSentence> out;
  for (const auto& l : c.lobbies())
    for (const auto* d : c.documents_of(l.lobby_id, kinds))
      for (auto& sentence : textprep::split_sentences(d->text)) out.push_back({l.lobby_id, std::move(sentence)});
  return out;
}

int cmd_train_authorship(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path out = required(s, "out");
  classify::AuthorshipConfig cfg;
  cfg.bucket_count = static_cast<std::uint32_t>(positive(s, "buckets", cfg.bucket_count));
  cfg.embed_dim = positive(s, "dim", static_cast<long long>(cfg.embed_dim));
  cfg.epochs = static_cast<int>(positive(s, "epochs", cfg.epochs));
  cfg.lr = s.real("lr", cfg.lr);
  cfg.max_ngram = static_cast<int>(positive(s, "max-ngram", cfg.max_ngram));
  cfg.seed = seed_of(s);
  const auto kinds = pipeline::parse_kinds(s.str("kinds", "papers"));
  const auto c = corpus::Corpus::load_directory(dir);
  const auto sentences = lobby_sentences(c, kinds);
  if (sentences.empty()) throw Error(ErrorKind::precondition, "no lobby sentences of kinds " + pipeline::kinds_string(kinds));
  const auto model = classify::train_authorship(sentences, cfg);
  auto f = open_out(out);
  model.save(f);
  f.close();
  pipeline::write_manifest(out, "train-authorship", s.resolved(), corpus_files(dir), {out});
  std::cout << "{\"sentences\":" << sentences.size() << ",\"lobbies\":" << model.lobby_ids().size() << "}\n";
  return kExitOk;
}

int cmd_top_terms(Settings& s) {
  const fs::path model_path = required(s, "model");
  const auto k = positive(s, "k", 10);
  const auto lobby = s.str("lobby", "");
  std::ifstream in(model_path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + model_path.string());
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  std::vector<std::pair<std::string, std::vector<classify::WeightedTerm>>> tables;
  if (first.rfind("#lobbylink-position", 0) == 0) {
    tables.emplace_back("position", classify::PositionPaperModel::load(in).top_terms(k));
  } else if (first.rfind("#lobbylink-authorship", 0) == 0) {
    const auto model = classify::AuthorshipModel::load(in);
    if (!lobby.empty()) {
      tables.emplace_back(lobby, model.top_terms(lobby, k));
    } else {
      for (const auto& l : model.lobby_ids()) tables.emplace_back(l, model.top_terms(l, k));
    }
  } else {
    throw Error(ErrorKind::parse, model_path.string() + ": unknown model file");
  }
  std::ostringstream text;
  text << "label\trank\tterm\tweight\n";
  for (const auto& [label, terms] : tables)
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string term = terms[i].term;
      for (auto pos = term.find(textprep::kNgramSeparator); pos != std::string::npos;
           pos = term.find(textprep::kNgramSeparator))
        term.replace(pos, textprep::kNgramSeparator.size(), " ");
      text << label << '\t' << i + 1 << '\t' << term << '\t' << fmt17(terms[i].weight) << '\n';
    }
  const auto out = s.str("out", "");
  if (out.empty()) {
    std::cout << text.str();
  } else {
    open_out(out) << text.str();
    pipeline::write_manifest(out, "top-terms", s.resolved(), {model_path}, {out});
  }
  return kExitOk;
}

// ------------------------------------------------------------ embed

int cmd_embed(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path out = required(s, "out");
  const auto kinds = pipeline::parse_kinds(s.str("kinds", "speeches,papers"));
  const auto d = positive(s, "d", vectors::kDefaultDim);
  const auto max_tokens = positive(s, "max-tokens", vectors::kDefaultMaxTokens);
  const auto format_name = s.str("format", "text");
  if (format_name != "text" && format_name != "binary")
    throw Error(ErrorKind::invalid_argument, "--format must be text or binary");
  const auto format = format_name == "text" ? vectors::StoreFormat::text : vectors::StoreFormat::binary;
  const auto embedder = s.str("embedder", "reference");
  const auto c = corpus::Corpus::load_directory(dir);
  std::vector<fs::path> inputs = corpus_files(dir), outputs{out};
  if (embedder == "reference") {
    vectors::ReferenceEmbedder e(d, seed_of(s));
    const auto index = pipeline::embed_documents(c, kinds, e, max_tokens);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    vectors::save_store(out, index, e.tag(), format);
  } else if (embedder == "provider") {
    auto cs = make_client(s, d);
    for (const auto& f : cs.cache_files) inputs.push_back(f);
    // The endpoint lives in the manifest; the tag only names the space, so a
    // cached replay writes the same store as the live run.
    providers::ClientEmbedder e(*cs.client, "provider:d=" + std::to_string(d));
    const auto index = pipeline::embed_documents(c, kinds, e, max_tokens);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    vectors::save_store(out, index, e.tag(), format);
    finish_client(s, cs, outputs);
  } else {
    throw Error(ErrorKind::invalid_argument, "--embedder must be reference or provider");
  }
  pipeline::write_manifest(out, "embed", s.resolved(), inputs, outputs);
  return kExitOk;
}

// ------------------------------------------------------------ score

int cmd_score(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path out = required(s, "out");
  const auto method = scorer::parse_method(required(s, "method"));
  const auto mep_kinds = pipeline::parse_kinds(s.str("mep-docs", "speeches"));
  const auto lobby_kinds = pipeline::parse_kinds(s.str("lobby-docs", "papers"));
  const auto workers = workers_of(s);
  const auto seed = seed_of(s);
  const auto c = corpus::Corpus::load_directory(dir);
  const auto meps = mep_ids(c), lobbies = lobby_ids(c);
  std::vector<fs::path> inputs = corpus_files(dir), outputs{out};

  auto pair_vectors = [&](scorer::OwnerVectors& mv, scorer::OwnerVectors& lv) {
    const fs::path vp = required(s, "vectors");
    inputs.push_back(vp);
    const auto store = vectors::load_store(vp);
    mv = scorer::group_by_owner(c, store.index, meps, mep_kinds);
    lv = scorer::group_by_owner(c, store.index, lobbies, lobby_kinds);
    return store.index.dim();
  };
  scorer::PairScoringOptions pairs;
  pairs.workers = workers;
  pairs.search.block = positive(s, "block", 64);

  std::optional<scorer::ScoreMatrix> m;
  switch (method) {
    case scorer::Method::random:
      m = scorer::score_random(meps, lobbies, seed);
      break;
    case scorer::Method::prolificacy:
      m = scorer::score_prolificacy(c, mep_kinds, lobby_kinds);
      break;
    case scorer::Method::nationality:
      m = scorer::score_nationality(c);
      break;
    case scorer::Method::class_: {
      const fs::path mp = required(s, "model");
      inputs.push_back(mp);
      std::ifstream in(mp);
      if (!in) throw Error(ErrorKind::io, "cannot open " + mp.string());
      m = scorer::score_class(classify::AuthorshipModel::load(in), c, mep_kinds, workers);
      break;
    }
    case scorer::Method::ss: {
      scorer::OwnerVectors mv, lv;
      pair_vectors(mv, lv);
      m = scorer::score_ss(meps, lobbies, mv, lv, pairs);
      break;
    }
    case scorer::Method::ent: {
      scorer::OwnerVectors mv, lv;
      const auto dim = pair_vectors(mv, lv);
      auto cs = make_client(s, dim);
      for (const auto& f : cs.cache_files) inputs.push_back(f);
      scorer::EntOptions eo;
      eo.k = positive(s, "top-k", 10);
      eo.pairs = pairs;
      scorer::EntStats st;
      m = scorer::score_ent(meps, lobbies, mv, lv, pipeline::client_judge(c, *cs.client), eo, &st);
      finish_client(s, cs, outputs);
      std::cerr << "ent: " << st.judged << " judgements, " << st.top_rejected << " pairs with a rejected top match, "
                << st.absent_after_extension << " absent after extension\n";
      break;
    }
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  scorer::save_scores(out, *m, pipeline::manifest_ref(out));
  pipeline::write_manifest(out, "score", s.resolved(), inputs, outputs);
  return kExitOk;
}

// ------------------------------------------------------------ eval

int cmd_eval(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path scores_path = required(s, "scores");
  const fs::path truth_path = required(s, "truth");
  const fs::path out = required(s, "out");
  const double alpha = unit_open(s, "alpha", 0.05);
  const auto universe_mode = s.str("universe", "all");
  const auto c = corpus::Corpus::load_directory(dir);
  const auto scores = scorer::load_scores(scores_path);
  const auto truth = corpus::load_links(truth_path);
  c.check_links(truth);
  std::optional<eval::PairSet> universe;
  if (universe_mode == "documents") {
    universe = eval::document_universe(c, pipeline::parse_kinds(s.str("mep-docs", "speeches")),
                                       pipeline::parse_kinds(s.str("lobby-docs", "papers")));
  } else if (universe_mode != "all") {
    throw Error(ErrorKind::invalid_argument, "--universe must be all or documents");
  }
  const auto report = eval::evaluate(scores, truth, alpha, universe ? &*universe : nullptr);
  auto j = nlohmann::ordered_json::parse(eval::report_json(report));
  j["manifest"] = pipeline::manifest_ref(out);
  open_out(out) << j.dump(2) << '\n';
  std::vector<fs::path> outputs{out};
  const auto curve = s.str("curve", "");
  if (!curve.empty()) {
    eval::write_curve(curve, eval::roc(scores, truth, universe ? &*universe : nullptr));
    outputs.emplace_back(curve);
  }
  std::vector<fs::path> inputs = corpus_files(dir);
  inputs.push_back(scores_path);
  inputs.push_back(truth_path);
  pipeline::write_manifest(out, "eval", s.resolved(), inputs, outputs);
  std::cout << j.dump() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ links / analyze

void write_links_tsv(std::ostream& out, const std::vector<analyze::DiscoveredLink>& links, const std::string& ref) {
  out << "#lobbylink-links v1 manifest=" << ref << '\n';
  out << "# " << analyze::kLinkCaveat << '\n';
  out << "mep\tlobby\tscore\tmep_doc\tlobby_doc\n";
  for (const auto& l : links) {
    out << l.mep_id << '\t' << l.lobby_id << '\t' << fmt17(l.score) << '\t';
    if (l.provenance)
      out << l.provenance->left_doc << '\t' << l.provenance->right_doc;
    else
      out << "-\t-";
    out << '\n';
  }
}

int cmd_links(Settings& s) {
  const fs::path scores_path = required(s, "scores");
  const fs::path out = required(s, "out");
  const double threshold = s.real("threshold", 0.7);
  const auto links = analyze::extract_links(scorer::load_scores(scores_path), threshold);
  auto f = open_out(out);
  write_links_tsv(f, links, pipeline::manifest_ref(out));
  f.close();
  pipeline::write_manifest(out, "links", s.resolved(), {scores_path}, {out});
  std::cout << "{\"links\":" << links.size() << "}\n";
  return kExitOk;
}

std::string header(const std::string& kind) {
  return "#lobbylink-" + kind + " v1 manifest=manifest.json\n# " + analyze::kLinkCaveat + "\n";
}

void write_focus(const fs::path& p, const std::string& kind, const analyze::FocusMatrix& m) {
  auto out = open_out(p);
  out << header(kind) << "row";
  for (const auto& c : m.columns) out << '\t' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << m.rows[i];
    for (double x : m.normalized[i]) out << '\t' << fmt17(x);
    out << '\n';
  }
}

corpus::IdeologyDimension parse_dimension(const std::string& name) {
  for (auto d : {corpus::IdeologyDimension::ideo, corpus::IdeologyDimension::econ, corpus::IdeologyDimension::soc,
                 corpus::IdeologyDimension::eu})
    if (name == corpus::to_string(d)) return d;
  throw Error(ErrorKind::invalid_argument, "unknown ideology dimension '" + name + "'");
}

int cmd_analyze(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path scores_path = required(s, "scores");
  const fs::path out = required(s, "out");
  const double threshold = s.real("threshold", 0.7);
  const auto seed = seed_of(s);
  const auto cluster_by = s.str("cluster-by", "kmeans");
  const auto pca_on = s.str("pca-on", "clusters");
  const auto order_by = parse_dimension(s.str("order-by", "ideo"));
  const auto counting =
      s.flag("count-pairs", false) ? analyze::FocusCounting::link_records : analyze::FocusCounting::distinct_meps;
  if (pca_on != "clusters" && pca_on != "lobbies")
    throw Error(ErrorKind::invalid_argument, "--pca-on must be clusters or lobbies");

  const auto c = corpus::Corpus::load_directory(dir);
  const auto scores = scorer::load_scores(scores_path);
  const auto links = analyze::extract_links(scores, threshold);
  std::vector<fs::path> inputs = corpus_files(dir), outputs;
  inputs.push_back(scores_path);
  fs::create_directories(out);
  const auto lobbies = lobby_ids(c);

  {
    auto f = open_out(out / "links.tsv");
    write_links_tsv(f, links, "manifest.json");
    outputs.push_back(out / "links.tsv");
  }
  {
    std::vector<std::string> warnings;
    const auto ranks = analyze::debate_rank(links, c, nullptr, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    auto f = open_out(out / "debates.tsv");
    f << header("debates") << "debate\ttitle\tlinks\tspeeches\trate\n";
    for (const auto& r : ranks)
      f << r.debate_id << '\t' << r.title << '\t' << r.links << '\t' << r.speech_count << '\t' << fmt17(r.rate)
        << '\n';
    outputs.push_back(out / "debates.tsv");
  }

  const auto focus = analyze::focus_matrix(links, lobbies, c, c.groups(), counting);
  write_focus(out / "focus_lobbies.tsv", "focus", analyze::order_columns_by_ideology(focus, c.groups(), order_by));
  outputs.push_back(out / "focus_lobbies.tsv");

  // Lobby clusters: k-means over mean document vectors, or the register's ids.
  analyze::ClusterAssignment clusters;
  if (cluster_by == "entities") {
    for (const auto& l : c.lobbies()) {
      if (!l.cluster_id) throw Error(ErrorKind::precondition, "lobby '" + l.lobby_id + "' has no cluster_id");
      clusters.cluster_of[l.lobby_id] = *l.cluster_id;
      clusters.label[*l.cluster_id] = *l.cluster_id;
    }
  } else if (cluster_by == "kmeans") {
    const fs::path vp = required(s, "vectors");
    inputs.push_back(vp);
    const auto store = vectors::load_store(vp);
    const auto kinds = pipeline::parse_kinds(s.str("lobby-docs", "papers"));
    const auto grouped = scorer::group_by_owner(c, store.index, lobbies, kinds);
    std::vector<std::string> ids;
    std::vector<std::vector<double>> points;
    for (const auto& [id, index] : grouped) {
      std::vector<double> mean(index.dim(), 0.0);
      for (std::size_t r = 0; r < index.size(); ++r)
        for (std::size_t j = 0; j < index.dim(); ++j) mean[j] += index.row(r)[j];
      for (double& x : mean) x /= static_cast<double>(index.size());
      ids.push_back(id);
      points.push_back(std::move(mean));
    }
    clusters = analyze::cluster_lobbies(ids, points, positive(s, "clusters", 100), seed);
  } else {
    throw Error(ErrorKind::invalid_argument, "--cluster-by must be kmeans or entities");
  }
  {
    auto f = open_out(out / "clusters.tsv");
    f << header("clusters") << "lobby\tcluster\n";
    for (const auto& [lobby, cluster] : clusters.cluster_of) f << lobby << '\t' << cluster << '\n';
    outputs.push_back(out / "clusters.tsv");
  }
  const auto cfocus = analyze::cluster_focus(focus, clusters);
  write_focus(out / "focus_clusters.tsv", "focus", analyze::order_columns_by_ideology(cfocus, c.groups(), order_by));
  outputs.push_back(out / "focus_clusters.tsv");

  const auto& base = pca_on == "clusters" ? cfocus : focus;
  const auto result = analyze::pca(base.normalized, base.columns.size());
  {
    auto f = open_out(out / "pca.tsv");
    f << header("pca") << "row";
    for (std::size_t k = 0; k < result.components.size(); ++k) f << "\tpc" << k + 1;
    f << '\n';
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
      f << base.rows[i];
      for (double x : result.projections[i]) f << '\t' << fmt17(x);
      f << '\n';
    }
    auto g = open_out(out / "pca_components.tsv");
    g << header("pca-components") << "component\texplained_variance\tratio";
    for (const auto& col : base.columns) g << '\t' << col;
    g << '\n';
    for (std::size_t k = 0; k < result.components.size(); ++k) {
      g << "pc" << k + 1 << '\t' << fmt17(result.explained_variance[k]) << '\t'
        << fmt17(result.total_variance > 0 ? result.explained_variance[k] / result.total_variance : 0.0);
      for (double x : result.components[k]) g << '\t' << fmt17(x);
      g << '\n';
    }
    outputs.push_back(out / "pca.tsv");
    outputs.push_back(out / "pca_components.tsv");
  }
  {
    const auto table = analyze::correlation_table(base, result, c.groups(), seed);
    auto f = open_out(out / "correlations.tsv");
    f << header("correlations") << "component\tdimension\trho\tp_value\tp_method\tsignificant\n";
    for (const auto& r : table)
      f << "pc" << r.component + 1 << '\t' << corpus::to_string(r.dimension) << '\t' << fmt17(r.result.rho) << '\t'
        << fmt17(r.result.p_value) << '\t' << r.result.p_method << '\t' << (r.significant ? "yes" : "no") << '\n';
    outputs.push_back(out / "correlations.tsv");
  }
  pipeline::write_manifest(out, "analyze", s.resolved(), inputs, outputs);
  std::cout << "{\"links\":" << links.size() << ",\"clusters\":" << cfocus.rows.size() << "}\n";
  return kExitOk;
}

// ------------------------------------------------------------ inspect / report / misc

int cmd_inspect(Settings& s) {
  const fs::path dir = required(s, "corpus");
  const fs::path scores_path = required(s, "scores");
  const auto mep = required(s, "mep");
  const auto lobby = required(s, "lobby");
  const auto c = corpus::Corpus::load_directory(dir);
  const auto scores = scorer::load_scores(scores_path);
  const auto& e = scores.at(mep, lobby);
  if (e.absent() || !e.provenance)
    throw Error(ErrorKind::precondition, "no matched document pair for (" + mep + ", " + lobby + ")" +
                                             (e.note.empty() ? "" : ": " + e.note));
  analyze::DiscoveredLink link{mep, lobby, *e.score, e.provenance};
  std::optional<providers::NliTriple> nli;
  if (!s.str("cache", "").empty() || s.flag("nli", false)) {
    auto cs = make_client(s, vectors::kDefaultDim);
    nli = cs.client->nli(c.document(e.provenance->right_doc).text, c.document(e.provenance->left_doc).text);
  }
  std::cout << analyze::inspect_match(link, c, nli);
  return kExitOk;
}

int cmd_report(Settings& s, const std::vector<std::string>& reports) {
  const fs::path out = required(s, "out");
  if (reports.empty()) throw Error(ErrorKind::invalid_argument, "report needs at least one eval report");
  std::vector<eval::EvalReport> rows;
  std::vector<fs::path> inputs;
  for (const auto& r : reports) {
    std::ifstream in(r);
    if (!in) throw Error(ErrorKind::io, "cannot open " + r);
    std::stringstream ss;
    ss << in.rdbuf();
    rows.push_back(eval::parse_report_json(ss.str()));
    inputs.emplace_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.truth_kind != b.truth_kind ? a.truth_kind < b.truth_kind : a.auc > b.auc;
  });
  auto f = open_out(out);
  f << "#lobbylink-report v1 manifest=" << pipeline::manifest_ref(out) << '\n';
  f << "truth\tmethod\tauc\tpauc\talpha\tpositives\tnegatives\tabsent\n";
  char buf[64];
  for (const auto& r : rows) {
    f << r.truth_kind << '\t' << r.method;
    std::snprintf(buf, sizeof buf, "\t%.3f\t%.3f\t%g", r.auc, r.pauc, r.alpha);
    f << buf << '\t' << r.positives << '\t' << r.negatives << '\t' << r.absent << '\n';
  }
  f.close();
  pipeline::write_manifest(out, "report", s.resolved(), inputs, {out});
  std::ifstream back(out);
  std::cout << back.rdbuf();
  return kExitOk;
}

int cmd_gen_fixture(Settings& s) {
  const fs::path out = required(s, "out");
  fixture::PlantedSpec spec;
  spec.seed = static_cast<std::uint64_t>(s.integer("fixture-seed", static_cast<long long>(spec.seed)));
  fixture::write_planted_fixture(out, spec);
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& manifests) {
  if (manifests.empty()) throw Error(ErrorKind::invalid_argument, "verify needs at least one manifest");
  std::size_t bad = 0;
  for (const auto& m : manifests) {
    const auto mismatched = pipeline::verify_manifest(pipeline::load_manifest(m));
    for (const auto& p : mismatched) std::cout << m << ": hash mismatch for " << p << '\n';
    if (mismatched.empty()) std::cout << m << ": ok\n";
    bad += mismatched.size();
  }
  if (bad) throw Error(ErrorKind::precondition, std::to_string(bad) + " file(s) differ from their manifest");
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"lobbylink: links between MEP speeches and lobby position papers"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> cmds;

  auto& ingest = add_command(app, cmds, "ingest", "validate a corpus and derive retweet and meeting links");
  ingest.option("corpus", "corpus directory");
  ingest.option("out", "output directory");
  ingest.option("fuzzy", "meeting name match threshold (default 0.90)");

  auto& tpos = add_command(app, cmds, "train-position", "train the position-paper classifier on URL weak labels");
  tpos.option("corpus", "corpus directory");
  tpos.option("out", "model file");
  for (const char* k : {"iterations", "step", "l2", "decision-threshold", "min-df"}) tpos.option(k, "training option");

  auto& tauth = add_command(app, cmds, "train-authorship", "train the lobby authorship classifier");
  tauth.option("corpus", "corpus directory");
  tauth.option("out", "model file");
  tauth.option("kinds", "lobby document kinds (default papers)");
  for (const char* k : {"buckets", "dim", "epochs", "lr", "max-ngram"}) tauth.option(k, "training option");

  auto& terms = add_command(app, cmds, "top-terms", "list the most predictive terms of a model");
  terms.option("model", "model file");
  terms.option("k", "terms per label (default 10)");
  terms.option("lobby", "authorship model: only this lobby");
  terms.option("out", "output file (default stdout)");

  auto& embed = add_command(app, cmds, "embed", "embed documents into a vector store");
  embed.option("corpus", "corpus directory");
  embed.option("out", "vector store file");
  embed.option("kinds", "document kinds (default speeches,papers)");
  embed.option("embedder", "reference or provider (default reference)");
  embed.option("d", "embedding dimension (default 384)");
  embed.option("max-tokens", "pooling threshold in tokens (default 256)");
  embed.option("format", "text or binary (default text)");

  auto& score = add_command(app, cmds, "score", "score every (MEP, lobby) pair");
  score.option("corpus", "corpus directory");
  score.option("out", "score file");
  score.option("method", "random, prolificacy, nationality, class, ss or ent");
  score.option("mep-docs", "MEP document kinds (default speeches)");
  score.option("lobby-docs", "lobby document kinds (default papers)");
  score.option("vectors", "vector store (ss, ent)");
  score.option("model", "authorship model (class)");
  score.option("top-k", "ent candidate pairs before extension (default 10)");
  score.option("block", "search block size (default 64)");

  auto& ev = add_command(app, cmds, "eval", "ROC, AUC and partial AUC against a truth link set");
  ev.option("corpus", "corpus directory");
  ev.option("scores", "score file");
  ev.option("truth", "truth links (JSONL)");
  ev.option("out", "report file (JSON)");
  ev.option("alpha", "partial AUC bound (default 0.05)");
  ev.option("curve", "optional ROC curve dump");
  ev.option("universe", "all or documents (default all)");
  ev.option("mep-docs", "universe=documents: MEP kinds");
  ev.option("lobby-docs", "universe=documents: lobby kinds");

  auto& links = add_command(app, cmds, "links", "pairs scoring at least the threshold");
  links.option("scores", "ss or ent score file");
  links.option("out", "links file");
  links.option("threshold", "link threshold (default 0.7)");

  auto& an = add_command(app, cmds, "analyze", "debate ranking, group focus, clustering, PCA and correlations");
  an.option("corpus", "corpus directory");
  an.option("scores", "ss or ent score file");
  an.option("out", "output directory");
  an.option("threshold", "link threshold (default 0.7)");
  an.option("vectors", "vector store for k-means");
  an.option("lobby-docs", "lobby kinds for k-means vectors (default papers)");
  an.option("clusters", "k-means cluster count K (default 100)");
  an.option("cluster-by", "kmeans or entities (default kmeans)");
  an.option("pca-on", "clusters or lobbies (default clusters)");
  an.option("order-by", "ideology dimension ordering the focus columns (default ideo)");
  an.flag("count-pairs", "count link records instead of distinct MEPs");

  auto& insp = add_command(app, cmds, "inspect", "show the matched texts behind one pair");
  insp.option("corpus", "corpus directory");
  insp.option("scores", "ss or ent score file");
  insp.option("mep", "MEP id");
  insp.option("lobby", "lobby id");
  insp.flag("nli", "also report the NLI verdict");

  auto& rep = add_command(app, cmds, "report", "tabulate eval reports");
  rep.option("out", "table file");
  rep.app->add_option("reports", rep.positional, "eval report files");

  auto& gen = add_command(app, cmds, "gen-fixture", "write the planted-link fixture");
  gen.option("out", "output directory");
  gen.option("fixture-seed", "generator seed (default 7)");

  auto& ver = add_command(app, cmds, "verify", "check files against their manifests");
  ver.app->add_option("manifests", ver.positional, "manifest files");

  for (auto* c : {&embed, &score, &insp}) {
    c->option("cache", "inference cache files, comma separated");
    c->option("cache-out", "write the updated cache here");
    c->option("provider", "builtin, exec:<command> or tcp:<host>:<port> (env LOBBYLINK_PROVIDER)");
    c->option("timeout-ms", "provider timeout (default 30000)");
    c->flag("offline", "cache only; never contact a provider");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what(), kExitUsage);
    return kExitUsage;
  }

  try {
    for (auto& c : cmds) {
      if (!c->app->parsed()) continue;
      auto s = c->settings();
      const auto name = c->app->get_name();
      if (name == "ingest") return cmd_ingest(s);
      if (name == "train-position") return cmd_train_position(s);
      if (name == "train-authorship") return cmd_train_authorship(s);
      if (name == "top-terms") return cmd_top_terms(s);
      if (name == "embed") return cmd_embed(s);
      if (name == "score") return cmd_score(s);
      if (name == "eval") return cmd_eval(s);
      if (name == "links") return cmd_links(s);
      if (name == "analyze") return cmd_analyze(s);
      if (name == "inspect") return cmd_inspect(s);
      if (name == "report") return cmd_report(s, c->positional);
      if (name == "gen-fixture") return cmd_gen_fixture(s);
      if (name == "verify") return cmd_verify(c->positional);
    }
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    report_error(to_string(e.kind()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error("internal", e.what(), kExitOther);
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }

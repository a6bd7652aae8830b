#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/scorer.hpp"

namespace lobbylink::scorer {

const char* to_string(Method m) {
  switch (m) {
    case Method::random: return "random";
    case Method::prolificacy: return "prolificacy";
    case Method::nationality: return "nationality";
    case Method::class_: return "class";
    case Method::ss: return "ss";
    case Method::ent: return "ent";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::random, Method::prolificacy, Method::nationality, Method::class_, Method::ss, Method::ent})
    if (name == to_string(m)) return m;
  throw Error(ErrorKind::invalid_argument, "unknown scoring method '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v, const char* what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw Error(ErrorKind::duplicate_id, std::string("duplicate ") + what + " id in score matrix");
  return v;
}

std::optional<std::size_t> index_in(const std::vector<std::string>& v, std::string_view id) {
  auto it = std::lower_bound(v.begin(), v.end(), id);
  if (it == v.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// independent, so the result does not depend on the thread count.
template <class Fn>
void parallel_rows(std::size_t n, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
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

const vectors::VectorIndex* owner_index(const OwnerVectors& v, const std::string& id) {
  auto it = v.find(id);
  return it == v.end() || it->second.empty() ? nullptr : &it->second;
}

std::string truncation_note(const vectors::MaxMatch& m) { return m.truncated_input ? "truncated-input" : ""; }

std::string join_notes(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + ";" + b;
}

}  // namespace

ScoreMatrix::ScoreMatrix(Method method, std::vector<std::string> meps, std::vector<std::string> lobbies)
    : method_(method),
      meps_(sorted_unique(std::move(meps), "MEP")),
      lobbies_(sorted_unique(std::move(lobbies), "lobby")),
      entries_(meps_.size() * lobbies_.size()) {}

const ScoreEntry& ScoreMatrix::at(std::string_view mep, std::string_view lobby) const {
  auto i = mep_index(mep);
  auto j = lobby_index(lobby);
  if (!i || !j)
    throw Error(ErrorKind::dangling_reference,
                "pair (" + std::string(mep) + ", " + std::string(lobby) + ") is not in the score matrix");
  return at(*i, *j);
}

std::optional<std::size_t> ScoreMatrix::mep_index(std::string_view id) const { return index_in(meps_, id); }
std::optional<std::size_t> ScoreMatrix::lobby_index(std::string_view id) const { return index_in(lobbies_, id); }

OwnerVectors group_by_owner(const corpus::Corpus& corpus, const vectors::VectorIndex& store,
                            const std::vector<std::string>& owners, const std::set<corpus::DocKind>& kinds) {
  OwnerVectors out;
  for (const auto& owner : owners) {
    std::vector<std::string> ids;
    for (const auto* d : corpus.documents_of(owner, kinds)) ids.push_back(d->doc_id);
    if (ids.empty()) continue;
    std::sort(ids.begin(), ids.end());
    out.emplace(owner, store.subset(ids));
  }
  return out;
}

ScoreMatrix score_random(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                         std::uint64_t seed) {
  ScoreMatrix out(Method::random, meps, lobbies);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const std::string key = out.meps()[i] + "\x1f" + out.lobbies()[j];
      out.at(i, j).score = unit_interval(mix64(seeded_hash(key, seed)));
    }
  return out;
}

ScoreMatrix score_prolificacy(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& mep_kinds,
                              const std::set<corpus::DocKind>& lobby_kinds) {
  ScoreMatrix out(Method::prolificacy, mep_ids(corpus), lobby_ids(corpus));
  std::vector<double> cols(out.cols());
  for (std::size_t j = 0; j < out.cols(); ++j)
    cols[j] = static_cast<double>(corpus.documents_of(out.lobbies()[j], lobby_kinds).size());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double n = static_cast<double>(corpus.documents_of(out.meps()[i], mep_kinds).size());
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j).score = n * cols[j];
  }
  return out;
}

ScoreMatrix score_nationality(const corpus::Corpus& corpus) {
  ScoreMatrix out(Method::nationality, mep_ids(corpus), lobby_ids(corpus));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto& mc = corpus.find_mep(out.meps()[i])->country;
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const auto& lc = corpus.find_lobby(out.lobbies()[j])->country;
      auto& e = out.at(i, j);
      if (mc.empty() || lc.empty())
        e.note = mc.empty() ? "mep-country-unknown" : "lobby-country-unknown";
      else
        e.score = mc == lc ? 1.0 : 0.0;
    }
  }
  return out;
}

ScoreMatrix score_class(const classify::AuthorshipModel& model, const corpus::Corpus& corpus,
                        const std::set<corpus::DocKind>& mep_kinds, unsigned workers) {
  ScoreMatrix out(Method::class_, mep_ids(corpus), lobby_ids(corpus));
  parallel_rows(out.rows(), workers, [&](std::size_t i) {
    const auto docs = corpus.documents_of(out.meps()[i], mep_kinds);
    if (docs.empty()) {
      for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j).note = "no-mep-documents";
      return;
    }
    std::vector<double> sum(out.cols(), 0.0);
    for (const auto* d : docs) {
      const auto p = model.predict(d->text);
      for (std::size_t j = 0; j < out.cols(); ++j) {
        auto it = p.find(out.lobbies()[j]);
        if (it != p.end()) sum[j] += it->second;
      }
    }
    const auto& heads = model.lobby_ids();
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto& e = out.at(i, j);
      if (!std::binary_search(heads.begin(), heads.end(), out.lobbies()[j]))
        e.note = "no-authorship-head";
      else
        e.score = sum[j] / static_cast<double>(docs.size());
    }
  });
  return out;
}

ScoreMatrix score_ss(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                     const OwnerVectors& mep_vectors, const OwnerVectors& lobby_vectors,
                     const PairScoringOptions& options) {
  ScoreMatrix out(Method::ss, meps, lobbies);
  parallel_rows(out.rows(), options.workers, [&](std::size_t i) {
    const auto* left = owner_index(mep_vectors, out.meps()[i]);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto& e = out.at(i, j);
      const auto* right = owner_index(lobby_vectors, out.lobbies()[j]);
      if (!left || !right) {
        e.note = !left ? "no-mep-documents" : "no-lobby-documents";
        continue;
      }
      auto m = vectors::max_inner_product(*left, *right, options.search);
      e.score = m.score;
      e.note = truncation_note(m);
      e.provenance = std::move(m);
    }
  });
  return out;
}

ScoreMatrix score_ent(const std::vector<std::string>& meps, const std::vector<std::string>& lobbies,
                      const OwnerVectors& mep_vectors, const OwnerVectors& lobby_vectors, const NliJudge& judge,
                      const EntOptions& options, EntStats* stats) {
  if (options.k == 0) throw Error(ErrorKind::invalid_argument, "ent candidate count k must be positive");
  ScoreMatrix out(Method::ent, meps, lobbies);
  std::atomic<std::size_t> judged{0}, rejected{0}, absent{0};
  parallel_rows(out.rows(), options.pairs.workers, [&](std::size_t i) {
    const auto* left = owner_index(mep_vectors, out.meps()[i]);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto& e = out.at(i, j);
      const auto* right = owner_index(lobby_vectors, out.lobbies()[j]);
      if (!left || !right) {
        e.note = !left ? "no-mep-documents" : "no-lobby-documents";
        continue;
      }
      const std::size_t total = left->size() * right->size();
      const auto candidates = vectors::top_pairs(*left, *right, 2 * options.k, options.pairs.search);
      std::size_t c = 0;
      for (; c < candidates.size(); ++c) {
        ++judged;
        if (judge(candidates[c].right_doc, candidates[c].left_doc).admissible()) break;
      }
      if (c == candidates.size()) {
        ++absent;
        e.note = total <= candidates.size()
                     ? "no-admissible-pair"
                     : "no-admissible-pair-in-top-" + std::to_string(candidates.size()) + "-of-" +
                           std::to_string(total) + ";constrained-max-not-exact";
        continue;
      }
      if (c > 0) ++rejected;
      const auto& m = candidates[c];
      e.score = m.score;
      std::string note = c == 0 ? "" : "rejected-" + std::to_string(c);
      if (c >= options.k) note = join_notes(note, "found-in-extension");
      e.note = join_notes(note, truncation_note(m));
      e.provenance = m;
    }
  });
  if (stats) *stats = {judged.load(), rejected.load(), absent.load()};
  return out;
}

// ------------------------------------------------------------ score file

void save_scores(const std::filesystem::path& path, const ScoreMatrix& m, const std::string& manifest_ref) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write score file " + path.string());
  out << "#lobbylink-scores v1 method=" << to_string(m.method()) << " manifest=" << manifest_ref << '\n';
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& e = m.at(i, j);
      out << m.meps()[i] << '\t' << m.lobbies()[j] << '\t' << to_string(m.method()) << '\t';
      if (e.score) {
        std::snprintf(buf, sizeof buf, "%.17g", *e.score);
        out << buf;
      } else {
        out << "ABSENT";
      }
      out << '\t';
      if (e.provenance)
        out << e.provenance->left_doc << ',' << e.provenance->right_doc;
      else
        out << '-';
      out << '\t' << (e.note.empty() ? "-" : e.note) << '\n';
    }
  if (!out) throw Error(ErrorKind::io, "failed writing score file " + path.string());
}

ScoreMatrix load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open score file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("#lobbylink-scores v1 method=", 0) != 0)
    throw Error(ErrorKind::parse, path.string() + ": missing score file header");
  const std::string method_name = line.substr(28, line.find(' ', 28) - 28);
  const Method method = parse_method(method_name);

  struct Row {
    std::string mep, lobby;
    ScoreEntry entry;
  };
  std::vector<Row> rows;
  std::set<std::string> meps, lobbies;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, '\t');) f.push_back(part);
    auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::parse, path.string() + " line " + std::to_string(lineno) + ": " + why);
    };
    if (f.size() != 6) fail("expected 6 tab-separated fields");
    if (f[2] != method_name) fail("method column disagrees with the header");
    Row r{f[0], f[1], {}};
    if (f[3] != "ABSENT") {
      try {
        std::size_t used = 0;
        r.entry.score = std::stod(f[3], &used);
        if (used != f[3].size()) fail("bad score");
      } catch (const std::exception&) {
        fail("bad score");
      }
    }
    if (f[4] != "-") {
      const auto comma = f[4].find(',');
      if (comma == std::string::npos) fail("provenance must be left_doc,right_doc");
      vectors::MaxMatch p;
      p.score = r.entry.score.value_or(0.0);
      p.left_doc = f[4].substr(0, comma);
      p.right_doc = f[4].substr(comma + 1);
      p.truncated_input = f[5].find("truncated-input") != std::string::npos;
      r.entry.provenance = std::move(p);
    }
    if (f[5] != "-") r.entry.note = f[5];
    meps.insert(r.mep);
    lobbies.insert(r.lobby);
    rows.push_back(std::move(r));
  }
  ScoreMatrix out(method, {meps.begin(), meps.end()}, {lobbies.begin(), lobbies.end()});
  std::vector<char> seen(out.rows() * out.cols(), 0);
  for (auto& r : rows) {
    const std::size_t i = *out.mep_index(r.mep), j = *out.lobby_index(r.lobby);
    if (seen[i * out.cols() + j]++) throw Error(ErrorKind::duplicate_id, "duplicate pair in score file");
    out.at(i, j) = std::move(r.entry);
  }
  if (rows.size() != out.rows() * out.cols())
    throw Error(ErrorKind::parse, path.string() + ": score matrix is incomplete");
  return out;
}

}  // namespace lobbylink::scorer

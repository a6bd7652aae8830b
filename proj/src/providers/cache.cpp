#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lobbylink/error.hpp"
#include "lobbylink/providers.hpp"

namespace lobbylink::providers {
namespace {

constexpr std::string_view kHeader = "#lobbylink-cache v1";

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string encode_payload(const Payload& p) {
  std::string out;
  auto reals = [&](std::initializer_list<double> xs) {
    for (double x : xs) {
      if (!out.empty()) out.push_back(' ');
      out += format_real(x);
    }
  };
  if (auto* v = std::get_if<std::vector<double>>(&p)) {
    for (double x : *v) {
      if (!out.empty()) out.push_back(' ');
      out += format_real(x);
    }
  } else if (auto* t = std::get_if<NliTriple>(&p)) {
    reals({t->entail, t->neutral, t->contradict});
  } else {
    out = nlohmann::json(std::get<std::string>(p)).dump();
  }
  return out;
}

std::vector<double> parse_reals(std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto end = s.find(' ', pos);
    if (end == std::string_view::npos) end = s.size();
    double x = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + end, x);
    if (ec != std::errc() || ptr != s.data() + end) throw std::invalid_argument("bad real");
    out.push_back(x);
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::optional<Payload> ResponseCache::find(Task task, const std::string& hash) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find({task, hash});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::insert(Task task, const std::string& hash, Payload payload) {
  std::unique_lock lock(mu_);
  entries_.insert_or_assign({task, hash}, std::move(payload));
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void ResponseCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open cache file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::parse,
                "malformed cache file " + path.string() + " line " + std::to_string(lineno) + ": " + why);
  };
  std::vector<std::tuple<Task, std::string, Payload>> parsed;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != kHeader) fail("expected header '" + std::string(kHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) fail("expected task<TAB>hash<TAB>payload");
    Task task{};
    try {
      task = parse_task(std::string_view(line).substr(0, t1));
    } catch (const Error&) {
      fail("unknown task");
    }
    std::string hash = line.substr(t1 + 1, t2 - t1 - 1);
    if (hash.size() != 64 || hash.find_first_not_of("0123456789abcdef") != std::string::npos)
      fail("content hash must be 64 lowercase hex digits");
    const std::string_view body = std::string_view(line).substr(t2 + 1);
    Payload payload;
    try {
      if (task == Task::summarize) {
        auto j = nlohmann::json::parse(body);
        if (!j.is_string()) fail("summary payload must be a JSON string");
        payload = j.get<std::string>();
      } else {
        auto v = parse_reals(body);
        if (task == Task::nli) {
          if (v.size() != 3) fail("nli payload needs three reals");
          payload = NliTriple{v[0], v[1], v[2]};
        } else {
          if (v.empty()) fail("empty embedding payload");
          payload = std::move(v);
        }
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("unparseable payload");
    }
    parsed.emplace_back(task, std::move(hash), std::move(payload));
  }
  if (lineno == 0) fail("empty file");
  std::unique_lock lock(mu_);
  for (auto& [task, hash, payload] : parsed) entries_.insert_or_assign({task, std::move(hash)}, std::move(payload));
}

void ResponseCache::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write cache file " + path.string());
  out << kHeader << '\n';
  std::shared_lock lock(mu_);
  // Sorting by task name keeps the file independent of the enum's numbering.
  std::vector<const std::pair<const std::pair<Task, std::string>, Payload>*> rows;
  for (const auto& e : entries_) rows.push_back(&e);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
    const std::string_view ta = to_string(a->first.first), tb = to_string(b->first.first);
    return ta != tb ? ta < tb : a->first.second < b->first.second;
  });
  for (auto* e : rows)
    out << to_string(e->first.first) << '\t' << e->first.second << '\t' << encode_payload(e->second) << '\n';
  if (!out) throw Error(ErrorKind::io, "failed writing cache file " + path.string());
}

}  // namespace lobbylink::providers

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/pipeline.hpp"

namespace lobbylink::pipeline {

vectors::VectorIndex embed_documents(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& kinds,
                                     vectors::EmbeddingProvider& provider, std::size_t max_tokens) {
  std::vector<const corpus::Document*> docs;
  for (const auto& d : corpus.documents())
    if (kinds.count(d.kind)) docs.push_back(&d);
  std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->doc_id < b->doc_id; });
  vectors::VectorIndex index(provider.dim());
  for (const auto* d : docs) {
    auto pooled = vectors::pool_long_text(d->text, provider, max_tokens);
    index.add(d->doc_id, pooled.embedding, pooled.truncated);
  }
  return index;
}

scorer::NliJudge client_judge(const corpus::Corpus& corpus, providers::InferenceClient& client) {
  return [&corpus, &client](const std::string& lobby_doc, const std::string& mep_doc) {
    return client.nli(corpus.document(lobby_doc).text, corpus.document(mep_doc).text);
  };
}

std::set<corpus::DocKind> parse_kinds(const std::string& list) {
  std::set<corpus::DocKind> out;
  std::stringstream ss(list);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) out.insert(corpus::parse_doc_kind(part));
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "empty document kind list");
  return out;
}

std::string kinds_string(const std::set<corpus::DocKind>& kinds) {
  std::string out;
  for (auto k : kinds) {
    if (!out.empty()) out += ',';
    out += corpus::to_string(k);
  }
  return out;
}

// ------------------------------------------------------------ settings

Settings::Settings(const std::filesystem::path& config_file) {
  if (config_file.empty()) return;
  std::ifstream in(config_file);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + config_file.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorKind::parse, config_file.string() + ": config must be a JSON object");
  for (auto& [k, v] : j.items()) config_[k] = v.is_string() ? v.get<std::string>() : v.dump();
}

const Setting& Settings::resolve(const std::string& key, const std::string& fallback) {
  Setting s;
  if (auto it = flags_.find(key); it != flags_.end()) {
    s = {it->second, "flag"};
  } else if (auto jt = config_.find(key); jt != config_.end()) {
    s = {jt->second, "config"};
  } else {
    std::string env = "LOBBYLINK_";
    for (char c : key) env += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str()))
      s = {v, "env"};
    else
      s = {fallback, "default"};
  }
  return resolved_[key] = s;
}

double Settings::real(const std::string& key, double fallback) {
  std::ostringstream d;
  d << fallback;
  const auto& s = resolve(key, d.str());
  try {
    std::size_t used = 0;
    const double v = std::stod(s.value, &used);
    if (used == s.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::invalid_argument, "setting '" + key + "' is not a number: '" + s.value + "'");
}

long long Settings::integer(const std::string& key, long long fallback) {
  const auto& s = resolve(key, std::to_string(fallback));
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s.value, &used);
    if (used == s.value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::invalid_argument, "setting '" + key + "' is not an integer: '" + s.value + "'");
}

bool Settings::flag(const std::string& key, bool fallback) {
  const auto& s = resolve(key, fallback ? "true" : "false");
  if (s.value == "true" || s.value == "1") return true;
  if (s.value == "false" || s.value == "0") return false;
  throw Error(ErrorKind::invalid_argument, "setting '" + key + "' is not a boolean: '" + s.value + "'");
}

// ------------------------------------------------------------ manifests

std::filesystem::path manifest_path_for(const std::filesystem::path& artifact) {
  if (std::filesystem::is_directory(artifact)) return artifact / "manifest.json";
  return std::filesystem::path(artifact.string() + ".manifest.json");
}

std::string manifest_ref(const std::filesystem::path& artifact) {
  return manifest_path_for(artifact).filename().string();
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_manifest(const std::filesystem::path& artifact, const std::string& command,
                    const std::map<std::string, Setting>& config, const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::filesystem::path>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, s] : config) cfg[k] = {{"value", s.value}, {"source", s.source}};
  j["config"] = cfg;
  auto hashes = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::ordered_json h = nlohmann::ordered_json::object();
    std::vector<std::filesystem::path> sorted = paths;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& p : sorted) h[p.string()] = sha256_file(p);
    return h;
  };
  j["inputs"] = hashes(inputs);
  j["outputs"] = hashes(outputs);
  j["timestamp"] = utc_now();
  const auto path = manifest_path_for(artifact);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    for (auto& [k, v] : j.at("config").items())
      m.config[k] = {v.at("value").get<std::string>(), v.at("source").get<std::string>()};
    for (auto& [k, v] : j.at("inputs").items()) m.inputs[k] = v.get<std::string>();
    for (auto& [k, v] : j.at("outputs").items()) m.outputs[k] = v.get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": malformed manifest: " + e.what());
  }
}

std::vector<std::string> verify_manifest(const RunManifest& m) {
  std::vector<std::string> bad;
  auto check = [&](const std::map<std::string, std::string>& files) {
    for (const auto& [p, h] : files) {
      std::error_code ec;
      if (!std::filesystem::exists(p, ec) || sha256_file(p) != h) bad.push_back(p);
    }
  };
  check(m.inputs);
  check(m.outputs);
  return bad;
}

}  // namespace lobbylink::pipeline

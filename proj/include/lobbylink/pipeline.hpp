#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lobbylink/corpus.hpp"
#include "lobbylink/providers.hpp"
#include "lobbylink/scorer.hpp"
#include "lobbylink/vectors.hpp"

namespace lobbylink::pipeline {

/// Pooled embeddings of every document of the given kinds, in doc_id order.
vectors::VectorIndex embed_documents(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& kinds,
                                     vectors::EmbeddingProvider& provider,
                                     std::size_t max_tokens = vectors::kDefaultMaxTokens);

/// NLI judge resolving document ids to texts and asking `client`.
scorer::NliJudge client_judge(const corpus::Corpus& corpus, providers::InferenceClient& client);

/// Parses a comma-separated list of document kinds ("speeches,papers").
std::set<corpus::DocKind> parse_kinds(const std::string& list);
std::string kinds_string(const std::set<corpus::DocKind>& kinds);

// ------------------------------------------------------------ settings

/// Resolved configuration value and where it came from.
struct Setting {
  std::string value;
  std::string source;  // flag, config, env, default
};

/// Resolves keys with precedence flag > config file > environment
/// (LOBBYLINK_<KEY>, upper-cased, '-' as '_') > default.
class Settings {
 public:
  /// `config_file` is a flat JSON object; empty path means none.
  explicit Settings(const std::filesystem::path& config_file = {});

  void set_flag(const std::string& key, const std::string& value) { flags_[key] = value; }
  const Setting& resolve(const std::string& key, const std::string& fallback);

  std::string str(const std::string& key, const std::string& fallback) { return resolve(key, fallback).value; }
  double real(const std::string& key, double fallback);
  long long integer(const std::string& key, long long fallback);
  bool flag(const std::string& key, bool fallback);

  /// Every key resolved so far.
  const std::map<std::string, Setting>& resolved() const { return resolved_; }

 private:
  std::map<std::string, std::string> flags_;
  std::map<std::string, std::string> config_;
  std::map<std::string, Setting> resolved_;
};

// ------------------------------------------------------------ manifests

struct RunManifest {
  std::string command;
  std::map<std::string, Setting> config;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string timestamp;                       // UTC, ISO 8601
};

/// "<artifact>.manifest.json" next to a file artifact; "manifest.json"
/// inside a directory artifact.
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

/// Name written into artifact headers: the manifest's file name.
std::string manifest_ref(const std::filesystem::path& artifact);

/// Hashes inputs and outputs and writes the manifest for `artifact`.
void write_manifest(const std::filesystem::path& artifact, const std::string& command,
                    const std::map<std::string, Setting>& config, const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::filesystem::path>& outputs);

RunManifest load_manifest(const std::filesystem::path& path);

/// Paths whose current hash differs from the manifest (empty when intact).
std::vector<std::string> verify_manifest(const RunManifest& m);

}  // namespace lobbylink::pipeline

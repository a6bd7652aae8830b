#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lobbylink/vectors.hpp"

namespace lobbylink::providers {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};
/// Environment variable naming the live endpoint: "exec:<command>",
/// "tcp:<host>:<port>" or "builtin".
inline constexpr const char* kEndpointEnv = "LOBBYLINK_PROVIDER";

enum class Task { embed, nli, summarize };
const char* to_string(Task t);
Task parse_task(std::string_view s);

/// Class probabilities in the protocol's fixed (entail, neutral, contradict)
/// order.
struct NliTriple {
  double entail = 0, neutral = 0, contradict = 0;

  bool admissible() const { return entail > contradict; }
  bool operator==(const NliTriple&) const = default;
};

struct InferenceRequest {
  std::string id;
  Task task = Task::embed;
  std::string text;        // embed, summarize
  std::string premise;     // nli
  std::string hypothesis;  // nli

  static InferenceRequest embed(std::string id, std::string text);
  static InferenceRequest nli(std::string id, std::string premise, std::string hypothesis);
  static InferenceRequest summarize(std::string id, std::string text);
};

using Payload = std::variant<std::vector<double>, NliTriple, std::string>;

struct InferenceResponse {
  std::string id;
  Payload payload;
  std::optional<std::string> error;

  const std::vector<double>& embedding() const { return std::get<std::vector<double>>(payload); }
  const NliTriple& nli() const { return std::get<NliTriple>(payload); }
  const std::string& summary() const { return std::get<std::string>(payload); }
};

/// Whitespace runs collapsed to one space, ends trimmed.
std::string normalize_text(std::string_view text);

/// Cache key: SHA-256 over the task name and the normalised text(s), so
/// entries survive document id changes.
std::string content_hash(const InferenceRequest& request);

// --- wire protocol: one JSON object per line.

std::string encode_request(const InferenceRequest& r);
InferenceRequest decode_request(std::string_view line);
std::string encode_response(const InferenceResponse& r);
/// Parses a response line for a request of kind `task`; throws
/// malformed_response on shape errors.
InferenceResponse decode_response(std::string_view line, Task task);
/// The id of a response line, read before its task is known.
std::string response_id(std::string_view line);

/// Throws malformed_response / invariant_violation when a payload breaks the
/// protocol invariants (embedding dimension and unit norm, NLI probabilities
/// non-negative and summing to 1).
void validate_payload(Task task, const Payload& payload, std::size_t expected_dim);

/// Deterministic stand-in for an NLI cross-encoder, driven by token overlap
/// and the parity of negation markers on each side.
NliTriple heuristic_nli(std::string_view premise, std::string_view hypothesis);

// --- cache

/// Content-addressed response store: concurrent readers, serialised writers.
class ResponseCache {
 public:
  ResponseCache() = default;
  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<Payload> find(Task task, const std::string& hash) const;
  void insert(Task task, const std::string& hash, Payload payload);
  std::size_t size() const;

  /// Appends the entries of a cache file (format documented in docs/).
  void load(const std::filesystem::path& path);
  /// Writes every entry sorted by (task, hash).
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::pair<Task, std::string>, Payload> entries_;
};

// --- live backends

class Backend {
 public:
  virtual ~Backend() = default;
  /// Answers requests in order; responses may carry an in-band error.
  virtual std::vector<InferenceResponse> call(std::span<const InferenceRequest> requests) = 0;
  virtual std::string tag() const = 0;
  /// True when calls leave the process (socket or child process).
  virtual bool remote() const = 0;
};

/// In-process backend: reference embedder and heuristic NLI.
class BuiltinBackend final : public Backend {
 public:
  BuiltinBackend(std::size_t dim, std::uint64_t seed) : embedder_(dim, seed) {}
  std::vector<InferenceResponse> call(std::span<const InferenceRequest> requests) override;
  std::string tag() const override { return "builtin:" + embedder_.tag(); }
  bool remote() const override { return false; }

 private:
  vectors::ReferenceEmbedder embedder_;
};

/// Bidirectional line channel.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  /// Throws timeout when no full line arrives in time.
  virtual std::string receive_line(std::chrono::milliseconds timeout) = 0;
};

/// Spawns `/bin/sh -c command` and speaks over its stdin/stdout.
std::unique_ptr<LineChannel> spawn_process_channel(const std::string& command);
/// Connects to host:port over TCP.
std::unique_ptr<LineChannel> connect_tcp_channel(const std::string& host, int port);

/// Speaks the wire protocol over a channel; pipelines a batch and matches
/// responses back to requests by id.
class ProtocolBackend final : public Backend {
 public:
  ProtocolBackend(std::unique_ptr<LineChannel> channel, std::string tag,
                  std::chrono::milliseconds timeout = kDefaultTimeout);
  std::vector<InferenceResponse> call(std::span<const InferenceRequest> requests) override;
  std::string tag() const override { return tag_; }
  bool remote() const override { return true; }

 private:
  std::unique_ptr<LineChannel> channel_;
  std::string tag_;
  std::chrono::milliseconds timeout_;
};

/// Builds the backend named by an endpoint string (see kEndpointEnv).
std::unique_ptr<Backend> make_backend(const std::string& endpoint, std::size_t dim, std::uint64_t seed,
                                      std::chrono::milliseconds timeout = kDefaultTimeout);

struct ClientStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t round_trips = 0;
};

/// Cache-first inference client. Every payload, cached or live, is validated
/// before it is returned.
class InferenceClient {
 public:
  /// `backend` may be null (offline): misses then raise offline_miss.
  InferenceClient(std::shared_ptr<ResponseCache> cache, std::unique_ptr<Backend> backend,
                  std::size_t embed_dim = vectors::kDefaultDim);

  InferenceResponse request(const InferenceRequest& r);
  std::vector<InferenceResponse> request_batch(std::span<const InferenceRequest> requests);

  NliTriple nli(std::string_view premise, std::string_view hypothesis);
  vectors::Embedding embed(std::string_view text);

  ClientStats stats() const;
  bool offline() const { return backend_ == nullptr; }
  const ResponseCache& cache() const { return *cache_; }
  std::size_t embed_dim() const { return dim_; }

 private:
  std::shared_ptr<ResponseCache> cache_;
  std::unique_ptr<Backend> backend_;
  std::size_t dim_;
  mutable std::mutex backend_mu_;
  mutable std::mutex stats_mu_;
  ClientStats stats_;
  std::size_t next_id_ = 0;
};

/// Adapts an InferenceClient to the EmbeddingProvider interface.
class ClientEmbedder final : public vectors::EmbeddingProvider {
 public:
  ClientEmbedder(InferenceClient& client, std::string tag) : client_(client), tag_(std::move(tag)) {}
  vectors::Embedding embed(std::string_view text) override { return client_.embed(text); }
  std::size_t dim() const override { return client_.embed_dim(); }
  std::string tag() const override { return tag_; }

 private:
  InferenceClient& client_;
  std::string tag_;
};

}  // namespace lobbylink::providers

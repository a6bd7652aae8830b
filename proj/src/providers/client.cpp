#include <map>

#include "lobbylink/error.hpp"
#include "lobbylink/providers.hpp"

namespace lobbylink::providers {

InferenceClient::InferenceClient(std::shared_ptr<ResponseCache> cache, std::unique_ptr<Backend> backend,
                                 std::size_t embed_dim)
    : cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      backend_(std::move(backend)),
      dim_(embed_dim) {}

InferenceResponse InferenceClient::request(const InferenceRequest& r) {
  return request_batch(std::span<const InferenceRequest>(&r, 1)).front();
}

std::vector<InferenceResponse> InferenceClient::request_batch(std::span<const InferenceRequest> requests) {
  std::vector<InferenceResponse> out(requests.size());
  std::vector<std::string> hashes(requests.size());
  // Misses grouped by content so one live call serves repeated texts.
  std::map<std::pair<Task, std::string>, std::vector<std::size_t>> pending;
  std::size_t hits = 0;

  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    hashes[i] = content_hash(r);
    out[i].id = r.id;
    if (auto p = cache_->find(r.task, hashes[i])) {
      validate_payload(r.task, *p, dim_);
      out[i].payload = std::move(*p);
      ++hits;
    } else {
      pending[{r.task, hashes[i]}].push_back(i);
    }
  }
  {
    std::lock_guard lock(stats_mu_);
    stats_.hits += hits;
    stats_.misses += pending.size();
  }
  if (pending.empty()) return out;
  if (!backend_) {
    const auto& [task, hash] = pending.begin()->first;
    throw Error(ErrorKind::offline_miss, std::string("no cached ") + to_string(task) +
                                             " response for content hash " + hash + " and live calls are disabled");
  }

  std::vector<InferenceRequest> live;
  std::vector<const std::vector<std::size_t>*> owners;
  {
    std::lock_guard lock(backend_mu_);
    for (const auto& [key, idx] : pending) {
      InferenceRequest q = requests[idx.front()];
      q.id = "q" + std::to_string(next_id_++);
      live.push_back(std::move(q));
      owners.push_back(&idx);
    }
    auto responses = backend_->call(live);
    if (responses.size() != live.size())
      throw Error(ErrorKind::malformed_response, "provider answered " + std::to_string(responses.size()) +
                                                     " of " + std::to_string(live.size()) + " requests");
    for (std::size_t k = 0; k < live.size(); ++k) {
      auto& resp = responses[k];
      if (resp.error) throw Error(ErrorKind::provider_error, "provider error: " + *resp.error);
      validate_payload(live[k].task, resp.payload, dim_);
      const std::size_t first = owners[k]->front();
      cache_->insert(live[k].task, hashes[first], resp.payload);
      for (std::size_t i : *owners[k]) out[i].payload = resp.payload;
    }
  }
  std::lock_guard lock(stats_mu_);
  stats_.round_trips += live.size();
  return out;
}

NliTriple InferenceClient::nli(std::string_view premise, std::string_view hypothesis) {
  return request(InferenceRequest::nli("nli", std::string(premise), std::string(hypothesis))).nli();
}

vectors::Embedding InferenceClient::embed(std::string_view text) {
  return vectors::Embedding::from_unit(request(InferenceRequest::embed("embed", std::string(text))).embedding());
}

ClientStats InferenceClient::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

}  // namespace lobbylink::providers

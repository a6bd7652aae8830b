#include <cmath>
#include <set>

#include <json.hpp>

#include "lobbylink/error.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/providers.hpp"
#include "lobbylink/textprep.hpp"

namespace lobbylink::providers {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Task t) {
  switch (t) {
    case Task::embed: return "embed";
    case Task::nli: return "nli";
    case Task::summarize: return "summarize";
  }
  return "?";
}

Task parse_task(std::string_view s) {
  if (s == "embed") return Task::embed;
  if (s == "nli") return Task::nli;
  if (s == "summarize") return Task::summarize;
  throw Error(ErrorKind::parse, "unknown task '" + std::string(s) + "'");
}

InferenceRequest InferenceRequest::embed(std::string id, std::string text) {
  InferenceRequest r;
  r.id = std::move(id);
  r.task = Task::embed;
  r.text = std::move(text);
  return r;
}

InferenceRequest InferenceRequest::nli(std::string id, std::string premise, std::string hypothesis) {
  InferenceRequest r;
  r.id = std::move(id);
  r.task = Task::nli;
  r.premise = std::move(premise);
  r.hypothesis = std::move(hypothesis);
  return r;
}

InferenceRequest InferenceRequest::summarize(std::string id, std::string text) {
  InferenceRequest r = embed(std::move(id), std::move(text));
  r.task = Task::summarize;
  return r;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string content_hash(const InferenceRequest& request) {
  std::string material = to_string(request.task);
  material.push_back('\n');
  if (request.task == Task::nli) {
    material += normalize_text(request.premise);
    material.push_back('\n');
    material += normalize_text(request.hypothesis);
  } else {
    material += normalize_text(request.text);
  }
  return sha256_hex(material);
}

std::string encode_request(const InferenceRequest& r) {
  ordered_json j;
  j["v"] = kProtocolVersion;
  j["id"] = r.id;
  j["task"] = to_string(r.task);
  if (r.task == Task::nli) {
    j["premise"] = r.premise;
    j["hypothesis"] = r.hypothesis;
  } else {
    j["text"] = r.text;
  }
  return j.dump();
}

namespace {

json parse_object(std::string_view line, ErrorKind kind) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(kind, "protocol line is not a JSON object");
  if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kProtocolVersion)
    throw Error(kind, "protocol version missing or unsupported");
  if (!j.contains("id") || !j["id"].is_string()) throw Error(kind, "protocol line has no string id");
  return j;
}

std::string string_field(const json& j, const char* key, ErrorKind kind) {
  if (!j.contains(key) || !j[key].is_string()) throw Error(kind, std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

InferenceRequest decode_request(std::string_view line) {
  const json j = parse_object(line, ErrorKind::parse);
  InferenceRequest r;
  r.id = j["id"].get<std::string>();
  r.task = parse_task(string_field(j, "task", ErrorKind::parse));
  if (r.task == Task::nli) {
    r.premise = string_field(j, "premise", ErrorKind::parse);
    r.hypothesis = string_field(j, "hypothesis", ErrorKind::parse);
  } else {
    r.text = string_field(j, "text", ErrorKind::parse);
  }
  return r;
}

std::string encode_response(const InferenceResponse& r) {
  ordered_json j;
  j["v"] = kProtocolVersion;
  j["id"] = r.id;
  if (r.error) {
    j["error"] = *r.error;
  } else if (auto* e = std::get_if<std::vector<double>>(&r.payload)) {
    j["embedding"] = *e;
  } else if (auto* t = std::get_if<NliTriple>(&r.payload)) {
    j["nli"] = {t->entail, t->neutral, t->contradict};
  } else {
    j["summary"] = std::get<std::string>(r.payload);
  }
  return j.dump();
}

InferenceResponse decode_response(std::string_view line, Task task) {
  constexpr auto bad = ErrorKind::malformed_response;
  const json j = parse_object(line, bad);
  InferenceResponse r;
  r.id = j["id"].get<std::string>();
  if (j.contains("error")) {
    r.error = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
    return r;
  }
  auto reals = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw Error(bad, std::string("response lacks array '") + key + "'");
    std::vector<double> out;
    for (const auto& x : j[key]) {
      if (!x.is_number()) throw Error(bad, std::string("non-numeric entry in '") + key + "'");
      out.push_back(x.get<double>());
    }
    return out;
  };
  switch (task) {
    case Task::embed:
      r.payload = reals("embedding");
      break;
    case Task::nli: {
      auto v = reals("nli");
      if (v.size() != 3) throw Error(bad, "nli payload must hold exactly three probabilities");
      r.payload = NliTriple{v[0], v[1], v[2]};
      break;
    }
    case Task::summarize:
      r.payload = string_field(j, "summary", bad);
      break;
  }
  return r;
}

std::string response_id(std::string_view line) {
  return parse_object(line, ErrorKind::malformed_response)["id"].get<std::string>();
}

void validate_payload(Task task, const Payload& payload, std::size_t expected_dim) {
  switch (task) {
    case Task::embed: {
      auto* v = std::get_if<std::vector<double>>(&payload);
      if (!v) throw Error(ErrorKind::malformed_response, "embed payload is not a vector");
      if (v->size() != expected_dim)
        throw Error(ErrorKind::malformed_response, "embedding has dimension " + std::to_string(v->size()) +
                                                       ", expected " + std::to_string(expected_dim));
      double s = 0.0;
      for (double x : *v) {
        if (!std::isfinite(x)) throw Error(ErrorKind::invariant_violation, "embedding has a non-finite entry");
        s += x * x;
      }
      if (!(std::abs(std::sqrt(s) - 1.0) <= vectors::kUnitTolerance))
        throw Error(ErrorKind::invariant_violation, "embedding norm " + std::to_string(std::sqrt(s)) + " is not 1");
      return;
    }
    case Task::nli: {
      auto* t = std::get_if<NliTriple>(&payload);
      if (!t) throw Error(ErrorKind::malformed_response, "nli payload is not a probability triple");
      for (double p : {t->entail, t->neutral, t->contradict})
        if (!std::isfinite(p) || p < 0.0)
          throw Error(ErrorKind::invariant_violation, "nli probability outside [0, 1]");
      const double sum = t->entail + t->neutral + t->contradict;
      if (!(std::abs(sum - 1.0) <= 1e-6))
        throw Error(ErrorKind::invariant_violation, "nli probabilities sum to " + std::to_string(sum));
      return;
    }
    case Task::summarize:
      if (!std::holds_alternative<std::string>(payload))
        throw Error(ErrorKind::malformed_response, "summarize payload is not a string");
      return;
  }
}

namespace {

bool is_negation(const std::string& t) {
  static const std::set<std::string> markers = {"not",    "no",      "never",    "nor",    "cannot",
                                                "oppose", "opposes", "opposed", "opposing", "against"};
  return markers.count(t) > 0;
}

}  // namespace

NliTriple heuristic_nli(std::string_view premise, std::string_view hypothesis) {
  std::set<std::string> a, b;
  int neg_a = 0, neg_b = 0;
  for (auto& t : textprep::tokenize(premise)) {
    if (is_negation(t)) ++neg_a;
    else a.insert(std::move(t));
  }
  for (auto& t : textprep::tokenize(hypothesis)) {
    if (is_negation(t)) ++neg_b;
    else b.insert(std::move(t));
  }
  std::size_t common = 0;
  for (const auto& t : a) common += b.count(t);
  const std::size_t uni = a.size() + b.size() - common;
  const double overlap = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);

  NliTriple out{0.05 + 0.85 * overlap, 0.05 + 0.85 * (1.0 - overlap), 0.05};
  if ((neg_a % 2) != (neg_b % 2)) std::swap(out.entail, out.contradict);
  return out;
}

}  // namespace lobbylink::providers

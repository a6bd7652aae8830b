// Line-protocol responder for transport tests.
//
//   fake_sidecar [mode] [dim]
//
// Modes: ok (builtin answers), wrong-dim, bad-nli (0.5/0.3/0.3), error,
// silent (never answers), garbage, swap (answers each pair of requests in
// reverse order). Malformed request lines get an in-band error and the loop
// continues.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "lobbylink/error.hpp"
#include "lobbylink/providers.hpp"

using namespace lobbylink;
using namespace lobbylink::providers;

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "ok";
  const std::size_t dim = argc > 2 ? std::stoul(argv[2]) : 384;
  BuiltinBackend builtin(dim, 0);
  std::vector<std::string> held;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "silent") continue;
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    InferenceRequest req;
    try {
      req = decode_request(line);
    } catch (const Error& e) {
      InferenceResponse r{"", std::string{}, std::string("bad request: ") + e.what()};
      std::cout << encode_response(r) << std::endl;
      continue;
    }
    InferenceResponse r = builtin.call(std::span<const InferenceRequest>(&req, 1)).front();
    if (mode == "wrong-dim" && req.task == Task::embed) {
      r.payload = std::vector<double>(dim + 1, 1.0 / std::sqrt(double(dim + 1)));
    } else if (mode == "bad-nli" && req.task == Task::nli) {
      r.payload = NliTriple{0.5, 0.3, 0.3};
    } else if (mode == "error") {
      r.error = "model unavailable";
    }
    const auto out = encode_response(r);
    if (mode == "swap") {
      held.push_back(out);
      if (held.size() == 2) {
        std::cout << held[1] << '\n' << held[0] << std::endl;
        held.clear();
      }
      continue;
    }
    std::cout << out << std::endl;
  }
  for (auto& h : held) std::cout << h << std::endl;
  return 0;
}

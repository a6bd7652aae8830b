#include <algorithm>
#include <thread>

#include "lobbylink/error.hpp"
#include "lobbylink/simd/kernels.hpp"
#include "lobbylink/vectors.hpp"

namespace lobbylink::vectors {
namespace {

void check_operands(const VectorIndex& left, const VectorIndex& right, const SearchOptions& opt) {
  if (left.empty() || right.empty()) throw Error(ErrorKind::precondition, "inner-product search on an empty index");
  if (left.dim() != right.dim())
    throw Error(ErrorKind::invalid_argument, "dimension mismatch: " + std::to_string(left.dim()) + " vs " +
                                                 std::to_string(right.dim()));
  if (opt.block == 0) throw Error(ErrorKind::invalid_argument, "block size must be positive");
}

/// Calls visit(l, r, score) for every pair in left-row blocks owned by
/// `worker` (block index mod workers), visiting blocks in ascending order.
template <typename Visit>
void scan(const VectorIndex& left, const VectorIndex& right, std::size_t block, std::size_t worker,
          std::size_t workers, Visit&& visit) {
  const auto& k = simd::active();
  const std::size_t d = left.dim();
  std::vector<double> buf(block * std::min(block, right.size()));
  std::size_t block_no = 0;
  for (std::size_t l0 = 0; l0 < left.size(); l0 += block, ++block_no) {
    if (block_no % workers != worker) continue;
    const std::size_t ln = std::min(block, left.size() - l0);
    for (std::size_t r0 = 0; r0 < right.size(); r0 += block) {
      const std::size_t rn = std::min(block, right.size() - r0);
      k.block_dot(left.row(l0), ln, right.row(r0), rn, d, buf.data());
      for (std::size_t i = 0; i < ln; ++i)
        for (std::size_t j = 0; j < rn; ++j) visit(l0 + i, r0 + j, buf[i * rn + j]);
    }
  }
}

struct Candidate {
  double score = 0.0;
  std::size_t l = 0, r = 0;
  bool valid = false;
};

struct Ranker {
  const VectorIndex& left;
  const VectorIndex& right;

  // Higher score first, then smaller (left id, right id).
  bool before(double s, std::size_t l, std::size_t r, const Candidate& c) const {
    if (!c.valid) return true;
    if (s != c.score) return s > c.score;
    if (l != c.l) {
      const int cmp = left.id(l).compare(left.id(c.l));
      if (cmp != 0) return cmp < 0;
    }
    return right.id(r) < right.id(c.r);
  }
};

MaxMatch to_match(const VectorIndex& left, const VectorIndex& right, const Candidate& c) {
  return {c.score, left.id(c.l), right.id(c.r), left.truncated(c.l) || right.truncated(c.r)};
}

template <typename Accept>
Candidate best_pair(const VectorIndex& left, const VectorIndex& right, const SearchOptions& opt, Accept&& accept) {
  const Ranker rank{left, right};
  const std::size_t blocks = (left.size() + opt.block - 1) / opt.block;
  const std::size_t workers = std::clamp<std::size_t>(opt.workers, 1, blocks);
  std::vector<Candidate> partial(workers);
  auto run = [&](std::size_t w) {
    Candidate& best = partial[w];
    scan(left, right, opt.block, w, workers, [&](std::size_t l, std::size_t r, double s) {
      if (rank.before(s, l, r, best) && accept(l, r)) best = {s, l, r, true};
    });
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  Candidate best;
  for (const auto& c : partial)
    if (c.valid && rank.before(c.score, c.l, c.r, best)) best = c;
  return best;
}

}  // namespace

bool ranks_before(const MaxMatch& a, const MaxMatch& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.left_doc != b.left_doc) return a.left_doc < b.left_doc;
  return a.right_doc < b.right_doc;
}

MaxMatch max_inner_product(const VectorIndex& left, const VectorIndex& right, SearchOptions opt) {
  check_operands(left, right, opt);
  const Candidate best = best_pair(left, right, opt, [](std::size_t, std::size_t) { return true; });
  return to_match(left, right, best);
}

std::optional<MaxMatch> max_inner_product_filtered(const VectorIndex& left, const VectorIndex& right,
                                                   const PairPredicate& admissible, SearchOptions opt) {
  check_operands(left, right, opt);
  const Candidate best = best_pair(left, right, opt, [&](std::size_t l, std::size_t r) {
    return admissible(left.id(l), right.id(r));
  });
  if (!best.valid) return std::nullopt;
  return to_match(left, right, best);
}

std::vector<MaxMatch> top_pairs(const VectorIndex& left, const VectorIndex& right, std::size_t k,
                                SearchOptions opt) {
  check_operands(left, right, opt);
  std::vector<Candidate> all;
  all.reserve(left.size() * right.size());
  scan(left, right, opt.block, 0, 1, [&](std::size_t l, std::size_t r, double s) { all.push_back({s, l, r, true}); });
  const Ranker rank{left, right};
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [&](const Candidate& a, const Candidate& b) { return rank.before(a.score, a.l, a.r, b); });
  std::vector<MaxMatch> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(to_match(left, right, all[i]));
  return out;
}

std::size_t count_pairs_at_least(const VectorIndex& left, const VectorIndex& right, double threshold,
                                 SearchOptions opt) {
  check_operands(left, right, opt);
  std::size_t n = 0;
  scan(left, right, opt.block, 0, 1, [&](std::size_t, std::size_t, double s) { n += s >= threshold; });
  return n;
}

}  // namespace lobbylink::vectors

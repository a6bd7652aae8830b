#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "lobbylink/error.hpp"
#include "lobbylink/simd/kernels.hpp"
#include "lobbylink/vectors.hpp"

using namespace lobbylink;
using namespace lobbylink::vectors;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

VectorIndex random_index(std::mt19937_64& rng, std::size_t rows, std::size_t d, const std::string& prefix) {
  VectorIndex idx(d);
  for (std::size_t r = 0; r < rows; ++r) idx.add(prefix + std::to_string(r), Embedding::normalize(random_values(rng, d)));
  return idx;
}

// Independent reference: plain loop in double, then the same total order.
MaxMatch naive_max(const VectorIndex& a, const VectorIndex& b) {
  MaxMatch best;
  bool have = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      MaxMatch m{simd::kernels(simd::Isa::scalar).dot(a.row(i), b.row(j), a.dim()), a.id(i), b.id(j), false};
      if (!have || ranks_before(m, best)) best = m, have = true;
    }
  return best;
}

}  // namespace

TEST(Kernels, ScalarMatchesPlainSumOrder) {
  const double a[10] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const double b[10] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  EXPECT_EQ(simd::dot_scalar(a, b, 10), 55.0);
  EXPECT_EQ(simd::dot_scalar(a, b, 0), 0.0);
}

TEST(Kernels, EverySupportedVariantIsBitIdenticalToScalar) {
  std::mt19937_64 rng(11);
  for (auto isa : {simd::Isa::avx2, simd::Isa::neon}) {
    if (!simd::supported(isa)) continue;
    const auto& k = simd::kernels(isa);
    for (std::size_t d : {1u, 3u, 7u, 8u, 9u, 16u, 31u, 384u, 1001u}) {
      const auto x = random_values(rng, d), y = random_values(rng, d);
      const double s = simd::dot_scalar(x.data(), y.data(), d);
      const double v = k.dot(x.data(), y.data(), d);
      EXPECT_EQ(std::memcmp(&s, &v, sizeof s), 0) << simd::to_string(isa) << " d=" << d;
      const auto l = random_values(rng, 5 * d), r = random_values(rng, 3 * d);
      std::vector<double> o1(15), o2(15);
      simd::block_dot_scalar(l.data(), 5, r.data(), 3, d, o1.data());
      k.block_dot(l.data(), 5, r.data(), 3, d, o2.data());
      EXPECT_EQ(std::memcmp(o1.data(), o2.data(), o1.size() * sizeof(double)), 0);
    }
  }
}

TEST(Embedding, NormalizeAndValidate) {
  auto e = Embedding::normalize({3, 4});
  EXPECT_DOUBLE_EQ(e.values()[0], 0.6);
  EXPECT_DOUBLE_EQ(e.values()[1], 0.8);
  EXPECT_THROW(Embedding::normalize({0, 0}), Error);
  EXPECT_THROW(Embedding::from_unit({1, 1}), Error);
  EXPECT_NO_THROW(Embedding::from_unit({1, 0}));
}

TEST(Embedding, ReferenceEmbedderIsDeterministicAndSeeded) {
  const auto a = reference_embed("Farmers need water", 64, 0);
  const auto b = reference_embed("farmers   NEED water!", 64, 0);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, reference_embed("Farmers need water", 64, 1));
  double n = 0;
  for (double x : a.values()) n += x * x;
  EXPECT_NEAR(std::sqrt(n), 1.0, 1e-12);
}

TEST(Embedding, LongTextsArePooledBySentence) {
  ReferenceEmbedder e(32, 0);
  std::string text;
  for (int i = 0; i < 40; ++i) text += "The committee adopted amendment number seven today. ";
  const auto p = pool_long_text(text, e, 16);
  EXPECT_TRUE(p.pooled);
  EXPECT_EQ(p.sentence_count, 40u);
  EXPECT_FALSE(p.truncated);
  const auto short_text = pool_long_text("Short text.", e, 16);
  EXPECT_FALSE(short_text.pooled);
  EXPECT_EQ(short_text.embedding, e.embed("Short text."));
}

TEST(Search, BlockedEqualsNaiveOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 1 + rng() % 60, m = 1 + rng() % 60, d = 1 + rng() % 40;
    const auto a = random_index(rng, n, d, "a"), b = random_index(rng, m, d, "b");
    const auto want = naive_max(a, b);
    for (std::size_t block : {std::size_t{1}, std::size_t{7}, std::size_t{64}, std::max(n, m)})
      for (unsigned workers : {1u, 4u}) EXPECT_EQ(max_inner_product(a, b, {block, workers}), want);
  }
}

TEST(Search, TiesResolveToSmallestIds) {
  VectorIndex a(2), b(2);
  a.add("x2", Embedding::from_unit({1, 0}));
  a.add("x1", Embedding::from_unit({1, 0}));
  b.add("y9", Embedding::from_unit({1, 0}));
  b.add("y3", Embedding::from_unit({1, 0}));
  const auto m = max_inner_product(a, b, {1, 1});
  EXPECT_EQ(m.left_doc, "x1");
  EXPECT_EQ(m.right_doc, "y3");
}

TEST(Search, TopPairsAndFilteredAgreeWithSorting) {
  std::mt19937_64 rng(9);
  const auto a = random_index(rng, 9, 5, "a"), b = random_index(rng, 7, 5, "b");
  std::vector<MaxMatch> all;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      all.push_back({simd::dot_scalar(a.row(i), b.row(j), 5), a.id(i), b.id(j), false});
  std::sort(all.begin(), all.end(), ranks_before);
  const auto top = top_pairs(a, b, 10, {3, 1});
  ASSERT_EQ(top.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(top[i], all[i]);
  EXPECT_EQ(top_pairs(a, b, 1000).size(), 63u);

  auto odd = [](const std::string& l, const std::string&) { return (l.back() - '0') % 2 == 1; };
  const auto f = max_inner_product_filtered(a, b, odd, {4, 2});
  const auto it = std::find_if(all.begin(), all.end(), [&](const MaxMatch& m) { return odd(m.left_doc, m.right_doc); });
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(*f, *it);
  EXPECT_FALSE(max_inner_product_filtered(a, b, [](auto&, auto&) { return false; }).has_value());

  std::size_t expect = std::count_if(all.begin(), all.end(), [](const MaxMatch& m) { return m.score >= 0.2; });
  EXPECT_EQ(count_pairs_at_least(a, b, 0.2, {2, 3}), expect);
}

TEST(Store, TextAndBinaryRoundTrip) {
  std::mt19937_64 rng(3);
  const auto idx = random_index(rng, 6, 12, "doc-");
  const auto dir = std::filesystem::temp_directory_path() / "lobbylink_store_test";
  std::filesystem::create_directories(dir);
  for (auto fmt : {StoreFormat::text, StoreFormat::binary}) {
    const auto p = dir / (fmt == StoreFormat::text ? "v.txt" : "v.bin");
    save_store(p, idx, "reference:test", fmt);
    const auto back = load_store(p);
    EXPECT_EQ(back.provider_tag, "reference:test");
    ASSERT_EQ(back.index.size(), idx.size());
    EXPECT_EQ(back.index.ids(), idx.ids());
    EXPECT_EQ(back.index.data(), idx.data());
  }
  std::filesystem::remove_all(dir);
}

TEST(Store, DuplicateIdsAreRejected) {
  VectorIndex idx(2);
  idx.add("a", Embedding::from_unit({1, 0}));
  EXPECT_THROW(idx.add("a", Embedding::from_unit({0, 1})), Error);
}

#include <gtest/gtest.h>

#include <cstdlib>

#include "lobbylink/error.hpp"
#include "lobbylink/fixture.hpp"
#include "lobbylink/hashing.hpp"
#include "lobbylink/pipeline.hpp"
#include "test_util.hpp"

using namespace lobbylink;
using namespace lobbylink::pipeline;
using testutil::TempDir;

TEST(Settings, FlagBeatsConfigBeatsEnvBeatsDefault) {
  TempDir d("settings");
  testutil::write_file(d / "c.json", R"({"top-k": 7, "alpha": "0.1", "kinds": "speeches"})");
  ::setenv("LOBBYLINK_TOP_K", "9", 1);
  ::setenv("LOBBYLINK_ALPHA", "0.2", 1);
  ::setenv("LOBBYLINK_BLOCK", "32", 1);
  Settings s(d / "c.json");
  s.set_flag("kinds", "papers");
  EXPECT_EQ(s.str("kinds", "x"), "papers");
  EXPECT_EQ(s.integer("top-k", 10), 7);
  EXPECT_DOUBLE_EQ(s.real("alpha", 0.05), 0.1);
  EXPECT_EQ(s.integer("block", 64), 32);
  EXPECT_FALSE(s.flag("offline", false));
  EXPECT_EQ(s.resolved().at("kinds").source, "flag");
  EXPECT_EQ(s.resolved().at("top-k").source, "config");
  EXPECT_EQ(s.resolved().at("block").source, "env");
  EXPECT_EQ(s.resolved().at("offline").source, "default");
  ::unsetenv("LOBBYLINK_TOP_K");
  ::unsetenv("LOBBYLINK_ALPHA");
  ::unsetenv("LOBBYLINK_BLOCK");
}

TEST(Settings, BadValuesAndFiles) {
  Settings s;
  s.set_flag("k", "ten");
  EXPECT_THROW(s.integer("k", 1), Error);
  s.set_flag("b", "maybe");
  EXPECT_THROW(s.flag("b", false), Error);
  TempDir d("settings-bad");
  testutil::write_file(d / "c.json", "[1, 2]");
  try {
    Settings bad(d / "c.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
  }
  EXPECT_THROW(Settings(d / "missing.json"), Error);
}

TEST(Manifest, RecordsHashesAndDetectsTampering) {
  TempDir d("manifest");
  testutil::write_file(d / "in.txt", "input");
  testutil::write_file(d / "out.tsv", "output");
  Settings s;
  s.set_flag("seed", "3");
  s.integer("seed", 0);
  write_manifest(d / "out.tsv", "score --method ss", s.resolved(), {d / "in.txt"}, {d / "out.tsv"});
  EXPECT_EQ(manifest_ref(d / "out.tsv"), "out.tsv.manifest.json");
  EXPECT_EQ(manifest_path_for(d.path()), d / "manifest.json");
  const auto m = load_manifest(d / "out.tsv.manifest.json");
  EXPECT_EQ(m.command, "score --method ss");
  EXPECT_EQ(m.config.at("seed").value, "3");
  EXPECT_EQ(m.config.at("seed").source, "flag");
  EXPECT_EQ(m.inputs.at((d / "in.txt").string()), sha256_hex("input"));
  EXPECT_EQ(m.timestamp.size(), 20u);
  EXPECT_TRUE(verify_manifest(m).empty());
  testutil::write_file(d / "in.txt", "changed");
  EXPECT_EQ(verify_manifest(m), (std::vector<std::string>{(d / "in.txt").string()}));
}

TEST(Kinds, ParseAndPrint) {
  const auto k = parse_kinds("papers,speeches");
  EXPECT_EQ(kinds_string(k), "speech,position_paper");
  EXPECT_THROW(parse_kinds(""), Error);
  EXPECT_THROW(parse_kinds("tweets"), Error);
}

TEST(Fixture, GenerationIsDeterministic) {
  TempDir a("fx-a"), b("fx-b");
  fixture::PlantedSpec spec;
  spec.meps = 12;
  spec.lobbies = 20;
  spec.contradictions = 4;
  write_planted_fixture(a.path(), spec);
  write_planted_fixture(b.path(), spec);
  for (const auto& e : std::filesystem::directory_iterator(a.path()))
    EXPECT_EQ(sha256_file(e.path()), sha256_file(b / e.path().filename().string())) << e.path();
  spec.seed = 8;
  TempDir c("fx-c");
  write_planted_fixture(c.path(), spec);
  EXPECT_NE(sha256_file(a / "documents.jsonl"), sha256_file(c / "documents.jsonl"));
}

TEST(Fixture, PlantedCorpusIsReferentiallyValid) {
  const auto p = fixture::planted_corpus();
  const corpus::Corpus c(p.documents, p.entities, p.groups);
  EXPECT_NO_THROW(c.check_links(p.planted));
  EXPECT_EQ(p.contradictions.size(), 20u);
  for (const auto& x : p.contradictions) {
    EXPECT_FALSE(p.planted.contains(x.mep_id, x.lobby_id));
    EXPECT_EQ(c.document(x.mep_doc).owner_id, x.mep_id);
    EXPECT_EQ(c.document(x.lobby_doc).owner_id, x.lobby_id);
  }
  std::set<std::string> meps, lobbies;
  for (const auto& m : c.meps()) meps.insert(m.mep_id);
  for (const auto& l : c.lobbies()) lobbies.insert(l.lobby_id);
  EXPECT_EQ(corpus::build_retweet_links(p.tweets, meps, lobbies), p.planted);
}

TEST(Fixture, ShippedCopyMatchesTheGenerator) {
  TempDir d("fx-shipped");
  fixture::write_planted_fixture(d.path());
  for (const auto& e : std::filesystem::directory_iterator(d.path())) {
    const auto shipped = std::filesystem::path(FIXTURE_DIR) / e.path().filename();
    ASSERT_TRUE(std::filesystem::exists(shipped)) << shipped;
    EXPECT_EQ(sha256_file(e.path()), sha256_file(shipped)) << shipped;
  }
}

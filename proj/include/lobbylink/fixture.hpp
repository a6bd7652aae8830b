#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lobbylink/classify.hpp"
#include "lobbylink/corpus.hpp"

namespace lobbylink::fixture {

struct PlantedSpec {
  std::size_t meps = 50;
  std::size_t lobbies = 80;
  std::size_t links_per_mep = 4;
  std::size_t generic_speeches = 2;
  std::size_t contradictions = 20;
  std::size_t topics = 20;
  std::size_t noise_retweets = 5;
  std::uint64_t seed = 7;
};

struct Contradiction {
  std::string mep_id;
  std::string lobby_id;
  std::string mep_doc;    // negation-flipped copy of lobby_doc
  std::string lobby_doc;
};

/// Synthetic corpus with planted topic-sharing (MEP, lobby) links. Every
/// planted link has one MEP speech drawn from a paper of the lobby; the
/// contradiction speeches copy a paper of an unlinked lobby with a single
/// negation inserted.
struct PlantedCorpus {
  std::vector<corpus::Document> documents;
  corpus::EntitySet entities;
  corpus::GroupTable groups;
  std::vector<corpus::TweetRecord> tweets;
  std::vector<corpus::MeetingRecord> meetings;
  corpus::ValidationLinkSet planted;  // kind retweet
  std::vector<Contradiction> contradictions;
};

PlantedCorpus planted_corpus(const PlantedSpec& spec = {});

/// Writes the corpus files and planted truth into `dir`:
/// documents/entities/groups/tweets/meetings/planted_links/contradictions
/// .jsonl, plus nli_cache.txt holding the heuristic NLI judgements that Ent
/// scoring (papers vs speeches, top-k 10) requests on this corpus.
void write_planted_fixture(const std::filesystem::path& dir, const PlantedSpec& spec = {});

void write_contradictions(const std::filesystem::path& path, const std::vector<Contradiction>& c);
std::vector<Contradiction> load_contradictions(const std::filesystem::path& path);

/// Labelled example for the position-paper classifier: the weak label comes
/// from the URL, `truth` is the generator's own label.
struct PositionDoc {
  classify::PositionExample example;
  bool truth = false;
};

/// Position papers (stance vocabulary) and manuals (instruction vocabulary)
/// over shared topic words. A few URLs carry the wrong weak label.
std::vector<PositionDoc> position_corpus(std::size_t n, std::uint64_t seed);

/// Sentences of lobbies with pairwise disjoint vocabularies. The first
/// lobby ("climate") is the only one whose sentences contain "fossil".
std::vector<classify::LabeledSentence> authorship_corpus(std::size_t lobbies, std::size_t sentences_per_lobby,
                                                         std::uint64_t seed);

}  // namespace lobbylink::fixture

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "cyclosense/io.hpp"
#include "cyclosense/rng.hpp"

using namespace cyclosense;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

SampleRecord random_record(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  SampleRecord record;
  record.samples.resize(n);
  for (auto& v : record.samples) v = {rng.gaussian(), rng.gaussian()};
  return record;
}

}  // namespace

TEST_CASE("IQ binary round-trip with sidecar") {
  const SampleRecord record = random_record(257, 1);
  const auto path = temp_file("cyclosense_iq.bin");
  io::write_iq_binary(path, record);
  REQUIRE(std::filesystem::exists(path.string() + ".json"));
  const SampleRecord back = io::read_iq_binary(path);
  REQUIRE(back.size() == record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    // float32 storage
    CHECK(std::abs(back.samples[i] - record.samples[i]) < 1e-6);
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("IQ CSV round-trip") {
  const SampleRecord record = random_record(64, 2);
  const auto path = temp_file("cyclosense_iq.csv");
  io::write_iq_csv(path, record);
  const SampleRecord back = io::read_iq_csv(path);
  REQUIRE(back.size() == record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    CHECK(std::abs(back.samples[i] - record.samples[i]) < 1e-11);
  }
  std::filesystem::remove(path);
}

TEST_CASE("CA matrix binary dump round-trip and CSV header") {
  CaMatrix ca;
  ca.n = 16;
  ca.delays = {1, 3};
  RandomSource rng(3);
  ca.columns.assign(2, cvec(16));
  for (auto& col : ca.columns) {
    for (auto& v : col) v = {rng.gaussian(), rng.gaussian()};
  }

  const auto bin = temp_file("cyclosense_ca.bin");
  io::write_ca_binary(bin, ca);
  const CaMatrix back = io::read_ca_binary(bin);
  CHECK(back.n == ca.n);
  CHECK(back.delays == ca.delays);
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 16; ++k) {
      CHECK(std::abs(back.at(k, l) - ca.at(k, l)) < 1e-6);
    }
  }
  std::filesystem::remove(bin);

  const auto csv = temp_file("cyclosense_ca.csv");
  io::write_ca_csv(csv, ca);
  const std::string text = io::read_text_file(csv);
  CHECK(text.rfind("k,d,re,im", 0) == 0);
  std::filesystem::remove(csv);
}

TEST_CASE("dictionary CSV round-trip") {
  const StructureDictionary dict = build_asymptotic_dictionary(32, 2, 1.0);
  const auto path = temp_file("cyclosense_dict.csv");
  io::write_dictionary_csv(path, dict);
  const StructureDictionary back =
      io::read_dictionary_csv(path, 32, DictionaryKind::kAsymptotic, 2);
  REQUIRE(back.n_columns() == dict.n_columns());
  for (int j = 1; j <= dict.n_columns(); ++j) {
    const auto& a = dict.column(j);
    const auto& b = back.column(j);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == b[i].first);
      CHECK(a[i].second == doctest::Approx(b[i].second).epsilon(1e-9));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("test result JSON carries the contract fields") {
  TestResult result;
  result.k_test = 125;
  result.statistic = 17.25;
  result.dof = 8;
  result = decide(result, 0.05);
  const std::string json = io::test_result_to_json(result);
  for (const char* field : {"\"k_test\"", "\"statistic\"", "\"dof\"",
                            "\"threshold\"", "\"pfa\"", "\"verdict\"",
                            "\"regularized\""}) {
    CHECK(json.find(field) != std::string::npos);
  }
  CHECK(json.find("\"H1\"") != std::string::npos);
}

TEST_CASE("recovery state JSON") {
  RecoveryState state;
  state.support = {0, 12, 52};
  state.residual_norms = {0.5, 0.25};
  state.iterations_run = 2;
  const std::string json = io::recovery_state_to_json(state);
  CHECK(json.find("\"support\"") != std::string::npos);
  CHECK(json.find("\"residual_norms\"") != std::string::npos);
  CHECK(json.find("\"iterations\"") != std::string::npos);
}

TEST_CASE("key-value parser") {
  const auto entries = io::parse_key_values(
      "# comment\n"
      "a = 1\n"
      "\n"
      "b = two words  # trailing comment\n");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0] == std::pair<std::string, std::string>{"a", "1"});
  CHECK(entries[1] == std::pair<std::string, std::string>{"b", "two words"});

  CHECK_THROWS_AS(io::parse_key_values("nonsense line\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::parse_key_values("a = 1\na = 2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::parse_key_values("= 3\n"), std::invalid_argument);
}

TEST_CASE("hashes and float formatting are stable") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("cyclosense") == io::fnv1a_hex("cyclosense"));
  CHECK(io::fnv1a_hex("a") != io::fnv1a_hex("b"));
  CHECK(io::format_double(0.15) == "0.15");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-2.5e-9) == "-2.5e-09");
}

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cyclosense/caf.hpp"
#include "cyclosense/detector.hpp"
#include "cyclosense/dictionary.hpp"
#include "cyclosense/recovery.hpp"
#include "cyclosense/signal.hpp"

namespace cyclosense::io {

/// Deterministic float formatting used for every CSV/JSON number we emit
/// ("%.12g"), so repeated runs produce byte-identical files.
std::string format_double(double value);

/// IQ blocks as little-endian interleaved float32 (re, im) with a JSON
/// sidecar `<path>.json` holding {"n": ..., "sample_rate": ...}.
void write_iq_binary(const std::filesystem::path& path,
                     const SampleRecord& record);
SampleRecord read_iq_binary(const std::filesystem::path& path);

/// IQ CSV with header "index,re,im".
void write_iq_csv(const std::filesystem::path& path,
                  const SampleRecord& record);
SampleRecord read_iq_csv(const std::filesystem::path& path);

/// CA matrix CSV with header "k,d,re,im", row-major over k then delays.
void write_ca_csv(const std::filesystem::path& path, const CaMatrix& ca);

/// Compact CA dump: uint32 n, uint32 n_delays, uint32 delays[...], then
/// row-major complex64 (float32 re, float32 im) entries.
void write_ca_binary(const std::filesystem::path& path, const CaMatrix& ca);
CaMatrix read_ca_binary(const std::filesystem::path& path);

/// Sparse dictionary triples with header "row,col,value"; col is the
/// 1-based candidate frequency.
void write_dictionary_csv(const std::filesystem::path& path,
                          const StructureDictionary& dict);
StructureDictionary read_dictionary_csv(const std::filesystem::path& path,
                                        int n, DictionaryKind kind, int delay);

/// {"k_test", "statistic", "dof", "threshold", "pfa", "verdict",
///  "regularized"} as a JSON object.
std::string test_result_to_json(const TestResult& result);

/// {"support", "residual_norms", "iterations"} as a JSON object.
std::string recovery_state_to_json(const RecoveryState& state);

/// Flat key = value text: '#' starts a comment, keys are unique,
/// order-preserving. Used by the sweep configuration format.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text);

/// FNV-1a 64-bit hash, hex-encoded; stamps configs into sweep manifests.
std::string fnv1a_hex(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace cyclosense::io

#include "cyclosense/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cyclosense::io {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::runtime_error(message);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  require(out.good(), "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  require(in.good(), "cannot open for reading: " + path.string());
  return in;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char bytes[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  require(in.good(), "unexpected end of binary file");
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_f32(std::ofstream& out, float v) {
  std::uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  write_u32(out, bits);
}

float read_f32(std::ifstream& in) {
  const std::uint32_t bits = read_u32(in);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_iq_binary(const std::filesystem::path& path,
                     const SampleRecord& record) {
  {
    auto out = open_out(path, true);
    for (const auto& v : record.samples) {
      write_f32(out, static_cast<float>(v.real()));
      write_f32(out, static_cast<float>(v.imag()));
    }
  }
  nlohmann::json sidecar;
  sidecar["n"] = record.samples.size();
  sidecar["sample_rate"] = 1.0 / record.sample_period;
  write_text_file(path.string() + ".json", sidecar.dump(2) + "\n");
}

SampleRecord read_iq_binary(const std::filesystem::path& path) {
  SampleRecord record;
  const std::filesystem::path sidecar_path = path.string() + ".json";
  std::size_t n = 0;
  if (std::filesystem::exists(sidecar_path)) {
    const auto sidecar = nlohmann::json::parse(read_text_file(sidecar_path));
    n = sidecar.at("n").get<std::size_t>();
    if (sidecar.contains("sample_rate")) {
      const double rate = sidecar["sample_rate"].get<double>();
      require(rate > 0.0, "sidecar sample_rate must be positive");
      record.sample_period = 1.0 / rate;
    }
  } else {
    const auto bytes = std::filesystem::file_size(path);
    require(bytes % 8 == 0, "IQ file size is not a multiple of 8 bytes");
    n = bytes / 8;
  }
  auto in = open_in(path, true);
  record.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float re = read_f32(in);
    const float im = read_f32(in);
    record.samples.emplace_back(re, im);
  }
  return record;
}

void write_iq_csv(const std::filesystem::path& path,
                  const SampleRecord& record) {
  auto out = open_out(path, false);
  out << "index,re,im\n";
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    out << i << ',' << format_double(record.samples[i].real()) << ','
        << format_double(record.samples[i].imag()) << '\n';
  }
}

SampleRecord read_iq_csv(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  SampleRecord record;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("index", 0) == 0) continue;
    }
    std::stringstream row(line);
    std::string index, re, im;
    require(std::getline(row, index, ',') && std::getline(row, re, ',') &&
                std::getline(row, im, ','),
            "malformed IQ CSV row: " + line);
    record.samples.emplace_back(std::stod(re), std::stod(im));
  }
  return record;
}

void write_ca_csv(const std::filesystem::path& path, const CaMatrix& ca) {
  auto out = open_out(path, false);
  out << "k,d,re,im\n";
  for (int k = 0; k < ca.n; ++k) {
    for (int l = 0; l < ca.n_delays(); ++l) {
      const cplx v = ca.at(k, l);
      out << k << ',' << ca.delays[static_cast<std::size_t>(l)] << ','
          << format_double(v.real()) << ',' << format_double(v.imag())
          << '\n';
    }
  }
}

void write_ca_binary(const std::filesystem::path& path, const CaMatrix& ca) {
  auto out = open_out(path, true);
  write_u32(out, static_cast<std::uint32_t>(ca.n));
  write_u32(out, static_cast<std::uint32_t>(ca.n_delays()));
  for (int d : ca.delays) write_u32(out, static_cast<std::uint32_t>(d));
  for (int k = 0; k < ca.n; ++k) {
    for (int l = 0; l < ca.n_delays(); ++l) {
      const cplx v = ca.at(k, l);
      write_f32(out, static_cast<float>(v.real()));
      write_f32(out, static_cast<float>(v.imag()));
    }
  }
}

CaMatrix read_ca_binary(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  CaMatrix ca;
  ca.n = static_cast<int>(read_u32(in));
  const int n_delays = static_cast<int>(read_u32(in));
  require(ca.n > 0 && n_delays > 0, "corrupt CA dump header");
  ca.delays.resize(static_cast<std::size_t>(n_delays));
  for (auto& d : ca.delays) d = static_cast<int>(read_u32(in));
  ca.columns.assign(static_cast<std::size_t>(n_delays),
                    cvec(static_cast<std::size_t>(ca.n)));
  for (int k = 0; k < ca.n; ++k) {
    for (int l = 0; l < n_delays; ++l) {
      const float re = read_f32(in);
      const float im = read_f32(in);
      ca.columns[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] =
          cplx{re, im};
    }
  }
  return ca;
}

void write_dictionary_csv(const std::filesystem::path& path,
                          const StructureDictionary& dict) {
  auto out = open_out(path, false);
  out << "row,col,value\n";
  for (int j = 1; j <= dict.n_columns(); ++j) {
    for (const auto& [row, value] : dict.column(j)) {
      out << row << ',' << j << ',' << format_double(value) << '\n';
    }
  }
}

StructureDictionary read_dictionary_csv(const std::filesystem::path& path,
                                        int n, DictionaryKind kind,
                                        int delay) {
  auto in = open_in(path, false);
  StructureDictionary dict;
  dict.n = n;
  dict.kind = kind;
  dict.delay = delay;
  dict.columns.resize(static_cast<std::size_t>(n / 2));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("row", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string row, col, value;
    require(std::getline(ss, row, ',') && std::getline(ss, col, ',') &&
                std::getline(ss, value, ','),
            "malformed dictionary CSV row: " + line);
    const int r = std::stoi(row);
    const int c = std::stoi(col);
    require(r >= 0 && r < n && c >= 1 && c <= n / 2,
            "dictionary CSV entry out of range: " + line);
    dict.columns[static_cast<std::size_t>(c - 1)].emplace_back(
        r, std::stod(value));
  }
  for (auto& column : dict.columns) std::sort(column.begin(), column.end());
  return dict;
}

std::string test_result_to_json(const TestResult& result) {
  nlohmann::json j;
  j["k_test"] = result.k_test;
  j["statistic"] = result.statistic;
  j["dof"] = result.dof;
  if (std::isfinite(result.threshold)) j["threshold"] = result.threshold;
  if (std::isfinite(result.pfa)) j["pfa"] = result.pfa;
  j["verdict"] = result.verdict == Verdict::kH1 ? "H1" : "H0";
  j["regularized"] = result.regularized;
  return j.dump(2);
}

std::string recovery_state_to_json(const RecoveryState& state) {
  nlohmann::json j;
  j["support"] = state.support;
  j["residual_norms"] = state.residual_norms;
  j["iterations"] = state.iterations_run;
  j["rank_deficient"] = state.rank_deficient;
  return j.dump(2);
}

std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::stringstream stream(text);
  std::string line;
  const auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    return s.substr(begin, end - begin + 1);
  };
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    for (const auto& [existing, _] : entries) {
      if (existing == key)
        throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  auto out = open_out(path, true);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace cyclosense::io

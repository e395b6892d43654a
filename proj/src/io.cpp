#include "erpforge/io.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace erpforge {

namespace {

constexpr char kMagic[4] = {'E', 'R', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u32(out, bits);
}

std::uint32_t get_u32(const std::string& bytes, std::size_t offset) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::string& bytes, std::size_t offset) {
  const std::uint32_t bits = get_u32(bytes, offset);
  float v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

std::string etb_bytes(const TrialSet& trials) {
  validate(trials);

  std::string names;
  for (std::size_t c = 0; c < trials.channel_names.size(); ++c) {
    if (c > 0) names.push_back('\n');
    names += trials.channel_names[c];
  }
  while (names.size() % 4 != 0) names.push_back('\0');

  std::string out;
  out.reserve(32 + names.size() +
              4 * static_cast<std::size_t>(trials.n_trials() * trials.n_channels() *
                                           trials.n_samples()));
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(trials.n_trials()));
  put_u32(out, static_cast<std::uint32_t>(trials.n_channels()));
  put_u32(out, static_cast<std::uint32_t>(trials.n_samples()));
  put_f32(out, static_cast<float>(trials.axis.sampling_rate_hz));
  put_f32(out, static_cast<float>(trials.axis.t0_ms));
  put_u32(out, static_cast<std::uint32_t>(names.size()));
  out += names;

  for (const auto& trial : trials.data)
    for (Index c = 0; c < trial.rows(); ++c)
      for (Index t = 0; t < trial.cols(); ++t) put_f32(out, static_cast<float>(trial(c, t)));
  return out;
}

TrialSet parse_etb(const std::string& bytes) {
  if (bytes.size() < 32)
    throw Error(ErrorKind::format, "truncated header: expected at least 32 bytes, got " +
                                       std::to_string(bytes.size()));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw Error(ErrorKind::format, "bad magic; not an ETB file");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion)
    throw Error(ErrorKind::format, "unsupported ETB version " + std::to_string(version));

  const std::uint64_t n_trials = get_u32(bytes, 8);
  const std::uint64_t n_channels = get_u32(bytes, 12);
  const std::uint64_t n_samples = get_u32(bytes, 16);
  const float rate = get_f32(bytes, 20);
  const float t0 = get_f32(bytes, 24);
  const std::uint64_t name_len = get_u32(bytes, 28);
  if (n_trials < 1 || n_channels < 1 || n_samples < 1)
    throw Error(ErrorKind::format, "ETB dimensions must all be at least 1");

  const std::uint64_t expected = 32 + name_len + 4 * n_trials * n_channels * n_samples;
  if (bytes.size() != expected)
    throw Error(ErrorKind::format, "payload size mismatch: expected " + std::to_string(expected) +
                                       " bytes, got " + std::to_string(bytes.size()));

  std::string names = bytes.substr(32, name_len);
  while (!names.empty() && names.back() == '\0') names.pop_back();

  TrialSet trials;
  trials.axis = {static_cast<double>(t0), static_cast<double>(rate),
                 static_cast<Index>(n_samples)};

  std::size_t start = 0;
  for (std::uint64_t c = 0; c < n_channels; ++c) {
    const std::size_t sep = names.find('\n', start);
    if (c + 1 < n_channels && sep == std::string::npos)
      throw Error(ErrorKind::format, "name block holds fewer names than channels");
    trials.channel_names.push_back(names.substr(start, sep - start));
    start = sep == std::string::npos ? names.size() : sep + 1;
  }

  std::size_t offset = 32 + name_len;
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    Eigen::MatrixXd trial(static_cast<Index>(n_channels), static_cast<Index>(n_samples));
    for (Index c = 0; c < trial.rows(); ++c)
      for (Index t = 0; t < trial.cols(); ++t) {
        trial(c, t) = static_cast<double>(get_f32(bytes, offset));
        offset += 4;
      }
    trials.data.push_back(std::move(trial));
  }
  validate(trials);
  return trials;
}

TrialSet read_etb(std::istream& in) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_etb(bytes);
}

TrialSet read_etb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open '" + path + "'");
  return read_etb(in);
}

void write_etb(const TrialSet& trials, std::ostream& out) {
  const std::string bytes = etb_bytes(trials);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_etb(const TrialSet& trials, const std::string& path) {
  write_file_atomic(path, etb_bytes(trials));
}

namespace {

TrialSet erp_as_trials(const Erp& erp) {
  validate(erp);
  TrialSet trials;
  trials.axis = erp.axis;
  trials.channel_names = erp.channel_names;
  trials.data = {erp.data};
  return trials;
}

Erp trial_as_erp(const TrialSet& trials, std::size_t index) {
  Erp erp;
  erp.axis = trials.axis;
  erp.channel_names = trials.channel_names;
  erp.data = trials.data[index];
  return erp;
}

}  // namespace

Erp read_erp(const std::string& path) {
  const TrialSet trials = read_etb(path);
  if (trials.n_trials() != 1)
    throw Error(ErrorKind::format, "'" + path + "' holds " + std::to_string(trials.n_trials()) +
                                       " trials; expected a single-ERP file");
  return trial_as_erp(trials, 0);
}

void write_erp(const Erp& erp, const std::string& path) {
  write_etb(erp_as_trials(erp), path);
}

UncertainErp read_uncertain_erp(const std::string& path) {
  const TrialSet trials = read_etb(path);
  if (trials.n_trials() != 2)
    throw Error(ErrorKind::format,
                "'" + path + "' must hold exactly two trials (mean, then sigma)");
  UncertainErp erp{trial_as_erp(trials, 0), trials.data[1]};
  validate(erp);
  return erp;
}

void write_uncertain_erp(const UncertainErp& erp, const std::string& path) {
  validate(erp);
  TrialSet trials = erp_as_trials(erp.mean);
  trials.data.push_back(erp.sigma);
  write_etb(trials, path);
}

std::string csv_text(const TrialSet& trials) {
  validate(trials);
  if (trials.n_channels() != 1)
    throw Error(ErrorKind::shape, "CSV stores a single channel; select one first");
  char buffer[64];
  std::string out = "# rate=";
  std::snprintf(buffer, sizeof buffer, "%.17g", trials.axis.sampling_rate_hz);
  out += buffer;
  out += " t0=";
  std::snprintf(buffer, sizeof buffer, "%.17g", trials.axis.t0_ms);
  out += buffer;
  out.push_back('\n');
  for (const auto& trial : trials.data) {
    for (Index t = 0; t < trial.cols(); ++t) {
      if (t > 0) out.push_back(',');
      std::snprintf(buffer, sizeof buffer, "%.17g", trial(0, t));
      out += buffer;
    }
    out.push_back('\n');
  }
  return out;
}

TrialSet read_csv(std::istream& in, std::ostream& warnings) {
  TrialSet trials;
  trials.channel_names = {"ch0"};

  double rate = 500.0;
  double t0 = -200.0;
  bool saw_header = false;

  std::string line;
  std::size_t row_number = 0;
  Index expected_cols = -1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream header(line.substr(1));
      std::string token;
      while (header >> token) {
        if (token.rfind("rate=", 0) == 0) {
          rate = std::stod(token.substr(5));
          saw_header = true;
        } else if (token.rfind("t0=", 0) == 0) {
          t0 = std::stod(token.substr(3));
          saw_header = true;
        }
      }
      continue;
    }

    std::vector<double> values;
    std::size_t start = 0;
    std::size_t column = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      ++column;
      const std::string cell = line.substr(start, end - start);
      char* parse_end = nullptr;
      const double value = std::strtod(cell.c_str(), &parse_end);
      // allow surrounding whitespace, nothing else
      const char* p = parse_end;
      while (p && *p != '\0' && std::isspace(static_cast<unsigned char>(*p))) ++p;
      if (cell.empty() || parse_end == cell.c_str() || (p && *p != '\0'))
        throw Error(ErrorKind::format, "row " + std::to_string(row_number) + ", column " +
                                           std::to_string(column) + ": not a number: '" + cell +
                                           "'");
      values.push_back(value);
      start = end + 1;
      if (end == line.size()) break;
    }

    if (expected_cols < 0) {
      expected_cols = static_cast<Index>(values.size());
    } else if (static_cast<Index>(values.size()) != expected_cols) {
      throw Error(ErrorKind::format,
                  "row " + std::to_string(row_number) + " has " + std::to_string(values.size()) +
                      " columns, expected " + std::to_string(expected_cols));
    }
    Eigen::MatrixXd trial(1, expected_cols);
    for (Index t = 0; t < expected_cols; ++t) trial(0, t) = values[static_cast<std::size_t>(t)];
    trials.data.push_back(std::move(trial));
  }

  if (trials.data.empty()) throw Error(ErrorKind::format, "CSV contains no data rows");
  if (!saw_header)
    warnings << "warning: no '# rate=<hz> t0=<ms>' header; assuming 500 Hz from -200 ms\n";
  trials.axis = {t0, rate, trials.data.front().cols()};
  validate(trials);
  return trials;
}

TrialSet read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::format, "cannot open '" + path + "'");
  return read_csv(in, std::cerr);
}

void write_csv(const TrialSet& trials, const std::string& path) {
  write_file_atomic(path, csv_text(trials));
}

ErpLibrary read_library(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::format, "cannot open '" + path + "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, "library manifest '" + path + "': " + e.what());
  }
  if (!manifest.is_array())
    throw Error(ErrorKind::format, "library manifest must be a JSON array");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  ErpLibrary library;
  for (const auto& entry : manifest) {
    if (!entry.is_object() || !entry.contains("subject") || !entry.contains("task") ||
        !entry.contains("path"))
      throw Error(ErrorKind::format,
                  "library entries need 'subject', 'task' and 'path' keys");
    const std::filesystem::path erp_path = base / entry["path"].get<std::string>();
    library.entries.push_back({entry["subject"].get<std::string>(),
                               entry["task"].get<std::string>(), read_erp(erp_path.string())});
  }
  return library;
}

void write_file_atomic(const std::string& path, const std::string& payload) {
  if (path == "-") {
    std::cout.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::format, "cannot write '" + tmp + "'");
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::format, "failed while writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::format, "cannot move output into place at '" + path + "'");
  }
}

}  // namespace erpforge

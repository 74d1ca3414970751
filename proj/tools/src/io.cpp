#include "hierprox_cli/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <hierprox/errors.hpp>

namespace hierprox::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    v = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size() && std::isfinite(v);
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& why) {
  std::ostringstream os;
  os << path << ":" << line << ": " << why;
  throw DataError(os.str());
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return in;
}

int species_code(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s.rfind("iris-", 0) == 0) s = s.substr(5);
  if (s == "setosa" || s == "0") return 0;
  if (s == "versicolor" || s == "1") return 1;
  if (s == "virginica" || s == "2") return 2;
  return -1;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

IrisTable read_iris_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  IrisTable t;
  std::vector<std::array<double, 4>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string tl = trim(line);
    if (tl.empty()) continue;
    const auto f = split_fields(tl);
    std::array<double, 4> v{};
    bool numeric = f.size() == 5;
    for (int k = 0; numeric && k < 4; ++k) numeric = parse_double(f[k], v[k]);
    const int code = f.size() == 5 ? species_code(f[4]) : -1;
    if (!numeric || code < 0) {
      // The first line may be a header.
      if (!seen_content) {
        seen_content = true;
        continue;
      }
      if (f.size() != 5) fail(path, lineno, "expected 5 fields, found " + std::to_string(f.size()));
      if (!numeric) fail(path, lineno, "non-numeric measurement");
      fail(path, lineno, "unknown species label '" + f[4] + "'");
    }
    seen_content = true;
    rows.push_back(v);
    t.species.push_back(code);
  }
  if (rows.size() != 150)
    fail(path, lineno, "expected 150 data rows, found " + std::to_string(rows.size()));
  t.features.resize(150, 4);
  for (int i = 0; i < 150; ++i)
    for (int k = 0; k < 4; ++k) t.features(i, k) = rows[i][k];
  return t;
}

RealMat read_numeric_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string tl = trim(line);
    if (tl.empty()) continue;
    const auto f = split_fields(tl);
    std::vector<double> r(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
      if (!parse_double(f[k], r[k]))
        fail(path, lineno, "field " + std::to_string(k + 1) + " is not a finite number");
    if (!rows.empty() && r.size() != rows.front().size())
      fail(path, lineno,
           "expected " + std::to_string(rows.front().size()) + " fields, found " +
               std::to_string(r.size()));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) fail(path, lineno, "no data rows");
  RealMat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  return m;
}

RealVec read_vector_csv(const std::string& path) {
  const RealMat m = read_numeric_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw DataError(path + ": expected a single row or a single column");
}

std::string format_trace_csv(const IterTrace& trace) {
  std::string out = "iter,fp_residual,function_value,psi_value,distance\n";
  for (const auto& r : trace) {
    out += std::to_string(r.iter);
    for (double v : {r.fp_residual, r.objective, r.psi_value, r.distance}) {
      out += ',';
      out += fmt(v);
    }
    out += '\n';
  }
  return out;
}

void OutputSet::add(std::string path, std::string content) {
  files_.emplace_back(std::move(path), std::move(content));
}

void OutputSet::commit() {
  std::vector<std::string> temps;
  auto cleanup = [&] {
    for (const auto& t : temps) std::remove(t.c_str());
  };
  for (const auto& [path, content] : files_) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw DataError(path + ": cannot create output file");
    }
    temps.push_back(tmp);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw DataError(path + ": write failed");
    }
  }
  for (std::size_t i = 0; i < files_.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(temps[i], files_[i].first, ec);
    if (ec) {
      cleanup();
      throw DataError(files_[i].first + ": rename failed: " + ec.message());
    }
  }
  files_.clear();
}

}  // namespace hierprox::cli

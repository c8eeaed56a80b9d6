#include "pgnn/eval/prediction_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "pgnn/errors.hpp"

namespace pgnn::eval {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not found: " + path.string());
  return in;
}

double parse_double(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + token + "'", line);
  }
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

std::size_t parse_index(const std::string& token, std::size_t line, std::size_t n) {
  const double v = parse_double(token, line);
  if (v < 1 || v > static_cast<double>(n) || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ParseError("residue index '" + token + "' out of range", line);
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_contacts(const std::filesystem::path& path, const edge::EdgePathOutput& edge) {
  const std::size_t bins = edge.probabilities.dim(0), n = edge.probabilities.dim(1);
  auto out = open_out(path);
  out << n << ' ' << bins << '\n';
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      out << i + 1 << ' ' << j + 1 << ' ' << fmt(edge.contact_map(i, j));
      for (std::size_t b = 0; b < bins; ++b) out << ' ' << fmt(edge.probabilities(b, i, j));
      out << '\n';
    }
}

ContactFile read_contacts(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty contacts file", 1);
  const auto head = tokens(line);
  if (head.size() != 2) throw ParseError("contacts header must be 'L B'", 1);
  ContactFile f;
  f.length = static_cast<std::size_t>(parse_double(head[0], 1));
  f.bins = static_cast<std::size_t>(parse_double(head[1], 1));
  if (f.length < 1 || f.bins < 1) throw ParseError("contacts header must be positive", 1);
  const std::size_t n = f.length;
  f.contact_map = ad::Tensor({n, n});
  f.probabilities = ad::Tensor({f.bins, n, n});
  std::size_t lineno = 1, rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 3 + f.bins)
      throw ParseError("expected " + std::to_string(3 + f.bins) + " fields", lineno);
    const std::size_t i = parse_index(t[0], lineno, n) - 1, j = parse_index(t[1], lineno, n) - 1;
    if (i >= j) throw ParseError("pairs must have i < j", lineno);
    f.contact_map(i, j) = f.contact_map(j, i) = parse_double(t[2], lineno);
    for (std::size_t b = 0; b < f.bins; ++b)
      f.probabilities(b, i, j) = f.probabilities(b, j, i) = parse_double(t[3 + b], lineno);
    ++rows;
  }
  if (rows != n * (n - 1) / 2)
    throw ParseError("expected " + std::to_string(n * (n - 1) / 2) + " pair rows, found " +
                         std::to_string(rows),
                     lineno);
  return f;
}

void write_angles(const std::filesystem::path& path, const AngleFile& a) {
  const std::size_t n = a.phi.size();
  if (a.psi.size() != n || a.phi_mask.size() != n || a.psi_mask.size() != n)
    throw DimensionError("angle columns differ in length");
  auto out = open_out(path);
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i)
    out << i + 1 << ' ' << (a.phi_mask[i] ? fmt(a.phi[i]) : "NA") << ' '
        << (a.psi_mask[i] ? fmt(a.psi[i]) : "NA") << '\n';
}

AngleFile read_angles(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty angles file", 1);
  const auto head = tokens(line);
  if (head.size() != 1) throw ParseError("angles header must be 'L'", 1);
  const auto n = static_cast<std::size_t>(parse_double(head[0], 1));
  AngleFile a;
  a.phi.assign(n, 0.0);
  a.psi.assign(n, 0.0);
  a.phi_mask.assign(n, 0);
  a.psi_mask.assign(n, 0);
  std::vector<std::uint8_t> seen(n, 0);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 3) throw ParseError("expected 'i phi psi'", lineno);
    const std::size_t i = parse_index(t[0], lineno, n) - 1;
    if (seen[i]) throw ParseError("duplicate residue " + t[0], lineno);
    seen[i] = 1;
    if (t[1] != "NA") {
      a.phi[i] = parse_double(t[1], lineno);
      a.phi_mask[i] = 1;
    }
    if (t[2] != "NA") {
      a.psi[i] = parse_double(t[2], lineno);
      a.psi_mask[i] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) throw ParseError("residue " + std::to_string(i + 1) + " missing", lineno);
  return a;
}

AngleFile predicted_angles(const node::NodePathOutput& node) {
  const std::size_t n = node.phi.size();
  AngleFile a;
  a.phi = node.phi;
  a.psi = node.psi;
  a.phi_mask = node.phi_defined;
  a.psi_mask = node.psi_defined;
  if (n > 0) {
    a.phi_mask[0] = 0;
    a.psi_mask[n - 1] = 0;
  }
  // masked values are not stored, keep them at the value a reader fills in
  for (std::size_t i = 0; i < n; ++i) {
    if (!a.phi_mask[i]) a.phi[i] = 0.0;
    if (!a.psi_mask[i]) a.psi[i] = 0.0;
  }
  return a;
}

}  // namespace pgnn::eval

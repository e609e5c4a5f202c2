#pragma once

// Text serialization for domains, operators, grids and spectra. Numbers are
// printed with 17 significant digits so files round-trip exactly.

#include <qha/localization.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qha::io {

using json = nlohmann::ordered_json;

inline std::string fmt(double x) {
  if (x == 0)
    return "0"; // avoids "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string read_text(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw ParseError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path &p, const std::string &text) {
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw Error("cannot write " + p.string());
  out << text;
}

inline json read_json(const std::filesystem::path &p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception &e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

inline std::vector<std::vector<double>> parse_csv_numbers(const std::string &text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        numeric = numeric && used > 0;
      } catch (const std::exception &) {
        numeric = false;
        break;
      }
    }
    if (numeric)
      rows.push_back(std::move(row));
    else if (!rows.empty())
      throw ParseError("non-numeric CSV row: " + line);
    // a leading non-numeric row is a header
  }
  return rows;
}

// Domains

inline json to_json(const Domain &d) {
  json pts = json::array();
  for (auto z : d.points())
    pts.push_back({z.m, z.n});
  return json{{"N", d.lattice().N()}, {"points", std::move(pts)}};
}

inline Domain domain_from_json(const json &j) {
  try {
    const PhaseLattice lat(j.at("N").get<int>());
    std::vector<LatticePoint> pts;
    for (const auto &p : j.at("points"))
      pts.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
    return Domain(lat, pts);
  } catch (const json::exception &e) {
    throw ParseError(std::string("domain: ") + e.what());
  }
}

// Operators: JSON {"N", "re", "im"} with row-major nested arrays; CSV has one
// "re,im" line per entry in row-major order.

inline json to_json(const OperatorMatrix &A) {
  const int N = A.dim();
  json re = json::array(), im = json::array();
  for (int i = 0; i < N; ++i) {
    json r = json::array(), c = json::array();
    for (int j = 0; j < N; ++j) {
      r.push_back(A(i, j).real());
      c.push_back(A(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return json{{"N", N}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline OperatorMatrix operator_from_json(const json &j) {
  try {
    const int N = j.at("N").get<int>();
    OperatorMatrix A(N);
    const auto &re = j.at("re");
    const bool has_im = j.contains("im");
    if (static_cast<int>(re.size()) != N)
      throw ParseError("operator: expected " + std::to_string(N) + " rows");
    for (int i = 0; i < N; ++i) {
      if (static_cast<int>(re.at(i).size()) != N)
        throw ParseError("operator: row " + std::to_string(i) + " has wrong length");
      for (int j2 = 0; j2 < N; ++j2)
        A(i, j2) = cplx(re.at(i).at(j2).get<double>(), has_im ? j.at("im").at(i).at(j2).get<double>() : 0.0);
    }
    return A;
  } catch (const json::exception &e) {
    throw ParseError(std::string("operator: ") + e.what());
  }
}

inline std::string operator_csv(const OperatorMatrix &A) {
  std::string s = "re,im\n";
  for (const auto &v : A.values())
    s += fmt(v.real()) + "," + fmt(v.imag()) + "\n";
  return s;
}

inline OperatorMatrix operator_from_csv(const std::string &text) {
  const auto rows = parse_csv_numbers(text);
  const int N = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
  if (N < 1 || static_cast<std::size_t>(N) * N != rows.size())
    throw ParseError("operator CSV must have N^2 entries, got " + std::to_string(rows.size()));
  OperatorMatrix A(N);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].empty() || rows[k].size() > 2)
      throw ParseError("operator CSV rows must be re,im");
    A.values()[k] = cplx(rows[k][0], rows[k].size() > 1 ? rows[k][1] : 0.0);
  }
  return A;
}

inline OperatorMatrix load_operator(const std::filesystem::path &p) {
  if (p.extension() == ".csv")
    return operator_from_csv(read_text(p));
  return operator_from_json(read_json(p));
}

// Grids: CSV is N rows by N columns with row index m and column index n.

inline std::string grid_csv(const RealGrid &g) {
  const int N = g.N();
  std::string s;
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      if (n)
        s += ',';
      s += fmt(g(m, n));
    }
    s += '\n';
  }
  return s;
}

inline RealGrid grid_from_csv(const std::string &text) {
  const auto rows = parse_csv_numbers(text);
  const int N = static_cast<int>(rows.size());
  if (N < 1)
    throw ParseError("empty grid CSV");
  RealGrid g{PhaseLattice(N)};
  for (int m = 0; m < N; ++m) {
    if (static_cast<int>(rows[m].size()) != N)
      throw ParseError("grid CSV must be square");
    for (int n = 0; n < N; ++n)
      g(m, n) = rows[m][n];
  }
  return g;
}

inline json to_json(const RealGrid &g) {
  json rows = json::array();
  for (int m = 0; m < g.N(); ++m) {
    json r = json::array();
    for (int n = 0; n < g.N(); ++n)
      r.push_back(g(m, n));
    rows.push_back(std::move(r));
  }
  return json{{"N", g.N()}, {"values", std::move(rows)}};
}

inline RealGrid grid_from_json(const json &j) {
  try {
    const int N = j.at("N").get<int>();
    RealGrid g{PhaseLattice(N)};
    for (int m = 0; m < N; ++m)
      for (int n = 0; n < N; ++n)
        g(m, n) = j.at("values").at(m).at(n).get<double>();
    return g;
  } catch (const json::exception &e) {
    throw ParseError(std::string("grid: ") + e.what());
  }
}

inline RealGrid load_grid(const std::filesystem::path &p) {
  if (p.extension() == ".json")
    return grid_from_json(read_json(p));
  return grid_from_csv(read_text(p));
}

/// Writes the real part to `path`, and the imaginary part next to it with an
/// "_im" suffix when it is not identically zero. Returns the files written.
inline std::vector<std::filesystem::path> write_grid_csv(const std::filesystem::path &path,
                                                         const ComplexGrid &g) {
  std::vector<std::filesystem::path> files{path};
  write_text(path, grid_csv(real_part(g)));
  RealGrid im(g.lattice());
  bool nonzero = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    im[i] = g[i].imag();
    nonzero = nonzero || im[i] != 0;
  }
  if (nonzero) {
    auto ip = path;
    ip.replace_filename(path.stem().string() + "_im" + path.extension().string());
    write_text(ip, grid_csv(im));
    files.push_back(ip);
  }
  return files;
}

// Spectra

inline std::string eigenvalues_csv(const EigenDecomposition &e) {
  std::string s = "k,lambda\n";
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k)
    s += std::to_string(k + 1) + "," + fmt(e.eigenvalues[k]) + "\n";
  return s;
}

inline json summary_json(const LocalizationResult &r, const RealGrid &st) {
  return json{{"measure", r.measure},
              {"A_Omega", r.A},
              {"trace", r.op.trace().real()},
              {"second_moment", second_moment(r.domain, st)},
              {"projection_functional", projection_functional(r, st)},
              {"degenerate", r.degenerate()}};
}

} // namespace qha::io

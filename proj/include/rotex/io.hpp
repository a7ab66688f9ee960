#pragma once

// File formats: discrete fields, Fourier fields, density grids, pairing
// tables and run manifests.
//
//   field CSV     x_index,y_index,direction,value   (direction 1 = e1, 2 = e2)
//   Fourier CSV   component,z1,z2,coef
//   density CSV   x_index,y_index,value            (header line "# M=<m> t=<t>")
//   density bin   "RTXD" | int32 M | float64 t | M*M float64, row-major j*M+i,
//                 little-endian
//   pairing CSV   trajectory,time,field_id,value   (field_id quoted when it holds commas)

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "rotex/fields.hpp"
#include "rotex/hydro.hpp"
#include "rotex/torus.hpp"

namespace rotex {

namespace detail {

// Splits one CSV line; cells may be double-quoted ("" escapes a quote).
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

inline std::string quote_csv(const std::string& cell) {
  if (cell.find_first_of(",\"") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

inline std::ifstream open_in(const std::filesystem::path& p, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(p, mode);
  if (!in) throw std::runtime_error("cannot open " + p.string() + " for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(p, mode);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

// Reads data lines (skipping blank lines, '#' comments and the header row).
template <class Row>
void for_each_row(std::istream& in, const std::string& header, std::size_t columns, Row&& row) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != header) throw std::runtime_error("expected header '" + header + "', got '" + line + "'");
      seen_header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != columns) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                               " columns");
    }
    try {
      row(cells);
    } catch (const std::logic_error& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace detail

inline constexpr const char* kFieldHeader = "x_index,y_index,direction,value";
inline constexpr const char* kFourierHeader = "component,z1,z2,coef";
inline constexpr const char* kDensityHeader = "x_index,y_index,value";
inline constexpr const char* kPairingHeader = "trajectory,time,field_id,value";

inline void write_field_csv(std::ostream& out, const DiscreteVectorField& phi) {
  const int n = phi.side();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kFieldHeader << '\n';
  for (std::size_t id = 0; id < phi.size(); ++id) {
    const std::size_t v = id / 2;
    out << v % n << ',' << v / n << ',' << (id % 2) + 1 << ',' << phi[id] << '\n';
  }
}

inline DiscreteVectorField read_field_csv(std::istream& in, int n) {
  DiscreteVectorField phi(n);
  std::vector<bool> seen(phi.size(), false);
  detail::for_each_row(in, kFieldHeader, 4, [&](const std::vector<std::string>& c) {
    const int i = std::stoi(c[0]), j = std::stoi(c[1]), d = std::stoi(c[2]);
    if (i < 0 || i >= n || j < 0 || j >= n || (d != 1 && d != 2)) throw std::out_of_range("edge index out of range");
    const std::size_t id = 2 * (static_cast<std::size_t>(j) * n + i) + (d - 1);
    phi[id] = std::stod(c[3]);
    seen[id] = true;
  });
  for (bool s : seen) {
    if (!s) throw std::runtime_error("field file does not cover every edge");
  }
  return phi;
}

inline void write_fourier_csv(std::ostream& out, const FourierVectorField& g) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kFourierHeader << '\n';
  for (const auto& t : g.terms()) out << t.mode.component << ',' << t.mode.z1 << ',' << t.mode.z2 << ',' << t.coef << '\n';
}

inline FourierVectorField read_fourier_csv(std::istream& in) {
  std::vector<FourierTerm> terms;
  detail::for_each_row(in, kFourierHeader, 4, [&](const std::vector<std::string>& c) {
    terms.push_back({{std::stoi(c[0]), std::stoi(c[1]), std::stoi(c[2])}, std::stod(c[3])});
  });
  return FourierVectorField(std::move(terms));
}

inline FourierVectorField read_fourier_csv(const std::filesystem::path& p) {
  auto in = detail::open_in(p);
  return read_fourier_csv(in);
}

inline void write_density_csv(std::ostream& out, const DensityField& rho) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# M=" << rho.m << " t=" << rho.t << '\n' << kDensityHeader << '\n';
  for (std::size_t k = 0; k < rho.values.size(); ++k) {
    out << k % rho.m << ',' << k / rho.m << ',' << rho.values[k] << '\n';
  }
}

inline DensityField read_density_csv(std::istream& in) {
  std::string first;
  std::getline(in, first);
  DensityField rho;
  if (std::sscanf(first.c_str(), "# M=%d t=%lf", &rho.m, &rho.t) != 2 || rho.m < 1) {
    throw std::runtime_error("density CSV must start with '# M=<m> t=<t>'");
  }
  rho.values.assign(static_cast<std::size_t>(rho.m) * rho.m, 0.0);
  detail::for_each_row(in, kDensityHeader, 3, [&](const std::vector<std::string>& c) {
    const int i = std::stoi(c[0]), j = std::stoi(c[1]);
    if (i < 0 || i >= rho.m || j < 0 || j >= rho.m) throw std::out_of_range("grid index out of range");
    rho.values[static_cast<std::size_t>(j) * rho.m + i] = std::stod(c[2]);
  });
  return rho;
}

inline void write_density_binary(std::ostream& out, const DensityField& rho) {
  static_assert(std::endian::native == std::endian::little, "binary density format is little-endian");
  const std::int32_t m = rho.m;
  out.write("RTXD", 4);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&rho.t), sizeof rho.t);
  out.write(reinterpret_cast<const char*>(rho.values.data()),
            static_cast<std::streamsize>(rho.values.size() * sizeof(double)));
}

inline DensityField read_density_binary(std::istream& in) {
  char magic[4];
  std::int32_t m = 0;
  DensityField rho;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&rho.t), sizeof rho.t);
  if (!in || std::memcmp(magic, "RTXD", 4) != 0 || m < 1) throw std::runtime_error("not a density binary file");
  rho.m = m;
  rho.values.resize(static_cast<std::size_t>(m) * m);
  in.read(reinterpret_cast<char*>(rho.values.data()), static_cast<std::streamsize>(rho.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated density binary file");
  return rho;
}

struct PairingRecord {
  std::uint64_t trajectory = 0;
  double time = 0.0;
  std::string field_id;
  double value = 0.0;
};

inline void write_pairings_csv(std::ostream& out, const std::vector<PairingRecord>& rows) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kPairingHeader << '\n';
  for (const auto& r : rows) {
    out << r.trajectory << ',' << r.time << ',' << detail::quote_csv(r.field_id) << ',' << r.value << '\n';
  }
}

inline std::vector<PairingRecord> read_pairings_csv(std::istream& in) {
  std::vector<PairingRecord> rows;
  detail::for_each_row(in, kPairingHeader, 4, [&](const std::vector<std::string>& c) {
    rows.push_back({std::stoull(c[0]), std::stod(c[1]), c[2], std::stod(c[3])});
  });
  return rows;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  auto out = detail::open_out(p);
  out << j.dump(2) << '\n';
}

}  // namespace rotex

#include "sqm/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sqm {

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_to_string(const CsvTable& table) {
  if (table.header.empty())
    throw std::invalid_argument("csv_to_string: header row is mandatory");
  std::string out;
  const auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("csv_to_string: ragged row");
    append_row(row);
  }
  return out;
}

CsvTable csv_parse(std::istream& in) {
  CsvTable table;
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : s) {
      if (c == ',') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    return cells;
  };
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      table.header = split(line);
      first = false;
    } else {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

namespace {

void write_bytes(const std::filesystem::path& file, const std::string& bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace

void write_csv(const std::filesystem::path& file, const CsvTable& table) {
  if (table.rows.empty())
    throw std::invalid_argument("write_csv: refusing to write empty results");
  write_bytes(file, csv_to_string(table));
}

void write_json(const std::filesystem::path& file, const ordered_json& j) {
  if (j.empty())
    throw std::invalid_argument("write_json: refusing to write empty results");
  write_bytes(file, j.dump(2) + "\n");
}

// ---- Path JSON ----------------------------------------------------------------

ordered_json path_to_json(const Path& path) {
  ordered_json j;
  j["T"] = path.T;
  j["grid"] = path.grid;
  j["values"] = path.values;
  j["meta"] = {{"kind", path.kind}, {"seed", path.seed}};
  return j;
}

Path path_from_json(const ordered_json& j) {
  Path p;
  p.T = j.at("T").get<double>();
  p.grid = j.at("grid").get<std::vector<double>>();
  p.values = j.at("values").get<std::vector<double>>();
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    if (m.contains("kind")) p.kind = m.at("kind").get<std::string>();
    if (m.contains("seed")) p.seed = m.at("seed").get<std::uint64_t>();
  }
  p.validate();
  return p;
}

// ---- System JSON ---------------------------------------------------------------

namespace {

ordered_json factor_to_json(const Factor& f) {
  ordered_json j;
  if (const auto* g = std::get_if<GaussFactor>(&f)) {
    j["type"] = "gauss";
    j["mean"] = g->mean;
    j["sd"] = g->sd;
    if (g->is_plain()) {
      j["mass"] = g->poly.coef[0].real();
    } else {
      std::vector<double> pre, pim;
      for (const auto& c : g->poly.coef) {
        pre.push_back(c.real());
        pim.push_back(c.imag());
      }
      j["poly_re"] = pre;
      j["poly_im"] = pim;
      j["modulation"] = g->modulation;
    }
    return j;
  }
  const auto& gr = std::get<GridFactor>(f);
  j["type"] = "grid";
  j["x0"] = gr.x0;
  j["dx"] = gr.dx;
  std::vector<double> re, im;
  bool complex_valued = false;
  for (const auto& v : gr.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
    complex_valued = complex_valued || v.imag() != 0.0;
  }
  j["re"] = re;
  if (complex_valued) j["im"] = im;
  return j;
}

Factor factor_from_json(const ordered_json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gauss") {
    GaussFactor g;
    g.mean = j.at("mean").get<double>();
    g.sd = j.at("sd").get<double>();
    if (j.contains("mass")) {
      g.poly.coef = {cxd(j.at("mass").get<double>(), 0.0)};
    } else {
      const auto re = j.at("poly_re").get<std::vector<double>>();
      const auto im = j.at("poly_im").get<std::vector<double>>();
      g.poly.coef.clear();
      for (std::size_t i = 0; i < re.size(); ++i)
        g.poly.coef.emplace_back(re[i], im[i]);
      g.modulation = j.value("modulation", 0.0);
    }
    return g;
  }
  if (type == "grid") {
    GridFactor gr;
    gr.x0 = j.at("x0").get<double>();
    gr.dx = j.at("dx").get<double>();
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    for (std::size_t i = 0; i < re.size(); ++i)
      gr.values.emplace_back(re[i], im[i]);
    return gr;
  }
  throw std::invalid_argument("factor_from_json: unknown type " + type);
}

}  // namespace

ordered_json system_to_json(const MixtureSystem& system) {
  ordered_json j;
  j["level"] = system.level();
  ordered_json terms = ordered_json::array();
  for (const auto& t : system.terms) {
    ordered_json jt;
    jt["re"] = t.coefficient.real();
    jt["im"] = t.coefficient.imag();
    if (t.system.tail_mass != 1.0) jt["tail_mass"] = t.system.tail_mass;
    ordered_json factors = ordered_json::array();
    for (const auto& f : t.system.factors) factors.push_back(factor_to_json(f));
    jt["factors"] = std::move(factors);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j;
}

MixtureSystem system_from_json(const ordered_json& j) {
  MixtureSystem m;
  for (const auto& jt : j.at("terms")) {
    MixtureSystem::Term t;
    t.coefficient = cxd(jt.at("re").get<double>(), jt.at("im").get<double>());
    t.system.tail_mass = jt.value("tail_mass", 1.0);
    for (const auto& jf : jt.at("factors"))
      t.system.factors.push_back(factor_from_json(jf));
    m.terms.push_back(std::move(t));
  }
  m.validate();
  if (j.contains("level") &&
      j.at("level").get<std::size_t>() != m.level())
    throw std::invalid_argument("system_from_json: level mismatch");
  return m;
}

// ---- Ensemble JSON -------------------------------------------------------------

ordered_json ensemble_to_json(const PathEnsemble& ensemble) {
  ordered_json j;
  j["T"] = ensemble.paths.empty() ? 0.0 : ensemble.paths.front().T;
  ordered_json paths = ordered_json::array();
  for (const auto& p : ensemble.paths) paths.push_back(path_to_json(p));
  j["paths"] = std::move(paths);
  j["weights"] = ensemble.weights;
  return j;
}

PathEnsemble ensemble_from_json(const ordered_json& j) {
  PathEnsemble e;
  for (const auto& jp : j.at("paths")) e.paths.push_back(path_from_json(jp));
  e.weights = j.at("weights").get<std::vector<double>>();
  e.validate();
  return e;
}

}  // namespace sqm

#include "nodallab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nodallab/error.hpp"

namespace nodallab::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

namespace {

constexpr std::size_t kPerLine = 8;

void write_samples(std::ostringstream& out, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << format_double(v[i]) << ((i + 1) % kPerLine == 0 || i + 1 == v.size() ? '\n' : ' ');
  }
}

void write_params(std::ostringstream& out, const ProblemParams& p) {
  out << "q=" << format_double(p.q()) << '\n'
      << "lambda_plus=" << format_double(p.lambda_plus()) << '\n'
      << "lambda_minus=" << format_double(p.lambda_minus()) << '\n'
      << "mu=" << format_double(p.mu()) << '\n';
}

const char* term_name(Term::Kind kind) {
  switch (kind) {
    case Term::Kind::Harmonic: return "harmonic";
    case Term::Kind::Constant: return "constant";
    case Term::Kind::Radial: return "radial";
    case Term::Kind::Ramp: return "ramp";
  }
  return "?";
}

struct Parsed {
  std::string kind;
  std::multimap<std::string, std::pair<std::string, std::size_t>> meta;  // key -> (value, line)
  std::vector<double> samples;
  std::vector<std::size_t> sample_lines;
  std::size_t last_line = 0;
};

double parse_number(const std::string& token, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ParseError(ErrorKind::Parse, line, "not a number: '" + token + "'");
  if (!std::isfinite(v)) throw ParseError(ErrorKind::Parse, line, "non-finite value '" + token + "'");
  return v;
}

Parsed parse(const std::string& text) {
  Parsed p;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(ErrorKind::Parse, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream head(line);
    std::string magic, version;
    head >> magic >> version >> p.kind;
    if (magic != kMagic) throw ParseError(ErrorKind::Parse, 1, "missing NODALLAB header");
    if (version != "v" + std::to_string(kVersion)) {
      throw ParseError(ErrorKind::Version, 1, "unsupported format version '" + version + "'");
    }
    if (p.kind.empty()) throw ParseError(ErrorKind::Parse, 1, "header lacks a kind");
  }
  bool in_samples = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (!in_samples && eq != std::string::npos) {
      p.meta.emplace(line.substr(0, eq), std::make_pair(line.substr(eq + 1), lineno));
      continue;
    }
    in_samples = true;
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      p.samples.push_back(parse_number(tok, lineno));
      p.sample_lines.push_back(lineno);
    }
  }
  p.last_line = lineno;
  return p;
}

const std::pair<std::string, std::size_t>& require(const Parsed& p, const std::string& key) {
  auto it = p.meta.find(key);
  if (it == p.meta.end()) throw ParseError(ErrorKind::Parse, 0, "missing metadata key '" + key + "'");
  return it->second;
}

double meta_number(const Parsed& p, const std::string& key) {
  const auto& [value, line] = require(p, key);
  return parse_number(value, line);
}

std::size_t meta_count(const Parsed& p, const std::string& key) {
  const auto& [value, line] = require(p, key);
  const double v = parse_number(value, line);
  if (v < 0 || v != std::floor(v)) throw ParseError(ErrorKind::Parse, line, key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

ProblemParams meta_params(const Parsed& p) {
  const auto line = require(p, "q").second;
  try {
    return ProblemParams(meta_number(p, "q"), meta_number(p, "lambda_plus"), meta_number(p, "lambda_minus"),
                         meta_number(p, "mu"));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(ErrorKind::Parse, line, e.what());
  }
}

void expect_samples(const Parsed& p, std::size_t expected) {
  if (p.samples.size() != expected) {
    const std::size_t line = p.sample_lines.empty() ? p.last_line : p.sample_lines.back();
    throw ParseError(ErrorKind::Parse, line,
                     "dimension mismatch: expected " + std::to_string(expected) + " samples, found " +
                         std::to_string(p.samples.size()));
  }
}

AngularProfile profile_from(const Parsed& p, std::size_t offset, bool with_params) {
  const std::size_t n = meta_count(p, "n_theta");
  if (n < AngularProfile::kMinSamples) {
    throw ParseError(ErrorKind::Parse, require(p, "n_theta").second, "n_theta must be >= 16");
  }
  expect_samples(p, offset + 2 * n);
  std::vector<double> values(p.samples.begin() + offset, p.samples.begin() + offset + n);
  std::vector<double> deriv(p.samples.begin() + offset + n, p.samples.end());
  std::optional<ProblemParams> params;
  if (with_params && p.meta.count("q")) params = meta_params(p);
  return AngularProfile(std::move(values), std::move(deriv), params);
}

}  // namespace

std::string to_text(const AngularProfile& profile) {
  std::ostringstream out;
  out << kMagic << " v" << kVersion << " profile\n";
  out << "n_theta=" << profile.size() << '\n';
  if (profile.params()) write_params(out, *profile.params());
  write_samples(out, profile.values());
  write_samples(out, profile.derivative());
  return out.str();
}

std::string to_text(const PlanarField& field) {
  std::ostringstream out;
  switch (field.kind()) {
    case PlanarField::Kind::Homogeneous: {
      const auto& prof = field.profile();
      out << kMagic << " v" << kVersion << " field-homogeneous\n";
      out << "gamma=" << format_double(field.homogeneity()) << '\n';
      out << "n_theta=" << prof.size() << '\n';
      write_params(out, field.params());
      write_samples(out, prof.values());
      write_samples(out, prof.derivative());
      break;
    }
    case PlanarField::Kind::Grid:
      out << kMagic << " v" << kVersion << " field-grid\n";
      out << "n=" << field.grid_size() << '\n';
      out << "h=" << format_double(field.grid_spacing()) << '\n';
      write_params(out, field.params());
      write_samples(out, field.grid_values());
      break;
    case PlanarField::Kind::ClosedForm:
      out << kMagic << " v" << kVersion << " field-closed-form\n";
      out << "id=" << field.closed_form_id() << '\n';
      write_params(out, field.params());
      for (const auto& t : field.terms()) {
        out << "term=" << term_name(t.kind) << ' ' << t.degree << ' ' << format_double(t.a) << ' '
            << format_double(t.b) << '\n';
      }
      break;
    case PlanarField::Kind::Rescaled:
      throw Error(ErrorKind::Argument, "rescaled fields cannot be saved; save the base field instead");
  }
  return out.str();
}

Persistable from_text(const std::string& text) {
  const Parsed p = parse(text);
  if (p.kind == "profile") return profile_from(p, 0, true);
  if (p.kind == "field-homogeneous") {
    const double gamma = meta_number(p, "gamma");
    auto profile = profile_from(p, 0, false);
    return PlanarField::homogeneous(gamma, std::move(profile), meta_params(p));
  }
  if (p.kind == "field-grid") {
    const std::size_t n = meta_count(p, "n");
    if (n < 3) throw ParseError(ErrorKind::Parse, require(p, "n").second, "grid needs n >= 3");
    expect_samples(p, n * n);
    return PlanarField::grid(n, p.samples, meta_params(p));
  }
  if (p.kind == "field-closed-form") {
    expect_samples(p, 0);
    std::vector<Term> terms;
    auto [lo, hi] = p.meta.equal_range("term");
    for (auto it = lo; it != hi; ++it) {
      const auto& [value, line] = it->second;
      std::istringstream in(value);
      std::string name, d, a, b;
      if (!(in >> name >> d >> a >> b)) throw ParseError(ErrorKind::Parse, line, "term needs 4 fields");
      Term t;
      if (name == "harmonic") t.kind = Term::Kind::Harmonic;
      else if (name == "constant") t.kind = Term::Kind::Constant;
      else if (name == "radial") t.kind = Term::Kind::Radial;
      else if (name == "ramp") t.kind = Term::Kind::Ramp;
      else throw ParseError(ErrorKind::Parse, line, "unknown term kind '" + name + "'");
      t.degree = static_cast<int>(parse_number(d, line));
      t.a = parse_number(a, line);
      t.b = parse_number(b, line);
      terms.push_back(t);
    }
    // std::multimap keeps insertion order for equal keys, so term order survives.
    return PlanarField::closed_form(require(p, "id").first, std::move(terms), meta_params(p));
  }
  throw ParseError(ErrorKind::Parse, 1, "unknown kind '" + p.kind + "'");
}

void save(const AngularProfile& profile, const std::filesystem::path& path) { write_file(path, to_text(profile)); }
void save(const PlanarField& field, const std::filesystem::path& path) { write_file(path, to_text(field)); }
Persistable load(const std::filesystem::path& path) { return from_text(read_file(path)); }

AngularProfile load_profile(const std::filesystem::path& path) {
  auto item = load(path);
  if (auto* p = std::get_if<AngularProfile>(&item)) return std::move(*p);
  // A homogeneous field carries a profile too.
  auto& field = std::get<PlanarField>(item);
  if (field.kind() == PlanarField::Kind::Homogeneous) return field.profile();
  throw Error(ErrorKind::Parse, path.string() + " does not contain a profile");
}

PlanarField load_field(const std::filesystem::path& path) {
  auto item = load(path);
  if (auto* f = std::get_if<PlanarField>(&item)) return std::move(*f);
  throw Error(ErrorKind::Parse, path.string() + " holds a bare profile; build a homogeneous field from it");
}

std::string trace_to_csv(const FunctionalTrace& trace) {
  std::ostringstream out;
  out << "r,value\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_double(trace.radii[i]) << ',' << format_double(trace.values[i]) << '\n';
  }
  return out.str();
}

FunctionalTrace trace_from_csv(const std::string& text) {
  FunctionalTrace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "r,value") throw ParseError(ErrorKind::Parse, 1, "expected header 'r,value'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(ErrorKind::Parse, lineno, "expected two columns");
    }
    trace.radii.push_back(parse_number(line.substr(0, comma), lineno));
    trace.values.push_back(parse_number(line.substr(comma + 1), lineno));
  }
  if (lineno == 0) throw ParseError(ErrorKind::Parse, 1, "empty trace file");
  return trace;
}

void save_trace_csv(const FunctionalTrace& trace, const std::filesystem::path& path) {
  write_file(path, trace_to_csv(trace));
}

FunctionalTrace load_trace_csv(const std::filesystem::path& path) {
  auto trace = trace_from_csv(read_file(path));
  trace.label = path.stem().string();
  return trace;
}

std::string segments_to_csv(const NodalSet& nodal) {
  std::ostringstream out;
  out << "x1,y1,x2,y2\n";
  for (const auto& s : nodal.segments) {
    out << format_double(s.a.x) << ',' << format_double(s.a.y) << ',' << format_double(s.b.x) << ','
        << format_double(s.b.y) << '\n';
  }
  return out.str();
}

std::string singular_points_to_json(const NodalSet& nodal) {
  nlohmann::json j;
  j["grid_cells"] = nodal.grid_cells;
  j["radius"] = nodal.radius;
  j["singular_points"] = nlohmann::json::array();
  for (const auto& p : nodal.singular_points) {
    j["singular_points"].push_back({{"x", p.position.x},
                                    {"y", p.position.y},
                                    {"abs_u", p.abs_value},
                                    {"grad_norm", p.grad_norm},
                                    {"cluster_size", p.cluster_size}});
  }
  return j.dump(2) + "\n";
}

void save_nodal(const NodalSet& nodal, const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  write_file(csv_path, segments_to_csv(nodal));
  write_file(json_path, singular_points_to_json(nodal));
}

NodalSet load_nodal(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  NodalSet nodal;
  std::istringstream in(read_file(csv_path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "x1,y1,x2,y2") throw ParseError(ErrorKind::Parse, 1, "expected header 'x1,y1,x2,y2'");
      continue;
    }
    std::vector<double> cols;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cols.push_back(parse_number(cell, lineno));
    if (cols.size() != 4) throw ParseError(ErrorKind::Parse, lineno, "expected four columns");
    nodal.segments.push_back({{cols[0], cols[1]}, {cols[2], cols[3]}});
  }
  if (lineno == 0) throw ParseError(ErrorKind::Parse, 1, "empty segment file");
  if (!json_path.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(json_path));
      nodal.grid_cells = j.at("grid_cells").get<std::size_t>();
      nodal.radius = j.at("radius").get<double>();
      for (const auto& p : j.at("singular_points")) {
        nodal.singular_points.push_back({{p.at("x").get<double>(), p.at("y").get<double>()},
                                         p.at("abs_u").get<double>(),
                                         p.at("grad_norm").get<double>(),
                                         p.at("cluster_size").get<std::size_t>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(ErrorKind::Parse, 0, json_path.string() + ": " + e.what());
    }
  }
  return nodal;
}

}  // namespace nodallab::io

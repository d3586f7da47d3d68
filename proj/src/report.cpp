#include "occ/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace occ {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_numeric(std::string_view cell) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::string where(std::size_t line, std::size_t column) {
  return "row " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Domain, std::string("malformed JSON: ") + e.what());
  }
}

int required_int(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorKind::Domain, std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::Domain, std::string("key '") + key + "' must be an integer");
  }
  return v.get<int>();
}

double required_double(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorKind::Domain, std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorKind::Domain, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

void set_optim_key(OptimSettings& s, std::string_view key, double value) {
  if (key == "tol_x") {
    s.tol_x = value;
  } else if (key == "tol_f") {
    s.tol_f = value;
  } else if (key == "max_iter") {
    s.max_iter = static_cast<int>(value);
  } else if (key == "fd_step") {
    s.fd_step = value;
  } else {
    throw Error(ErrorKind::Domain, "unknown optimizer setting '" + std::string(key) + "'");
  }
}

json fit_json(const FitResult& r) {
  return json{{"method", std::string(to_string(r.method))},
              {"psi_hat", json_number(r.psi_hat)},
              {"se_psi", json_number(r.se_psi)},
              {"p_hat", json_number(r.p_hat)},
              {"se_p", json_number(r.se_p)},
              {"eta_hat", json_number(r.eta_hat)},
              {"theta_hat", json_number(r.theta_hat)},
              {"converged", r.converged},
              {"boundary_flag", r.boundary_flag},
              {"identifiable", r.identifiable},
              {"iterations", r.iterations}};
}

json param_json(const ParamSummary& s) {
  return json{{"median_estimate", json_number(s.median_estimate)},
              {"median_se", json_number(s.median_se)},
              {"mad", json_number(s.mad)},
              {"variance", json_number(s.variance)}};
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  throw Error(ErrorKind::Domain, "unknown format '" + std::string(name) + "'");
}

DetectionHistory parse_history_csv_text(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = trim(text.substr(start, pos == text.npos ? text.npos : pos - start));
    ++line_no;
    if (!line.empty()) lines.emplace_back(line_no, line);
    if (pos == text.npos) break;
    start = pos + 1;
  }
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "no rows in detection history");

  std::size_t first = 0;
  {
    const auto cells = split(lines.front().second, ',');
    bool header = false;
    for (auto c : cells) header = header || !is_numeric(c);
    if (header) first = 1;
  }
  if (first == lines.size()) throw Error(ErrorKind::EmptyFile, "detection history has only a header");

  std::size_t width = 0;
  std::vector<std::uint8_t> cells;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto [ln, text_line] = lines[i];
    const auto row = split(text_line, ',');
    if (i == first) {
      width = row.size();
    } else if (row.size() != width) {
      throw Error(ErrorKind::RaggedRows, "row " + std::to_string(ln) + " has " +
                                             std::to_string(row.size()) + " columns, expected " +
                                             std::to_string(width));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == "0") {
        cells.push_back(0);
      } else if (row[c] == "1") {
        cells.push_back(1);
      } else {
        throw Error(ErrorKind::MalformedCell,
                    where(ln, c + 1) + ": '" + std::string(row[c]) + "' is not 0 or 1");
      }
    }
  }
  const auto sites = static_cast<int>(lines.size() - first);
  return DetectionHistory(sites, static_cast<int>(width), std::move(cells));
}

DetectionHistory parse_history_csv(const std::filesystem::path& path) {
  return parse_history_csv_text(read_file(path));
}

std::string emit_history_csv(const DetectionHistory& history) {
  std::string out;
  out.reserve(history.cells().size() * 2);
  for (int s = 0; s < history.sites(); ++s) {
    const auto row = history.row(s);
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t) out += ',';
      out += row[t] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

SuffStats parse_suffstats_json_text(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorKind::Domain, "sufficient statistics must be a JSON object");
  std::optional<int> b;
  if (j.contains("b") && !j.at("b").is_null()) b = required_int(j, "b");
  return SuffStats(required_int(j, "S"), required_int(j, "tau"), required_int(j, "f0"),
                   required_int(j, "y"), b);
}

SuffStats parse_suffstats_json(const std::filesystem::path& path) {
  return parse_suffstats_json_text(read_file(path));
}

std::vector<StudyCell> parse_study_config_text(std::string_view text, std::uint64_t base_seed) {
  const json j = parse_json(text);
  const json& list = j.is_object() && j.contains("cells") ? j.at("cells") : j;
  if (!list.is_array() || list.empty()) {
    throw Error(ErrorKind::Domain, "study config must be a non-empty list of cells");
  }
  std::vector<StudyCell> cells;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& c = list[i];
    StudyCell cell;
    cell.sites = required_int(c, "S");
    cell.occasions = required_int(c, "tau");
    cell.psi = required_double(c, "psi");
    cell.p = required_double(c, "p");
    cell.n_sim = required_int(c, "n_sim");
    cell.seed = c.contains("seed") ? c.at("seed").get<std::uint64_t>() : base_seed + i;
    cell.validate();
    cells.push_back(cell);
  }
  return cells;
}

OptimSettings apply_optim_overrides(std::string_view overrides, OptimSettings base) {
  std::size_t start = 0;
  while (start < overrides.size()) {
    const auto end = overrides.find_first_of(", \t", start);
    const auto token = overrides.substr(start, end == overrides.npos ? overrides.npos : end - start);
    start = end == overrides.npos ? overrides.size() : end + 1;
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == token.npos) {
      throw Error(ErrorKind::Domain, "optimizer setting '" + std::string(token) + "' lacks '='");
    }
    const auto value_text = token.substr(eq + 1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw Error(ErrorKind::Domain, "optimizer setting '" + std::string(token) + "' is not numeric");
    }
    set_optim_key(base, token.substr(0, eq), value);
  }
  base.validate();
  return base;
}

OptimSettings apply_optim_json(std::string_view text, OptimSettings base) {
  const json j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorKind::Domain, "optimizer config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorKind::Domain, "optimizer setting '" + key + "' must be numeric");
    set_optim_key(base, key, value.get<double>());
  }
  base.validate();
  return base;
}

std::string emit_fit(std::span<const FitResult> results, Format format) {
  if (format == Format::Json) {
    json fits = json::array();
    for (const auto& r : results) fits.push_back(fit_json(r));
    return json{{"fits", fits}}.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "method,psi_hat,se_psi,p_hat,se_p,eta_hat,theta_hat,converged,boundary_flag,identifiable,"
        "iterations\n";
  for (const auto& r : results) {
    os << to_string(r.method) << ',' << number(r.psi_hat) << ',' << number(r.se_psi) << ','
       << number(r.p_hat) << ',' << number(r.se_p) << ',' << number(r.eta_hat) << ','
       << number(r.theta_hat) << ',' << r.converged << ',' << r.boundary_flag << ','
       << r.identifiable << ',' << r.iterations << '\n';
  }
  return os.str();
}

std::string emit_study(std::span<const StudySummary> summaries, Format format) {
  if (format == Format::Json) {
    json cells = json::array();
    for (const auto& s : summaries) {
      cells.push_back(json{
          {"S", s.cell.sites},
          {"tau", s.cell.occasions},
          {"psi", s.cell.psi},
          {"p", s.cell.p},
          {"n_sim", s.cell.n_sim},
          {"seed", s.cell.seed},
          {"drop_boundary", s.drop_boundary},
          {"n_used", s.n_used},
          {"n_dropped", s.n_dropped},
          {"partial", {{"p", param_json(s.partial.p)}, {"psi", param_json(s.partial.psi)}}},
          {"full", {{"p", param_json(s.full.p)}, {"psi", param_json(s.full.psi)}}},
          {"efficiency", {{"p", json_number(s.efficiency_p)}, {"psi", json_number(s.efficiency_psi)}}},
          {"mad_efficiency",
           {{"p", json_number(s.mad_efficiency_p)}, {"psi", json_number(s.mad_efficiency_psi)}}},
      });
    }
    return json{{"cells", cells}}.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "S,tau,psi_true,p_true,n_sim,seed,row,partial_p,partial_psi,full_p,full_psi,n_used,n_dropped\n";
  for (const auto& s : summaries) {
    const auto prefix = [&](const char* label) {
      os << s.cell.sites << ',' << s.cell.occasions << ',' << number(s.cell.psi) << ','
         << number(s.cell.p) << ',' << s.cell.n_sim << ',' << s.cell.seed << ',' << label << ',';
    };
    const auto suffix = [&] { os << ',' << s.n_used << ',' << s.n_dropped << '\n'; };
    const auto four = [&](double a, double b, double c, double d) {
      os << number(a) << ',' << number(b) << ',' << number(c) << ',' << number(d);
    };
    prefix("True value");
    four(s.cell.p, s.cell.psi, s.cell.p, s.cell.psi);
    suffix();
    prefix("Median estimate");
    four(s.partial.p.median_estimate, s.partial.psi.median_estimate, s.full.p.median_estimate,
         s.full.psi.median_estimate);
    suffix();
    prefix("Median SE");
    four(s.partial.p.median_se, s.partial.psi.median_se, s.full.p.median_se, s.full.psi.median_se);
    suffix();
    prefix("MAD");
    four(s.partial.p.mad, s.partial.psi.mad, s.full.p.mad, s.full.psi.mad);
    suffix();
    prefix("Efficiency");
    os << number(s.efficiency_p) << ',' << number(s.efficiency_psi) << ",,";
    suffix();
    prefix("MAD efficiency");
    os << number(s.mad_efficiency_p) << ',' << number(s.mad_efficiency_psi) << ",,";
    suffix();
  }
  return os.str();
}

std::string emit_sensitivity(const SensitivityProfile& profile,
                             std::optional<SensitivityPoint> marker) {
  std::ostringstream os;
  os << "p,psi_bar,derivative,printed_derivative,exceeds_one,marker\n";
  const auto row = [&](const SensitivityPoint& pt, bool is_marker) {
    os << number(pt.p) << ',' << number(pt.psi_bar) << ',' << number(pt.derivative) << ','
       << number(pt.printed_derivative) << ',' << (pt.exceeds_one ? 1 : 0) << ','
       << (is_marker ? 1 : 0) << '\n';
  };
  bool marker_done = !marker.has_value();
  for (const auto& pt : profile.points) {
    if (!marker_done && marker->p <= pt.p) {
      row(*marker, true);
      marker_done = true;
    }
    row(pt, false);
  }
  if (!marker_done) row(*marker, true);
  return os.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot move output into '" + path.string() + "'");
  }
}

}  // namespace occ

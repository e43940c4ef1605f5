#include "gibbsfit/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gibbsfit/errors.hpp"

namespace gibbsfit::io {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << text;
}

std::string header_line(const RunHeader& h) {
  return "# seed=" + std::to_string(h.seed) + " scenario=" + h.scenario +
         " beta=" + format_double(h.beta) + " grid_hash=" + std::to_string(h.grid_hash) + "\n";
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError("field '" + field + "' must be a matrix (array of arrays)");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw ConfigError("field '" + field + "' rows have uneven lengths");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

std::unordered_map<std::string, double> parse_table(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError("field '" + field + "' must be a word->value object");
  std::unordered_map<std::string, double> table;
  for (auto it = j.begin(); it != j.end(); ++it) table[it.key()] = it.value().get<double>();
  return table;
}

}  // namespace

SftPtr load_sft_file(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.contains("alphabet_size")) throw ConfigError("sft file missing 'alphabet_size'");
  const int a = j["alphabet_size"].get<int>();
  std::vector<Word> forbidden;
  if (j.contains("forbidden")) {
    for (const auto& w : j["forbidden"]) forbidden.push_back(word_from_string(w.get<std::string>()));
  }
  return std::make_shared<const Sft>(Sft::build(a, std::move(forbidden)));
}

void save_sft_file(const Sft& sft, const std::filesystem::path& path) {
  json j;
  j["alphabet_size"] = sft.alphabet_size();
  j["forbidden"] = json::array();
  for (const Word& w : sft.forbidden()) j["forbidden"].push_back(word_to_string(w));
  write_text(path, j.dump(2) + "\n");
}

Potential load_potential_file(SftPtr sft, const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.contains("range")) throw ConfigError("potential file missing 'range'");
  if (!j.contains("table")) throw ConfigError("potential file missing 'table'");
  return Potential(std::move(sft), j["range"].get<int>(), parse_table(j["table"], "table"));
}

void save_potential_file(const Potential& f, const std::filesystem::path& path) {
  json j;
  j["range"] = f.range();
  json table = json::object();
  for (std::size_t i = 0; i < f.domain().size(); ++i) {
    table[word_to_string(f.domain()[i])] = f.values()[i];
  }
  j["table"] = std::move(table);
  write_text(path, j.dump(2) + "\n");
}

PotentialFamily load_family_file(const std::filesystem::path& path, SftPtr sft) {
  const json j = read_json(path);
  if (!j.contains("grid")) throw ConfigError("family file missing 'grid'");
  std::vector<double> grid_points = j["grid"].get<std::vector<double>>();
  std::vector<double> prior;
  if (j.contains("prior")) prior = j["prior"].get<std::vector<double>>();
  ThetaGrid grid(std::move(grid_points), std::move(prior));

  if (!j.contains("potentials") || !j["potentials"].contains("kind")) {
    throw ConfigError("family file missing 'potentials.kind'");
  }
  const json& pots = j["potentials"];
  const std::string kind = pots["kind"].get<std::string>();

  if (kind == "bernoulli") return bernoulli_family(std::move(grid));

  if (!sft) throw ConfigError("family kind '" + kind + "' requires an sft file");
  if (kind == "affine") {
    if (!pots.contains("table_a") || !pots.contains("table_b")) {
      throw ConfigError("affine family needs 'table_a' and 'table_b'");
    }
    const int range = pots["table_a"].value("range", 1);
    SftPtr host = std::make_shared<const Sft>(sft->reblocked_for_range(range));
    Potential a(host, range, parse_table(pots["table_a"]["table"], "table_a"));
    Potential b(host, pots["table_b"].value("range", 1), parse_table(pots["table_b"]["table"], "table_b"));
    return markov_family(std::move(grid), a, b);
  }
  if (kind == "tables") {
    if (!pots.contains("range") || !pots.contains("tables")) {
      throw ConfigError("tables family needs 'range' and 'tables'");
    }
    const int range = pots["range"].get<int>();
    if (pots["tables"].size() != grid.size()) {
      throw ConfigError("'tables' must list one table per grid point");
    }
    SftPtr host = std::make_shared<const Sft>(sft->reblocked_for_range(range));
    std::vector<Potential> list;
    for (const auto& t : pots["tables"]) {
      list.emplace_back(host, range, parse_table(t, "tables[i]"));
    }
    return PotentialFamily(std::move(grid), std::move(list));
  }
  throw ConfigError("unknown family kind '" + kind + "'");
}

LossSpec load_loss_file(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.contains("kind")) throw ConfigError("loss file missing 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "squared") {
    if (!j.contains("phi")) throw ConfigError("squared loss file missing 'phi'");
    return LossSpec::squared(parse_matrix(j["phi"], "phi"));
  }
  if (kind == "discrete") {
    if (!j.contains("map")) throw ConfigError("discrete loss file missing 'map'");
    std::vector<Symbol> map;
    for (const auto& v : j["map"]) map.push_back(static_cast<Symbol>(v.get<int>()));
    return LossSpec::discrete(std::move(map));
  }
  if (kind == "neg_log_density") {
    if (!j.contains("means") || !j.contains("stds")) {
      throw ConfigError("density loss file missing 'means'/'stds'");
    }
    return LossSpec::gaussian(parse_matrix(j["means"], "means"), parse_matrix(j["stds"], "stds"));
  }
  throw ConfigError("unknown loss kind '" + kind + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_rate_csv(const std::filesystem::path& path, const RunHeader& header,
                    const RateTable& rates) {
  std::string out = header_line(header);
  out += "theta,V_hat,stderr,V_closed\n";
  for (std::size_t i = 0; i < rates.theta.size(); ++i) {
    out += format_double(rates.theta[i]) + "," + format_double(rates.v_hat[i]) + "," +
           format_double(rates.std_error[i]) + "," + format_double(rates.v_closed[i]) + "\n";
  }
  write_text(path, out);
}

void write_posterior_csv(const std::filesystem::path& path, const RunHeader& header,
                         const std::vector<PosteriorGrid>& per_n) {
  std::string out = header_line(header);
  out += "n,theta,log_weight,posterior_mass\n";
  for (const PosteriorGrid& pg : per_n) {
    for (std::size_t i = 0; i < pg.theta.size(); ++i) {
      out += std::to_string(pg.n) + "," + format_double(pg.theta[i]) + "," +
             format_double(pg.log_weights[i]) + "," + format_double(pg.masses[i]) + "\n";
    }
  }
  write_text(path, out);
}

void write_concentration_csv(const std::filesystem::path& path, const RunHeader& header,
                             const std::vector<ConcentrationRow>& rows) {
  std::string out = header_line(header);
  out += "n,outside_mass,target_mass_rate\n";
  for (const ConcentrationRow& r : rows) {
    out += std::to_string(r.n) + "," + format_double(r.outside_mass) + "," +
           format_double(r.target_mass_rate) + "\n";
  }
  write_text(path, out);
}

void write_audit_csv(const std::filesystem::path& path, const RunHeader& header,
                     const GibbsAuditReport& report) {
  std::string out = header_line(header);
  out += "m,ratio_min,ratio_max\n";
  for (const GibbsAuditRow& r : report.rows) {
    out += std::to_string(r.m) + "," + format_double(r.ratio_min) + "," +
           format_double(r.ratio_max) + "\n";
  }
  write_text(path, out);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t) {
  std::string out = "# seed=" + std::to_string(t.seed) + " source=" + t.source + "\n";
  out += "k,symbol\n";
  for (std::size_t k = 0; k < t.symbols.size(); ++k) {
    out += std::to_string(k) + "," + std::to_string(int(t.symbols[k])) + "\n";
  }
  write_text(path, out);
}

void write_emissions_csv(const std::filesystem::path& path, const EmissionSequence& e) {
  std::string out = "# seed=" + std::to_string(e.seed) + " source=" + e.source;
  if (e.theta_star) out += " theta_star=" + format_double(*e.theta_star);
  out += "\nk,value\n";
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    out += std::to_string(k) + "," + format_double(e.values[k]) + "\n";
  }
  write_text(path, out);
}

}  // namespace gibbsfit::io

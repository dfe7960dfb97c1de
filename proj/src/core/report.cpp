#include "core/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace destim {

namespace {

nlohmann::ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

nlohmann::ordered_json report_to_json(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  nlohmann::ordered_json doc;

  nlohmann::ordered_json jc;
  nlohmann::ordered_json fams = nlohmann::ordered_json::array();
  for (Family f : cfg.families) fams.push_back(family_name(f));
  nlohmann::ordered_json ests = nlohmann::ordered_json::array();
  for (EstimatorKind e : cfg.estimators) ests.push_back(estimator_name(e));
  jc["families"] = fams;
  jc["estimators"] = ests;
  jc["theta_true"] = cfg.theta_true;
  jc["mu_true"] = cfg.mu_true;
  jc["n"] = cfg.n;
  jc["m"] = cfg.m;
  jc["m1"] = cfg.m1;
  jc["m2"] = cfg.m2;
  jc["trials"] = cfg.trials;
  jc["maxcorr_trials"] = cfg.maxcorr_trials;
  jc["huber_c"] = cfg.huber_c;
  jc["kernel_h"] = cfg.kernel_h;
  jc["master_seed"] = cfg.master_seed;
  jc["init_lo"] = cfg.init_lo;
  jc["init_hi"] = cfg.init_hi;
  doc["config"] = jc;

  nlohmann::ordered_json crlb_obj;
  for (auto [f, v] : crlb_rows(cfg)) crlb_obj[family_name(f)] = v;
  doc["crlb"] = crlb_obj;

  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const CellReport& cell : report.cells) {
    nlohmann::ordered_json c;
    c["family"] = family_name(cell.family);
    c["estimator"] = estimator_name(cell.estimator);
    c["divergent"] = cell.divergent;
    c["error_power"] = cell.divergent ? nlohmann::ordered_json(nullptr)
                                      : number_or_null(cell.error_power);
    c["std_error"] = number_or_null(cell.std_error);
    c["trials"] = cell.trials;
    c["failed_trials"] = cell.failed_trials;
    cells.push_back(c);
  }
  doc["cells"] = cells;
  return doc;
}

std::string render_table(const nlohmann::json& doc) {
  const auto& families = doc.at("config").at("families");
  const auto& estimators = doc.at("config").at("estimators");

  auto cell_text = [&](const std::string& fam, const std::string& est) -> std::string {
    for (const auto& c : doc.at("cells")) {
      if (c.at("family") != fam || c.at("estimator") != est) continue;
      if (c.at("divergent").get<bool>()) return "inf";
      if (c.at("error_power").is_null()) return "n/a";
      return fixed3(c.at("error_power").get<double>());
    }
    return "-";
  };

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{""};
  for (const auto& f : families) {
    std::string name = f.get<std::string>();
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    header.push_back(name);
  }
  rows.push_back(header);

  std::vector<std::string> crlb_row{"CRLB"};
  for (const auto& f : families)
    crlb_row.push_back(fixed3(doc.at("crlb").at(f.get<std::string>()).get<double>()));
  rows.push_back(crlb_row);

  for (const auto& e : estimators) {
    EstimatorKind kind;
    std::string id = e.get<std::string>();
    require(parse_estimator(id, kind), Errc::parse_failure, "unknown estimator in report: " + id);
    std::vector<std::string> row{estimator_display_name(kind)};
    for (const auto& f : families) row.push_back(cell_text(f.get<std::string>(), id));
    rows.push_back(row);
  }

  std::size_t label_width = 0;
  std::size_t col_width = 8;
  for (const auto& row : rows) {
    label_width = std::max(label_width, row[0].size());
    for (std::size_t j = 1; j < row.size(); ++j) col_width = std::max(col_width, row[j].size());
  }

  std::string out;
  for (const auto& row : rows) {
    out += row[0];
    out.append(label_width - row[0].size(), ' ');
    for (std::size_t j = 1; j < row.size(); ++j) {
      out.append(2 + col_width - row[j].size(), ' ');
      out += row[j];
    }
    out += '\n';
  }
  return out;
}

std::string report_text(const ExperimentReport& report) {
  return render_table(report_to_json(report));
}

}  // namespace destim

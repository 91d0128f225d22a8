#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "tjstab/errors.hpp"
#include "tjstab/spectral.hpp"

namespace tjstab {

// Machine-readable record of a stability analysis. nlohmann serializes
// doubles with a shortest round-trip representation, so reloading a record
// reproduces every field bit-exactly.

inline nlohmann::json to_json(const RootRecord& r) {
  return {{"x_lo", r.x_lo},   {"x_hi", r.x_hi},     {"f_lo", r.f_lo},
          {"f_hi", r.f_hi},   {"x_root", r.x_root}, {"mu_star", r.mu_star},
          {"mu", r.mu},       {"sigma_ratio", r.sigma_ratio},
          {"certified", r.certified}, {"source", std::string(1, r.source)}};
}

inline RootRecord root_from_json(const nlohmann::json& j) {
  RootRecord r;
  r.x_lo = j.at("x_lo");
  r.x_hi = j.at("x_hi");
  r.f_lo = j.at("f_lo");
  r.f_hi = j.at("f_hi");
  r.x_root = j.at("x_root");
  r.mu_star = j.at("mu_star");
  r.mu = j.at("mu");
  r.sigma_ratio = j.at("sigma_ratio");
  r.certified = j.at("certified");
  r.source = j.at("source").get<std::string>().at(0);
  return r;
}

inline nlohmann::json to_json(const StabilityReport& rep) {
  nlohmann::json j;
  j["geometry"] = {{"kappa", rep.kappa}, {"l", rep.l},           {"L", rep.L},
                   {"l_star", rep.l_star}, {"L_star", rep.L_star}};
  j["verdict"] = verdict_name(rep.verdict);
  j["mu"] = rep.mu;
  j["mu_star"] = rep.mu_star;
  j["unstable_case"] = rep.unstable_case;
  j["unstable_x"] = rep.unstable_x;
  j["lemma_case_i_hypothesis"] = rep.lemma_case_i_hypothesis;
  j["x0_cutoff"] = rep.x0_cutoff;
  nlohmann::json cases = nlohmann::json::array();
  for (const CaseScanResult& c : rep.cases) {
    nlohmann::json jc;
    jc["tag"] = c.tag;
    jc["scan_points"] = c.scan_points;
    jc["x_min"] = c.x_min;
    jc["x_max"] = c.x_max;
    jc["residual"] = c.residual;
    jc["sigma_ratio"] = c.sigma_ratio;
    jc["touch_suspected"] = c.touch_suspected;
    nlohmann::json roots = nlohmann::json::array();
    for (const RootRecord& r : c.roots) roots.push_back(to_json(r));
    jc["roots"] = roots;
    cases.push_back(jc);
  }
  j["cases"] = cases;
  j["screen"] = {{"j_min_constant", rep.screen_value},
                 {"feasible", rep.screen_feasible}};
  if (rep.oracle) {
    j["oracle"] = {{"n", rep.oracle->n},
                   {"mu_min", rep.oracle->mu_min},
                   {"mu_min_richardson", rep.oracle->mu_min_richardson},
                   {"constraint_residual", rep.oracle->constraint_residual},
                   {"j_identity_error", rep.oracle->j_identity_error},
                   {"agrees_with_verdict", rep.oracle->agrees_with_verdict}};
  } else {
    j["oracle"] = nullptr;
  }
  j["elapsed_seconds"] = rep.elapsed_seconds;
  return j;
}

inline StabilityReport report_from_json(const nlohmann::json& j) {
  StabilityReport rep;
  const auto& g = j.at("geometry");
  rep.kappa = g.at("kappa");
  rep.l = g.at("l");
  rep.L = g.at("L");
  rep.l_star = g.at("l_star");
  rep.L_star = g.at("L_star");
  const std::string v = j.at("verdict");
  rep.verdict = v == "Stable"     ? Verdict::Stable
                : v == "Unstable" ? Verdict::Unstable
                                  : Verdict::Inconclusive;
  rep.mu = j.at("mu");
  rep.mu_star = j.at("mu_star");
  rep.unstable_case = j.at("unstable_case");
  rep.unstable_x = j.at("unstable_x");
  rep.lemma_case_i_hypothesis = j.at("lemma_case_i_hypothesis");
  rep.x0_cutoff = j.at("x0_cutoff");
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& jc = j.at("cases").at(c);
    CaseScanResult& cs = rep.cases[c];
    cs.tag = jc.at("tag");
    cs.scan_points = jc.at("scan_points");
    cs.x_min = jc.at("x_min");
    cs.x_max = jc.at("x_max");
    cs.residual = jc.at("residual");
    cs.sigma_ratio = jc.at("sigma_ratio");
    cs.touch_suspected = jc.at("touch_suspected");
    for (const auto& r : jc.at("roots")) cs.roots.push_back(root_from_json(r));
  }
  rep.screen_value = j.at("screen").at("j_min_constant");
  rep.screen_feasible = j.at("screen").at("feasible");
  if (!j.at("oracle").is_null()) {
    OracleSummary os;
    const auto& jo = j.at("oracle");
    os.n = jo.at("n");
    os.mu_min = jo.at("mu_min");
    os.mu_min_richardson = jo.at("mu_min_richardson");
    os.constraint_residual = jo.at("constraint_residual");
    os.j_identity_error = jo.at("j_identity_error");
    os.agrees_with_verdict = jo.at("agrees_with_verdict");
    rep.oracle = os;
  }
  rep.elapsed_seconds = j.at("elapsed_seconds");
  return rep;
}

inline void save_report_json(const StabilityReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open " + path);
  out << to_json(rep).dump(2) << "\n";
  if (!out) throw IOError("write failed: " + path);
}

inline StabilityReport load_report_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return report_from_json(j);
}

}  // namespace tjstab

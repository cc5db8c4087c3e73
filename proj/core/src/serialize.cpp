#include "fhslab/serialize.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "fhslab/version.hpp"

namespace fhslab {

using nlohmann::json;

namespace {

json params_to_json(const ProblemParams& pp) {
  return json{{"N", pp.N},       {"p", pp.p},
              {"s", pp.s},       {"alpha", pp.alpha},
              {"q", pp.q},       {"pstar", pp.pstar},
              {"decay_exp", pp.decay_exp},
              {"gamma_threshold", pp.gamma_threshold}};
}

}  // namespace

std::string profile_to_json(const RadialProfile& u, const ProblemParams& pp,
                            const std::string& digest) {
  json j;
  j["schema"] = "fhs-profile/1";
  j["version"] = kVersion;
  j["config_digest"] = digest;
  j["params"] = params_to_json(pp);
  j["grid"] = {{"r_min", u.grid.r_min}, {"r_max", u.grid.r_max}, {"M", u.grid.M}};
  j["nodes"] = u.grid.nodes();
  j["values"] = u.values;
  j["tail_exponent"] = u.tail_exponent;
  j["mode"] = u.mode == InterpMode::Linear ? "linear" : "constant";
  return j.dump(2) + "\n";
}

RadialProfile profile_from_json(const std::string& text, ProblemParams* pp_out) {
  json j = json::parse(text);
  if (!j.contains("schema") || j["schema"] != "fhs-profile/1")
    throw std::runtime_error("profile document: unknown or missing schema");
  const auto& g = j.at("grid");
  Grid grid(g.at("r_min").get<double>(), g.at("r_max").get<double>(),
            g.at("M").get<int>());
  std::vector<double> vals = j.at("values").get<std::vector<double>>();
  const double kappa = j.at("tail_exponent").get<double>();
  const std::string mode = j.value("mode", "linear");
  if (pp_out && j.contains("params")) {
    const auto& p = j["params"];
    *pp_out = make_params(p.at("N").get<int>(), p.at("p").get<double>(),
                          p.at("s").get<double>(), p.at("alpha").get<double>());
  }
  return RadialProfile(grid, std::move(vals), kappa,
                       mode == "constant" ? InterpMode::Constant
                                          : InterpMode::Linear);
}

void save_profile(const std::string& path, const RadialProfile& u,
                  const ProblemParams& pp, const std::string& digest) {
  write_text_file(path, profile_to_json(u, pp, digest));
}

RadialProfile load_profile(const std::string& path, ProblemParams* pp_out) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open profile " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return profile_from_json(ss.str(), pp_out);
}

std::string trace_to_csv(const std::vector<TraceRow>& trace,
                         const std::string& digest) {
  std::ostringstream os;
  os.precision(17);
  os << "# config=" << digest << " version=" << kVersion << "\n";
  os << "iteration,rayleigh,step,projection_distance\n";
  for (const auto& row : trace)
    os << row.iteration << ',' << row.rayleigh << ',' << row.step << ','
       << row.projection_distance << "\n";
  return os.str();
}

std::string minimizer_summary_json(const MinimizerResult& res,
                                   const ProblemParams& pp,
                                   const std::string& digest) {
  json j;
  j["version"] = kVersion;
  j["config_digest"] = digest;
  j["params"] = params_to_json(pp);
  j["I1_estimate"] = res.I1_estimate;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["normalization"] = res.normalization;
  j["trace_rows"] = res.trace.size();
  if (!res.trace.empty()) j["final_rayleigh"] = res.trace.back().rayleigh;
  return j.dump(2) + "\n";
}

std::string reports_to_json(const std::vector<VerificationReport>& reports,
                            const std::string& digest) {
  json arr = json::array();
  for (const auto& rep : reports) {
    json j;
    j["name"] = rep.name;
    j["inputs_digest"] = rep.inputs_digest;
    j["measured"] = rep.measured;
    j["targets"] = rep.targets;
    j["tolerance"] = rep.tolerance;
    j["margin"] = rep.margin;
    j["verdict"] = rep.verdict;
    j["refinement_delta"] = rep.refinement_delta;
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    arr.push_back(std::move(j));
  }
  json root;
  root["version"] = kVersion;
  root["config_digest"] = digest;
  root["reports"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::string report_rows_to_csv(const VerificationReport& rep,
                               const std::string& digest) {
  std::ostringstream os;
  os.precision(17);
  os << "# check=" << rep.name << " config=" << digest
     << " version=" << kVersion << "\n";
  os << "parameter,measured,target,margin\n";
  for (const auto& row : rep.rows)
    os << row.parameter << ',' << row.measured << ',' << row.target << ','
       << row.margin << "\n";
  return os.str();
}

std::string functional_report_to_json(const FunctionalReport& rep,
                                      const std::string& digest,
                                      double weak_lq) {
  json j;
  j["version"] = kVersion;
  j["config_digest"] = digest;
  j["seminorm_s_p"] = {{"value", rep.seminorm_s_p},
                       {"refinement_delta", rep.seminorm_delta}};
  j["weighted_norm_alpha_q"] = {{"value", rep.weighted_norm_alpha_q},
                                {"refinement_delta", rep.weighted_norm_delta}};
  j["rayleigh"] = {{"value", rep.rayleigh},
                   {"refinement_delta", rep.rayleigh_delta}};
  j["refinement_delta"] = rep.refinement_delta;
  if (weak_lq > 0.0) j["weak_lq_quasinorm_informational"] = weak_lq;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("short write to " + path);
}

}  // namespace fhslab

#pragma once

#include <string>
#include <vector>

#include "fhslab/config.hpp"
#include "fhslab/functionals.hpp"
#include "fhslab/optimizer.hpp"
#include "fhslab/params.hpp"
#include "fhslab/profile.hpp"
#include "fhslab/verify.hpp"

namespace fhslab {

// versioned profile document: {"schema":"fhs-profile/1", "params":{...},
// "nodes":[...], "values":[...], "tail_exponent":k, "mode":"linear"}
std::string profile_to_json(const RadialProfile& u, const ProblemParams& pp,
                            const std::string& digest);
RadialProfile profile_from_json(const std::string& text,
                                ProblemParams* pp_out = nullptr);
void save_profile(const std::string& path, const RadialProfile& u,
                  const ProblemParams& pp, const std::string& digest);
RadialProfile load_profile(const std::string& path,
                           ProblemParams* pp_out = nullptr);

std::string trace_to_csv(const std::vector<TraceRow>& trace,
                         const std::string& digest);

std::string minimizer_summary_json(const MinimizerResult& res,
                                   const ProblemParams& pp,
                                   const std::string& digest);

std::string reports_to_json(const std::vector<VerificationReport>& reports,
                            const std::string& digest);
std::string report_rows_to_csv(const VerificationReport& rep,
                               const std::string& digest);

std::string functional_report_to_json(const FunctionalReport& rep,
                                      const std::string& digest,
                                      double weak_lq = 0.0);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fhslab

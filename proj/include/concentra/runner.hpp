#ifndef CONCENTRA_RUNNER_HPP
#define CONCENTRA_RUNNER_HPP

#include <string>
#include <vector>

#include "concentra/config.hpp"
#include "concentra/expansion.hpp"
#include "concentra/report.hpp"

namespace concentra {

const std::vector<std::string>& subcommands();

RunReport run_constants(const RunConfig& cfg);
RunReport run_identities(const RunConfig& cfg);
RunReport run_mu0(const RunConfig& cfg);
RunReport run_expand(const RunConfig& cfg);
RunReport run_spectrum(const RunConfig& cfg);
RunReport run_gaps(const RunConfig& cfg);
// dispatch by name (not "all")
RunReport run_subcommand(const std::string& name, const RunConfig& cfg);

ExpansionOptions expansion_options(const RunConfig& cfg);

}  // namespace concentra

#endif

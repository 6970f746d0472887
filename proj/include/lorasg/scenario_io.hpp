#pragma once

// Scenario configuration files: an INI dialect and a JSON twin with the same
// sections and keys. Unknown sections or keys are errors, every key has a
// default, and an empty file is a valid scenario.

#include <iosfwd>
#include <optional>
#include <string>

#include "lorasg/analytic.hpp"
#include "lorasg/montecarlo.hpp"

namespace lorasg::scenario_io {

struct LoadedScenario {
  analytic::Scenario scenario;
  montecarlo::SimConfig sim;
  // set when density came from a node count over the normalization disk
  std::optional<double> n_nodes;
};

// Files ending in .json parse as JSON, anything else as INI.
LoadedScenario load_scenario_file(const std::string& path);
LoadedScenario parse_ini(std::istream& in);
LoadedScenario parse_json(std::istream& in);

// Spatial density putting n_nodes transmitters inside the normalization disk
// for the given radial exponent.
double lambda_s_for_nodes(double n_nodes, double alpha, double norm_radius_m);

// Rescales the scenario density to hold n_nodes transmitters, keeping alpha
// and the normalization radius.
void set_node_count(LoadedScenario& loaded, double n_nodes);

// '#'-prefixed block echoing every resolved setting; prepended to CSV output
// so runs are self-describing.
std::string resolved_scenario_header(const LoadedScenario& loaded);

}  // namespace lorasg::scenario_io

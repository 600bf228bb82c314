#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cheeger/manifold.hpp"

namespace cheeger::scenarios {

struct ParameterInfo {
  std::string key;  // without the "scenario." prefix
  std::string default_value;
  std::string description;
};

struct ScenarioInfo {
  std::string id;
  std::string description;
  std::vector<ParameterInfo> parameters;
};

const std::vector<ScenarioInfo>& catalog();

// Raw parameter values keyed as in ParameterInfo::key.
using ScenarioParams = std::map<std::string, std::string>;

// Builds a catalogued scenario. Throws ConfigError for unknown ids, unknown
// parameter keys and invalid values.
std::shared_ptr<const manifold::Scenario> make_scenario(const std::string& id,
                                                        const ScenarioParams& params = {});

// Concrete catalogue entries, exposed for direct use in tests.

// S^1 rotating a band of a (possibly warped) sphere: coordinates (theta, phi),
// g = f(phi) dtheta^2 + dphi^2 with f = sin^2(phi) (1 + warp sin(phi)).
std::shared_ptr<const manifold::Scenario> make_s2_band(double warp = 0.0, double margin = 0.1);

// Hopf S^1 on S^3 in Hopf coordinates (eta, xi1, xi2),
// z = (cos eta e^{i xi1}, sin eta e^{i xi2}); the Hopf direction is stretched
// by fiber_scale (1 = round).
std::shared_ptr<const manifold::Scenario> make_s3_hopf(double fiber_scale = 1.0,
                                                       double margin = 0.1);

// SU(2) acting on S^2 = SU(2)/U(1) through SO(3), coordinates (theta, phi),
// round metric of the given radius.
std::shared_ptr<const manifold::Scenario> make_su2_s2(double radius = 1.0, double margin = 0.1);

// Flat torus a^2 dx1^2 + dx2^2; the circle factor translates x1 (or the full
// T^2 translates both coordinates when full_torus is set).
std::shared_ptr<const manifold::Scenario> make_flat_t2(double orbit_length = 1.0,
                                                       bool full_torus = false);

}  // namespace cheeger::scenarios

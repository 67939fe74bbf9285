#pragma once

#include "popmeas/measure.hpp"
#include "popmeas/model.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace popmeas {

using json = nlohmann::json;

/// Named model pieces addressable from JSON configs.
///
/// growth:    none | constant_growth(rate) |
///            logistic_total_mass_growth(rate, capacity)
/// kernel:    none | cell_division_kernel(amplitude)
/// influx:    none | constant_point_influx(rate, site)
/// transport: identity_transport | constant_velocity_transport(velocity) |
///            ode_flow(field = scale|constant, coeff, substeps)
GrowthFn make_growth(const json& cfg);
std::optional<FiniteRangeKernel> make_kernel(const json& cfg,
                                             const std::shared_ptr<const EpsilonNet>& net);
std::optional<FiniteRangeInflux> make_influx(const json& cfg,
                                             const std::shared_ptr<const EpsilonNet>& net);
TransportMap make_transport(const json& cfg);

ModelSpec make_model(const json& model_cfg, std::shared_ptr<const EpsilonNet> net);

/// Exact solutions for the reference families, evaluated at time t from
/// the given initial measure.
///
///   pure_growth(rate):                  weights scaled by e^{rate t}
///   pure_transport(velocity):           support shifted by velocity * t
///   constant_influx(rate, site):        initial plus rate * t at the site
///   growth_plus_influx(rate, n, site):  e^{rate t} growth plus
///                                       n (e^{rate t} - 1)/rate at the site
bool has_analytic_reference(const std::string& family);
DiscreteMeasure analytic_reference(const std::string& family, const Space& space,
                                   const DiscreteMeasure& mu0, const json& model_cfg,
                                   double t);

/// Expands a reference family name into a full "model" config object.
json family_model_config(const std::string& family, const json& params);

}  // namespace popmeas

#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "deltawall/cycles.hpp"
#include "deltawall/spectrum.hpp"
#include "deltawall/tdse.hpp"

namespace deltawall {

inline constexpr int schema_version = 1;

// Shortest decimal string that round-trips the exact double value.
// Infinities come out as "inf"/"-inf", NaN as "nan".
std::string format_double(double v);

// JSON value for a possibly non-finite double: finite numbers stay
// numbers, infinities become the strings "inf"/"-inf", NaN becomes null.
nlohmann::ordered_json number_or_symbol(double v);
nlohmann::ordered_json strength_json(const Strength& g);

nlohmann::ordered_json well_json(const WellConfig& cfg);
nlohmann::ordered_json stages_json(const CyclePath& cycle, const WellConfig& cfg);
nlohmann::ordered_json holonomy_json(const HolonomyMap& map);

std::string spectrum_json(const Spectrum& s, const WellConfig& cfg);
std::string spectrum_csv(const Spectrum& s, const WellConfig& cfg);

std::string flow_json(const CyclePath& cycle, const SpectralFlow& f,
                      const WellConfig& cfg);
std::string flow_csv(const SpectralFlow& f, const WellConfig& cfg);

std::string plan_json(int source, int target,
                      const std::vector<CyclePath>& plan,
                      const WellConfig& cfg);
std::string plan_csv(const std::vector<CyclePath>& plan,
                     const WellConfig& cfg);

// Fidelity time series of an evolved state against the lowest instantaneous
// levels; fidelities[i][j] pairs times[i] with level j+1.
std::string evolve_json(const CyclePath& cycle, const Protocol& protocol,
                        const Grid& grid, const std::vector<double>& times,
                        const std::vector<std::vector<double>>& fidelities,
                        double max_norm_drift, const WellConfig& cfg);
std::string evolve_csv(const std::vector<double>& times,
                       const std::vector<std::vector<double>>& fidelities);

} // namespace deltawall

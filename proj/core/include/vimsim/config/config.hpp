#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vimsim/dae/scenario.hpp"

namespace vimsim::config {

// Carries every schema violation found, with field paths.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

// Strict JSON scenario loader. Unknown keys are rejected; numeric fields
// accept either a bare number in the field's native unit or a tagged
// {"value": v, "unit": u} object with SI conversion (hz, kg_m2, N_m_s, ...).
dae::Scenario load_scenario(const std::string& path);
dae::Scenario load_scenario_from_string(const std::string& text,
                                        const std::string& base_dir = ".");

// Canonical JSON emission (native units, stable key order); satisfies
// load(emit(s)) == s up to re-emission.
std::string emit_scenario(const dae::Scenario& scn);
void save_scenario(const dae::Scenario& scn, const std::string& path);

}  // namespace vimsim::config

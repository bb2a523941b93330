#pragma once

#include "pim/analysis.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pim {

///
/// Flat `key = value` configuration with dotted keys, e.g.
///
///     manifold.shape = disk
///     solver.tol = 1e-10   # trailing comments allowed
///
/// Later assignments win, so command-line overrides are applied with set().
/// Unknown keys are rejected.
///
class Config
{
public:
    static Config parse(std::string_view text);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// Parses `key=value`.
    void set_assignment(std::string_view assignment);

    bool has(const std::string& key) const { return m_values.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    long long get_integer(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma or whitespace separated list.
    std::vector<long long> get_integer_list(const std::string& key) const;
    std::vector<double> get_real_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return m_values; }

private:
    std::map<std::string, std::string> m_values;
};

/// Every key the tools understand.
const std::vector<std::string_view>& known_config_keys();

/// manifold.* and seed.
ManifoldSpec manifold_from(const Config& config, const ManifoldSpec& defaults = {});
/// kernel.profile, solver.*, assembly.*, guardrail.*, sweep.reference_factor and sweep.record_time.
PipelineOptions pipeline_from(const Config& config);
/// Explicit (kernel.t, robin.beta) or coupling.*; never both.
Coupling coupling_from(const Config& config);

} // namespace pim

#pragma once

#include "dtwist/circle_map.hpp"
#include "dtwist/config.hpp"
#include "dtwist/layout.hpp"
#include "dtwist/profiles.hpp"
#include "dtwist/sequences.hpp"
#include "dtwist/twist_map.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace dtwist {

inline constexpr int kSchemaVersion = 1;

/// Everything a command needs, built in dependency order. In rigid mode the
/// gap layout is still built (it provides sample intervals) but the twist
/// map runs over the rigid rotation.
class BuiltSystem {
public:
    explicit BuiltSystem(const RunConfig& cfg);

    const RunConfig& config() const { return cfg_; }
    const ProfileSet& profiles() const { return *profiles_; }
    const GapSequences& sequences() const { return seq_; }
    const GapTable& table() const { return *table_; }
    const DenjoyMap& denjoy() const { return *map_; }
    const CircleMap& circle() const;
    const TwistSystem& twist() const { return *twist_; }
    bool rigid() const { return cfg_.rigid; }

    /// a_C, residual mass, alpha_1, alpha_0, m1_adjusted, M.
    nlohmann::json construction_summary() const;

private:
    RunConfig cfg_;
    std::optional<ProfileSet> profiles_;
    GapSequences seq_;
    std::unique_ptr<GapTable> table_;
    std::unique_ptr<DenjoyMap> map_;
    std::unique_ptr<RigidRotation> rotation_;
    std::unique_ptr<TwistSystem> twist_;
};

enum class Command { build, verify, regularity, portrait, manifolds, diffusion };

const char* to_string(Command c);
/// Throws ConfigError for an unknown name.
Command parse_command(const std::string& name);

struct CommandResult {
    nlohmann::json report;   ///< deterministic except for the "timings" field
    int exit_code = 0;       ///< 0 pass, 1 check failure, 2 construction/config error
};

/// Runs a command end to end. Files go to cfg.output_dir when write_files
/// is set. Construction and config errors are caught and reported with
/// exit code 2.
CommandResult run_command(Command cmd, const RunConfig& cfg, bool write_files = true);

/// Report without its "timings" field, serialized with fixed indentation.
std::string canonical_report(const nlohmann::json& report);

} // namespace dtwist

#include "dtwist/app.hpp"

#include "dtwist/errors.hpp"
#include "dtwist/manifolds.hpp"
#include "dtwist/regularity.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace dtwist {

BuiltSystem::BuiltSystem(const RunConfig& cfg) : cfg_(cfg)
{
    cfg_.params.validate();
    profiles_.emplace(ProfileSet::calibrate(cfg_.quadrature_tolerance));
    seq_ = build_sequences(cfg_.params);
    table_ = std::make_unique<GapTable>(seq_, cfg_.params.omega);
    map_ = std::make_unique<DenjoyMap>(seq_, *table_, *profiles_, cfg_.params.swap_gamma);
    if (cfg_.rigid) rotation_ = std::make_unique<RigidRotation>(cfg_.params.omega);
    twist_ = std::make_unique<TwistSystem>(circle());
}

const CircleMap& BuiltSystem::circle() const
{
    if (rotation_) return *rotation_;
    return *map_;
}

nlohmann::json BuiltSystem::construction_summary() const
{
    return {{"M", seq_.M},
            {"a_C", seq_.a_C},
            {"residual_mass", seq_.residual_mass},
            {"alpha1", seq_.alpha1},
            {"alpha0", seq_.alpha0},
            {"m1_adjusted", seq_.m1_adjusted.value_or(std::nan(""))},
            {"rigid", cfg_.rigid}};
}

const char* to_string(Command c)
{
    switch (c) {
    case Command::build: return "build";
    case Command::verify: return "verify";
    case Command::regularity: return "regularity";
    case Command::portrait: return "portrait";
    case Command::manifolds: return "manifolds";
    case Command::diffusion: return "diffusion";
    }
    return "?";
}

Command parse_command(const std::string& name)
{
    for (Command c : {Command::build, Command::verify, Command::regularity, Command::portrait,
                      Command::manifolds, Command::diffusion})
        if (name == to_string(c)) return c;
    throw ConfigError("unknown command '" + name + "'");
}

std::string canonical_report(const nlohmann::json& report)
{
    nlohmann::json copy = report;
    copy.erase("timings");
    return copy.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lower-bound check: passes when measured >= bound.
Check at_least(std::string name, double measured, double bound)
{
    return {std::move(name), measured, bound, measured >= bound};
}

Check flag(std::string name, bool ok)
{
    return {std::move(name), ok ? 0.0 : 1.0, 0.0, ok};
}

struct Context {
    const BuiltSystem& sys;
    const RunConfig& cfg;
    bool write_files;
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();
    nlohmann::json files = nlohmann::json::array();

    void add(Check c) { checks.push_back(std::move(c)); }

    template <class F>
    void write(const std::string& name, F&& body)
    {
        if (!write_files) return;
        std::filesystem::path path = std::filesystem::path(cfg.output_dir) / name;
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write " + path.string());
        body(out);
        files.push_back(name);
    }

    void need_gaps(const char* what) const
    {
        if (sys.rigid()) throw ConfigError(std::string(what) + " needs the Denjoy map; rigid mode is set");
    }
};

void do_build(Context& c)
{
    const auto& s = c.sys;
    c.add(at_least("residual_mass_positive", s.sequences().residual_mass, 0.0));
    c.add(make_check("residual_mass_below_one", s.sequences().residual_mass, 1.0));
    long M = s.sequences().M;
    bool sizes = s.sequences().ell.lo() == -M - 2 && s.sequences().ell.hi() == M + 2 &&
                 s.sequences().alpha.lo() == -M && s.sequences().alpha.hi() == M &&
                 static_cast<long>(s.table().sorted().size()) == 2 * M + 1 &&
                 static_cast<long>(s.denjoy().cells().size()) == 2 * M;
    c.add(flag("array_sizes", sizes));
    if (c.cfg.write_sequences) c.write("sequences.csv", [&](std::ostream& os) { write_sequence_csv(os, s.sequences()); });
    if (c.cfg.write_gaps) c.write("gaps.csv", [&](std::ostream& os) { write_gap_csv(os, s.table()); });
}

void verify_rigid(Context& c)
{
    const auto& sys = c.sys.twist();
    const auto& t = c.cfg.tol;
    auto inv = verify_invariant_curve(sys, c.cfg.verify_samples, c.cfg.seed);
    c.add(make_check("invariance.residual", inv.max_residual, t.invariance));
    c.add(make_check("invariance.translated", inv.max_translated_residual, t.invariance));
    auto lin = phi_linearity_check(sys, c.sys.table());
    c.add(make_check("phi.zero", lin.max_deviation, t.linearity_deviation));
    c.add(make_check("phi.slope", lin.max_slope_error, t.linearity_slope));
    auto st = structural_checks(sys, c.cfg.seed, c.cfg.structural_samples);
    c.add(make_check("structural.inverse", st.inverse_residual, t.inverse));
    c.add(make_check("structural.det", st.det_deviation, t.det));
    c.add(flag("structural.translation_exact", st.translation_exact));
    c.details["invariance"] = inv;
    c.details["linearity"] = lin;
    c.details["structural"] = st;
}

void do_verify(Context& c)
{
    c.details["seed"] = c.cfg.seed;
    if (c.sys.rigid()) {
        verify_rigid(c);
        return;
    }
    const auto& s = c.sys;
    const auto& sys = s.twist();
    const auto& g = s.denjoy();
    const auto& t = c.cfg.tol;

    auto inv = verify_invariant_curve(sys, c.cfg.verify_samples, c.cfg.seed);
    c.add(make_check("invariance.residual", inv.max_residual, t.invariance));
    c.add(make_check("invariance.translated", inv.max_translated_residual, t.invariance));
    c.add(make_check("invariance.projection", inv.max_projection_error, t.invariance));
    c.details["invariance"] = inv;

    nlohmann::json rot = nlohmann::json::array();
    long n = c.cfg.rotation_n;
    for (double x0 : {0.0, 1.0 / 3.0, 0.71}) {
        double rho = rotation_number_estimate(g, x0, n);
        double err = std::abs(rho - c.cfg.params.omega);
        rot.push_back({{"x0", x0}, {"rho", rho}, {"error", err}});
        c.add({"rotation.x0=" + std::to_string(x0), err, 1.0 / static_cast<double>(n), err < 1.0 / n});
    }
    c.details["rotation"] = {{"n", n}, {"runs", rot}};

    auto wand = wandering_interval_check(g, std::min<long>(s.sequences().M, 200));
    c.add(make_check("wandering.forward", wand.forward_max_deviation, t.wandering));
    c.add(make_check("wandering.backward", wand.backward_max_deviation, t.wandering));
    c.add(flag("wandering.lengths_decrease", wand.lengths_decrease));
    c.details["wandering"] = wand;

    EstimateSlack slack;
    slack.recurrence = t.recurrence;
    auto est = verify_sequence_estimates(s.sequences(), c.cfg.params, s.profiles(), slack);
    for (const auto& e : est.checks) c.add({"sequences." + e.name, e.measured, e.bound, e.pass});
    c.add(make_check("sequences.zero_seed", zero_seed_deviation(s.sequences()), t.zero_seed));
    c.details["estimates"] = est;

    auto lin = phi_linearity_check(sys, s.sequences());
    c.add(make_check("phi.linearity_deviation", lin.max_deviation, t.linearity_deviation));
    c.add(make_check("phi.linearity_slope", lin.max_slope_error, t.linearity_slope));
    c.details["linearity"] = {{"max_deviation", lin.max_deviation},
                              {"max_slope_error", lin.max_slope_error},
                              {"max_intercept_error", lin.max_intercept_error}};

    auto jumps = derivative_jump_table(g, c.cfg.jump_samples);
    double jump_err = 0.0;
    for (const auto& row : jumps.midpoints)
        jump_err = std::max(jump_err, std::abs(row.jump - g.diffeo(row.k).midpoint_jump()));
    c.add(make_check("jumps.midpoint", jump_err, t.jump));
    c.add(make_check("jumps.off_midpoint", jumps.max_offmidpoint_jump, t.offmidpoint_jump));
    c.details["jumps"] = {{"samples", jumps.samples},
                          {"midpoint_error", jump_err},
                          {"max_offmidpoint_jump", jumps.max_offmidpoint_jump},
                          {"max_endpoint_slope_error", jumps.max_endpoint_slope_error}};

    auto st = structural_checks(sys, c.cfg.seed, c.cfg.structural_samples);
    c.add(make_check("structural.inverse", st.inverse_residual, t.inverse));
    c.add(make_check("structural.det", st.det_deviation, t.det));
    c.add(make_check("structural.twist", st.twist_deviation, t.twist));
    c.add(flag("structural.translation_exact", st.translation_exact));
    c.add(make_check("structural.periodicity", st.periodicity, t.periodicity));
    c.add(make_check("structural.phi_mean", std::abs(st.phi_mean), s.sequences().residual_mass + t.phi_mean_slack));
    c.add(make_check("structural.conjugacy", st.conjugacy, t.conjugacy));
    c.details["structural"] = st;
}

void do_regularity(Context& c)
{
    c.need_gaps("regularity");
    const auto& t = c.cfg.tol;
    auto rep = second_derivative_scan(c.sys.denjoy(), c.cfg.regularity_grid);
    c.add(flag("regularity.decay", rep.decays()));
    c.add(make_check("regularity.term_sum", rep.max_term_sum_error, t.term_sum));
    c.add(make_check("regularity.finite_difference", rep.max_fd_error, t.term_sum));
    c.add(make_check("regularity.plateau", rep.max_plateau_d2, t.plateau));
    c.details["scan"] = rep;
    c.write("regularity.csv", [&](std::ostream& os) { write_regularity_csv(os, rep); });

    if (c.cfg.c_factor > 0.0) {
        RunConfig big = c.cfg;
        big.params.bigC *= c.cfg.c_factor;
        BuiltSystem other(big);
        auto rep2 = second_derivative_scan(other.denjoy(), c.cfg.regularity_grid);
        double ratio = rep.global_sup / rep2.global_sup;
        double bulk = rep.bulk_sup / rep2.bulk_sup;
        c.add(at_least("regularity.c_comparison", ratio, c.cfg.min_c_ratio));
        c.details["comparison"] = {{"C", big.params.bigC},
                                   {"global_sup", rep2.global_sup},
                                   {"head_sup", rep2.head_sup},
                                   {"bulk_sup", rep2.bulk_sup},
                                   {"global_ratio", ratio},
                                   {"bulk_ratio", bulk}};
    }
}

void do_portrait(Context& c)
{
    const auto& sys = c.sys.twist();
    long rows = c.cfg.portrait_curve_samples + c.cfg.portrait_orbits * (c.cfg.portrait_steps + 1);
    c.write("portrait.csv", [&](std::ostream& os) {
        write_portrait_csv(os, sys, c.cfg.portrait_orbits, c.cfg.portrait_steps, c.cfg.portrait_curve_samples,
                           c.cfg.portrait_r_spread);
    });
    // an orbit started on Gamma must stay on it
    AnnulusPoint p{0.123, sys.curve(0.123)};
    double worst = 0.0;
    for (long n = 0; n < c.cfg.portrait_steps; ++n) {
        p = sys.forward(p);
        worst = std::max(worst, std::abs(p.r - sys.curve(p.theta)));
    }
    c.add(make_check("portrait.on_curve", worst, c.cfg.tol.invariance));
    c.details["rows"] = rows;
}

void do_manifolds(Context& c)
{
    c.need_gaps("manifolds");
    const auto& sys = c.sys.twist();
    const auto& t = c.cfg.tol;
    auto it = manifold_iterate_check(sys, c.cfg.manifold_k_max);
    c.add(make_check("manifolds.iterate_deviation", it.max_deviation, t.manifold));
    c.add(make_check("manifolds.contraction_ratio", it.max_ratio_error, t.ratio));
    c.add(make_check("manifolds.base_point", it.max_base_error, t.manifold));
    auto side = curve_side_check(sys);
    c.add(make_check("manifolds.side_stable", side.stable_error, t.side));
    c.add(make_check("manifolds.side_unstable", side.unstable_error, t.side));
    c.add(make_check("manifolds.on_curve", side.on_curve_error, t.invariance));
    c.add(flag("manifolds.strict_side", side.strict));
    auto conv = orbit_convergence_check(sys, c.cfg.convergence_s, c.cfg.convergence_n);
    c.add(make_check("manifolds.convergence", conv.max_relative_error, t.convergence));
    auto fam = extend_family(sys, c.cfg.manifold_family);
    double col = 0.0;
    for (const auto& m : fam)
        if (m.in_linear_band) col = std::max(col, m.collinearity);
    c.add(make_check("manifolds.family_collinearity", col, t.collinearity));
    c.details["iterate"] = it;
    c.details["side"] = side;
    c.details["convergence"] = conv;
    c.details["family"] = fam;
    c.write("segments.csv", [&](std::ostream& os) {
        write_segment_csv(os, sys, c.cfg.manifold_k_max, c.cfg.segment_points);
    });
}

void do_diffusion(Context& c)
{
    const auto& s = c.sys;
    const GapTable& t = s.table();
    long k = c.cfg.diffusion_gap;
    if (std::labs(k) > t.M()) throw ConfigError("diffusion.gap outside the stored range");
    double theta0 = t.lambda(k) + c.cfg.diffusion_position * t.ell(k);
    nlohmann::json sections = nlohmann::json::array();
    for (double off : c.cfg.diffusion_offsets) {
        auto rep = diffusion_probe(s.twist(), theta0, off, c.cfg.diffusion_steps);
        if (off == 0.0) c.add(make_check("diffusion.on_curve", rep.max_excursion, c.cfg.tol.invariance));
        sections.push_back(rep);
    }
    c.details["theta0"] = theta0;
    c.details["probes"] = sections;
}

} // namespace

CommandResult run_command(Command cmd, const RunConfig& cfg, bool write_files)
{
    CommandResult res;
    nlohmann::json& r = res.report;
    r["schema_version"] = kSchemaVersion;
    r["command"] = to_string(cmd);
    r["config"] = config_json(cfg);
    auto t0 = Clock::now();
    try {
        if (write_files) std::filesystem::create_directories(cfg.output_dir);
        BuiltSystem sys(cfg);
        double build_s = seconds_since(t0);
        r["construction"] = sys.construction_summary();
        Context c{sys, cfg, write_files, {}, nlohmann::json::object(), nlohmann::json::array()};
        auto t1 = Clock::now();
        switch (cmd) {
        case Command::build: do_build(c); break;
        case Command::verify: do_verify(c); break;
        case Command::regularity: do_regularity(c); break;
        case Command::portrait: do_portrait(c); break;
        case Command::manifolds: do_manifolds(c); break;
        case Command::diffusion: do_diffusion(c); break;
        }
        bool pass = true;
        for (const auto& ch : c.checks) pass = pass && ch.pass;
        r["checks"] = c.checks;
        r["details"] = c.details;
        r["pass"] = pass;
        r["timings"] = {{"build_s", build_s}, {"run_s", seconds_since(t1)}};
        res.exit_code = pass ? 0 : 1;
        if (write_files) {
            c.files.push_back(std::string(to_string(cmd)) + ".json");
            r["files"] = c.files;
        }
    } catch (const ConstructionError& e) {
        r["error"] = {{"kind", "construction"}, {"message", e.what()}, {"index", e.index}};
        res.exit_code = 2;
    } catch (const CalibrationError& e) {
        r["error"] = {{"kind", "calibration"}, {"message", e.what()}, {"achieved", e.achieved_error}};
        res.exit_code = 2;
    } catch (const InvalidParameter& e) {
        r["error"] = {{"kind", "invalid_parameter"}, {"message", e.what()}};
        res.exit_code = 2;
    } catch (const ConfigError& e) {
        r["error"] = {{"kind", "config"}, {"message", e.what()}};
        res.exit_code = 2;
    }
    if (res.exit_code == 2) r["pass"] = false;
    if (write_files && std::filesystem::is_directory(cfg.output_dir)) {
        std::ofstream out(std::filesystem::path(cfg.output_dir) / (std::string(to_string(cmd)) + ".json"));
        out << r.dump(2) << '\n';
    }
    return res;
}

} // namespace dtwist

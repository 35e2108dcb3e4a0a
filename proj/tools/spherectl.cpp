/*
 Copyright 2026 The spherectl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// spherectl: command-line front end for scenario simulation and analysis.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spherectl/spherectl.hpp"

namespace fs = std::filesystem;
using namespace spherectl;
using nlohmann::json;

namespace
{

    struct Options
    {
        std::string scenario;
        std::optional<int> seeds;
        std::string out;
        std::optional<double> h;
        std::optional<double> horizon;
        std::optional<std::string> separation;
        int grid = 4096;
        int samples = 1000;
        std::uint64_t random_seed = 20260101;
    };

    std::string num(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    Scenario load(const Options &opt)
    {
        Scenario sc = load_scenario(opt.scenario);
        if (opt.h)
            sc.sim.h = *opt.h;
        if (opt.horizon)
            sc.sim.horizon = *opt.horizon;
        if (opt.separation)
            sc.loop.variant = parse_separation_variant(*opt.separation);
        validate_sim_config(sc.sim);
        return sc;
    }

    void ensure_dir(const std::string &dir)
    {
        if (!dir.empty())
            fs::create_directories(dir);
    }

    std::ofstream open_out(const std::string &dir, const std::string &name)
    {
        std::ofstream f(fs::path(dir) / name);
        if (!f)
            throw Error(ErrorKind::Input, "cannot write " + (fs::path(dir) / name).string());
        return f;
    }

    void write_csv(std::ostream &os, const Trajectory &traj)
    {
        const int m = traj.states.empty() ? 0 : traj.states.front().x.ambient_dim();
        os << "t";
        for (int i = 0; i < m; ++i)
            os << ",x" << i;
        for (int i = 0; i < m; ++i)
            os << ",v" << i;
        os << ",d_U,norm_u,norm_v_err,V\n";
        for (std::size_t k = 0; k < traj.states.size(); ++k)
        {
            const SimState &s = traj.states[k];
            const Diagnostics &d = traj.diagnostics[k];
            os << num(traj.times[k]);
            for (int i = 0; i < m; ++i)
                os << ',' << num(s.x(i));
            for (int i = 0; i < m; ++i)
                os << ',' << num(s.v(i));
            os << ',' << num(d.separation) << ',' << num(d.norm_u) << ',' << num(d.norm_v_err) << ',' << num(d.V)
               << '\n';
        }
    }

    json vec_json(const Vector &v)
    {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.push_back(v(i));
        return a;
    }

    int cmd_simulate(const Options &opt)
    {
        const Scenario sc = load(opt);
        std::vector<SimState> seeds = resolve_seeds(sc);
        const int want = opt.seeds.value_or(static_cast<int>(seeds.size()));
        if (want < 0)
            throw Error(ErrorKind::Input, "--seeds must be non-negative");
        if (want < static_cast<int>(seeds.size()))
            seeds.resize(want);
        else if (want > static_cast<int>(seeds.size()))
        {
            const auto extra = random_seeds(sc.loop, want - static_cast<int>(seeds.size()), opt.random_seed);
            seeds.insert(seeds.end(), extra.begin(), extra.end());
        }
        const auto trajs = batch_simulate(sc.loop, seeds, sc.sim);
        const std::string out = opt.out.empty() ? "." : opt.out;
        ensure_dir(out);
        std::ofstream summary = open_out(out, "summary.jsonl");
        bool all_ok = true;
        for (std::size_t i = 0; i < trajs.size(); ++i)
        {
            char name[32];
            std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
            std::ofstream csv = open_out(out, name);
            write_csv(csv, trajs[i]);
            const TrajectorySummary &s = trajs[i].summary;
            const bool cleared = std::isfinite(s.clearance_time);
            const bool ok = s.monitors_passed() && cleared;
            all_ok = all_ok && ok;
            json rec = {{"seed", i},
                        {"file", name},
                        {"status", to_string(s.status)},
                        {"monitors_passed", ok},
                        {"min_separation", s.min_separation},
                        {"max_norm_u", s.max_norm_u},
                        {"monotone_violations", s.monotone_violations},
                        {"max_V_increase", s.max_V_increase},
                        {"clearance_time", cleared ? json(s.clearance_time) : json(nullptr)},
                        {"final_distance_to_target", distance_to_target(sc.loop, s.final_state)},
                        {"final_speed", s.final_state.v.norm()},
                        {"steps", s.steps},
                        {"substeps", s.substeps}};
            if (!s.message.empty())
                rec["message"] = s.message;
            summary << rec.dump() << '\n';
            std::cout << rec.dump() << '\n';
        }
        return all_ok ? 0 : 1;
    }

    json report_json(const EquilibriumReport &r, const EigenstructureReport &e)
    {
        json spectrum = json::array();
        for (const auto &s : r.jacobian_spectrum)
            spectrum.push_back({{"re", s.value.real()}, {"im", s.value.imag()}, {"tangent", s.tangent}});
        return {{"x_star", vec_json(r.x_star.coords())},
                {"residual", r.residual},
                {"classification", to_string(r.classification)},
                {"is_target", r.is_target},
                {"support", r.support},
                {"separation", r.separation},
                {"jd_spectrum", spectrum},
                {"base_point_residual", e.base_point_residual},
                {"damping", e.damping},
                {"damping_cluster", e.damping_cluster},
                {"damping_nullity", e.damping_nullity},
                {"eigenstructure_ok", e.ok}};
    }

    int cmd_equilibria(const Options &opt)
    {
        const Scenario sc = load(opt);
        const auto reports = find_equilibria(sc.loop, opt.grid);
        std::ofstream file;
        if (!opt.out.empty())
        {
            ensure_dir(opt.out);
            file = open_out(opt.out, "equilibria.jsonl");
        }
        bool ok = false;
        bool others_ok = true;
        for (const auto &r : reports)
        {
            const EigenstructureReport e = check_eigenstructure(sc.loop, r.x_star);
            const json rec = report_json(r, e);
            std::cout << rec.dump() << '\n';
            if (file)
                file << rec.dump() << '\n';
            if (r.is_target && r.classification == Classification::Target)
                ok = true;
            if (!r.is_target && r.classification != Classification::Unstable)
                others_ok = false;
            if (!e.ok || r.residual >= kEquilibriumResidual)
                others_ok = false;
        }
        return ok && others_ok ? 0 : 1;
    }

    int cmd_check(const Options &opt)
    {
        const Scenario sc = load(opt);
        const auto results = run_checks(sc.loop, opt.samples, opt.grid);
        bool ok = true;
        for (const auto &r : results)
        {
            std::printf("%-4s  %-46s  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            ok = ok && r.passed;
        }
        return ok ? 0 : 1;
    }

    int cmd_attitude(const Options &opt)
    {
        const Scenario sc = load(opt);
        if (!sc.attitude)
            throw Error(ErrorKind::Input, "scenario has no attitude block");
        const AttitudeSpec &a = *sc.attitude;
        const InertiaMatrix inertia(a.inertia);
        const double horizon = opt.horizon.value_or(a.horizon);
        const EquivalenceReport rep =
            attitude_equivalence(sc.loop, inertia, attitude_initial_state(a), sc.sim.h, horizon, sc.sim.log_every);
        if (!opt.out.empty())
        {
            ensure_dir(opt.out);
            std::ofstream csv = open_out(opt.out, "attitude.csv");
            csv << "t,eta,q1,q2,q3,omega1,omega2,omega3,x0,x1,x2,x3,v0,v1,v2,v3\n";
            for (std::size_t k = 0; k < rep.times.size(); ++k)
            {
                const auto &b = rep.body[k];
                const auto &s = rep.sphere[k];
                csv << num(rep.times[k]);
                for (int i = 0; i < 4; ++i)
                    csv << ',' << num(b.x(i));
                for (int i = 0; i < 3; ++i)
                    csv << ',' << num(b.omega(i));
                for (int i = 0; i < 4; ++i)
                    csv << ',' << num(s.x(i));
                for (int i = 0; i < 4; ++i)
                    csv << ',' << num(s.v(i));
                csv << '\n';
            }
        }
        const bool ok = rep.completed && rep.max_state_discrepancy < 1e-6 && rep.max_identity_error < 1e-10;
        const json rec = {{"completed", rep.completed},
                          {"steps", rep.steps},
                          {"max_state_discrepancy", rep.max_state_discrepancy},
                          {"max_identity_error", rep.max_identity_error},
                          {"min_separation", rep.min_separation},
                          {"final_distance_to_target",
                           rep.body.empty() ? json(nullptr)
                                            : json(sphere_angle(rep.body.back().x, sc.loop.planner.target))},
                          {"passed", ok},
                          {"message", rep.message}};
        std::cout << rec.dump() << '\n';
        return ok ? 0 : 1;
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Dynamic-damping feedback on spheres with star-shaped obstacles"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App *sub)
    {
        sub->add_option("--scenario", opt.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--h", opt.h, "Logged integration step (s)");
        sub->add_option("--horizon", opt.horizon, "Simulation horizon (s)");
        sub->add_option("--separation", opt.separation, "Separation variant")
            ->check(CLI::IsMember({"spherical", "chordal", "product"}));
    };

    auto *sim = app.add_subcommand("simulate", "Batch trajectories to CSV");
    common(sim);
    sim->add_option("--seeds", opt.seeds, "Number of seeds (scenario seeds first, then random)");
    sim->add_option("--random-seed", opt.random_seed, "RNG seed for random initial states");

    auto *eq = app.add_subcommand("equilibria", "Locate and classify equilibria");
    common(eq);
    eq->add_option("--grid", opt.grid, "Number of Newton starts (>= 1000)");

    auto *chk = app.add_subcommand("check", "Gradient, Jacobian and eigenstructure checks");
    common(chk);
    chk->add_option("--grid", opt.grid, "Number of Newton starts (>= 1000)");
    chk->add_option("--samples", opt.samples, "Samples per finite-difference check");

    auto *att = app.add_subcommand("attitude", "Quaternion closed loop and S^3 equivalence");
    common(att);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (sim->parsed())
            return cmd_simulate(opt);
        if (eq->parsed())
            return cmd_equilibria(opt);
        if (chk->parsed())
            return cmd_check(opt);
        if (att->parsed())
            return cmd_attitude(opt);
    }
    catch (const ScenarioError &e)
    {
        for (const auto &msg : e.errors())
            std::cerr << "error: " << msg << '\n';
        std::cout << json({{"error", to_string(e.kind())}, {"messages", e.errors()}}).dump() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << json({{"error", e.what()}}).dump() << '\n';
        return 2;
    }
    return 2;
}

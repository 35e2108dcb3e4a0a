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

#ifndef SPHERECTL_SCENARIO_HPP
#define SPHERECTL_SCENARIO_HPP

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spherectl/attitude.hpp"
#include "spherectl/controller.hpp"
#include "spherectl/obstacle.hpp"
#include "spherectl/planner.hpp"
#include "spherectl/sim.hpp"

namespace spherectl
{

    inline constexpr const char *kScenarioSchema = "spherectl.scenario/1";

    /// Thrown by load_scenario / parse_scenario with every problem found.
    class ScenarioError : public Error
    {
    public:
        ScenarioError(ErrorKind kind, std::vector<std::string> errors)
            : Error(kind, join(errors)), errors_(std::move(errors)) {}

        const std::vector<std::string> &errors() const noexcept { return errors_; }

    private:
        static std::string join(const std::vector<std::string> &errors)
        {
            std::string out;
            for (const auto &e : errors)
            {
                if (!out.empty())
                    out += "; ";
                out += e;
            }
            return out;
        }

        std::vector<std::string> errors_;
    };

    struct SeedSpec
    {
        UnitPoint x;
        std::optional<Vector> v; // empty: unit vector toward the closest unsafe point
    };

    struct AttitudeSpec
    {
        Matrix3 inertia = Matrix3::Identity();
        bool quaternion_mode = true;
        UnitPoint initial_quaternion{1.0, 0.0, 0.0, 0.0};
        Vector3 initial_omega = Vector3::Zero();
        double horizon = 10.0;
    };

    struct Scenario
    {
        std::string name;
        int dimension = 2; // n, the sphere is S^n in R^{n+1}
        double delta = 0.2;
        ClosedLoop loop;
        SimConfig sim;
        std::vector<SeedSpec> seeds;
        std::optional<AttitudeSpec> attitude;
    };

    namespace detail
    {
        using nlohmann::json;

        /// Field-path aware reader that records every error instead of stopping.
        class Reader
        {
        public:
            std::vector<std::string> errors;

            void fail(const std::string &path, const std::string &what) { errors.push_back(path + ": " + what); }

            const json *child(const json &obj, const std::string &path, const char *key, bool required)
            {
                if (!obj.is_object())
                    return nullptr;
                auto it = obj.find(key);
                if (it == obj.end())
                {
                    if (required)
                        fail(join(path, key), "missing required field");
                    return nullptr;
                }
                return &*it;
            }

            static std::string join(const std::string &path, const char *key)
            {
                return path.empty() ? std::string(key) : path + "." + key;
            }

            std::optional<double> number(const json &obj, const std::string &path, const char *key, bool required)
            {
                const json *j = child(obj, path, key, required);
                if (!j)
                    return std::nullopt;
                if (!j->is_number())
                {
                    fail(join(path, key), "expected a number");
                    return std::nullopt;
                }
                return j->get<double>();
            }

            double number_or(const json &obj, const std::string &path, const char *key, double fallback)
            {
                return number(obj, path, key, false).value_or(fallback);
            }

            std::optional<Vector> vector(const json &j, const std::string &path, int size)
            {
                if (!j.is_array() || (size > 0 && static_cast<int>(j.size()) != size))
                {
                    fail(path, size > 0 ? "expected an array of " + std::to_string(size) + " numbers"
                                        : "expected an array of numbers");
                    return std::nullopt;
                }
                if (static_cast<int>(j.size()) > kMaxAmbientDim)
                {
                    fail(path, "too many entries");
                    return std::nullopt;
                }
                Vector v(static_cast<Eigen::Index>(j.size()));
                for (std::size_t i = 0; i < j.size(); ++i)
                {
                    if (!j[i].is_number())
                    {
                        fail(path + "[" + std::to_string(i) + "]", "expected a number");
                        return std::nullopt;
                    }
                    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
                }
                if (!v.allFinite())
                {
                    fail(path, "entries must be finite");
                    return std::nullopt;
                }
                return v;
            }

            std::optional<UnitPoint> point(const json &j, const std::string &path, int size)
            {
                auto v = vector(j, path, size);
                if (!v)
                    return std::nullopt;
                try
                {
                    return UnitPoint(*v);
                }
                catch (const Error &e)
                {
                    fail(path, e.what());
                }
                return std::nullopt;
            }

            std::optional<std::vector<double>> list(const json &j, const std::string &path)
            {
                if (!j.is_array())
                {
                    fail(path, "expected an array of numbers");
                    return std::nullopt;
                }
                std::vector<double> out;
                for (std::size_t i = 0; i < j.size(); ++i)
                {
                    if (!j[i].is_number())
                    {
                        fail(path + "[" + std::to_string(i) + "]", "expected a number");
                        return std::nullopt;
                    }
                    out.push_back(j[i].get<double>());
                }
                return out;
            }
        };

        inline std::pair<int, int> line_column(const std::string &text, std::size_t byte)
        {
            int line = 1, col = 1;
            for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            return {line, col};
        }

        inline std::optional<RadialProfile> read_profile(Reader &r, const json &j, const std::string &path)
        {
            if (!j.is_object())
            {
                r.fail(path, "expected an object");
                return std::nullopt;
            }
            const json *type = r.child(j, path, "type", true);
            if (!type)
                return std::nullopt;
            if (!type->is_string())
            {
                r.fail(path + ".type", "expected a string");
                return std::nullopt;
            }
            const std::string t = type->get<std::string>();
            try
            {
                if (t == "cap")
                {
                    auto radius = r.number(j, path, "radius", true);
                    if (!radius)
                        return std::nullopt;
                    return RadialProfile::cap(*radius);
                }
                if (t == "fourier")
                {
                    const json *c = r.child(j, path, "cos", true);
                    const json *s = r.child(j, path, "sin", false);
                    if (!c)
                        return std::nullopt;
                    auto cc = r.list(*c, path + ".cos");
                    std::optional<std::vector<double>> ss = std::vector<double>{};
                    if (s)
                        ss = r.list(*s, path + ".sin");
                    if (!cc || !ss)
                        return std::nullopt;
                    return RadialProfile::fourier(*cc, *ss);
                }
                r.fail(path + ".type", "unknown profile type '" + t + "' (expected cap or fourier)");
            }
            catch (const Error &e)
            {
                r.fail(path, e.what());
            }
            return std::nullopt;
        }
    } // namespace detail

    /// Parses and validates a scenario document. Throws ScenarioError listing
    /// every problem found.
    inline Scenario parse_scenario(const std::string &text)
    {
        using nlohmann::json;
        json doc;
        try
        {
            doc = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            const auto [line, col] = detail::line_column(text, e.byte);
            throw ScenarioError(ErrorKind::Input, {"line " + std::to_string(line) + ", column " +
                                                   std::to_string(col) + ": " + e.what()});
        }
        detail::Reader r;
        if (!doc.is_object())
            throw ScenarioError(ErrorKind::Input, {"document: expected a JSON object"});

        Scenario sc;
        if (const json *schema = r.child(doc, "", "schema", true))
        {
            if (!schema->is_string() || schema->get<std::string>() != kScenarioSchema)
                r.fail("schema", std::string("unsupported schema, expected \"") + kScenarioSchema + "\"");
        }
        if (const json *name = r.child(doc, "", "name", false))
        {
            if (name->is_string())
                sc.name = name->get<std::string>();
            else
                r.fail("name", "expected a string");
        }
        if (auto n = r.number(doc, "", "dimension", true))
        {
            if (*n != std::floor(*n) || *n < 1 || *n > kMaxAmbientDim - 1)
                r.fail("dimension", "expected an integer in [1, " + std::to_string(kMaxAmbientDim - 1) + "]");
            else
                sc.dimension = static_cast<int>(*n);
        }
        const int m = sc.dimension + 1;

        std::optional<UnitPoint> target;
        if (const json *t = r.child(doc, "", "target", true))
            target = r.point(*t, "target", m);

        sc.delta = r.number_or(doc, "", "delta", sc.delta);
        if (!(sc.delta > 0.0 && sc.delta <= kPi / 2))
            r.fail("delta", "pairwise separation delta must lie in (0, pi/2]");

        std::vector<StarObstacle> obstacles;
        bool obstacles_ok = true;
        if (const json *obs = r.child(doc, "", "obstacles", false))
        {
            if (!obs->is_array())
            {
                r.fail("obstacles", "expected an array");
                obstacles_ok = false;
            }
            else
                for (std::size_t i = 0; i < obs->size(); ++i)
                {
                    const std::string path = "obstacles[" + std::to_string(i) + "]";
                    const json &o = (*obs)[i];
                    std::optional<UnitPoint> kernel;
                    std::optional<RadialProfile> profile;
                    std::optional<Vector> reference;
                    if (const json *k = r.child(o, path, "kernel", true))
                        kernel = r.point(*k, path + ".kernel", m);
                    if (const json *p = r.child(o, path, "profile", true))
                        profile = detail::read_profile(r, *p, path + ".profile");
                    if (const json *ref = r.child(o, path, "reference", false))
                        reference = r.vector(*ref, path + ".reference", m);
                    if (!kernel || !profile)
                    {
                        obstacles_ok = false;
                        continue;
                    }
                    try
                    {
                        obstacles.emplace_back(*kernel, *profile, reference);
                    }
                    catch (const Error &e)
                    {
                        r.fail(path, e.what());
                        obstacles_ok = false;
                    }
                }
        }
        PlannerParams planner;
        const json empty = json::object();
        const json *pj = r.child(doc, "", "planner", false);
        const json &pl = pj ? *pj : empty;
        planner.k1 = r.number_or(pl, "planner", "k1", planner.k1);
        planner.kappa = r.number_or(pl, "planner", "kappa", planner.kappa);
        planner.epsilon = r.number_or(pl, "planner", "epsilon", planner.epsilon);
        if (!(planner.k1 > 0.0))
            r.fail("planner.k1", "gain k1 must be positive");
        if (!(planner.kappa > 0.0))
            r.fail("planner.kappa", "kappa must be positive");
        if (!(planner.epsilon > 0.0))
            r.fail("planner.epsilon", "tube width ordering: need 0 < epsilon");
        else if (planner.epsilon > sc.delta)
            r.fail("planner.epsilon", "tube width ordering: need epsilon <= delta so tubes do not overlap");

        ControllerParams ctrl;
        const json *cj = r.child(doc, "", "controller", false);
        const json &cl = cj ? *cj : empty;
        ctrl.k_d = r.number_or(cl, "controller", "k_d", ctrl.k_d);
        ctrl.epsilon1 = r.number_or(cl, "controller", "epsilon1", ctrl.epsilon1);
        ctrl.epsilon2 = r.number_or(cl, "controller", "epsilon2", ctrl.epsilon2);
        if (!(ctrl.k_d > 0.0))
            r.fail("controller.k_d", "damping gain k_d must be positive");
        if (!(ctrl.epsilon1 > 0.0 && ctrl.epsilon1 < ctrl.epsilon2))
            r.fail("controller", "beta schedule ordering: need 0 < epsilon1 < epsilon2");

        SeparationVariant variant = SeparationVariant::Spherical;
        if (const json *s = r.child(doc, "", "separation", false))
        {
            try
            {
                if (!s->is_string())
                    throw Error(ErrorKind::Input, "expected a string");
                variant = parse_separation_variant(s->get<std::string>());
            }
            catch (const Error &e)
            {
                r.fail("separation", e.what());
            }
        }

        const json *sj = r.child(doc, "", "sim", false);
        const json &sm = sj ? *sj : empty;
        sc.sim.h = r.number_or(sm, "sim", "h", sc.sim.h);
        sc.sim.horizon = r.number_or(sm, "sim", "horizon", sc.sim.horizon);
        sc.sim.clearance = r.number_or(sm, "sim", "clearance", 0.5 * ctrl.epsilon1);
        sc.sim.log_every = static_cast<int>(r.number_or(sm, "sim", "log_every", 1));
        try
        {
            validate_sim_config(sc.sim);
        }
        catch (const Error &e)
        {
            r.fail("sim", e.what());
        }

        // The field constructor stops at the first bad pair; on failure every
        // pair is measured so that all violations are reported.
        std::optional<ObstacleField> field;
        if (obstacles_ok && sc.delta > 0.0 && sc.delta <= kPi / 2)
        {
            try
            {
                field.emplace(obstacles, sc.delta);
            }
            catch (const Error &e)
            {
                const std::size_t before = r.errors.size();
                for (std::size_t i = 0; i < obstacles.size(); ++i)
                    for (std::size_t j = i + 1; j < obstacles.size(); ++j)
                    {
                        const double s = ObstacleField::pairwise_separation(obstacles[i], obstacles[j]);
                        if (s < 2.0 * sc.delta)
                            r.fail("obstacles", "pairwise separation: obstacles " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " are " + std::to_string(s) +
                                                    " rad apart, need at least 2*delta = " +
                                                    std::to_string(2.0 * sc.delta));
                    }
                if (r.errors.size() == before)
                    r.fail("obstacles", e.what());
            }
        }
        if (field && target)
        {
            const Proximity p = field->nearest(target->coords());
            if (p.inside)
                r.fail("target", "x_d lies inside obstacle " + std::to_string(p.index));
            else if (!(p.distance > planner.epsilon))
                r.fail("target", "target clearance: need d_U(x_d) > epsilon, got " + std::to_string(p.distance));
        }

        if (const json *seeds = r.child(doc, "", "seeds", false))
        {
            if (!seeds->is_array())
                r.fail("seeds", "expected an array");
            else
                for (std::size_t i = 0; i < seeds->size(); ++i)
                {
                    const std::string path = "seeds[" + std::to_string(i) + "]";
                    const json &s = (*seeds)[i];
                    const json *xj = r.child(s, path, "x", true);
                    if (!s.is_object())
                    {
                        r.fail(path, "expected an object");
                        continue;
                    }
                    std::optional<UnitPoint> x = xj ? r.point(*xj, path + ".x", m) : std::nullopt;
                    std::optional<Vector> v;
                    bool v_ok = true;
                    if (const json *vj = r.child(s, path, "v", false))
                    {
                        if (vj->is_string() && vj->get<std::string>() == "toward_unsafe")
                            v.reset();
                        else
                        {
                            v = r.vector(*vj, path + ".v", m);
                            v_ok = v.has_value();
                        }
                    }
                    if (!x || !v_ok)
                        continue;
                    if (field && field->contains(*x))
                        r.fail(path + ".x", "initial point lies inside the unsafe set");
                    sc.seeds.push_back({*x, v});
                }
        }

        if (const json *aj = r.child(doc, "", "attitude", false))
        {
            AttitudeSpec att;
            if (m != 4)
                r.fail("attitude", "attitude block requires dimension 3 (unit quaternions)");
            if (const json *in = r.child(*aj, "attitude", "inertia", false))
            {
                if (!in->is_array() || in->size() != 3)
                    r.fail("attitude.inertia", "expected a 3x3 array");
                else
                {
                    bool ok = true;
                    for (int i = 0; i < 3; ++i)
                        if (auto row = r.vector((*in)[i], "attitude.inertia[" + std::to_string(i) + "]", 3))
                            att.inertia.row(i) = row->transpose();
                        else
                            ok = false;
                    if (ok)
                    {
                        try
                        {
                            InertiaMatrix check(att.inertia);
                        }
                        catch (const Error &e)
                        {
                            r.fail("attitude.inertia", e.what());
                        }
                    }
                }
            }
            if (const json *q = r.child(*aj, "attitude", "quaternion_mode", false))
            {
                if (q->is_boolean())
                    att.quaternion_mode = q->get<bool>();
                else
                    r.fail("attitude.quaternion_mode", "expected a boolean");
            }
            if (const json *init = r.child(*aj, "attitude", "initial", false))
            {
                if (const json *q = r.child(*init, "attitude.initial", "quaternion", true))
                    if (auto qp = r.point(*q, "attitude.initial.quaternion", 4))
                        att.initial_quaternion = *qp;
                if (const json *w = r.child(*init, "attitude.initial", "omega", false))
                    if (auto wv = r.vector(*w, "attitude.initial.omega", 3))
                        att.initial_omega = Vector3((*wv)(0), (*wv)(1), (*wv)(2));
                if (field && m == 4 && field->contains(att.initial_quaternion))
                    r.fail("attitude.initial.quaternion", "initial attitude lies inside the unsafe set");
            }
            att.horizon = r.number_or(*aj, "attitude", "horizon", att.horizon);
            if (!(att.horizon > 0.0))
                r.fail("attitude.horizon", "must be positive");
            sc.attitude = att;
        }

        if (!r.errors.empty())
            throw ScenarioError(ErrorKind::Validation, r.errors);
        sc.loop = ClosedLoop{planner, ctrl, std::move(*field), variant};
        sc.loop.planner.target = *target;
        return sc;
    }

    inline Scenario load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ScenarioError(ErrorKind::Input, {path + ": cannot open file"});
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str());
    }

    /// Initial states of the scenario seeds, resolving the toward-unsafe convention.
    inline std::vector<SimState> resolve_seeds(const Scenario &sc)
    {
        std::vector<SimState> out;
        for (const auto &s : sc.seeds)
            out.push_back({s.x, s.v ? *s.v : velocity_toward_unsafe_set(sc.loop.field, s.x)});
        return out;
    }

    /// Random initial states: x uniform on the free space (rejection sampling
    /// of the uniform measure on S^n), v with uniform direction in R^{n+1} and
    /// norm uniform in [0, max_speed].
    inline std::vector<SimState> random_seeds(const ClosedLoop &loop, int count, std::uint64_t seed,
                                              double max_speed = 2.0)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int m = loop.ambient_dim();
        auto gaussian = [&]
        {
            Vector g(m);
            for (int i = 0; i < m; ++i)
                g(i) = normal(rng);
            return g;
        };
        std::vector<SimState> out;
        while (static_cast<int>(out.size()) < count)
        {
            const UnitPoint x(gaussian());
            if (loop.field.contains(x) || loop.field.nearest(x.coords()).distance <= 0.0)
                continue;
            const Vector dir = gaussian().normalized();
            out.push_back({x, max_speed * unit(rng) * dir});
        }
        return out;
    }

    inline RigidBodyState attitude_initial_state(const AttitudeSpec &a)
    {
        return RigidBodyState{a.initial_quaternion, a.initial_omega};
    }

} // namespace spherectl

#endif // SPHERECTL_SCENARIO_HPP

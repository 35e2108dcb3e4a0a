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

#ifndef SPHERECTL_TEST_SUPPORT_HPP
#define SPHERECTL_TEST_SUPPORT_HPP

#include <random>
#include <string>

#include "spherectl/spherectl.hpp"

namespace spherectl::testing
{

    inline std::string scenario_path(const std::string &name)
    {
        return std::string(SPHERECTL_SCENARIO_DIR) + "/" + name;
    }

    inline const Scenario &six_star()
    {
        static const Scenario sc = load_scenario(scenario_path("s2_six_star.json"));
        return sc;
    }

    inline const Scenario &attitude_scenario()
    {
        static const Scenario sc = load_scenario(scenario_path("s3_attitude.json"));
        return sc;
    }

    /// Hand-rolled generators for property tests.
    class Gen
    {
    public:
        explicit Gen(std::uint64_t seed) : rng_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

        Vector gaussian(int m)
        {
            std::normal_distribution<double> n(0.0, 1.0);
            Vector v(m);
            for (int i = 0; i < m; ++i)
                v(i) = n(rng_);
            return v;
        }

        UnitPoint point(int m) { return UnitPoint(gaussian(m)); }

        Vector tangent(const UnitPoint &x) { return project_vec(x.coords(), gaussian(x.ambient_dim())); }

        std::mt19937_64 &engine() { return rng_; }

    private:
        std::mt19937_64 rng_;
    };

    /// Free-space point of the field.
    inline UnitPoint free_point(Gen &g, const ObstacleField &field, int m, double min_distance = 0.0)
    {
        for (;;)
        {
            const UnitPoint x = g.point(m);
            if (field.contains(x))
                continue;
            if (field.nearest(x.coords()).distance > min_distance)
                return x;
        }
    }

} // namespace spherectl::testing

#endif // SPHERECTL_TEST_SUPPORT_HPP

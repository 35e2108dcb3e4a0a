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

#ifndef SPHERECTL_GEOMETRY_HPP
#define SPHERECTL_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "spherectl/errors.hpp"

namespace spherectl
{

    /// Largest supported ambient dimension n+1. Vectors and matrices below are
    /// stack allocated up to this size, which keeps the integrator hot path
    /// free of heap traffic.
    inline constexpr int kMaxAmbientDim = 16;

    using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxAmbientDim, 1>;
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                 kMaxAmbientDim, kMaxAmbientDim>;

    inline constexpr double kPi = std::numbers::pi;

    /// A point on S^n embedded in R^{n+1}. Construction normalizes; the stored
    /// coordinates always have unit norm to within 1e-12.
    class UnitPoint
    {
    public:
        static constexpr double kMinNorm = 1e-8;

        UnitPoint() = default;

        explicit UnitPoint(const Vector &coords)
        {
            if (coords.size() < 2 || coords.size() > kMaxAmbientDim)
                throw Error(ErrorKind::Input, "UnitPoint needs 2.." + std::to_string(kMaxAmbientDim) +
                                                  " coordinates, got " + std::to_string(coords.size()));
            const double norm = coords.norm();
            if (!std::isfinite(norm) || norm < kMinNorm)
                throw Error(ErrorKind::Input, "UnitPoint direction undefined (norm " + std::to_string(norm) + ")");
            coords_ = coords / norm;
        }

        UnitPoint(std::initializer_list<double> values)
            : UnitPoint(from_list(values)) {}

        /// Basis vector e_k of R^{ambient_dim}.
        static UnitPoint basis(int ambient_dim, int k)
        {
            Vector e = Vector::Zero(ambient_dim);
            e(k) = 1.0;
            return UnitPoint(e);
        }

        const Vector &coords() const noexcept { return coords_; }
        int ambient_dim() const noexcept { return static_cast<int>(coords_.size()); }
        int manifold_dim() const noexcept { return ambient_dim() - 1; }
        double operator()(int i) const { return coords_(i); }

        UnitPoint operator-() const
        {
            UnitPoint p;
            p.coords_ = -coords_;
            return p;
        }

    private:
        static Vector from_list(std::initializer_list<double> values)
        {
            Vector v(static_cast<Eigen::Index>(values.size()));
            Eigen::Index i = 0;
            for (double value : values)
                v(i++) = value;
            return v;
        }

        Vector coords_;
    };

    /// A vector in T_x S^n together with its base point.
    struct TangentVector
    {
        UnitPoint base;
        Vector vec;

        double norm() const { return vec.norm(); }
    };

    inline void require_same_dim(const UnitPoint &x, const Vector &v, const char *what)
    {
        if (v.size() != x.ambient_dim())
            throw Error(ErrorKind::Input, std::string(what) + ": dimension mismatch (" +
                                              std::to_string(v.size()) + " vs " +
                                              std::to_string(x.ambient_dim()) + ")");
    }

    /// P(x) = I - x x^T.
    inline Matrix projector(const UnitPoint &x)
    {
        const Vector &c = x.coords();
        return Matrix::Identity(c.size(), c.size()) - c * c.transpose();
    }

    /// (I - x x^T) v without forming the matrix.
    inline Vector project_vec(const Vector &x, const Vector &v)
    {
        return v - x * x.dot(v);
    }

    inline TangentVector project(const UnitPoint &x, const Vector &v)
    {
        require_same_dim(x, v, "project");
        return TangentVector{x, project_vec(x.coords(), v)};
    }

    /// Angle between two unit vectors in [0, pi]. Uses 2*atan2(|a-b|, |a+b|),
    /// which stays accurate near 0 and pi where arccos of the dot product
    /// loses half the significant digits.
    inline double angle_between(const Vector &a, const Vector &b)
    {
        return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
    }

    inline double sphere_angle(const UnitPoint &a, const UnitPoint &b)
    {
        if (a.ambient_dim() != b.ambient_dim())
            throw Error(ErrorKind::Input, "sphere_angle: dimension mismatch");
        return angle_between(a.coords(), b.coords());
    }

    inline constexpr double kAntipodalMargin = 1e-9;
    inline constexpr double kCoincidentAngle = 1e-12;

    /// Point at fraction lambda along the minimizing great-circle arc from a to b.
    inline UnitPoint geodesic_point(const UnitPoint &a, const UnitPoint &b, double lambda)
    {
        const double theta = sphere_angle(a, b);
        if (theta > kPi - kAntipodalMargin)
            throw Error(ErrorKind::GeodesicUndefined, "endpoints are antipodal");
        if (theta < kCoincidentAngle)
            return a;
        const double s = std::sin(theta);
        const Vector g = (std::sin((1.0 - lambda) * theta) / s) * a.coords() +
                         (std::sin(lambda * theta) / s) * b.coords();
        return UnitPoint(g);
    }

    /// Orthonormal basis of T_x S^n as the columns of an (n+1) x n matrix.
    /// Deterministic in x: Householder reflection that maps e_0 onto +-x.
    inline Matrix tangent_basis(const UnitPoint &x)
    {
        const Vector &c = x.coords();
        const Eigen::Index m = c.size();
        Vector w = c;
        const double sign = c(0) >= 0.0 ? 1.0 : -1.0;
        w(0) += sign;
        const double wn2 = w.squaredNorm();
        Matrix h = Matrix::Identity(m, m) - (2.0 / wn2) * w * w.transpose();
        // Column 0 of h is -sign*x; the remaining columns span the tangent space.
        return h.rightCols(m - 1);
    }

    inline bool all_finite(const Vector &v)
    {
        return v.allFinite();
    }

} // namespace spherectl

#endif // SPHERECTL_GEOMETRY_HPP

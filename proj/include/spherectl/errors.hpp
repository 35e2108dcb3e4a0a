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

#ifndef SPHERECTL_ERRORS_HPP
#define SPHERECTL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spherectl
{

    /// Category of a library failure. Callers that need to branch (batch
    /// simulation, Newton starts) switch on this rather than on message text.
    enum class ErrorKind
    {
        Input,                // malformed argument, dimension mismatch
        GeodesicUndefined,    // antipodal endpoints
        InfeasibleState,      // state inside an obstacle
        ConfigurationInvalid, // e.g. two obstacles active in the same tube
        BoundaryContact,      // separation reached zero
        NearBoundaryJacobian, // sin(d) denominator too small
        DegenerateNormal,     // x coincides with its closest point
        NumericalBlowup,      // NaN or Inf in the state
        Precondition,         // caller violated an operation precondition
        Validation            // scenario/parameter validation failure
    };

    inline const char *to_string(ErrorKind kind)
    {
        switch (kind)
        {
        case ErrorKind::Input:
            return "input";
        case ErrorKind::GeodesicUndefined:
            return "geodesic-undefined";
        case ErrorKind::InfeasibleState:
            return "infeasible-state";
        case ErrorKind::ConfigurationInvalid:
            return "configuration-invalid";
        case ErrorKind::BoundaryContact:
            return "boundary-contact";
        case ErrorKind::NearBoundaryJacobian:
            return "near-boundary-jacobian";
        case ErrorKind::DegenerateNormal:
            return "degenerate-normal";
        case ErrorKind::NumericalBlowup:
            return "numerical-blowup";
        case ErrorKind::Precondition:
            return "precondition";
        case ErrorKind::Validation:
            return "validation";
        }
        return "unknown";
    }

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what)
            : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

} // namespace spherectl

#endif // SPHERECTL_ERRORS_HPP
